#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tfgrpo/featurizer.hpp"
#include "tfgrpo/vocab.hpp"

namespace tfgrpo {

/// Linear-softmax policy: logits are sums of per-feature weight rows over the
/// active context features; the next-token distribution is
/// softmax(logits / temperature). Weights form a dense hash_dim x |V| matrix.
struct PolicyParams {
  std::shared_ptr<const Vocabulary> vocab;
  FeaturizerConfig featurizer;
  std::vector<double> weights;  // row-major, hash_dim rows of |V| entries

  std::size_t vocab_size() const { return vocab->size(); }
  double weight(std::uint32_t feature, TokenId token) const {
    return weights[std::size_t(feature) * vocab->size() + token];
  }
  double& weight(std::uint32_t feature, TokenId token) {
    return weights[std::size_t(feature) * vocab->size() + token];
  }

  void validate() const;  // throws ConfigError on shape/finiteness violations

  static PolicyParams zeros(std::shared_ptr<const Vocabulary> vocab,
                            const FeaturizerConfig& cfg);
};

struct SamplingConfig {
  double temperature = 1.0;
  double top_p = 1.0;
  std::uint32_t max_len = 32;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One sampled rollout. logprobs and entropies are recorded under the
/// untruncated temperature-1 distribution regardless of the sampling
/// configuration, so they are directly usable as old-policy log-probs.
struct Trajectory {
  std::vector<TokenId> prompt_tokens;
  std::vector<TokenId> output_tokens;  // ends at END unless truncated
  std::vector<double> logprobs;
  std::vector<double> entropies;
  std::uint64_t seed = 0;
  bool truncated = false;  // max_len reached without END
};

/// Next-token probabilities for the context (prompt || prefix).
std::vector<double> token_distribution(const PolicyParams& params,
                                       std::span<const TokenId> prompt,
                                       std::span<const TokenId> prefix,
                                       double temperature);

/// Nucleus of a distribution: the smallest prefix of probability-sorted
/// tokens (ties broken by token id) with cumulative mass >= top_p.
std::vector<TokenId> nucleus_set(std::span<const double> dist, double top_p);

Trajectory sample_rollout(const PolicyParams& params,
                          std::span<const TokenId> prompt,
                          const SamplingConfig& cfg);

struct LogProbs {
  std::vector<double> per_token;
  double total = 0.0;
};

/// Sum of ln p(token_t | context_t) under the temperature-1 distribution.
LogProbs logprob_of(const PolicyParams& params,
                    std::span<const TokenId> prompt,
                    std::span<const TokenId> output);

/// Shannon entropy (nats) of the temperature-1 distribution at each
/// generation position of `output`.
std::vector<double> entropy_profile(const PolicyParams& params,
                                    std::span<const TokenId> prompt,
                                    std::span<const TokenId> output);

/// Dense gradient accumulator matching the weight matrix shape. Only touched
/// rows are cleared on reset, so reuse across steps is cheap.
class GradBuffer {
 public:
  GradBuffer(std::size_t hash_dim, std::size_t vocab_size);

  void add(std::uint32_t feature, TokenId token, double value);
  double at(std::uint32_t feature, TokenId token) const {
    return values_[std::size_t(feature) * vocab_ + token];
  }
  void reset();

  /// weights[f][v] += scale * grad[f][v] over touched rows.
  void apply(std::vector<double>& weights, double scale) const;

  std::size_t hash_dim() const { return dim_; }
  std::size_t vocab_size() const { return vocab_; }
  std::span<const std::uint32_t> touched_rows() const { return touched_; }

 private:
  std::size_t dim_;
  std::size_t vocab_;
  std::vector<double> values_;
  std::vector<std::uint32_t> touched_;
  std::vector<std::uint8_t> row_touched_;
};

/// Accumulates scale * d/dW [ sum_t ln p(output_t | context_t) ] into grad.
/// For each position the active features receive (onehot(token) - p).
void accumulate_grad_logprob(const PolicyParams& params,
                             std::span<const TokenId> prompt,
                             std::span<const TokenId> output,
                             double scale,
                             GradBuffer& grad);

// Versioned checkpoint: format tag, vocabulary, featurizer config, weights.
// Round-trips are bit-exact.
void save_checkpoint(const PolicyParams& params, const std::string& path);
PolicyParams load_checkpoint(const std::string& path);

}  // namespace tfgrpo
