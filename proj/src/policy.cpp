#include "tfgrpo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "tfgrpo/errors.hpp"

namespace tfgrpo {

namespace {

// Raw logits for a feature set. Errors name the feature whose row introduced
// a non-finite value.
std::vector<double> sum_logits(const PolicyParams& params,
                               std::span<const std::uint32_t> features) {
  const std::size_t v = params.vocab_size();
  std::vector<double> logits(v, 0.0);
  for (std::uint32_t f : features) {
    const double* row = params.weights.data() + std::size_t(f) * v;
    for (std::size_t t = 0; t < v; ++t) {
      logits[t] += row[t];
    }
  }
  for (std::size_t t = 0; t < v; ++t) {
    if (!std::isfinite(logits[t])) {
      for (std::uint32_t f : features) {
        if (!std::isfinite(params.weight(f, static_cast<TokenId>(t)))) {
          throw NumericError("non-finite logit from feature " +
                             std::to_string(f) + " at token " +
                             std::to_string(t));
        }
      }
      throw NumericError("non-finite logit sum at token " + std::to_string(t));
    }
  }
  return logits;
}

void softmax_inplace(std::vector<double>& logits, double temperature) {
  double max_logit = -std::numeric_limits<double>::infinity();
  for (double& x : logits) {
    x /= temperature;
    max_logit = std::max(max_logit, x);
  }
  double z = 0.0;
  for (double& x : logits) {
    x = std::exp(x - max_logit);
    z += x;
  }
  for (double& x : logits) {
    x /= z;
  }
}

double entropy_of(std::span<const double> dist) {
  double h = 0.0;
  for (double p : dist) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_tokens(const PolicyParams& params, std::span<const TokenId> tokens,
                  const char* what) {
  for (TokenId t : tokens) {
    if (t >= params.vocab_size()) {
      throw DataError(std::string(what) + " token index out of range: " +
                      std::to_string(t));
    }
  }
}

}  // namespace

void PolicyParams::validate() const {
  if (!vocab) throw ConfigError("policy params missing vocabulary");
  featurizer.validate(vocab->size());
  const std::size_t expected = std::size_t(featurizer.hash_dim) * vocab->size();
  if (weights.size() != expected) {
    throw ConfigError("weight matrix has " + std::to_string(weights.size()) +
                      " entries, expected " + std::to_string(expected));
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw ConfigError("non-finite policy weight");
  }
}

PolicyParams PolicyParams::zeros(std::shared_ptr<const Vocabulary> vocab,
                                 const FeaturizerConfig& cfg) {
  cfg.validate(vocab->size());
  PolicyParams p;
  p.featurizer = cfg;
  p.weights.assign(std::size_t(cfg.hash_dim) * vocab->size(), 0.0);
  p.vocab = std::move(vocab);
  return p;
}

void SamplingConfig::validate() const {
  if (!(temperature > 0.0)) throw ConfigError("temperature must be > 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("top_p must be in (0, 1]");
  if (max_len < 1) throw ConfigError("max_len must be >= 1");
}

std::vector<double> token_distribution(const PolicyParams& params,
                                       std::span<const TokenId> prompt,
                                       std::span<const TokenId> prefix,
                                       double temperature) {
  if (!(temperature > 0.0)) throw ConfigError("temperature must be > 0");
  auto features = featurize(prompt, prefix, params.featurizer);
  auto logits = sum_logits(params, features);
  softmax_inplace(logits, temperature);
  return logits;
}

std::vector<TokenId> nucleus_set(std::span<const double> dist, double top_p) {
  std::vector<TokenId> order(dist.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](TokenId a, TokenId b) {
    if (dist[a] != dist[b]) return dist[a] > dist[b];
    return a < b;
  });
  std::vector<TokenId> nucleus;
  double cum = 0.0;
  for (TokenId t : order) {
    nucleus.push_back(t);
    cum += dist[t];
    if (cum >= top_p) break;
  }
  return nucleus;
}

Trajectory sample_rollout(const PolicyParams& params,
                          std::span<const TokenId> prompt,
                          const SamplingConfig& cfg) {
  cfg.validate();
  check_tokens(params, prompt, "prompt");
  const TokenId end = params.vocab->end_token();

  Trajectory traj;
  traj.prompt_tokens.assign(prompt.begin(), prompt.end());
  traj.seed = cfg.seed;
  std::mt19937_64 rng(cfg.seed);

  for (std::uint32_t step = 0; step < cfg.max_len; ++step) {
    auto features = featurize(prompt, traj.output_tokens, params.featurizer);
    auto logits = sum_logits(params, features);

    std::vector<double> base = logits;  // temperature-1 record
    softmax_inplace(base, 1.0);

    std::vector<double> dist = std::move(logits);
    softmax_inplace(dist, cfg.temperature);

    auto nucleus = nucleus_set(dist, cfg.top_p);
    double mass = 0.0;
    for (TokenId t : nucleus) mass += dist[t];

    const double u = u01(rng) * mass;
    double cum = 0.0;
    TokenId chosen = nucleus.back();
    for (TokenId t : nucleus) {
      cum += dist[t];
      if (u < cum) {
        chosen = t;
        break;
      }
    }

    traj.output_tokens.push_back(chosen);
    traj.logprobs.push_back(std::log(base[chosen]));
    traj.entropies.push_back(entropy_of(base));
    if (chosen == end) {
      return traj;
    }
  }
  traj.truncated = true;
  return traj;
}

LogProbs logprob_of(const PolicyParams& params,
                    std::span<const TokenId> prompt,
                    std::span<const TokenId> output) {
  if (output.empty()) throw DataError("logprob_of requires a nonempty output");
  check_tokens(params, prompt, "prompt");
  check_tokens(params, output, "output");

  LogProbs result;
  result.per_token.reserve(output.size());
  for (std::size_t t = 0; t < output.size(); ++t) {
    auto dist = token_distribution(params, prompt, output.subspan(0, t), 1.0);
    double lp = std::log(dist[output[t]]);
    result.per_token.push_back(lp);
    result.total += lp;
  }
  return result;
}

std::vector<double> entropy_profile(const PolicyParams& params,
                                    std::span<const TokenId> prompt,
                                    std::span<const TokenId> output) {
  if (output.empty()) throw DataError("entropy_profile requires a nonempty output");
  check_tokens(params, prompt, "prompt");
  check_tokens(params, output, "output");

  std::vector<double> profile;
  profile.reserve(output.size());
  for (std::size_t t = 0; t < output.size(); ++t) {
    auto dist = token_distribution(params, prompt, output.subspan(0, t), 1.0);
    profile.push_back(entropy_of(dist));
  }
  return profile;
}

GradBuffer::GradBuffer(std::size_t hash_dim, std::size_t vocab_size)
    : dim_(hash_dim),
      vocab_(vocab_size),
      values_(hash_dim * vocab_size, 0.0),
      row_touched_(hash_dim, 0) {}

void GradBuffer::add(std::uint32_t feature, TokenId token, double value) {
  if (!row_touched_[feature]) {
    row_touched_[feature] = 1;
    touched_.push_back(feature);
  }
  values_[std::size_t(feature) * vocab_ + token] += value;
}

void GradBuffer::reset() {
  for (std::uint32_t f : touched_) {
    std::fill_n(values_.begin() + std::size_t(f) * vocab_, vocab_, 0.0);
    row_touched_[f] = 0;
  }
  touched_.clear();
}

void GradBuffer::apply(std::vector<double>& weights, double scale) const {
  for (std::uint32_t f : touched_) {
    const std::size_t base = std::size_t(f) * vocab_;
    for (std::size_t t = 0; t < vocab_; ++t) {
      weights[base + t] += scale * values_[base + t];
    }
  }
}

void accumulate_grad_logprob(const PolicyParams& params,
                             std::span<const TokenId> prompt,
                             std::span<const TokenId> output,
                             double scale,
                             GradBuffer& grad) {
  if (output.empty()) throw DataError("grad_logprob requires a nonempty output");
  check_tokens(params, prompt, "prompt");
  check_tokens(params, output, "output");

  const std::size_t v = params.vocab_size();
  for (std::size_t t = 0; t < output.size(); ++t) {
    auto features = featurize(prompt, output.subspan(0, t), params.featurizer);
    auto dist = token_distribution(params, prompt, output.subspan(0, t), 1.0);
    for (std::uint32_t f : features) {
      for (std::size_t u = 0; u < v; ++u) {
        const double indicator = (u == output[t]) ? 1.0 : 0.0;
        grad.add(f, static_cast<TokenId>(u), scale * (indicator - dist[u]));
      }
    }
  }
}

namespace {

constexpr std::uint32_t kCheckpointMagic = 0x43474654u;  // "TFGC"
constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw DataError("truncated checkpoint");
  return value;
}

}  // namespace

void save_checkpoint(const PolicyParams& params, const std::string& path) {
  params.validate();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot open checkpoint for writing: " + path);

  write_pod(os, kCheckpointMagic);
  write_pod(os, kCheckpointVersion);
  write_pod(os, static_cast<std::uint32_t>(params.vocab->size()));
  for (std::size_t i = 0; i < params.vocab->size(); ++i) {
    const std::string& s = params.vocab->symbol(static_cast<TokenId>(i));
    write_pod(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  write_pod(os, params.featurizer.context_window);
  write_pod(os, params.featurizer.hash_dim);
  write_pod(os, params.featurizer.prompt_feature_count);
  write_pod(os, static_cast<std::uint64_t>(params.weights.size()));
  os.write(reinterpret_cast<const char*>(params.weights.data()),
           static_cast<std::streamsize>(params.weights.size() * sizeof(double)));
  if (!os) throw DataError("failed writing checkpoint: " + path);
}

PolicyParams load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint: " + path);

  if (read_pod<std::uint32_t>(is) != kCheckpointMagic) {
    throw DataError("not a policy checkpoint: " + path);
  }
  const auto version = read_pod<std::uint32_t>(is);
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version: " + std::to_string(version));
  }
  const auto vocab_count = read_pod<std::uint32_t>(is);
  std::vector<std::string> symbols;
  symbols.reserve(vocab_count);
  for (std::uint32_t i = 0; i < vocab_count; ++i) {
    const auto len = read_pod<std::uint32_t>(is);
    std::string s(len, '\0');
    is.read(s.data(), len);
    if (!is) throw DataError("truncated checkpoint");
    symbols.push_back(std::move(s));
  }

  PolicyParams params;
  params.featurizer.context_window = read_pod<std::uint32_t>(is);
  params.featurizer.hash_dim = read_pod<std::uint32_t>(is);
  params.featurizer.prompt_feature_count = read_pod<std::uint32_t>(is);
  const auto weight_count = read_pod<std::uint64_t>(is);
  params.weights.resize(weight_count);
  is.read(reinterpret_cast<char*>(params.weights.data()),
          static_cast<std::streamsize>(weight_count * sizeof(double)));
  if (!is) throw DataError("truncated checkpoint");

  params.vocab = std::make_shared<Vocabulary>(std::move(symbols));
  params.validate();
  return params;
}

}  // namespace tfgrpo
