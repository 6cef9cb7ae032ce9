#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tfgrpo/vocab.hpp"

namespace tfgrpo {

/// Configuration of the hashed context featurizer.
struct FeaturizerConfig {
  std::uint32_t context_window = 6;        // k: trailing tokens considered
  std::uint32_t hash_dim = 1u << 16;       // D: feature-space size
  std::uint32_t prompt_feature_count = 2;  // static prompt digest slots

  void validate(std::size_t vocab_size) const;  // throws ConfigError
};

/// Virtual begin-of-sequence token prepended to every context.
inline constexpr TokenId kBosToken = 0xFFFFFFFFu;

namespace feat {

std::uint64_t mix64(std::uint64_t x);

/// Order-sensitive digest of a token sequence.
std::uint64_t digest(std::span<const TokenId> tokens);

// Index builders for the individual feature groups. `window` is the trailing
// n-gram ending at the current position (over BOS || prompt || prefix).
std::uint32_t ngram_index(const FeaturizerConfig& cfg,
                          std::span<const TokenId> window);
std::uint32_t prompt_summary_index(const FeaturizerConfig& cfg,
                                   std::uint32_t slot,
                                   std::uint64_t prompt_digest);
std::uint32_t prompt_position_index(const FeaturizerConfig& cfg,
                                    std::size_t prefix_len,
                                    std::uint64_t prompt_digest);
std::uint32_t prompt_cross_index(const FeaturizerConfig& cfg,
                                 std::span<const TokenId> window,
                                 std::uint64_t prompt_digest);

}  // namespace feat

/// Active feature indices for the context (prompt || prefix), sorted and
/// deduplicated. The feature map:
///   - one n-gram feature per n in 1..k over the trailing window of
///     BOS || prompt || prefix (windows longer than the context are skipped,
///     so the empty context yields exactly the BOS unigram);
///   - when the prompt is nonempty and prompt_feature_count > 0, prompt
///     summary features: prompt_feature_count static digest slots, one
///     (prefix length x prompt) positional digest, and one
///     (trailing n-gram x prompt) crossed digest per n in 1..k.
/// No feature depends on prefix content more than k tokens from the end.
std::vector<std::uint32_t> featurize(std::span<const TokenId> prompt,
                                     std::span<const TokenId> prefix,
                                     const FeaturizerConfig& cfg);

}  // namespace tfgrpo
