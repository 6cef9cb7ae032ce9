#include "tfgrpo/featurizer.hpp"

#include <algorithm>

#include "tfgrpo/errors.hpp"

namespace tfgrpo {

void FeaturizerConfig::validate(std::size_t vocab_size) const {
  if (context_window < 1) {
    throw ConfigError("featurizer context_window must be >= 1");
  }
  if (hash_dim < vocab_size) {
    throw ConfigError("featurizer hash_dim must be >= vocabulary size");
  }
}

namespace feat {

namespace {

// Stream tags keep the feature groups in disjoint hash streams.
constexpr std::uint64_t kTagNgram = 0x6e6772616d5f3031ull;
constexpr std::uint64_t kTagPromptSum = 0x7073756d5f303234ull;
constexpr std::uint64_t kTagPromptPos = 0x70706f735f303234ull;
constexpr std::uint64_t kTagPromptCross = 0x70637273735f3031ull;
constexpr std::uint64_t kTagDigest = 0x6469676573745f30ull;

std::uint64_t chain(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ (v + 0x9e3779b97f4a7c15ull));
}

std::uint64_t chain_tokens(std::uint64_t h, std::span<const TokenId> tokens) {
  for (TokenId t : tokens) {
    h = chain(h, static_cast<std::uint64_t>(t) + 1);
  }
  return h;
}

std::uint32_t reduce(std::uint64_t h, const FeaturizerConfig& cfg) {
  return static_cast<std::uint32_t>(h % cfg.hash_dim);
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t digest(std::span<const TokenId> tokens) {
  return chain_tokens(kTagDigest, tokens);
}

std::uint32_t ngram_index(const FeaturizerConfig& cfg,
                          std::span<const TokenId> window) {
  std::uint64_t h = chain(kTagNgram, window.size());
  return reduce(chain_tokens(h, window), cfg);
}

std::uint32_t prompt_summary_index(const FeaturizerConfig& cfg,
                                   std::uint32_t slot,
                                   std::uint64_t prompt_digest) {
  std::uint64_t h = chain(kTagPromptSum, slot);
  return reduce(chain(h, prompt_digest), cfg);
}

std::uint32_t prompt_position_index(const FeaturizerConfig& cfg,
                                    std::size_t prefix_len,
                                    std::uint64_t prompt_digest) {
  std::uint64_t h = chain(kTagPromptPos, prefix_len);
  return reduce(chain(h, prompt_digest), cfg);
}

std::uint32_t prompt_cross_index(const FeaturizerConfig& cfg,
                                 std::span<const TokenId> window,
                                 std::uint64_t prompt_digest) {
  std::uint64_t h = chain(kTagPromptCross, window.size());
  h = chain_tokens(h, window);
  return reduce(chain(h, prompt_digest), cfg);
}

}  // namespace feat

std::vector<std::uint32_t> featurize(std::span<const TokenId> prompt,
                                     std::span<const TokenId> prefix,
                                     const FeaturizerConfig& cfg) {
  const std::size_t k = cfg.context_window;

  // Trailing window of BOS || prompt || prefix, most recent last.
  std::vector<TokenId> window;
  window.reserve(k);
  {
    std::size_t need = k;
    std::size_t from_prefix = std::min(need, prefix.size());
    std::size_t from_prompt = std::min(need - from_prefix, prompt.size());
    bool bos = (from_prefix + from_prompt) < need;
    if (bos) window.push_back(kBosToken);
    for (std::size_t i = prompt.size() - from_prompt; i < prompt.size(); ++i) {
      window.push_back(prompt[i]);
    }
    for (std::size_t i = prefix.size() - from_prefix; i < prefix.size(); ++i) {
      window.push_back(prefix[i]);
    }
  }

  std::vector<std::uint32_t> out;
  out.reserve(2 * k + cfg.prompt_feature_count + 1);
  for (std::size_t n = 1; n <= window.size(); ++n) {
    std::span<const TokenId> w(window.data() + window.size() - n, n);
    out.push_back(feat::ngram_index(cfg, w));
  }

  if (!prompt.empty() && cfg.prompt_feature_count > 0) {
    const std::uint64_t pd = feat::digest(prompt);
    for (std::uint32_t j = 0; j < cfg.prompt_feature_count; ++j) {
      out.push_back(feat::prompt_summary_index(cfg, j, pd));
    }
    out.push_back(feat::prompt_position_index(cfg, prefix.size(), pd));
    for (std::size_t n = 1; n <= window.size(); ++n) {
      std::span<const TokenId> w(window.data() + window.size() - n, n);
      out.push_back(feat::prompt_cross_index(cfg, w, pd));
    }
  }

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace tfgrpo
