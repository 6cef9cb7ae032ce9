#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tfgrpo {

using TokenId = std::uint32_t;

/// Structural symbols with dedicated accessors. END is mandatory in every
/// vocabulary; the remaining markers are mandatory only for the task
/// vocabulary and optional in small test vocabularies.
enum class Marker {
  ThinkOpen,
  ThinkClose,
  AnswerOpen,
  AnswerClose,
  True,
  False,
  OptionA,
  OptionB,
  OptionC,
  OptionD,
  End,
};

/// Ordered list of distinct symbol strings. Token ids are positions in the
/// list. Text is mapped to ids by whitespace splitting plus splitting off
/// the four tag markers and single-character punctuation , . : ( ) ;
class Vocabulary {
 public:
  explicit Vocabulary(std::vector<std::string> symbols);

  std::size_t size() const { return symbols_.size(); }
  const std::string& symbol(TokenId id) const;
  std::optional<TokenId> find(std::string_view symbol) const;
  TokenId require(std::string_view symbol) const;  // throws DataError if absent

  std::optional<TokenId> marker(Marker m) const;
  TokenId require_marker(Marker m) const;
  TokenId end_token() const { return end_token_; }

  /// Splits text into known symbols; unknown symbols raise DataError.
  std::vector<TokenId> tokenize(std::string_view text) const;

  /// Joins symbols with single spaces. END tokens are structural and omitted.
  std::string detokenize(std::span<const TokenId> tokens) const;

  static const char* marker_symbol(Marker m);

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, TokenId> index_;
  std::optional<TokenId> markers_[11];
  TokenId end_token_ = 0;
};

}  // namespace tfgrpo
