#include "tfgrpo/vocab.hpp"

#include <array>
#include <cctype>

#include "tfgrpo/errors.hpp"

namespace tfgrpo {

namespace {

constexpr std::array<const char*, 11> kMarkerSymbols = {
    "<think>", "</think>", "<answer>", "</answer>", "T", "F",
    "A",       "B",        "C",        "D",         "END",
};

bool is_split_punct(char c) {
  return c == ',' || c == '.' || c == ':' || c == '(' || c == ')' || c == ';';
}

}  // namespace

const char* Vocabulary::marker_symbol(Marker m) {
  return kMarkerSymbols[static_cast<std::size_t>(m)];
}

Vocabulary::Vocabulary(std::vector<std::string> symbols)
    : symbols_(std::move(symbols)) {
  if (symbols_.empty()) {
    throw DataError("vocabulary must be nonempty");
  }
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    auto [it, inserted] = index_.emplace(symbols_[i], static_cast<TokenId>(i));
    if (!inserted) {
      throw DataError("duplicate vocabulary symbol: " + symbols_[i]);
    }
  }
  for (std::size_t m = 0; m < kMarkerSymbols.size(); ++m) {
    auto it = index_.find(kMarkerSymbols[m]);
    if (it != index_.end()) {
      markers_[m] = it->second;
    }
  }
  auto end = markers_[static_cast<std::size_t>(Marker::End)];
  if (!end.has_value()) {
    throw DataError("vocabulary must contain the END symbol");
  }
  end_token_ = *end;
}

const std::string& Vocabulary::symbol(TokenId id) const {
  if (id >= symbols_.size()) {
    throw DataError("token id out of range: " + std::to_string(id));
  }
  return symbols_[id];
}

std::optional<TokenId> Vocabulary::find(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  return it == index_.end() ? std::nullopt : std::make_optional(it->second);
}

TokenId Vocabulary::require(std::string_view symbol) const {
  auto id = find(symbol);
  if (!id.has_value()) {
    throw DataError("symbol not in vocabulary: " + std::string(symbol));
  }
  return *id;
}

std::optional<TokenId> Vocabulary::marker(Marker m) const {
  return markers_[static_cast<std::size_t>(m)];
}

TokenId Vocabulary::require_marker(Marker m) const {
  auto id = marker(m);
  if (!id.has_value()) {
    throw DataError(std::string("marker not in vocabulary: ") + marker_symbol(m));
  }
  return *id;
}

std::vector<TokenId> Vocabulary::tokenize(std::string_view text) const {
  std::vector<TokenId> out;
  std::string word;
  auto flush_word = [&] {
    if (!word.empty()) {
      out.push_back(require(word));
      word.clear();
    }
  };
  for (std::size_t i = 0; i < text.size();) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush_word();
      ++i;
      continue;
    }
    if (c == '<') {
      bool matched = false;
      for (std::size_t m = 0; m < 4; ++m) {
        std::string_view tag = kMarkerSymbols[m];
        if (text.substr(i, tag.size()) == tag) {
          flush_word();
          out.push_back(require(tag));
          i += tag.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    if (is_split_punct(c)) {
      flush_word();
      out.push_back(require(std::string_view(&c, 1)));
      ++i;
      continue;
    }
    word.push_back(c);
    ++i;
  }
  flush_word();
  return out;
}

std::string Vocabulary::detokenize(std::span<const TokenId> tokens) const {
  std::string out;
  for (TokenId t : tokens) {
    if (t == end_token_) continue;
    if (!out.empty()) out.push_back(' ');
    out += symbol(t);
  }
  return out;
}

}  // namespace tfgrpo
