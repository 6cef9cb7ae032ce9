#include "tfgrpo/rewards.hpp"

#include <algorithm>
#include <cctype>

#include "tfgrpo/errors.hpp"

namespace tfgrpo::rewards {

namespace {

constexpr const char* kThinkOpen = "<think>";
constexpr const char* kThinkClose = "</think>";
constexpr const char* kAnswerOpen = "<answer>";
constexpr const char* kAnswerClose = "</answer>";

std::vector<std::size_t> find_all(const std::string& text,
                                  const std::string& needle) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    out.push_back(pos);
    pos += needle.size();
  }
  return out;
}

bool whitespace_only(const std::string& text, std::size_t begin,
                     std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    if (!std::isspace(static_cast<unsigned char>(text[i]))) return false;
  }
  return true;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// 'T', 'F', or 0 for unnormalizable tokens.
char normalize_label_token(const std::string& token) {
  std::string t = lowercase(token);
  if (t == "t" || t == "true") return 'T';
  if (t == "f" || t == "false") return 'F';
  return 0;
}

std::vector<std::string> split_answer_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!cur.empty()) {
        tokens.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

}  // namespace

const char* violation_name(Violation v) {
  switch (v) {
    case Violation::MissingOpenTag: return "missing-open-tag";
    case Violation::MissingCloseTag: return "missing-close-tag";
    case Violation::DuplicateTag: return "duplicate-tag";
    case Violation::TrailingContent: return "trailing-content";
    case Violation::Truncated: return "truncated";
  }
  return "unknown";
}

void GoldAnswer::validate() const {
  if (kind == Kind::TFQ) {
    if (tfq_labels.empty()) throw DataError("TFQ gold answer must be nonempty");
  } else {
    if (mcq_option < 'A' || mcq_option > 'D') {
      throw DataError("MCQ gold option must be one of A-D");
    }
  }
}

void RewardConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("reward alpha must be in [0, 1]");
  }
}

ParsedOutput parse_structured_output(const std::string& text, bool truncated) {
  ParsedOutput out;

  const auto think_opens = find_all(text, kThinkOpen);
  const auto think_closes = find_all(text, kThinkClose);
  const auto answer_opens = find_all(text, kAnswerOpen);
  const auto answer_closes = find_all(text, kAnswerClose);

  auto check_pair = [&](const std::vector<std::size_t>& opens,
                        const std::vector<std::size_t>& closes) {
    if (opens.empty()) out.diagnostics.push_back(Violation::MissingOpenTag);
    if (closes.empty()) out.diagnostics.push_back(Violation::MissingCloseTag);
    if (opens.size() > 1 || closes.size() > 1) {
      out.diagnostics.push_back(Violation::DuplicateTag);
    }
  };
  check_pair(think_opens, think_closes);
  check_pair(answer_opens, answer_closes);

  // Extract spans whenever a unique open/close pair exists in order.
  if (think_opens.size() == 1 && think_closes.size() == 1 &&
      think_opens[0] < think_closes[0]) {
    std::size_t begin = think_opens[0] + std::string(kThinkOpen).size();
    out.think_text = text.substr(begin, think_closes[0] - begin);
  }
  if (answer_opens.size() == 1 && answer_closes.size() == 1 &&
      answer_opens[0] < answer_closes[0]) {
    std::size_t begin = answer_opens[0] + std::string(kAnswerOpen).size();
    out.answer_text = text.substr(begin, answer_closes[0] - begin);
  }

  bool structure_ok = out.diagnostics.empty();
  if (structure_ok) {
    const std::size_t to = think_opens[0];
    const std::size_t tc = think_closes[0];
    const std::size_t ao = answer_opens[0];
    const std::size_t ac = answer_closes[0];
    const bool ordered = to < tc && tc < ao && ao < ac;
    bool outside_clean = false;
    if (ordered) {
      outside_clean =
          whitespace_only(text, 0, to) &&
          whitespace_only(text, tc + std::string(kThinkClose).size(), ao) &&
          whitespace_only(text, ac + std::string(kAnswerClose).size(),
                          text.size());
    }
    if (!ordered || !outside_clean) {
      out.diagnostics.push_back(Violation::TrailingContent);
      structure_ok = false;
    }
  }

  if (truncated) {
    out.diagnostics.push_back(Violation::Truncated);
  }

  out.well_formed = structure_ok && !truncated;
  return out;
}

std::string render_structured_output(const std::string& think_text,
                                     const std::string& answer_text) {
  return std::string(kThinkOpen) + think_text + kThinkClose + " " +
         kAnswerOpen + answer_text + kAnswerClose;
}

double grade_tfq(const std::string& answer_text, const GoldAnswer& gold,
                 GradingMode mode) {
  if (gold.kind != GoldAnswer::Kind::TFQ) {
    throw DataError("grade_tfq requires a TFQ gold answer");
  }
  gold.validate();

  const auto tokens = split_answer_tokens(answer_text);
  const std::size_t n = gold.tfq_labels.size();

  std::size_t matches = 0;
  for (std::size_t i = 0; i < std::min(tokens.size(), n); ++i) {
    const char got = normalize_label_token(tokens[i]);
    if (got != 0 && got == static_cast<char>(gold.tfq_labels[i])) {
      ++matches;
    }
  }

  if (mode == GradingMode::Strict) {
    return (tokens.size() == n && matches == n) ? 1.0 : 0.0;
  }
  return static_cast<double>(matches) / static_cast<double>(n);
}

double grade_mcq(const std::string& answer_text, const GoldAnswer& gold) {
  if (gold.kind != GoldAnswer::Kind::MCQ) {
    throw DataError("grade_mcq requires an MCQ gold answer");
  }
  gold.validate();

  // First standalone alphanumeric run that is a single option letter wins.
  std::string run;
  auto is_option = [](const std::string& r) {
    if (r.size() != 1) return false;
    const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(r[0])));
    return u >= 'A' && u <= 'D';
  };
  for (char c : answer_text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      run.push_back(c);
    } else if (!run.empty()) {
      if (is_option(run)) {
        const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(run[0])));
        return u == gold.mcq_option ? 1.0 : 0.0;
      }
      run.clear();
    }
  }
  if (is_option(run)) {
    const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(run[0])));
    return u == gold.mcq_option ? 1.0 : 0.0;
  }
  return 0.0;
}

RewardBreakdown combine_reward(const ParsedOutput& parsed,
                               const GoldAnswer& gold,
                               const RewardConfig& cfg) {
  cfg.validate();
  RewardBreakdown out;
  out.r_format = parsed.well_formed ? 1.0 : 0.0;
  if (parsed.well_formed && parsed.answer_text.has_value()) {
    out.r_acc = gold.kind == GoldAnswer::Kind::TFQ
                    ? grade_tfq(*parsed.answer_text, gold, cfg.grading_mode)
                    : grade_mcq(*parsed.answer_text, gold);
  }
  out.r_total = cfg.alpha * out.r_acc + (1.0 - cfg.alpha) * out.r_format;
  return out;
}

}  // namespace tfgrpo::rewards
