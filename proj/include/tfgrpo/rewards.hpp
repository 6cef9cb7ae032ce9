#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tfgrpo::rewards {

enum class TfLabel : char { T = 'T', F = 'F' };

enum class Violation {
  MissingOpenTag,
  MissingCloseTag,
  DuplicateTag,
  TrailingContent,
  Truncated,
};

const char* violation_name(Violation v);

/// Result of parsing a generated response against the think/answer template.
/// well_formed iff the text is exactly one <think>...</think> followed by
/// exactly one <answer>...</answer> with only whitespace outside the spans.
struct ParsedOutput {
  bool well_formed = false;
  std::optional<std::string> think_text;
  std::optional<std::string> answer_text;
  std::vector<Violation> diagnostics;
};

struct GoldAnswer {
  enum class Kind { TFQ, MCQ };
  Kind kind = Kind::TFQ;
  std::vector<TfLabel> tfq_labels;  // TFQ: nonempty, ordered
  char mcq_option = 'A';            // MCQ: one of A-D

  void validate() const;
};

enum class GradingMode { Strict, Fractional };

struct RewardConfig {
  double alpha = 0.5;  // weight of the accuracy component
  GradingMode grading_mode = GradingMode::Strict;
  // Format component values: well-formed 1.0, malformed 0.0.

  void validate() const;
};

struct RewardBreakdown {
  double r_acc = 0.0;
  double r_format = 0.0;
  double r_total = 0.0;
};

/// Never errors; malformed input yields well_formed=false with diagnostics.
/// `truncated` marks responses cut off at the generation budget; they are
/// unparseable by definition.
ParsedOutput parse_structured_output(const std::string& text,
                                     bool truncated = false);

/// Canonical re-serialization of parsed spans. parse(render(t, a))
/// reproduces (t, a) for tag-free spans.
std::string render_structured_output(const std::string& think_text,
                                     const std::string& answer_text);

/// Normalization: tokens split on commas/whitespace; t/true -> T and
/// f/false -> F case-insensitively; anything else counts as a wrong
/// position. Strict mode requires an exact label-list match (length and
/// order); fractional mode scores position-wise matches over |gold|, with
/// missing positions counted wrong.
double grade_tfq(const std::string& answer_text, const GoldAnswer& gold,
                 GradingMode mode);

/// 1 iff the first standalone option letter (A-D, case-insensitive,
/// optionally parenthesized) in answer_text equals gold.mcq_option.
double grade_mcq(const std::string& answer_text, const GoldAnswer& gold);

/// Composite reward: r_total = alpha * r_acc + (1 - alpha) * r_format.
/// Malformed outputs forfeit the accuracy component entirely.
RewardBreakdown combine_reward(const ParsedOutput& parsed,
                               const GoldAnswer& gold,
                               const RewardConfig& cfg);

}  // namespace tfgrpo::rewards
