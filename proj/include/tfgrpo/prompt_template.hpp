#pragma once

namespace tfgrpo {

// Canonical training template. The text is stored in token-normal form
// (single spaces between symbols, punctuation split out) so that rendered
// prompts embed it verbatim. The same asset ships as
// assets/tfq_prompt_template.txt; graders and the prompt renderer both
// reference these constants.
inline constexpr const char* kPromptTemplateVersion = "tfq-template-v1";

inline constexpr const char* kPromptSystemText =
    "Please according to the image , and try to answer the following "
    "true-false questions with the option T ( True ) or F ( False ) . "
    "First , describe the image , then analyze the image implication , "
    "and finally reason to get the answer . Output the thinking process in "
    "<think> </think> and the final correct answer in <answer> </answer> "
    "tags . The output format should be as follows : "
    "<think> . . . </think> <answer> . . . </answer> .";

inline constexpr const char* kPromptUserPrefix = "True-false questions :";

}  // namespace tfgrpo
