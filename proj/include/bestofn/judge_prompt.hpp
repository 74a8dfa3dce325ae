#pragma once

#include <string>

namespace bestofn {

// The fixed pairwise judge prompt. The text is versioned and shipped as
// assets/judge_template_v1.txt; its hash goes into every report so runs
// judged with different templates can never be silently mixed.
const std::string& judge_template_text();
const char* judge_template_version();
const std::string& judge_template_hash();

std::string render_judge_prompt(const std::string& question, const std::string& answer_first,
                                const std::string& answer_second);

} // namespace bestofn
