#include "bestofn/judge_prompt.hpp"

#include "bestofn/error.hpp"
#include "bestofn/hash.hpp"

namespace bestofn {

namespace {

// Must stay byte-identical to assets/judge_template_v1.txt (tested).
const char* const kTemplateV1 =
    R"(You are an impartial judge comparing two AI assistant responses to the same user question.
Decide which response answers the question better, weighing helpfulness, relevance,
accuracy, depth, and fluency in the language of the question. Do not let the order in
which the responses appear, or their length, influence your decision.

[Question]
{question}

[Response A]
{answer_first}

[Response B]
{answer_second}

Compare both responses, then end your reply with exactly one verdict tag on its own line:
[[A]] if Response A is better, [[B]] if Response B is better, or [[C]] for a tie.
)";

std::string replace_once(std::string text, const std::string& slot, const std::string& value) {
    const auto pos = text.find(slot);
    if (pos == std::string::npos)
        raise(ErrorCode::invalid_argument, "judge template is missing slot " + slot);
    text.replace(pos, slot.size(), value);
    return text;
}

} // namespace

const std::string& judge_template_text() {
    static const std::string text = kTemplateV1;
    return text;
}

const char* judge_template_version() { return "v1"; }

const std::string& judge_template_hash() {
    static const std::string hash = to_hex(fnv1a64(judge_template_text()));
    return hash;
}

std::string render_judge_prompt(const std::string& question, const std::string& answer_first,
                                const std::string& answer_second) {
    std::string prompt = judge_template_text();
    prompt = replace_once(std::move(prompt), "{question}", question);
    prompt = replace_once(std::move(prompt), "{answer_first}", answer_first);
    prompt = replace_once(std::move(prompt), "{answer_second}", answer_second);
    return prompt;
}

} // namespace bestofn
