#include "bestofn/types.hpp"

#include <algorithm>
#include <cctype>

namespace bestofn {

const char* verifier_kind_name(VerifierKind kind) noexcept {
    return kind == VerifierKind::perplexity ? "perplexity" : "reward";
}

VerifierKind verifier_kind_from_name(const std::string& name) {
    if (name == "perplexity") return VerifierKind::perplexity;
    if (name == "reward") return VerifierKind::reward;
    raise(ErrorCode::invalid_argument, "unknown verifier kind '" + name + "'");
}

namespace {

bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

} // namespace

void PromptRecord::validate() const {
    if (id.empty()) raise(ErrorCode::invalid_argument, "prompt id must be nonempty");
    if (language.empty()) raise(ErrorCode::invalid_argument, "prompt '" + id + "' has empty language");
    if (blank(text)) raise(ErrorCode::invalid_argument, "prompt '" + id + "' has blank text");
}

void SamplingParams::validate() const {
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
        raise(ErrorCode::invalid_argument, "temperature must be a nonnegative finite real");
    if (!(top_p > 0.0 && top_p <= 1.0))
        raise(ErrorCode::invalid_argument, "top_p must lie in (0,1]");
    if (max_tokens <= 0) raise(ErrorCode::invalid_argument, "max_tokens must be positive");
}

void Candidate::validate() const {
    if (prompt_id.empty()) raise(ErrorCode::invalid_argument, "candidate has empty prompt_id");
    if (index < 0) raise(ErrorCode::invalid_argument, "candidate index must be nonnegative");
    for (double lp : token_logprobs) {
        if (!std::isfinite(lp)) raise(ErrorCode::non_finite_logprob, "candidate logprob is not finite");
        if (lp > 0.0) raise(ErrorCode::positive_logprob, "candidate logprob is positive");
    }
    if (text.empty() && !token_logprobs.empty())
        raise(ErrorCode::invalid_argument, "candidate text may be empty only when token_logprobs is empty");
    params.validate();
}

VerifierScore VerifierScore::perplexity(double value) {
    if (!std::isfinite(value)) raise(ErrorCode::invalid_argument, "perplexity score must be finite");
    if (!(value > 0.0)) raise(ErrorCode::invalid_argument, "perplexity score must be positive");
    return VerifierScore(VerifierKind::perplexity, value, ScoreOrientation::lower_better);
}

VerifierScore VerifierScore::reward(double value) {
    if (!std::isfinite(value)) raise(ErrorCode::invalid_argument, "reward score must be finite");
    return VerifierScore(VerifierKind::reward, value, ScoreOrientation::higher_better);
}

const char* judge_pass_name(JudgePass pass) noexcept {
    switch (pass) {
        case JudgePass::A: return "A";
        case JudgePass::B: return "B";
        case JudgePass::C: return "C";
        default: return "unparseable";
    }
}

JudgePass judge_pass_from_name(const std::string& name) {
    if (name == "A") return JudgePass::A;
    if (name == "B") return JudgePass::B;
    if (name == "C") return JudgePass::C;
    if (name == "unparseable") return JudgePass::unparseable;
    raise(ErrorCode::invalid_argument, "unknown judge pass '" + name + "'");
}

const char* outcome_name(Outcome outcome) noexcept {
    switch (outcome) {
        case Outcome::win: return "win";
        case Outcome::loss: return "loss";
        default: return "tie";
    }
}

JudgeVerdict JudgeVerdict::from_passes(std::string prompt_id, JudgePass first, JudgePass second,
                                       std::string judge_model) {
    Outcome outcome = Outcome::tie;
    if (first == JudgePass::A && second == JudgePass::B) outcome = Outcome::win;
    if (first == JudgePass::B && second == JudgePass::A) outcome = Outcome::loss;
    return JudgeVerdict{std::move(prompt_id), outcome, first, second, std::move(judge_model)};
}

} // namespace bestofn
