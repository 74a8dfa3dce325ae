#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "bestofn/error.hpp"

namespace bestofn {

enum class VerifierKind { perplexity, reward };
enum class ScoreOrientation { lower_better, higher_better };

const char* verifier_kind_name(VerifierKind kind) noexcept;
VerifierKind verifier_kind_from_name(const std::string& name);

// One evaluation prompt. `language` is the tag deltas aggregate over;
// `dataset` distinguishes sources when files are concatenated.
struct PromptRecord {
    std::string id;
    std::string language;
    std::string text;
    std::string dataset;

    void validate() const;
};

struct SamplingParams {
    double temperature = 0.8;
    double top_p = 0.95;
    int max_tokens = 1024;

    void validate() const;
    bool operator==(const SamplingParams&) const = default;
};

// One sampled generation. `index` is the candidate's position in its pool,
// assigned by dispatch order; `token_logprobs` are natural-log and only
// present when the backend supplied them.
struct Candidate {
    std::string prompt_id;
    int index = 0;
    std::string text;
    std::vector<double> token_logprobs;
    SamplingParams params;
    std::string backend_model;

    void validate() const;
};

// A verifier's scalar judgment of one candidate. Construction rejects
// non-finite values and pins orientation to kind, so argmin/argmax code
// downstream never has to re-check either.
class VerifierScore {
public:
    static VerifierScore perplexity(double value);
    static VerifierScore reward(double value);

    VerifierKind kind() const noexcept { return kind_; }
    double value() const noexcept { return value_; }
    ScoreOrientation orientation() const noexcept { return orientation_; }

private:
    VerifierScore(VerifierKind kind, double value, ScoreOrientation orientation)
        : kind_(kind), value_(value), orientation_(orientation) {}

    VerifierKind kind_;
    double value_;
    ScoreOrientation orientation_;
};

// What one judge pass said about a (first, second) response pair.
// `unparseable` records a judge reply with no verdict marker.
enum class JudgePass { A, B, C, unparseable };
enum class Outcome { win, loss, tie };

const char* judge_pass_name(JudgePass pass) noexcept;
JudgePass judge_pass_from_name(const std::string& name);
const char* outcome_name(Outcome outcome) noexcept;

// Result of one position-debiased comparison: pass 1 saw (treatment,
// baseline), pass 2 saw the swap. Only swap-consistent preferences count.
struct JudgeVerdict {
    std::string prompt_id;
    Outcome outcome = Outcome::tie;
    JudgePass first_pass = JudgePass::C;
    JudgePass second_pass = JudgePass::C;
    std::string judge_model;

    // win iff pass1 = A and pass2 = B; loss iff pass1 = B and pass2 = A;
    // anything else (any C, disagreement, unparseable) is a tie.
    static JudgeVerdict from_passes(std::string prompt_id, JudgePass first, JudgePass second,
                                    std::string judge_model);

    bool has_unparseable_pass() const noexcept {
        return first_pass == JudgePass::unparseable || second_pass == JudgePass::unparseable;
    }
};

struct LanguageRates {
    double win_rate = 0.0;  // percentages in [0,100]
    double loss_rate = 0.0;
    double tie_rate = 0.0;
    double delta = 0.0;  // win_rate - loss_rate
    int verdicts = 0;    // carried so any reweighting stays possible downstream
};

// Win-minus-loss rates per language plus their unweighted mean.
struct DeltaReport {
    std::map<std::string, LanguageRates> per_language;
    double aggregate_delta = 0.0;
    int n = 1;
    VerifierKind verifier_kind = VerifierKind::perplexity;
    bool cross_model = false;       // set by compare_models
    int unparseable_passes = 0;     // judge malfunctions counted as ties
};

} // namespace bestofn
