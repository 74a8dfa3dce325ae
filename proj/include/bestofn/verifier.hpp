#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bestofn/client.hpp"
#include "bestofn/parallel.hpp"
#include "bestofn/types.hpp"

namespace bestofn {

// Which verifier scores candidates and through which endpoint. For
// perplexity, condition_on_prompt=false scores the response text alone;
// true conditions on the prompt (ablation flag).
struct VerifierConfig {
    VerifierKind kind = VerifierKind::perplexity;
    BackendEndpoint endpoint;
    bool condition_on_prompt = false;

    void validate() const;
    // identifies incompatible scorings in caches and fingerprints
    std::string fingerprint() const;
};

// exp(-mean(token_logprobs)): the geometric mean of inverse token
// probabilities. Lower is more fluent under the scoring model.
double perplexity_from_logprobs(std::span<const double> token_logprobs);

// Scores one candidate. Perplexity reuses stored generation logprobs when
// present and condition_on_prompt is false; otherwise it fetches them from
// the scorer endpoint. Reward always queries the reward endpoint.
VerifierScore score_candidate(const VerifierConfig& config, const PromptRecord& prompt,
                              const Candidate& candidate);

// Persisted lookup of previously computed score values, keyed by
// (prompt, candidate index, verifier fingerprint). Implemented by RunStore.
class ScoreCache {
public:
    virtual ~ScoreCache() = default;
    virtual std::optional<double> find_score(const std::string& prompt_id, int candidate_index,
                                             const std::string& verifier_fingerprint) = 0;
    virtual void put_score(const std::string& prompt_id, int candidate_index,
                           const std::string& verifier_fingerprint, const VerifierScore& score) = 0;
};

struct ScoreFailure {
    int candidate_index = 0;
    std::string message;
};

// Index-aligned with the scored pool; entries are disengaged for candidates
// whose scoring failed after retries (those are excluded from selection).
struct PoolScores {
    std::vector<std::optional<VerifierScore>> by_candidate;
    std::vector<ScoreFailure> failures;
};

PoolScores score_pool(const VerifierConfig& config, const PromptRecord& prompt,
                      std::span<const Candidate> pool, int concurrency = 1,
                      ScoreCache* cache = nullptr, Budget* budget = nullptr);

} // namespace bestofn
