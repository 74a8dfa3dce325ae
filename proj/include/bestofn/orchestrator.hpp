#pragma once

#include <span>
#include <string>
#include <vector>

#include "bestofn/client.hpp"
#include "bestofn/parallel.hpp"
#include "bestofn/run_store.hpp"
#include "bestofn/types.hpp"
#include "bestofn/verifier.hpp"

namespace bestofn {

struct RunConfig {
    BackendEndpoint generator;
    VerifierConfig verifier;
    int n_max = 100;
    int concurrency = 32;
    SamplingParams params;
    std::string run_id;

    void validate() const;
};

struct SelectionResult {
    std::string prompt_id;
    int n_used = 1;
    int chosen_index = 0;
    std::string chosen_text;
    std::vector<VerifierScore> scores;  // successfully scored candidates, index order
    VerifierKind verifier_kind = VerifierKind::perplexity;
};

// Fans out n_max generation requests (at most `concurrency` in flight,
// plus the shared budget when supplied), persisting each candidate as it
// lands. Candidate index = dispatch order, fixed before any response
// arrives. Re-running against a warm store only requests missing indices.
// Throws PoolIncomplete naming the indices that failed permanently;
// successful candidates stay persisted so a retry fills only the gaps.
std::vector<Candidate> sample_pool(const RunConfig& config, const PromptRecord& prompt,
                                   RunStore& store, Budget* budget = nullptr);

// Scores prefix_pool(pool, n) and picks the select_best winner among the
// successfully scored candidates. Deterministic given the pool and a
// deterministic scorer.
SelectionResult select_with_verifier(const RunConfig& config, const PromptRecord& prompt,
                                     std::span<const Candidate> pool, int n,
                                     ScoreCache* cache = nullptr, Budget* budget = nullptr);

// One independent single-sample generation outside the pool, keyed by its
// draw ordinal. Resumes from the store without issuing a duplicate request.
Candidate baseline_sample(const RunConfig& config, const PromptRecord& prompt, int draw,
                          RunStore& store, Budget* budget = nullptr);

} // namespace bestofn
