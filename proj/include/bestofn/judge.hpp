#pragma once

#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "bestofn/client.hpp"
#include "bestofn/orchestrator.hpp"
#include "bestofn/parallel.hpp"
#include "bestofn/run_store.hpp"
#include "bestofn/types.hpp"

namespace bestofn {

// One head-to-head: the verifier-selected response against a baseline.
struct Comparison {
    PromptRecord prompt;
    std::string treatment_text;
    std::string baseline_text;
    int n = 1;
    VerifierKind verifier_kind = VerifierKind::perplexity;

    void validate() const;
};

// Judge endpoint plus a content-keyed cache of single passes, so sweeps
// re-judge identical (question, first, second) pairs at most once. With a
// RunStore attached the cache survives restarts via the verdict rows.
class JudgeClient {
public:
    explicit JudgeClient(BackendEndpoint endpoint, RunStore* store = nullptr);

    // Two passes with positions swapped; only swap-consistent preferences
    // become win/loss. An unparseable pass is recorded as such and the
    // verdict is a tie.
    JudgeVerdict judge_pair(const Comparison& comparison);

    const BackendEndpoint& endpoint() const noexcept { return endpoint_; }
    RunStore* store() const noexcept { return store_; }

private:
    JudgePass cached_pass(const std::string& question, const std::string& first,
                          const std::string& second);

    BackendEndpoint endpoint_;
    RunStore* store_;
    std::mutex mu_;
    std::map<std::string, JudgePass> local_cache_;
};

// Convenience form matching the one-shot contract.
JudgeVerdict judge_pair(const BackendEndpoint& endpoint, const Comparison& comparison);

// Store-aware judging step shared by evaluate_run and the sweep: reuses a
// persisted verdict when its texts still match, otherwise judges and
// persists a fresh record (both raw passes included).
JudgeVerdict judge_and_record(JudgeClient& judge, const Comparison& comparison, int treatment_index,
                              int baseline_draw, bool cross_model, Budget* budget = nullptr);

// Judges every selection against its baseline (draw 0 of the same
// generator) and aggregates into a DeltaReport. One verdict per prompt.
// With a store attached, existing verdict rows are reused and fresh ones
// persisted with both raw passes.
DeltaReport evaluate_run(JudgeClient& judge, std::span<const SelectionResult> selections,
                         const std::map<std::string, Candidate>& baselines,
                         const std::map<std::string, PromptRecord>& prompts, int concurrency = 1,
                         Budget* budget = nullptr, int baseline_draw = 0,
                         std::vector<JudgeVerdict>* verdicts_out = nullptr);

// Same mechanics with the baseline drawn from a different generator
// (e.g. a larger model, single-sampled); the report is tagged cross-model
// so a stronger baseline shows up as a negative delta.
DeltaReport compare_models(JudgeClient& judge, std::span<const SelectionResult> treatment_selections,
                           const std::map<std::string, Candidate>& baseline_candidates,
                           const std::map<std::string, PromptRecord>& prompts, int concurrency = 1,
                           Budget* budget = nullptr);

} // namespace bestofn
