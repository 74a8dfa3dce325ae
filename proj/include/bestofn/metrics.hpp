#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bestofn/types.hpp"

namespace bestofn {

// Aggregates verdicts into per-language win/loss/tie percentages and the
// unweighted cross-language mean delta. Every verdict's prompt_id must be
// present in `prompt_languages`.
DeltaReport compute_delta(std::span<const JudgeVerdict> verdicts,
                          const std::map<std::string, std::string>& prompt_languages,
                          int n = 1, VerifierKind verifier_kind = VerifierKind::perplexity,
                          bool cross_model = false);

// Index of the extremal score: argmin for lower_better, argmax for
// higher_better. Ties go to the lowest index. All scores must share one kind.
std::size_t select_best(std::span<const VerifierScore> scores);

// The first-n slice of a pool (candidates with index < n), so every grid
// point of a sweep evaluates a nested subset of one sample set.
std::vector<Candidate> prefix_pool(std::span<const Candidate> pool, int n);

} // namespace bestofn
