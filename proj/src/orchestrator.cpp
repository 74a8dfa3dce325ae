#include "bestofn/orchestrator.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

#include "bestofn/error.hpp"
#include "bestofn/log.hpp"
#include "bestofn/metrics.hpp"

namespace bestofn {

void RunConfig::validate() const {
    generator.validate();
    if (generator.role != Role::generator)
        raise(ErrorCode::invalid_argument, "run config generator endpoint must have the generator role");
    verifier.validate();
    params.validate();
    if (n_max < 1) raise(ErrorCode::invalid_argument, "n_max must be at least 1");
    if (concurrency < 1) raise(ErrorCode::invalid_argument, "concurrency must be at least 1");
}

std::vector<Candidate> sample_pool(const RunConfig& config, const PromptRecord& prompt,
                                   RunStore& store, Budget* budget) {
    config.validate();
    prompt.validate();

    std::vector<Candidate> pool(static_cast<std::size_t>(config.n_max));
    std::vector<int> missing;
    for (int i = 0; i < config.n_max; ++i) {
        if (auto existing = store.find_candidate(prompt.id, i)) {
            pool[static_cast<std::size_t>(i)] = std::move(*existing);
        } else {
            missing.push_back(i);
        }
    }

    struct Failure {
        int index;
        std::string message;
    };
    std::vector<Failure> failures;
    std::mutex failures_mu;

    GenerationRequest request{prompt.text, config.params, /*logprobs_requested=*/true};
    parallel_for(missing.size(), config.concurrency, [&](std::size_t slot) {
        const int index = missing[slot];
        try {
            Budget::Lease lease(budget);
            Candidate candidate = generate(config.generator, request);
            candidate.prompt_id = prompt.id;
            candidate.index = index;
            store.put_candidate(candidate);
            pool[static_cast<std::size_t>(index)] = std::move(candidate);
        } catch (const Error& e) {
            std::lock_guard<std::mutex> lock(failures_mu);
            failures.push_back({index, e.what()});
        }
    });

    if (!failures.empty()) {
        std::sort(failures.begin(), failures.end(), [](const Failure& a, const Failure& b) { return a.index < b.index; });
        std::ostringstream oss;
        oss << "pool for prompt '" << prompt.id << "' is missing indices:";
        for (const Failure& f : failures) oss << ' ' << f.index;
        oss << "; first failure: " << failures.front().message;
        raise(ErrorCode::pool_incomplete, oss.str());
    }
    return pool;
}

SelectionResult select_with_verifier(const RunConfig& config, const PromptRecord& prompt,
                                     std::span<const Candidate> pool, int n, ScoreCache* cache,
                                     Budget* budget) {
    config.validate();
    const std::vector<Candidate> prefix = prefix_pool(pool, n);
    const PoolScores scored =
        score_pool(config.verifier, prompt, prefix, config.concurrency, cache, budget);

    std::vector<VerifierScore> packed;
    std::vector<int> candidate_indices;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (scored.by_candidate[i]) {
            packed.push_back(*scored.by_candidate[i]);
            candidate_indices.push_back(prefix[i].index);
        }
    }
    // packed preserves index order, so select_best's first-index tie-break
    // maps straight back to the earliest-generated candidate
    const std::size_t winner = select_best(packed);
    const int chosen_index = candidate_indices[winner];

    SelectionResult result;
    result.prompt_id = prompt.id;
    result.n_used = n;
    result.chosen_index = chosen_index;
    for (const Candidate& c : prefix) {
        if (c.index == chosen_index) result.chosen_text = c.text;
    }
    result.scores = std::move(packed);
    result.verifier_kind = config.verifier.kind;
    return result;
}

Candidate baseline_sample(const RunConfig& config, const PromptRecord& prompt, int draw,
                          RunStore& store, Budget* budget) {
    config.validate();
    prompt.validate();
    if (draw < 0) raise(ErrorCode::invalid_argument, "baseline draw must be nonnegative");

    if (auto existing = store.find_baseline(prompt.id, draw)) {
        LOG_DEBUG("baseline draw " << draw << " for prompt '" << prompt.id << "' resumed from store");
        return *existing;
    }

    GenerationRequest request{prompt.text, config.params, /*logprobs_requested=*/true};
    Budget::Lease lease(budget);
    Candidate candidate = generate(config.generator, request);
    candidate.prompt_id = prompt.id;
    candidate.index = draw;
    store.put_baseline(candidate, draw);
    return candidate;
}

} // namespace bestofn
