#include "bestofn/verifier.hpp"

#include <cmath>

#include "bestofn/error.hpp"
#include "bestofn/hash.hpp"
#include "bestofn/log.hpp"

namespace bestofn {

void VerifierConfig::validate() const {
    endpoint.validate();
    if (kind == VerifierKind::perplexity && endpoint.role != Role::logprob_scorer)
        raise(ErrorCode::invalid_argument, "perplexity verifier requires a logprob_scorer endpoint");
    if (kind == VerifierKind::reward && endpoint.role != Role::reward_scorer)
        raise(ErrorCode::invalid_argument, "reward verifier requires a reward_scorer endpoint");
}

std::string VerifierConfig::fingerprint() const {
    return HashBuilder{}
        .field(std::string_view(verifier_kind_name(kind)))
        .field(std::string_view(endpoint.model_name))
        .field(static_cast<std::uint64_t>(condition_on_prompt ? 1 : 0))
        .hex();
}

double perplexity_from_logprobs(std::span<const double> token_logprobs) {
    if (token_logprobs.empty())
        raise(ErrorCode::empty_token_sequence, "perplexity over zero tokens is undefined");
    double sum = 0.0;
    for (double lp : token_logprobs) {
        if (!std::isfinite(lp)) raise(ErrorCode::non_finite_logprob, "logprob is not finite");
        if (lp > 0.0) raise(ErrorCode::positive_logprob, "logprob exceeds 0");
        sum += lp;
    }
    return std::exp(-sum / static_cast<double>(token_logprobs.size()));
}

VerifierScore score_candidate(const VerifierConfig& config, const PromptRecord& prompt,
                              const Candidate& candidate) {
    config.validate();
    if (candidate.text.empty() && candidate.token_logprobs.empty())
        raise(ErrorCode::empty_candidate,
              "candidate " + std::to_string(candidate.index) + " of prompt '" + candidate.prompt_id +
                  "' has neither text nor logprobs");

    if (config.kind == VerifierKind::perplexity) {
        if (!config.condition_on_prompt && !candidate.token_logprobs.empty())
            return VerifierScore::perplexity(perplexity_from_logprobs(candidate.token_logprobs));
        const auto context =
            config.condition_on_prompt ? std::optional<std::string>(prompt.text) : std::nullopt;
        const std::vector<double> logprobs = score_logprobs(config.endpoint, candidate.text, context);
        return VerifierScore::perplexity(perplexity_from_logprobs(logprobs));
    }
    return VerifierScore::reward(score_reward(config.endpoint, prompt.text, candidate.text));
}

PoolScores score_pool(const VerifierConfig& config, const PromptRecord& prompt,
                      std::span<const Candidate> pool, int concurrency, ScoreCache* cache,
                      Budget* budget) {
    if (pool.empty()) raise(ErrorCode::empty_pool, "cannot score an empty pool");
    config.validate();
    const std::string fp = config.fingerprint();

    PoolScores result;
    result.by_candidate.resize(pool.size());
    std::mutex failures_mu;

    parallel_for(pool.size(), std::max(1, concurrency), [&](std::size_t i) {
        const Candidate& candidate = pool[i];
        try {
            if (cache) {
                if (auto hit = cache->find_score(prompt.id, candidate.index, fp)) {
                    result.by_candidate[i] = config.kind == VerifierKind::perplexity
                                                 ? VerifierScore::perplexity(*hit)
                                                 : VerifierScore::reward(*hit);
                    return;
                }
            }
            Budget::Lease lease(budget);
            const VerifierScore score = score_candidate(config, prompt, candidate);
            result.by_candidate[i] = score;
            if (cache) cache->put_score(prompt.id, candidate.index, fp, score);
        } catch (const Error& e) {
            LOG_WARN("scoring failed for prompt '" << prompt.id << "' candidate " << candidate.index
                                                   << ": " << e.what());
            std::lock_guard<std::mutex> lock(failures_mu);
            result.failures.push_back({candidate.index, e.what()});
        }
    });

    bool any = false;
    for (const auto& s : result.by_candidate) any = any || s.has_value();
    if (!any)
        raise(ErrorCode::all_candidates_failed,
              "every candidate of prompt '" + prompt.id + "' failed scoring");
    return result;
}

} // namespace bestofn
