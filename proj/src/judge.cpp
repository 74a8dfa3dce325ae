#include "bestofn/judge.hpp"

#include <set>

#include "bestofn/error.hpp"
#include "bestofn/judge_prompt.hpp"
#include "bestofn/log.hpp"
#include "bestofn/metrics.hpp"

namespace bestofn {

void Comparison::validate() const {
    prompt.validate();
    if (treatment_text.empty()) raise(ErrorCode::invalid_argument, "comparison treatment text is empty");
    if (baseline_text.empty()) raise(ErrorCode::invalid_argument, "comparison baseline text is empty");
    if (n < 1) raise(ErrorCode::invalid_argument, "comparison n must be positive");
}

JudgeClient::JudgeClient(BackendEndpoint endpoint, RunStore* store)
    : endpoint_(std::move(endpoint)), store_(store) {
    endpoint_.validate();
    if (endpoint_.role != Role::judge)
        raise(ErrorCode::invalid_argument, "JudgeClient requires a judge endpoint");
}

JudgePass JudgeClient::cached_pass(const std::string& question, const std::string& first,
                                   const std::string& second) {
    const std::string key =
        RunStore::judge_pass_key(judge_template_hash(), endpoint_.model_name, question, first, second);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = local_cache_.find(key);
        if (it != local_cache_.end()) return it->second;
    }
    if (store_) {
        if (auto hit = store_->find_judge_pass(key)) {
            std::lock_guard<std::mutex> lock(mu_);
            local_cache_[key] = *hit;
            return *hit;
        }
    }

    JudgePass pass;
    try {
        pass = judge_once(endpoint_, question, first, second);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::unparseable_verdict) throw;
        LOG_WARN("judge reply had no verdict marker; counting the pass as unparseable");
        pass = JudgePass::unparseable;
    }
    {
        std::lock_guard<std::mutex> lock(mu_);
        local_cache_[key] = pass;
    }
    if (store_) store_->put_judge_pass(key, pass);
    return pass;
}

JudgeVerdict JudgeClient::judge_pair(const Comparison& comparison) {
    comparison.validate();
    const JudgePass first = cached_pass(comparison.prompt.text, comparison.treatment_text,
                                        comparison.baseline_text);
    const JudgePass second = cached_pass(comparison.prompt.text, comparison.baseline_text,
                                         comparison.treatment_text);
    return JudgeVerdict::from_passes(comparison.prompt.id, first, second, endpoint_.model_name);
}

JudgeVerdict judge_pair(const BackendEndpoint& endpoint, const Comparison& comparison) {
    JudgeClient client(endpoint);
    return client.judge_pair(comparison);
}

namespace {

DeltaReport judge_selections(JudgeClient& judge, std::span<const SelectionResult> selections,
                             const std::map<std::string, Candidate>& baselines,
                             const std::map<std::string, PromptRecord>& prompts, int concurrency,
                             Budget* budget, int baseline_draw, bool cross_model,
                             std::vector<JudgeVerdict>* verdicts_out) {
    if (selections.empty()) raise(ErrorCode::empty_verdict_set, "no selections to evaluate");

    std::set<std::string> seen;
    for (const SelectionResult& sel : selections) {
        if (!seen.insert(sel.prompt_id).second)
            raise(ErrorCode::invalid_argument, "prompt '" + sel.prompt_id + "' appears in two selections");
        if (!baselines.count(sel.prompt_id))
            raise(ErrorCode::missing_baseline, "no baseline for prompt '" + sel.prompt_id + "'");
        if (!prompts.count(sel.prompt_id))
            raise(ErrorCode::missing_prompt, "no prompt record for '" + sel.prompt_id + "'");
    }

    std::vector<JudgeVerdict> verdicts(selections.size());
    parallel_for(selections.size(), std::max(1, concurrency), [&](std::size_t i) {
        const SelectionResult& sel = selections[i];
        const PromptRecord& prompt = prompts.at(sel.prompt_id);
        const Candidate& baseline = baselines.at(sel.prompt_id);

        Comparison cmp{prompt, sel.chosen_text, baseline.text, sel.n_used, sel.verifier_kind};

        RunStore* store = judge.store();
        if (store) {
            auto existing =
                store->find_verdict(sel.prompt_id, sel.n_used, baseline_draw, sel.verifier_kind, cross_model);
            if (existing && existing->treatment_text == sel.chosen_text &&
                existing->baseline_text == baseline.text) {
                verdicts[i] = existing->verdict;
                return;
            }
        }

        Budget::Lease lease(budget);
        JudgeVerdict verdict = judge.judge_pair(cmp);
        verdicts[i] = verdict;
        if (store) {
            VerdictRecord record;
            record.n = sel.n_used;
            record.baseline_draw = baseline_draw;
            record.cross_model = cross_model;
            record.verifier_kind = sel.verifier_kind;
            record.treatment_index = cross_model ? -1 : sel.chosen_index;
            record.treatment_text = sel.chosen_text;
            record.baseline_text = baseline.text;
            record.verdict = verdict;
            store->put_verdict(sel.prompt_id, record);
        }
    });

    std::map<std::string, std::string> languages;
    for (const auto& [id, p] : prompts) languages[id] = p.language;
    if (verdicts_out) *verdicts_out = verdicts;
    return compute_delta(verdicts, languages, selections.front().n_used,
                         selections.front().verifier_kind, cross_model);
}

} // namespace

DeltaReport evaluate_run(JudgeClient& judge, std::span<const SelectionResult> selections,
                         const std::map<std::string, Candidate>& baselines,
                         const std::map<std::string, PromptRecord>& prompts, int concurrency,
                         Budget* budget, int baseline_draw, std::vector<JudgeVerdict>* verdicts_out) {
    return judge_selections(judge, selections, baselines, prompts, concurrency, budget, baseline_draw,
                            /*cross_model=*/false, verdicts_out);
}

DeltaReport compare_models(JudgeClient& judge, std::span<const SelectionResult> treatment_selections,
                           const std::map<std::string, Candidate>& baseline_candidates,
                           const std::map<std::string, PromptRecord>& prompts, int concurrency,
                           Budget* budget) {
    return judge_selections(judge, treatment_selections, baseline_candidates, prompts, concurrency,
                            budget, /*baseline_draw=*/0, /*cross_model=*/true, nullptr);
}

} // namespace bestofn
