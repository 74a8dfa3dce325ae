#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bestofn/types.hpp"
#include "bestofn/verifier.hpp"

namespace bestofn {

// One persisted judge comparison, self-contained enough to rebuild the
// judge-call cache and to re-derive selections offline.
struct VerdictRecord {
    int n = 1;
    int baseline_draw = 0;
    bool cross_model = false;
    VerifierKind verifier_kind = VerifierKind::perplexity;
    int treatment_index = -1;  // chosen candidate index; -1 when not pool-derived
    std::string treatment_text;
    std::string baseline_text;
    JudgeVerdict verdict;
};

struct ScoreRecord {
    std::string prompt_id;
    int candidate_index = 0;
    std::string verifier_fingerprint;
    VerifierKind kind = VerifierKind::perplexity;
    double value = 0.0;
};

// Append-only line-delimited run state: prompts.jsonl, candidates.jsonl,
// baselines.jsonl, scores.jsonl, verdicts.jsonl (+ meta.json). Everything a
// sweep produced can be re-derived or resumed from these files without
// touching a backend. A torn final line (crash mid-append) is ignored on
// load; corruption anywhere else is an error.
class RunStore : public ScoreCache {
public:
    explicit RunStore(std::filesystem::path dir);

    const std::filesystem::path& dir() const noexcept { return dir_; }

    // Fingerprint guard: a store only ever serves one configuration.
    void bind_fingerprint(const std::string& fingerprint);
    std::optional<std::string> fingerprint() const;
    bool has_records() const;

    void put_prompt(const PromptRecord& prompt);
    std::vector<PromptRecord> prompts() const;

    void put_candidate(const Candidate& candidate);
    std::optional<Candidate> find_candidate(const std::string& prompt_id, int index) const;
    std::vector<Candidate> pool(const std::string& prompt_id) const;  // sorted by index

    void put_baseline(const Candidate& candidate, int draw);
    std::optional<Candidate> find_baseline(const std::string& prompt_id, int draw) const;

    // ScoreCache
    std::optional<double> find_score(const std::string& prompt_id, int candidate_index,
                                     const std::string& verifier_fingerprint) override;
    void put_score(const std::string& prompt_id, int candidate_index,
                   const std::string& verifier_fingerprint, const VerifierScore& score) override;
    std::vector<ScoreRecord> scores_for(const std::string& prompt_id,
                                        const std::string& verifier_fingerprint) const;

    void put_verdict(const std::string& prompt_id, const VerdictRecord& record);
    std::optional<VerdictRecord> find_verdict(const std::string& prompt_id, int n, int draw,
                                              VerifierKind kind, bool cross_model) const;
    std::vector<std::pair<std::string, VerdictRecord>> verdicts() const;

    // Judge pass cache, content-keyed. Entries persist via verdict rows.
    std::optional<JudgePass> find_judge_pass(const std::string& key) const;
    void put_judge_pass(const std::string& key, JudgePass pass);

    static std::string judge_pass_key(const std::string& template_hash, const std::string& judge_model,
                                      const std::string& question, const std::string& first,
                                      const std::string& second);

private:
    void load();
    void append(std::ofstream& file, const std::string& line);

    std::filesystem::path dir_;
    mutable std::mutex mu_;

    std::ofstream prompts_file_, candidates_file_, baselines_file_, scores_file_, verdicts_file_;

    std::map<std::string, PromptRecord> prompts_;
    std::map<std::pair<std::string, int>, Candidate> candidates_;
    std::map<std::pair<std::string, int>, Candidate> baselines_;
    std::map<std::string, double> scores_;  // key: prompt|index|fingerprint
    std::vector<ScoreRecord> score_rows_;
    std::map<std::string, VerdictRecord> verdicts_;  // key: prompt|n|draw|kind|cross
    std::vector<std::pair<std::string, VerdictRecord>> verdict_rows_;
    std::map<std::string, JudgePass> judge_passes_;
    std::optional<std::string> fingerprint_;
};

} // namespace bestofn
