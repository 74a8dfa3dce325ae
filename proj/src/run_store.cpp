#include "bestofn/run_store.hpp"

#include <sstream>

#include "json.hpp"

#include "bestofn/error.hpp"
#include "bestofn/hash.hpp"
#include "bestofn/judge_prompt.hpp"

namespace bestofn {

using nlohmann::json;

namespace {

json candidate_to_json(const Candidate& c) {
    return json{
        {"prompt_id", c.prompt_id},
        {"index", c.index},
        {"text", c.text},
        {"token_logprobs", c.token_logprobs},
        {"params",
         json{{"temperature", c.params.temperature}, {"top_p", c.params.top_p}, {"max_tokens", c.params.max_tokens}}},
        {"backend_model", c.backend_model},
    };
}

Candidate candidate_from_json(const json& j) {
    Candidate c;
    c.prompt_id = j.at("prompt_id").get<std::string>();
    c.index = j.at("index").get<int>();
    c.text = j.at("text").get<std::string>();
    c.token_logprobs = j.at("token_logprobs").get<std::vector<double>>();
    const json& p = j.at("params");
    c.params.temperature = p.at("temperature").get<double>();
    c.params.top_p = p.at("top_p").get<double>();
    c.params.max_tokens = p.at("max_tokens").get<int>();
    c.backend_model = j.at("backend_model").get<std::string>();
    return c;
}

std::string score_key(const std::string& prompt_id, int index, const std::string& fp) {
    return HashBuilder{}.field(std::string_view(prompt_id)).field(static_cast<std::uint64_t>(index)).field(std::string_view(fp)).hex();
}

std::string verdict_key(const std::string& prompt_id, int n, int draw, VerifierKind kind, bool cross) {
    std::ostringstream oss;
    oss << prompt_id << '|' << n << '|' << draw << '|' << verifier_kind_name(kind) << '|' << (cross ? 1 : 0);
    return oss.str();
}

// Reads one jsonl file, forgiving only a torn final line.
template <typename Fn>
void read_jsonl(const std::filesystem::path& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in.is_open()) return;
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        if (!line.empty()) lines.push_back(line);
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        json j = json::parse(lines[i], nullptr, false);
        if (j.is_discarded()) {
            if (i + 1 == lines.size()) return;  // interrupted append
            raise(ErrorCode::io_error, "corrupt record in " + path.string() + " at line " + std::to_string(i + 1));
        }
        fn(j);
    }
}

} // namespace

RunStore::RunStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) raise(ErrorCode::io_error, "cannot create run store at " + dir_.string() + ": " + ec.message());
    load();
    auto open_append = [&](std::ofstream& f, const char* name) {
        f.open(dir_ / name, std::ios::app);
        if (!f.is_open()) raise(ErrorCode::io_error, "cannot open " + (dir_ / name).string());
    };
    open_append(prompts_file_, "prompts.jsonl");
    open_append(candidates_file_, "candidates.jsonl");
    open_append(baselines_file_, "baselines.jsonl");
    open_append(scores_file_, "scores.jsonl");
    open_append(verdicts_file_, "verdicts.jsonl");
}

void RunStore::load() {
    read_jsonl(dir_ / "prompts.jsonl", [&](const json& j) {
        PromptRecord p{j.at("id").get<std::string>(), j.at("language").get<std::string>(),
                       j.at("text").get<std::string>(), j.at("dataset").get<std::string>()};
        prompts_[p.id] = p;
    });
    read_jsonl(dir_ / "candidates.jsonl", [&](const json& j) {
        Candidate c = candidate_from_json(j);
        candidates_[{c.prompt_id, c.index}] = std::move(c);
    });
    read_jsonl(dir_ / "baselines.jsonl", [&](const json& j) {
        const int draw = j.at("draw").get<int>();
        Candidate c = candidate_from_json(j.at("candidate"));
        baselines_[{c.prompt_id, draw}] = std::move(c);
    });
    read_jsonl(dir_ / "scores.jsonl", [&](const json& j) {
        ScoreRecord r;
        r.prompt_id = j.at("prompt_id").get<std::string>();
        r.candidate_index = j.at("candidate_index").get<int>();
        r.verifier_fingerprint = j.at("verifier_fingerprint").get<std::string>();
        r.kind = verifier_kind_from_name(j.at("kind").get<std::string>());
        r.value = j.at("value").get<double>();
        scores_[score_key(r.prompt_id, r.candidate_index, r.verifier_fingerprint)] = r.value;
        score_rows_.push_back(std::move(r));
    });
    read_jsonl(dir_ / "verdicts.jsonl", [&](const json& j) {
        const std::string prompt_id = j.at("prompt_id").get<std::string>();
        VerdictRecord r;
        r.n = j.at("n").get<int>();
        r.baseline_draw = j.at("baseline_draw").get<int>();
        r.cross_model = j.at("cross_model").get<bool>();
        r.verifier_kind = verifier_kind_from_name(j.at("verifier_kind").get<std::string>());
        r.treatment_index = j.at("treatment_index").get<int>();
        r.treatment_text = j.at("treatment_text").get<std::string>();
        r.baseline_text = j.at("baseline_text").get<std::string>();
        r.verdict.prompt_id = prompt_id;
        r.verdict.judge_model = j.at("judge_model").get<std::string>();
        r.verdict.first_pass = judge_pass_from_name(j.at("first_pass").get<std::string>());
        r.verdict.second_pass = judge_pass_from_name(j.at("second_pass").get<std::string>());
        r.verdict = JudgeVerdict::from_passes(prompt_id, r.verdict.first_pass, r.verdict.second_pass,
                                              r.verdict.judge_model);
        verdicts_[verdict_key(prompt_id, r.n, r.baseline_draw, r.verifier_kind, r.cross_model)] = r;
        verdict_rows_.emplace_back(prompt_id, r);

        // rebuild the content-keyed judge-pass cache from the stored pair
        auto prompt_it = prompts_.find(prompt_id);
        if (prompt_it != prompts_.end()) {
            const std::string& question = prompt_it->second.text;
            judge_passes_[judge_pass_key(judge_template_hash(), r.verdict.judge_model, question,
                                         r.treatment_text, r.baseline_text)] = r.verdict.first_pass;
            judge_passes_[judge_pass_key(judge_template_hash(), r.verdict.judge_model, question,
                                         r.baseline_text, r.treatment_text)] = r.verdict.second_pass;
        }
    });

    std::ifstream meta(dir_ / "meta.json");
    if (meta.is_open()) {
        json j = json::parse(meta, nullptr, false);
        if (j.is_discarded() || !j.contains("config_fingerprint"))
            raise(ErrorCode::io_error, "corrupt meta.json in " + dir_.string());
        fingerprint_ = j.at("config_fingerprint").get<std::string>();
    }
}

void RunStore::append(std::ofstream& file, const std::string& line) {
    file << line << '\n';
    file.flush();
    if (!file) raise(ErrorCode::io_error, "failed writing to run store at " + dir_.string());
}

void RunStore::bind_fingerprint(const std::string& fingerprint) {
    std::lock_guard<std::mutex> lock(mu_);
    if (fingerprint_) {
        if (*fingerprint_ != fingerprint)
            raise(ErrorCode::store_mismatch, "store at " + dir_.string() + " was built with fingerprint " +
                                                 *fingerprint_ + ", current config is " + fingerprint);
        return;
    }
    json meta{{"config_fingerprint", fingerprint},
              {"judge_template_version", judge_template_version()},
              {"judge_template_hash", judge_template_hash()}};
    std::ofstream out(dir_ / "meta.json");
    out << meta.dump(2) << '\n';
    if (!out) raise(ErrorCode::io_error, "failed writing meta.json in " + dir_.string());
    fingerprint_ = fingerprint;
}

std::optional<std::string> RunStore::fingerprint() const {
    std::lock_guard<std::mutex> lock(mu_);
    return fingerprint_;
}

bool RunStore::has_records() const {
    std::lock_guard<std::mutex> lock(mu_);
    return !candidates_.empty() || !baselines_.empty() || !verdicts_.empty() || !score_rows_.empty();
}

void RunStore::put_prompt(const PromptRecord& prompt) {
    prompt.validate();
    std::lock_guard<std::mutex> lock(mu_);
    if (prompts_.count(prompt.id)) return;
    prompts_[prompt.id] = prompt;
    append(prompts_file_, json{{"id", prompt.id},
                               {"language", prompt.language},
                               {"text", prompt.text},
                               {"dataset", prompt.dataset}}
                              .dump());
}

std::vector<PromptRecord> RunStore::prompts() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<PromptRecord> out;
    out.reserve(prompts_.size());
    for (const auto& [_, p] : prompts_) out.push_back(p);
    return out;
}

void RunStore::put_candidate(const Candidate& candidate) {
    candidate.validate();
    std::lock_guard<std::mutex> lock(mu_);
    candidates_[{candidate.prompt_id, candidate.index}] = candidate;
    append(candidates_file_, candidate_to_json(candidate).dump());
}

std::optional<Candidate> RunStore::find_candidate(const std::string& prompt_id, int index) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = candidates_.find({prompt_id, index});
    if (it == candidates_.end()) return std::nullopt;
    return it->second;
}

std::vector<Candidate> RunStore::pool(const std::string& prompt_id) const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<Candidate> out;
    for (auto it = candidates_.lower_bound({prompt_id, 0});
         it != candidates_.end() && it->first.first == prompt_id; ++it)
        out.push_back(it->second);
    return out;  // map order == index order
}

void RunStore::put_baseline(const Candidate& candidate, int draw) {
    candidate.validate();
    if (draw < 0) raise(ErrorCode::invalid_argument, "baseline draw must be nonnegative");
    std::lock_guard<std::mutex> lock(mu_);
    baselines_[{candidate.prompt_id, draw}] = candidate;
    append(baselines_file_, json{{"draw", draw}, {"candidate", candidate_to_json(candidate)}}.dump());
}

std::optional<Candidate> RunStore::find_baseline(const std::string& prompt_id, int draw) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = baselines_.find({prompt_id, draw});
    if (it == baselines_.end()) return std::nullopt;
    return it->second;
}

std::optional<double> RunStore::find_score(const std::string& prompt_id, int candidate_index,
                                           const std::string& verifier_fingerprint) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = scores_.find(score_key(prompt_id, candidate_index, verifier_fingerprint));
    if (it == scores_.end()) return std::nullopt;
    return it->second;
}

void RunStore::put_score(const std::string& prompt_id, int candidate_index,
                         const std::string& verifier_fingerprint, const VerifierScore& score) {
    std::lock_guard<std::mutex> lock(mu_);
    const std::string key = score_key(prompt_id, candidate_index, verifier_fingerprint);
    if (scores_.count(key)) return;
    scores_[key] = score.value();
    ScoreRecord r{prompt_id, candidate_index, verifier_fingerprint, score.kind(), score.value()};
    score_rows_.push_back(r);
    append(scores_file_, json{{"prompt_id", r.prompt_id},
                              {"candidate_index", r.candidate_index},
                              {"verifier_fingerprint", r.verifier_fingerprint},
                              {"kind", verifier_kind_name(r.kind)},
                              {"value", r.value}}
                             .dump());
}

std::vector<ScoreRecord> RunStore::scores_for(const std::string& prompt_id,
                                              const std::string& verifier_fingerprint) const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<ScoreRecord> out;
    for (const ScoreRecord& r : score_rows_) {
        if (r.prompt_id == prompt_id && r.verifier_fingerprint == verifier_fingerprint) out.push_back(r);
    }
    return out;
}

void RunStore::put_verdict(const std::string& prompt_id, const VerdictRecord& record) {
    std::lock_guard<std::mutex> lock(mu_);
    const std::string key =
        verdict_key(prompt_id, record.n, record.baseline_draw, record.verifier_kind, record.cross_model);
    verdicts_[key] = record;
    verdict_rows_.emplace_back(prompt_id, record);
    append(verdicts_file_, json{{"prompt_id", prompt_id},
                                {"n", record.n},
                                {"baseline_draw", record.baseline_draw},
                                {"cross_model", record.cross_model},
                                {"verifier_kind", verifier_kind_name(record.verifier_kind)},
                                {"treatment_index", record.treatment_index},
                                {"treatment_text", record.treatment_text},
                                {"baseline_text", record.baseline_text},
                                {"outcome", outcome_name(record.verdict.outcome)},
                                {"first_pass", judge_pass_name(record.verdict.first_pass)},
                                {"second_pass", judge_pass_name(record.verdict.second_pass)},
                                {"judge_model", record.verdict.judge_model}}
                               .dump());

    auto prompt_it = prompts_.find(prompt_id);
    if (prompt_it != prompts_.end()) {
        const std::string& question = prompt_it->second.text;
        judge_passes_[judge_pass_key(judge_template_hash(), record.verdict.judge_model, question,
                                     record.treatment_text, record.baseline_text)] = record.verdict.first_pass;
        judge_passes_[judge_pass_key(judge_template_hash(), record.verdict.judge_model, question,
                                     record.baseline_text, record.treatment_text)] = record.verdict.second_pass;
    }
}

std::optional<VerdictRecord> RunStore::find_verdict(const std::string& prompt_id, int n, int draw,
                                                    VerifierKind kind, bool cross_model) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = verdicts_.find(verdict_key(prompt_id, n, draw, kind, cross_model));
    if (it == verdicts_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::pair<std::string, VerdictRecord>> RunStore::verdicts() const {
    std::lock_guard<std::mutex> lock(mu_);
    return verdict_rows_;
}

std::optional<JudgePass> RunStore::find_judge_pass(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = judge_passes_.find(key);
    if (it == judge_passes_.end()) return std::nullopt;
    return it->second;
}

void RunStore::put_judge_pass(const std::string& key, JudgePass pass) {
    std::lock_guard<std::mutex> lock(mu_);
    judge_passes_[key] = pass;
}

std::string RunStore::judge_pass_key(const std::string& template_hash, const std::string& judge_model,
                                     const std::string& question, const std::string& first,
                                     const std::string& second) {
    return HashBuilder{}
        .field(std::string_view(template_hash))
        .field(std::string_view(judge_model))
        .field(std::string_view(question))
        .field(std::string_view(first))
        .field(std::string_view(second))
        .hex();
}

} // namespace bestofn
