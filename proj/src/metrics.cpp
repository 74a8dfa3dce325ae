#include "bestofn/metrics.hpp"

#include <algorithm>

namespace bestofn {

DeltaReport compute_delta(std::span<const JudgeVerdict> verdicts,
                          const std::map<std::string, std::string>& prompt_languages,
                          int n, VerifierKind verifier_kind, bool cross_model) {
    if (verdicts.empty()) raise(ErrorCode::empty_verdict_set, "no verdicts to aggregate");

    struct Tally {
        int wins = 0, losses = 0, ties = 0;
    };
    std::map<std::string, Tally> tallies;
    int unparseable = 0;

    for (const JudgeVerdict& v : verdicts) {
        auto it = prompt_languages.find(v.prompt_id);
        if (it == prompt_languages.end())
            raise(ErrorCode::unknown_prompt_id, "verdict references unknown prompt '" + v.prompt_id + "'");
        Tally& t = tallies[it->second];
        switch (v.outcome) {
            case Outcome::win: ++t.wins; break;
            case Outcome::loss: ++t.losses; break;
            case Outcome::tie: ++t.ties; break;
        }
        if (v.has_unparseable_pass()) ++unparseable;
    }

    DeltaReport report;
    report.n = n;
    report.verifier_kind = verifier_kind;
    report.cross_model = cross_model;
    report.unparseable_passes = unparseable;

    double delta_sum = 0.0;
    for (const auto& [language, t] : tallies) {
        const int total = t.wins + t.losses + t.ties;
        LanguageRates rates;
        rates.win_rate = 100.0 * t.wins / total;
        rates.loss_rate = 100.0 * t.losses / total;
        rates.tie_rate = 100.0 * t.ties / total;
        rates.delta = rates.win_rate - rates.loss_rate;
        rates.verdicts = total;
        delta_sum += rates.delta;
        report.per_language.emplace(language, rates);
    }
    report.aggregate_delta = delta_sum / static_cast<double>(report.per_language.size());
    return report;
}

std::size_t select_best(std::span<const VerifierScore> scores) {
    if (scores.empty()) raise(ErrorCode::empty_pool, "cannot select from an empty score list");
    const VerifierKind kind = scores.front().kind();
    const ScoreOrientation orientation = scores.front().orientation();
    for (const VerifierScore& s : scores) {
        if (s.kind() != kind || s.orientation() != orientation)
            raise(ErrorCode::mixed_score_kinds, "scores mix kinds or orientations");
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        const double v = scores[i].value();
        const double b = scores[best].value();
        // strict comparison keeps the earliest-generated candidate on ties
        const bool better = orientation == ScoreOrientation::lower_better ? v < b : v > b;
        if (better) best = i;
    }
    return best;
}

std::vector<Candidate> prefix_pool(std::span<const Candidate> pool, int n) {
    if (n <= 0) raise(ErrorCode::invalid_argument, "prefix size must be positive");
    if (static_cast<std::size_t>(n) > pool.size())
        raise(ErrorCode::insufficient_pool,
              "requested prefix of " + std::to_string(n) + " from a pool of " + std::to_string(pool.size()));
    std::vector<Candidate> prefix;
    prefix.reserve(static_cast<std::size_t>(n));
    for (const Candidate& c : pool) {
        if (c.index < n) prefix.push_back(c);
    }
    return prefix;
}

} // namespace bestofn
