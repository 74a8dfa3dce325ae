#include "bestofn/simulate.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "bestofn/error.hpp"

namespace bestofn {

namespace {

// splitmix64: tiny, seedable, and identical on every platform. std::
// distributions are avoided so fixed seeds reproduce bit-for-bit anywhere.
struct TrialRng {
    std::uint64_t state;

    explicit TrialRng(std::uint64_t seed, std::uint64_t trial)
        : state(seed ^ (0x9e3779b97f4a7c15ull * (trial + 1))) {
        next();  // decorrelate adjacent trials
    }

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }  // [0,1)

    double gaussian() {
        const double u1 = 1.0 - uniform01();  // (0,1], keeps log finite
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
};

double draw_quality(const SimModel& model, TrialRng& rng) {
    if (model.quality_dist == QualityDist::uniform01) return rng.uniform01();
    return model.mu + model.sigma * rng.gaussian();
}

double standardize_quality(const SimModel& model, double quality) {
    if (model.quality_dist == QualityDist::uniform01)
        return (quality - 0.5) * std::sqrt(12.0);  // U(0,1) has variance 1/12
    return (quality - model.mu) / model.sigma;
}

double draw_score(const SimModel& model, TrialRng& rng, double quality) {
    switch (model.score_rule) {
        case ScoreRule::equal_to_quality: return quality;
        case ScoreRule::anti_quality: return -quality;
        case ScoreRule::noisy: {
            const double noise = rng.gaussian();
            return model.rho * standardize_quality(model, quality) +
                   std::sqrt(1.0 - model.rho * model.rho) * noise;
        }
    }
    return quality;
}

} // namespace

void SimModel::validate(const std::vector<int>& n_grid) const {
    if (trials < 1) raise(ErrorCode::invalid_model, "trials must be at least 1");
    if (quality_dist == QualityDist::gaussian && !(sigma > 0.0))
        raise(ErrorCode::invalid_model, "gaussian quality needs sigma > 0");
    if (score_rule == ScoreRule::noisy && !(rho >= -1.0 && rho <= 1.0))
        raise(ErrorCode::invalid_model, "rho must lie in [-1,1]");
    if (n_grid.empty()) raise(ErrorCode::invalid_model, "n grid is empty");
    int previous = 0;
    for (int n : n_grid) {
        if (n <= previous) raise(ErrorCode::invalid_model, "n grid must be strictly increasing positives");
        previous = n;
    }
}

std::vector<double> simulate_trial_qualities(const SimModel& model, const std::vector<int>& n_grid,
                                             std::uint64_t trial_index) {
    model.validate(n_grid);
    TrialRng rng(model.rng_seed, trial_index);

    std::vector<double> out;
    out.reserve(n_grid.size());
    double best_score = -std::numeric_limits<double>::infinity();
    double best_quality = 0.0;
    std::size_t g = 0;
    for (int k = 1; k <= n_grid.back(); ++k) {
        const double quality = draw_quality(model, rng);
        const double score = draw_score(model, rng, quality);
        if (score > best_score) {  // strict: earliest draw wins exact ties
            best_score = score;
            best_quality = quality;
        }
        if (k == n_grid[g]) {
            out.push_back(best_quality);
            ++g;
        }
    }
    return out;
}

std::map<int, SimPoint> simulate_best_of_n(const SimModel& model, const std::vector<int>& n_grid) {
    model.validate(n_grid);

    std::vector<double> sum(n_grid.size(), 0.0), sumsq(n_grid.size(), 0.0);
    for (long t = 0; t < model.trials; ++t) {
        const std::vector<double> qualities =
            simulate_trial_qualities(model, n_grid, static_cast<std::uint64_t>(t));
        for (std::size_t g = 0; g < n_grid.size(); ++g) {
            sum[g] += qualities[g];
            sumsq[g] += qualities[g] * qualities[g];
        }
    }

    std::map<int, SimPoint> out;
    const double trials = static_cast<double>(model.trials);
    for (std::size_t g = 0; g < n_grid.size(); ++g) {
        SimPoint point;
        point.mean = sum[g] / trials;
        if (model.trials > 1) {
            const double variance =
                std::max(0.0, (sumsq[g] - trials * point.mean * point.mean) / (trials - 1.0));
            point.standard_error = std::sqrt(variance / trials);
        }
        out[n_grid[g]] = point;
    }
    return out;
}

std::map<int, SimDeltaPoint> simulate_delta_curve(const SimModel& model,
                                                  const std::vector<int>& n_grid, double tie_band) {
    model.validate(n_grid);
    if (!(tie_band >= 0.0)) raise(ErrorCode::invalid_model, "tie_band must be nonnegative");

    std::vector<long> wins(n_grid.size(), 0), losses(n_grid.size(), 0);
    for (long t = 0; t < model.trials; ++t) {
        TrialRng rng(model.rng_seed, static_cast<std::uint64_t>(t));
        const double baseline = draw_quality(model, rng);

        double best_score = -std::numeric_limits<double>::infinity();
        double best_quality = 0.0;
        std::size_t g = 0;
        for (int k = 1; k <= n_grid.back(); ++k) {
            const double quality = draw_quality(model, rng);
            const double score = draw_score(model, rng, quality);
            if (score > best_score) {
                best_score = score;
                best_quality = quality;
            }
            if (k == n_grid[g]) {
                if (best_quality > baseline + tie_band) ++wins[g];
                else if (best_quality < baseline - tie_band) ++losses[g];
                ++g;
            }
        }
    }

    std::map<int, SimDeltaPoint> out;
    const double trials = static_cast<double>(model.trials);
    for (std::size_t g = 0; g < n_grid.size(); ++g) {
        SimDeltaPoint point;
        point.win_rate = 100.0 * static_cast<double>(wins[g]) / trials;
        point.loss_rate = 100.0 * static_cast<double>(losses[g]) / trials;
        point.tie_rate = 100.0 - point.win_rate - point.loss_rate;
        point.delta = point.win_rate - point.loss_rate;
        // per-trial outcome is +-100 or 0
        const double second_moment = 100.0 * 100.0 * (point.win_rate + point.loss_rate) / 100.0;
        const double variance = std::max(0.0, second_moment - point.delta * point.delta);
        point.standard_error = std::sqrt(variance / trials);
        out[n_grid[g]] = point;
    }
    return out;
}

} // namespace bestofn
