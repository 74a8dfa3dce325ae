#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace bestofn {

enum class QualityDist { uniform01, gaussian };
enum class ScoreRule { equal_to_quality, anti_quality, noisy };

// Monte Carlo model of best-of-n selection: per trial, n iid
// (quality, score) pairs are drawn and the argmax-score candidate of each
// nested prefix is kept. `rho` is the score-quality correlation of the
// noisy rule: score = rho * standardized_quality + sqrt(1 - rho^2) * noise.
// rho = +1 reproduces equal_to_quality selection, rho = -1 anti_quality,
// rho = 0 makes selection a uniform random pick.
struct SimModel {
    QualityDist quality_dist = QualityDist::uniform01;
    double mu = 0.0;     // gaussian only
    double sigma = 1.0;  // gaussian only
    ScoreRule score_rule = ScoreRule::equal_to_quality;
    double rho = 1.0;  // noisy only
    long trials = 100000;
    std::uint64_t rng_seed = 0;

    void validate(const std::vector<int>& n_grid) const;
};

struct SimPoint {
    double mean = 0.0;
    double standard_error = 0.0;
};

struct SimDeltaPoint {
    double delta = 0.0;  // percentage points, win rate minus loss rate
    double standard_error = 0.0;
    double win_rate = 0.0;
    double loss_rate = 0.0;
    double tie_rate = 0.0;
};

// Expected quality of the selected candidate at each grid n.
std::map<int, SimPoint> simulate_best_of_n(const SimModel& model, const std::vector<int>& n_grid);

// Win-minus-loss rate of the selected candidate against an independent
// baseline draw, with ties inside +-tie_band around the baseline quality.
std::map<int, SimDeltaPoint> simulate_delta_curve(const SimModel& model,
                                                  const std::vector<int>& n_grid,
                                                  double tie_band = 0.0);

// Selected quality per grid point for one trial. Per-trial generators are
// derived from (rng_seed, trial_index), so results are bit-reproducible
// and independent of evaluation order.
std::vector<double> simulate_trial_qualities(const SimModel& model, const std::vector<int>& n_grid,
                                             std::uint64_t trial_index);

} // namespace bestofn
