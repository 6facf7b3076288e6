#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "anderson/disorder.hpp"

namespace anderson {

/// Rescaled eigenvalue positions x = L^d (eps - E) near a reference energy,
/// collected per realization within |x| <= window, plus the consecutive
/// spacings of each realization's sorted positions, pooled.
struct SpacingSample {
    int dimension = 0;
    int side = 0;
    double volume = 0.0;
    double energy = 0.0;
    double window = 0.0;
    int realizations = 0;
    std::uint64_t seed = 0;
    std::vector<std::pair<int, double>> positions; ///< (realization, position)
    std::vector<double> spacings;                  ///< pooled per-realization gaps

    /// `realization,position` rows preceded by `# key=value` comments.
    void write_csv(std::ostream& out) const;
};

/// Diagonalizes R independent Hamiltonians and harvests the window.
/// An empty sample is a valid outcome, not an error.
SpacingSample collect_spacings(int dimension, int side, const SingleSiteDensity& density,
                               double energy, double window, int realizations,
                               std::uint64_t seed, int workers = 1);

struct PoissonTestResult {
    int spacing_count = 0;
    double rate = 0.0;
    double ks_distance = 0.0; ///< meaningful when spacing_count >= 2
    double threshold = 0.0;
    bool sufficient = false; ///< at least 50 spacings
    bool pass = false;       ///< sufficient and KS below threshold

    nlohmann::json to_json() const;
};

/// Kolmogorov-Smirnov distance between the pooled spacings and
/// Exponential(rate). Fewer than 50 spacings yields an insufficient-data
/// result (the distance is still reported when computable).
PoissonTestResult poisson_test(const SpacingSample& sample, double rate,
                               double threshold = 0.15);

/// Empirical point-process intensity: pooled positions / (R * 2 * window).
double intensity_estimate(const SpacingSample& sample);

} // namespace anderson
