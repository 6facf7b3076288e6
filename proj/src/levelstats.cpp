#include "anderson/levelstats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "anderson/errors.hpp"
#include "anderson/operators.hpp"
#include "anderson/parallel.hpp"
#include "anderson/spectral.hpp"

namespace anderson {

namespace {

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

void SpacingSample::write_csv(std::ostream& out) const {
    out << "# kind=spacings\n";
    out << "# d=" << dimension << "\n";
    out << "# L=" << side << "\n";
    out << "# E=" << format_number(energy) << "\n";
    out << "# X=" << format_number(window) << "\n";
    out << "# R=" << realizations << "\n";
    out << "# seed=" << seed << "\n";
    out << "realization,position\n";
    for (const auto& [realization, position] : positions)
        out << realization << ',' << format_number(position) << "\n";
}

SpacingSample collect_spacings(int dimension, int side, const SingleSiteDensity& density,
                               double energy, double window, int realizations,
                               std::uint64_t seed, int workers) {
    if (!(window > 0.0)) throw ConfigError("spacing window must be positive");
    if (realizations < 1) throw ConfigError("collect_spacings needs at least one realization");

    const CubeGeometry geometry = CubeGeometry::build(dimension, side);
    const double volume = static_cast<double>(geometry.site_count());

    const std::function<std::vector<double>(int)> one_realization = [&](int r) {
        const DisorderField field = sample_field(density, geometry, seed, r);
        const EigenSpectrum spectrum = full_spectrum(build_anderson(geometry, field));
        std::vector<double> kept;
        for (double eps : spectrum.values) {
            const double x = volume * (eps - energy);
            if (std::abs(x) <= window) kept.push_back(x);
        }
        std::sort(kept.begin(), kept.end());
        return kept;
    };
    const std::vector<std::vector<double>> per_realization =
        parallel_map<std::vector<double>>(realizations, workers, one_realization);

    SpacingSample sample;
    sample.dimension = dimension;
    sample.side = side;
    sample.volume = volume;
    sample.energy = energy;
    sample.window = window;
    sample.realizations = realizations;
    sample.seed = seed;
    for (int r = 0; r < realizations; ++r) {
        const std::vector<double>& kept = per_realization[static_cast<std::size_t>(r)];
        for (double x : kept) sample.positions.emplace_back(r, x);
        for (std::size_t i = 1; i < kept.size(); ++i)
            sample.spacings.push_back(kept[i] - kept[i - 1]);
    }
    return sample;
}

PoissonTestResult poisson_test(const SpacingSample& sample, double rate, double threshold) {
    if (!(rate > 0.0)) throw ConfigError("poisson_test needs a positive rate");
    PoissonTestResult result;
    result.rate = rate;
    result.threshold = threshold;
    result.spacing_count = static_cast<int>(sample.spacings.size());
    result.sufficient = result.spacing_count >= 50;

    if (result.spacing_count >= 2) {
        std::vector<double> sorted = sample.spacings;
        std::sort(sorted.begin(), sorted.end());
        const double n = static_cast<double>(sorted.size());
        double ks = 0.0;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            const double model = 1.0 - std::exp(-rate * sorted[i]);
            ks = std::max(ks, std::abs(model - static_cast<double>(i) / n));
            ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - model));
        }
        result.ks_distance = ks;
    }
    result.pass = result.sufficient && result.ks_distance <= threshold;
    return result;
}

double intensity_estimate(const SpacingSample& sample) {
    if (sample.realizations < 1 || !(sample.window > 0.0)) return 0.0;
    return static_cast<double>(sample.positions.size()) /
           (static_cast<double>(sample.realizations) * 2.0 * sample.window);
}

nlohmann::json PoissonTestResult::to_json() const {
    return nlohmann::json{{"spacings", spacing_count}, {"rate", rate},
                          {"ks_distance", ks_distance}, {"threshold", threshold},
                          {"sufficient", sufficient},   {"pass", pass}};
}

} // namespace anderson
