#include <doctest.h>

#include <cmath>
#include <sstream>

#include "anderson/levelstats.hpp"
#include "anderson/operators.hpp"
#include "anderson/rng.hpp"
#include "anderson/spectral.hpp"

using namespace anderson;

TEST_CASE("a single in-window eigenvalue yields no spacings") {
    // one site: H = 2 + omega, omega ~ 0; window around 2 catches exactly it
    const SingleSiteDensity density = SingleSiteDensity::uniform(0.0, 1e-300);
    const SpacingSample sample = collect_spacings(1, 1, density, 2.0, 5.0, 3, 4, 1);
    CHECK(sample.positions.size() == 3); // one per realization
    CHECK(sample.spacings.empty());
}

TEST_CASE("without disorder, positions repeat across realizations") {
    const SingleSiteDensity density = SingleSiteDensity::uniform(0.0, 1e-300);
    const SpacingSample sample = collect_spacings(1, 24, density, 0.0, 30.0, 4, 9, 1);
    REQUIRE(sample.realizations == 4);
    REQUIRE(!sample.positions.empty());
    CHECK(sample.positions.size() % 4 == 0);
    const std::size_t per = sample.positions.size() / 4;
    for (std::size_t i = 0; i < per; ++i) {
        const double reference = sample.positions[i].second;
        for (int r = 1; r < 4; ++r)
            CHECK(sample.positions[r * per + i].second == reference);
    }
}

TEST_CASE("window positions are recomputable from the raw spectra") {
    const SingleSiteDensity density = SingleSiteDensity::uniform(0.0, 6.0);
    const int side = 40;
    const double energy = 3.0;
    const double window = 40.0;
    const SpacingSample sample = collect_spacings(1, side, density, energy, window, 5, 31, 2);

    const CubeGeometry g = CubeGeometry::build(1, side);
    std::vector<std::pair<int, double>> oracle;
    for (int r = 0; r < 5; ++r) {
        const DisorderField field = sample_field(density, g, 31, r);
        const EigenSpectrum spectrum = full_spectrum(build_anderson(g, field));
        for (double eps : spectrum.values) {
            const double x = side * (eps - energy);
            if (std::abs(x) <= window) oracle.emplace_back(r, x);
        }
    }
    REQUIRE(sample.positions.size() == oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) {
        CHECK(sample.positions[i].first == oracle[i].first);
        CHECK(sample.positions[i].second == oracle[i].second);
    }
}

TEST_CASE("synthetic uniform eigenvalues pass the exponential test") {
    // i.i.d. uniform positions in a window, far more points than the window
    // truncation scale, mimic a Poisson process near the reference energy
    SpacingSample sample;
    sample.realizations = 1;
    sample.window = 10.0;
    std::vector<double> positions;
    for (int i = 0; i < 400; ++i)
        positions.push_back(-10.0 + 20.0 * site_uniform(77, 0, static_cast<std::uint64_t>(i)));
    std::sort(positions.begin(), positions.end());
    for (double x : positions) sample.positions.emplace_back(0, x);
    for (std::size_t i = 1; i < positions.size(); ++i)
        sample.spacings.push_back(positions[i] - positions[i - 1]);

    const double intensity = intensity_estimate(sample);
    CHECK(intensity == doctest::Approx(400.0 / 20.0));
    const PoissonTestResult result = poisson_test(sample, intensity, 0.15);
    CHECK(result.sufficient);
    CHECK(result.pass);
}

TEST_CASE("exponential spacings pass and a picket fence fails") {
    SpacingSample good;
    good.realizations = 1;
    good.window = 1.0;
    for (int i = 0; i < 10000; ++i)
        good.spacings.push_back(-std::log(1.0 - site_uniform(5, 0, static_cast<std::uint64_t>(i))));
    const PoissonTestResult accepted = poisson_test(good, 1.0, 0.15);
    CHECK(accepted.pass);
    CHECK(accepted.ks_distance <= 0.02);

    SpacingSample fence;
    fence.realizations = 1;
    fence.window = 1.0;
    fence.spacings.assign(500, 1.0);
    const PoissonTestResult rejected = poisson_test(fence, 1.0, 0.15);
    CHECK(rejected.sufficient);
    CHECK_FALSE(rejected.pass);
    CHECK(rejected.ks_distance > 0.3);
}

TEST_CASE("too few spacings is an insufficient-data outcome") {
    SpacingSample sparse;
    sparse.realizations = 1;
    sparse.window = 1.0;
    sparse.spacings = {0.2, 0.4, 0.1};
    const PoissonTestResult result = poisson_test(sparse, 1.0, 0.15);
    CHECK_FALSE(result.sufficient);
    CHECK_FALSE(result.pass);
    CHECK(result.spacing_count == 3);

    SpacingSample empty;
    empty.realizations = 1;
    empty.window = 1.0;
    const PoissonTestResult nothing = poisson_test(empty, 1.0, 0.15);
    CHECK_FALSE(nothing.sufficient);
    CHECK(nothing.spacing_count == 0);
}

TEST_CASE("intensity estimate arithmetic") {
    SpacingSample sample;
    sample.realizations = 1;
    sample.window = 1.0;
    CHECK(intensity_estimate(sample) == 0.0);
    sample.positions = {{0, -0.5}, {0, -0.1}, {0, 0.2}, {0, 0.9}};
    CHECK(intensity_estimate(sample) == doctest::Approx(2.0));
}

TEST_CASE("doubling the window roughly doubles the pooled count") {
    const SingleSiteDensity density = SingleSiteDensity::uniform(0.0, 8.0);
    const double energy = 4.0; // interior plateau of the spectrum
    const SpacingSample narrow = collect_spacings(1, 500, density, energy, 10.0, 60, 13, 2);
    const SpacingSample wide = collect_spacings(1, 500, density, energy, 20.0, 60, 13, 2);
    REQUIRE(narrow.positions.size() >= 50);
    const double ratio = static_cast<double>(wide.positions.size()) /
                         static_cast<double>(narrow.positions.size());
    CHECK(ratio >= 1.6);
    CHECK(ratio <= 2.4);
}

TEST_CASE("spacing csv lists realization and position") {
    SpacingSample sample;
    sample.dimension = 1;
    sample.side = 8;
    sample.energy = 0.5;
    sample.window = 2.0;
    sample.realizations = 2;
    sample.seed = 3;
    sample.positions = {{0, -1.0}, {1, 0.25}};
    std::ostringstream out;
    sample.write_csv(out);
    const std::string text = out.str();
    CHECK(text.find("realization,position\n") != std::string::npos);
    CHECK(text.find("0,-1\n") != std::string::npos);
    CHECK(text.find("1,0.25\n") != std::string::npos);
}
