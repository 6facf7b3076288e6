#include <doctest.h>

#include <cmath>
#include <vector>

#include "anderson/disorder.hpp"
#include "anderson/errors.hpp"
#include "anderson/rng.hpp"

using namespace anderson;

TEST_CASE("uniform samples stay in the support") {
    const CubeGeometry g = CubeGeometry::build(1, 1000);
    const SingleSiteDensity density = SingleSiteDensity::uniform(0.0, 1.0);
    const DisorderField field = sample_field(density, g, 42, 0);
    for (double v : field.values) {
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("degenerate width pins the field at W-") {
    const CubeGeometry g = CubeGeometry::build(1, 64);
    const SingleSiteDensity density = SingleSiteDensity::uniform(5.0, 5.0 + 1e-12);
    const DisorderField field = sample_field(density, g, 7, 3);
    for (double v : field.values) {
        CHECK(v >= 5.0);
        CHECK(v <= 5.0 + 1e-12);
    }
}

TEST_CASE("law of large numbers against direct averaging") {
    const CubeGeometry g = CubeGeometry::build(1, 100000);
    const SingleSiteDensity density = SingleSiteDensity::uniform(0.0, 1.0);
    const DisorderField field = sample_field(density, g, 2024, 0);
    double mean = 0.0;
    for (double v : field.values) mean += v;
    mean /= field.values.size();
    CHECK(std::abs(mean - 0.5) < 0.01);
}

TEST_CASE("fields are reproducible and realizations independent") {
    const CubeGeometry g = CubeGeometry::build(2, 8);
    const SingleSiteDensity density = SingleSiteDensity::uniform(-1.0, 1.0);
    const DisorderField a = sample_field(density, g, 9, 4);
    const DisorderField b = sample_field(density, g, 9, 4);
    CHECK(a.values == b.values);
    const DisorderField c = sample_field(density, g, 9, 5);
    CHECK(a.values != c.values);
    const DisorderField d = sample_field(density, g, 10, 4);
    CHECK(a.values != d.values);
}

TEST_CASE("deterministic spectrum is the shifted band") {
    {
        const auto sigma = deterministic_spectrum(SingleSiteDensity::uniform(0.0, 1.0), 1);
        REQUIRE(sigma.size() == 1);
        CHECK(sigma[0].lo == doctest::Approx(-2.0));
        CHECK(sigma[0].hi == doctest::Approx(3.0));
    }
    {
        const auto sigma = deterministic_spectrum(SingleSiteDensity::uniform(-1.0, 1.0), 2);
        CHECK(sigma[0].lo == doctest::Approx(-5.0));
        CHECK(sigma[0].hi == doctest::Approx(5.0));
    }
    {
        // point-mass limit: a vanishing support width leaves the free band
        const auto sigma = deterministic_spectrum(SingleSiteDensity::uniform(0.0, 1e-12), 3);
        CHECK(sigma[0].lo == doctest::Approx(-6.0));
        CHECK(sigma[0].hi == doctest::Approx(6.0));
    }
}

TEST_CASE("density floor check") {
    {
        const FloorCheckResult result =
            density_floor_check(SingleSiteDensity::uniform(0.0, 1.0), 101);
        CHECK(result.pass);
        CHECK(result.measured_min == doctest::Approx(1.0));
    }
    {
        // density dips to zero mid-support; declared floor 0.1 must fail
        SingleSiteDensity dip =
            SingleSiteDensity::tabulated({0.0, 0.5, 1.0}, {2.0, 0.0, 2.0});
        dip.declare_rho_min(0.1);
        const FloorCheckResult result = density_floor_check(dip, 101);
        CHECK_FALSE(result.pass);
    }
    {
        const SingleSiteDensity steps =
            SingleSiteDensity::piecewise_constant({0.0, 0.5, 1.0}, {0.5, 1.5});
        const FloorCheckResult result = density_floor_check(steps, 101);
        CHECK(result.measured_min == doctest::Approx(0.5));
        CHECK(result.pass);
    }
}

TEST_CASE("uniform histogram is flat to five standard errors") {
    const int samples = 1000000;
    const int bins = 50;
    std::vector<int> histogram(bins, 0);
    const SingleSiteDensity density = SingleSiteDensity::uniform(0.0, 1.0);
    for (int i = 0; i < samples; ++i) {
        const double v = density.quantile(site_uniform(555, 0, static_cast<std::uint64_t>(i)));
        ++histogram[std::min(bins - 1, static_cast<int>(v * bins))];
    }
    const double expected = static_cast<double>(samples) / bins;
    const double stderr_bin = std::sqrt(expected * (1.0 - 1.0 / bins));
    for (int count : histogram) CHECK(std::abs(count - expected) <= 5.0 * stderr_bin);
}

TEST_CASE("piecewise-constant sampling matches segment masses") {
    const SingleSiteDensity density =
        SingleSiteDensity::piecewise_constant({0.0, 0.5, 1.0}, {0.5, 1.5});
    CHECK(density.rho_min() == doctest::Approx(0.5));
    REQUIRE(density.rho_max().has_value());
    CHECK(*density.rho_max() == doctest::Approx(1.5));
    int low = 0;
    const int samples = 200000;
    for (int i = 0; i < samples; ++i) {
        const double v = density.quantile(site_uniform(556, 1, static_cast<std::uint64_t>(i)));
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        if (v < 0.5) ++low;
    }
    // mass below the midpoint is 0.25
    CHECK(std::abs(low / static_cast<double>(samples) - 0.25) < 0.01);
}

TEST_CASE("tabulated density normalizes and inverts monotonically") {
    const SingleSiteDensity density =
        SingleSiteDensity::tabulated({0.0, 0.25, 1.0}, {1.0, 3.0, 0.5});
    double mass = 0.0;
    const int grid = 20000;
    for (int i = 0; i < grid; ++i) {
        const double w = (i + 0.5) / grid;
        mass += density.density(w) / grid;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    double previous = -1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double v = density.quantile(i / 1000.0);
        CHECK(v >= previous - 1e-12);
        previous = v;
    }
    CHECK(density.quantile(0.0) == doctest::Approx(0.0));
    CHECK(density.quantile(1.0) == doctest::Approx(1.0));
}
