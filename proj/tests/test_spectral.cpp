#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "anderson/operators.hpp"
#include "anderson/rng.hpp"
#include "anderson/spectral.hpp"

using namespace anderson;

namespace {

SymmetricOperator random_symmetric(std::uint64_t seed, int n, double scale = 1.0) {
    std::vector<double> dense(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v =
                scale * (2.0 * site_uniform(seed, static_cast<std::uint64_t>(i) * 1024 + j, 0) -
                         1.0);
            dense[static_cast<std::size_t>(i) * n + j] = v;
            dense[static_cast<std::size_t>(j) * n + i] = v;
        }
    return SymmetricOperator::from_dense(dense, n);
}

SymmetricOperator diagonal_operator(std::vector<double> values) {
    const int n = static_cast<int>(values.size());
    return SymmetricOperator(n, std::move(values), {}, {}, Provenance::Anderson);
}

} // namespace

TEST_CASE("full spectrum of a diagonal matrix sorts the diagonal") {
    const EigenSpectrum spectrum = full_spectrum(diagonal_operator({3.0, 1.0, 2.0}));
    CHECK(spectrum.values == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(spectrum.trace_residual <= 1e-12);
}

TEST_CASE("full spectrum of the 2x2 all-ones matrix") {
    const SymmetricOperator op =
        SymmetricOperator::from_dense({1.0, 1.0, 1.0, 1.0}, 2, Provenance::FreeLaplacian);
    const EigenSpectrum spectrum = full_spectrum(op);
    CHECK(spectrum.values[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(spectrum.values[1] == doctest::Approx(2.0));
}

TEST_CASE("dense path and trace consistency on random matrices") {
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 5 + 7 * trial;
        const SymmetricOperator op = random_symmetric(900 + trial, n);
        const EigenSpectrum spectrum = full_spectrum(op);
        REQUIRE(static_cast<int>(spectrum.values.size()) == n);
        CHECK(std::is_sorted(spectrum.values.begin(), spectrum.values.end()));
        CHECK(spectrum.trace_residual <= 1e-8);
    }
}

TEST_CASE("count_below on diagonal examples and ties") {
    const SymmetricOperator op = diagonal_operator({0.0, 1.0, 2.0});
    CHECK(count_below(op, 1.5) == 2);
    CHECK(count_below(op, -0.5) == 0);
    CHECK(count_below(op, 99.0) == 3);

    // eigenvalue exactly at E is counted via the deterministic nudge
    CountMetadata meta;
    CHECK(count_below(op, 1.0, &meta) == 2);
    CHECK(meta.nudges >= 1);
    CHECK(meta.energy_used > 1.0);
}

TEST_CASE("count_below matches the eigensolver on random dense matrices") {
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 4 + static_cast<int>(site_uniform(41, trial, 0) * 76);
        const SymmetricOperator op = random_symmetric(4000 + trial, n, 2.0);
        const EigenSpectrum spectrum = full_spectrum(op);
        for (int q = 0; q < 20; ++q) {
            const double span = spectrum.values.back() - spectrum.values.front();
            const double e = spectrum.values.front() - 0.2 * span +
                             1.4 * span * site_uniform(42, trial, q);
            const auto expected =
                std::upper_bound(spectrum.values.begin(), spectrum.values.end(), e) -
                spectrum.values.begin();
            CountMetadata meta;
            CHECK(count_below(op, e, &meta) == expected);
        }
    }
}

TEST_CASE("banded path agrees with the eigensolver on 2d hamiltonians") {
    const SingleSiteDensity density = SingleSiteDensity::uniform(0.0, 4.0);
    for (int side : {4, 6, 9}) {
        const CubeGeometry g = CubeGeometry::build(2, side);
        const DisorderField field = sample_field(density, g, 17, side);
        const SymmetricOperator op = build_anderson(g, field);
        REQUIRE(op.bandwidth() == side);
        const EigenSpectrum spectrum = full_spectrum(op);
        for (int q = 0; q < 25; ++q) {
            const double e = -4.0 + 12.0 * site_uniform(18, side, q);
            const auto expected =
                std::upper_bound(spectrum.values.begin(), spectrum.values.end(), e) -
                spectrum.values.begin();
            CountMetadata meta;
            CHECK(count_below(op, e, &meta) == expected);
            CHECK(std::string(meta.method) == "ldlt-banded");
        }
    }
}

TEST_CASE("counting is stable under finite-rank perturbations") {
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 12 + trial;
        const SymmetricOperator op = random_symmetric(5000 + trial, n);
        const int rank = 1 + trial % 3;
        std::vector<double> dense = op.to_dense();
        for (int r = 0; r < rank; ++r) {
            std::vector<double> direction(n);
            for (int i = 0; i < n; ++i)
                direction[i] = 2.0 * site_uniform(5100 + trial, r, i) - 1.0;
            const double sign = site_uniform(5200 + trial, r, 0) < 0.5 ? -1.0 : 1.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    dense[static_cast<std::size_t>(i) * n + j] +=
                        sign * direction[i] * direction[j];
        }
        const SymmetricOperator perturbed = SymmetricOperator::from_dense(dense, n);
        for (int q = 0; q < 8; ++q) {
            const double e = -2.0 + 4.0 * site_uniform(5300 + trial, q, 0);
            CHECK(std::abs(count_below(perturbed, e) - count_below(op, e)) <= rank);
        }
    }
}

TEST_CASE("count_below is nondecreasing and saturates above the band") {
    const CubeGeometry g = CubeGeometry::build(2, 5);
    const SingleSiteDensity density = SingleSiteDensity::uniform(0.0, 3.0);
    const DisorderField field = sample_field(density, g, 23, 1);
    const SymmetricOperator op = build_anderson(g, field);
    int previous = 0;
    for (double e = -5.0; e <= 8.0; e += 0.25) {
        const int count = count_below(op, e);
        CHECK(count >= previous);
        previous = count;
    }
    const double top = 4.0 + *std::max_element(field.values.begin(), field.values.end());
    CHECK(count_below(op, top + 1e-9) == g.site_count());
}

TEST_CASE("counting handles degenerate and structured spectra") {
    {
        const SymmetricOperator zero(50, std::vector<double>(50, 0.0), {}, {},
                                     Provenance::Anderson);
        CHECK(count_below(zero, -0.1) == 0);
        CHECK(count_below(zero, 0.1) == 50);
        CountMetadata meta;
        CHECK(count_below(zero, 0.0, &meta) == 50); // fifty-fold eigenvalue at 0 is counted
        CHECK(meta.nudges >= 1);
    }
    {
        // +-1 diagonal blocks with one long-range coupling to force the
        // dense Bunch-Kaufman path (bandwidth 149 > 128)
        const int n = 150;
        std::vector<double> diag(n);
        for (int i = 0; i < n; ++i) diag[i] = i < 60 ? -1.0 : 1.0;
        const SymmetricOperator op(n, std::move(diag), {{0, n - 1}}, {1e-3},
                                   Provenance::Anderson);
        CountMetadata meta;
        CHECK(count_below(op, 0.0, &meta) == 60);
        CHECK(std::string(meta.method) == "bunch-kaufman-dense");
        CHECK(count_below(op, -2.0) == 0);
        CHECK(count_below(op, 2.0) == n);
    }
}

TEST_CASE("switch function is a C1 monotone ramp") {
    const SwitchFunction f(0.5);
    CHECK(f(-1.0) == 0.0);
    CHECK(f(0.0) == 0.0);
    CHECK(f(0.5) == 1.0);
    CHECK(f(2.0) == 1.0);
    CHECK(f(0.25) == doctest::Approx(0.5));

    const int grid = 10000;
    const double step = 1.0 / grid; // probe [-0.25, 0.75] around the ramp
    double previous = f(-0.25);
    for (int i = 1; i <= grid; ++i) {
        const double t = -0.25 + i * step;
        const double value = f(t);
        const double derivative = (value - previous) / step;
        CHECK(derivative >= -1e-10);
        if (t < -step || t > 0.5 + step) CHECK(std::abs(derivative) <= 1e-9);
        previous = value;
    }
}

TEST_CASE("switch trace plateaus and midpoint value") {
    const CubeGeometry g = CubeGeometry::build(1, 2);
    const SymmetricOperator op = build_dirichlet_laplacian(g); // eigenvalues 0, 2
    const SwitchFunction f(0.5);
    CHECK(switch_trace(op, -1.0, f) == doctest::Approx(0.0));
    CHECK(switch_trace(op, 2.5, f) == doctest::Approx(2.0));
    CHECK(switch_trace(op, 1.0, f) == doctest::Approx(1.0));
}

TEST_CASE("switch trace is sandwiched by counting functions") {
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 6 + trial;
        const SymmetricOperator op = random_symmetric(6000 + trial, n, 1.5);
        const SwitchFunction f(0.1 + 0.4 * site_uniform(6100, trial, 0));
        const double lambda = -2.0 + 4.0 * site_uniform(6200, trial, 0);
        const double trace = switch_trace(op, lambda, f);
        CHECK(count_below(op, lambda - f.width()) <= trace + 1e-9);
        CHECK(trace <= count_below(op, lambda) + 1e-9);
    }
}

TEST_CASE("raising a coupling never raises the switch trace") {
    {
        const SymmetricOperator op = diagonal_operator({0.0});
        const SwitchFunction f(0.2);
        const auto [before, after] = monotonicity_probe(op, 0, 0.2, 0.1, f);
        CHECK(after < before);
    }
    {
        const SymmetricOperator op = diagonal_operator({0.4, -0.3});
        const SwitchFunction f(0.2);
        const auto [before, after] = monotonicity_probe(op, 1, 0.0, 0.1, f);
        CHECK(before == after);
    }
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 4 + trial % 9;
        const SymmetricOperator op = random_symmetric(7000 + trial, n);
        const SwitchFunction f(0.3);
        const int site = static_cast<int>(site_uniform(7100, trial, 0) * n);
        const double h = 0.01 + site_uniform(7200, trial, 0);
        const double lambda = -1.5 + 3.0 * site_uniform(7300, trial, 0);
        const auto [before, after] = monotonicity_probe(op, site, h, lambda, f);
        CHECK(after <= before + 1e-10);
    }
}
