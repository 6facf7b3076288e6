#include <doctest.h>

#include <cmath>
#include <tuple>
#include <set>

#include "anderson/errors.hpp"
#include "anderson/operators.hpp"
#include "anderson/spectral.hpp"

using namespace anderson;

namespace {

DisorderField constant_field(const CubeGeometry& g, double value) {
    DisorderField field;
    field.geometry = &g;
    field.values.assign(g.site_count(), value);
    return field;
}

} // namespace

TEST_CASE("dirichlet laplacian on tiny chains") {
    {
        const CubeGeometry g = CubeGeometry::build(1, 1);
        const SymmetricOperator op = build_dirichlet_laplacian(g);
        CHECK(op.diagonal() == std::vector<double>{2.0});
        CHECK(op.bonds().empty());
    }
    {
        const CubeGeometry g = CubeGeometry::build(1, 2);
        const SymmetricOperator op = build_dirichlet_laplacian(g);
        CHECK(op.diagonal() == std::vector<double>{1.0, 1.0});
        CHECK(op.entry(0, 1) == 1.0);
        const EigenSpectrum spectrum = full_spectrum(op);
        CHECK(spectrum.values[0] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(spectrum.values[1] == doctest::Approx(2.0));
    }
    {
        // cubic characteristic polynomial factors as (1-x)(x-2)(x+1)
        const CubeGeometry g = CubeGeometry::build(1, 3);
        const EigenSpectrum spectrum = full_spectrum(build_dirichlet_laplacian(g));
        REQUIRE(spectrum.values.size() == 3);
        CHECK(spectrum.values[0] == doctest::Approx(-1.0));
        CHECK(spectrum.values[1] == doctest::Approx(1.0));
        CHECK(spectrum.values[2] == doctest::Approx(2.0));
    }
}

TEST_CASE("anderson operator is the laplacian plus the coupling diagonal") {
    const CubeGeometry g = CubeGeometry::build(2, 3);
    const SymmetricOperator free = build_dirichlet_laplacian(g);

    const DisorderField zero = constant_field(g, 0.0);
    const SymmetricOperator with_zero = build_anderson(g, zero);
    CHECK(with_zero.diagonal() == free.diagonal());
    CHECK(with_zero.bond_values() == free.bond_values());

    const DisorderField shifted = constant_field(g, 0.75);
    const EigenSpectrum base = full_spectrum(free);
    const EigenSpectrum moved = full_spectrum(build_anderson(g, shifted));
    for (std::size_t k = 0; k < base.values.size(); ++k)
        CHECK(moved.values[k] == doctest::Approx(base.values[k] + 0.75));
}

TEST_CASE("two-site anderson spectrum in closed form") {
    const CubeGeometry g = CubeGeometry::build(1, 2);
    DisorderField field = constant_field(g, 0.0);
    field.values = {0.0, 1.0};
    const EigenSpectrum spectrum = full_spectrum(build_anderson(g, field));
    const double root = std::sqrt(5.0);
    CHECK(spectrum.values[0] == doctest::Approx((3.0 - root) / 2.0));
    CHECK(spectrum.values[1] == doctest::Approx((3.0 + root) / 2.0));
}

TEST_CASE("anderson rejects mismatched fields") {
    const CubeGeometry g = CubeGeometry::build(1, 4);
    const CubeGeometry other = CubeGeometry::build(1, 5);
    DisorderField field = constant_field(other, 1.0);
    CHECK_THROWS_AS(build_anderson(g, field), ShapeError);
}

TEST_CASE("decoupled operator splits into per-cell blocks") {
    {
        const CubeGeometry g = CubeGeometry::build(1, 2);
        const Partition p = Partition::build(g, 1);
        const SymmetricOperator op = build_decoupled(g, p);
        CHECK(op.diagonal() == std::vector<double>{2.0, 2.0});
        CHECK(op.bonds().empty());
    }
    {
        const CubeGeometry g = CubeGeometry::build(1, 4);
        const Partition p = Partition::build(g, 2);
        const SymmetricOperator op = build_decoupled(g, p);
        CHECK(op.diagonal() == std::vector<double>{1.0, 1.0, 1.0, 1.0});
        REQUIRE(op.bonds().size() == 2);
        CHECK(op.bonds()[0] == Bond{0, 1});
        CHECK(op.bonds()[1] == Bond{2, 3});
    }
    {
        const CubeGeometry g = CubeGeometry::build(2, 6);
        const Partition p = Partition::build(g, 3);
        const SymmetricOperator op = build_decoupled(g, p);
        for (const Bond& b : op.bonds()) CHECK(p.cell_of(b.a) == p.cell_of(b.b));
    }
}

TEST_CASE("two-site decoupling defect in closed form") {
    const CubeGeometry g = CubeGeometry::build(1, 2);
    const Partition p = Partition::build(g, 1);
    const DefectResult result = decoupling_defect(g, p);
    CHECK(result.defect.entry(0, 0) == 1.0);
    CHECK(result.defect.entry(1, 1) == 1.0);
    CHECK(result.defect.entry(0, 1) == -1.0);
    const EigenSpectrum spectrum = full_spectrum(result.defect);
    CHECK(spectrum.values[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(spectrum.values[1] == doctest::Approx(2.0));
    CHECK(result.rank == 1);
}

TEST_CASE("defect equals decoupled minus full for any field") {
    const CubeGeometry g = CubeGeometry::build(2, 4);
    const Partition p = Partition::build(g, 2);
    const SingleSiteDensity density = SingleSiteDensity::uniform(0.0, 3.0);
    const DisorderField field = sample_field(density, g, 31, 2);

    const DefectResult structural = decoupling_defect(g, p);
    const std::vector<double> full = build_anderson(g, field).to_dense();
    const std::vector<double> split = build_decoupled(g, p, &field).to_dense();
    const std::vector<double> defect = structural.defect.to_dense();
    for (std::size_t i = 0; i < full.size(); ++i)
        CHECK(defect[i] == doctest::Approx(split[i] - full[i]).epsilon(1e-12));
}

TEST_CASE("2d defect rank stays under the face bound") {
    const CubeGeometry g = CubeGeometry::build(2, 4);
    const Partition p = Partition::build(g, 2);
    const DefectResult result = decoupling_defect(g, p);
    CHECK(result.rank <= 16);
    CHECK(result.rank >= 1);
}

TEST_CASE("defect touches only cross-bond endpoints") {
    const CubeGeometry g = CubeGeometry::build(2, 6);
    const Partition p = Partition::build(g, 2);
    const DefectResult result = decoupling_defect(g, p);
    std::set<int> touched;
    for (const Bond& b : cross_bonds(p)) {
        touched.insert(b.a);
        touched.insert(b.b);
    }
    for (int site = 0; site < g.site_count(); ++site) {
        if (!touched.contains(site)) CHECK(result.defect.entry(site, site) == 0.0);
    }
    for (const Bond& b : result.defect.bonds()) {
        CHECK(touched.contains(b.a));
        CHECK(touched.contains(b.b));
    }
}

TEST_CASE("decoupling is positive semidefinite with monotone eigenvalues") {
    const SingleSiteDensity density = SingleSiteDensity::uniform(-1.0, 1.0);
    for (const auto& [d, L, ell] : {std::tuple{1, 8, 2}, std::tuple{1, 9, 3}, std::tuple{2, 4, 2}, std::tuple{2, 6, 3}}) {
        const CubeGeometry g = CubeGeometry::build(d, L);
        const Partition p = Partition::build(g, ell);
        const DefectResult defect = decoupling_defect(g, p);
        CHECK(full_spectrum(defect.defect).values.front() >= -1e-10);

        const DisorderField field = sample_field(density, g, 77, d * 10 + L);
        const EigenSpectrum full = full_spectrum(build_anderson(g, field));
        const EigenSpectrum split = full_spectrum(build_decoupled(g, p, &field));
        for (std::size_t k = 0; k < full.values.size(); ++k)
            CHECK(full.values[k] <= split.values[k] + 1e-10);
    }
}

TEST_CASE("spectra stay inside the shifted band") {
    const CubeGeometry g = CubeGeometry::build(2, 5);
    const EigenSpectrum free = full_spectrum(build_dirichlet_laplacian(g));
    CHECK(free.values.front() >= -4.0 - 1e-10);
    CHECK(free.values.back() <= 4.0 + 1e-10);

    const SingleSiteDensity density = SingleSiteDensity::uniform(0.5, 2.5);
    const DisorderField field = sample_field(density, g, 8, 0);
    const EigenSpectrum dressed = full_spectrum(build_anderson(g, field));
    const auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
    CHECK(dressed.values.front() >= -4.0 + *lo - 1e-10);
    CHECK(dressed.values.back() <= 4.0 + *hi + 1e-10);
}

TEST_CASE("single-cell defect rank respects the surface bound") {
    for (int d : {1, 2}) {
        for (int ell = 1; ell <= 4; ++ell) {
            const CubeGeometry g = CubeGeometry::build(d, 2 * ell);
            const Partition p = Partition::build(g, ell);
            const SymmetricOperator defect = cell_boundary_defect(g, p, 0);
            const EigenSpectrum spectrum = full_spectrum(defect);
            double largest = std::max(std::abs(spectrum.values.front()),
                                      std::abs(spectrum.values.back()));
            int rank = 0;
            for (double v : spectrum.values)
                if (largest > 0.0 && std::abs(v) > 1e-9 * largest) ++rank;
            const double bound = 4.0 * d * std::pow(ell, d - 1);
            CHECK(rank <= static_cast<int>(bound + 0.5));
        }
    }
}
