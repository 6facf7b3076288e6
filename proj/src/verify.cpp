#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "anderson/ids.hpp"
#include "anderson/levelstats.hpp"
#include "anderson/operators.hpp"
#include "anderson/rng.hpp"
#include "anderson/runner.hpp"
#include "anderson/spectral.hpp"
#include "anderson/wegner.hpp"

namespace anderson {

namespace {

struct Battery {
    std::ostream& log;
    bool all_ok = true;

    void check(const std::string& name, bool ok, const std::string& detail = "") {
        log << (ok ? "[ok]   " : "[FAIL] ") << name;
        if (!detail.empty()) log << "  (" << detail << ")";
        log << "\n";
        all_ok = all_ok && ok;
    }
};

double random_sign_value(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return 2.0 * site_uniform(seed, a, b) - 1.0;
}

SymmetricOperator random_dense_operator(std::uint64_t seed, int n) {
    std::vector<double> dense(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = random_sign_value(seed, static_cast<std::uint64_t>(i) * 4096 + j, 7);
            dense[static_cast<std::size_t>(i) * n + j] = v;
            dense[static_cast<std::size_t>(j) * n + i] = v;
        }
    return SymmetricOperator::from_dense(dense, n);
}

} // namespace

bool verify_all(std::ostream& log) {
    Battery battery{log};

    // lattice: neighbor symmetry, degree balance, partition reconstruction
    {
        bool ok = true;
        for (int d = 1; d <= 3 && ok; ++d) {
            const int side = d == 3 ? 4 : 6;
            const CubeGeometry g = CubeGeometry::build(d, side);
            for (int site = 0; site < g.site_count() && ok; ++site) {
                for (int nb : g.neighbors(site)) {
                    const auto& back = g.neighbors(nb);
                    ok = ok && std::find(back.begin(), back.end(), site) != back.end();
                }
                ok = ok && static_cast<int>(g.neighbors(site).size()) +
                                   g.exterior_neighbor_count(site) ==
                               2 * d;
            }
            if (side % 2 == 0) {
                const Partition p = Partition::build(g, 2);
                std::vector<int> seen(g.site_count(), 0);
                for (int c = 0; c < p.cell_count(); ++c)
                    for (int site : p.cell_sites(c)) ++seen[site];
                ok = ok && std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; });
            }
        }
        battery.check("lattice: neighbor symmetry, degrees, partition cover", ok);
    }

    // disorder: bit-reproducibility and support containment
    {
        const CubeGeometry g = CubeGeometry::build(1, 512);
        const SingleSiteDensity density = SingleSiteDensity::uniform(0.0, 1.0);
        const DisorderField a = sample_field(density, g, 11, 3);
        const DisorderField b = sample_field(density, g, 11, 3);
        bool ok = a.values == b.values;
        double mean = 0.0;
        for (double v : a.values) {
            ok = ok && v >= 0.0 && v < 1.0;
            mean += v;
        }
        mean /= a.values.size();
        battery.check("disorder: reproducible fields, support, mean",
                      ok && std::abs(mean - 0.5) < 0.05);
    }

    // operators: decoupling defect PSD and eigenvalue monotonicity
    {
        bool ok = true;
        double min_defect_eig = 0.0;
        for (int d = 1; d <= 2 && ok; ++d) {
            for (int side : {2, 4, 6}) {
                const CubeGeometry g = CubeGeometry::build(d, side);
                const Partition p = Partition::build(g, 2);
                const DefectResult defect = decoupling_defect(g, p);
                const EigenSpectrum ds = full_spectrum(defect.defect);
                min_defect_eig = std::min(min_defect_eig, ds.values.front());
                const SingleSiteDensity density = SingleSiteDensity::uniform(0.0, 2.0);
                const DisorderField field = sample_field(density, g, 5, d * 100 + side);
                const EigenSpectrum full = full_spectrum(build_anderson(g, field));
                const EigenSpectrum dec = full_spectrum(build_decoupled(g, p, &field));
                for (std::size_t k = 0; k < full.values.size(); ++k)
                    ok = ok && full.values[k] <= dec.values[k] + 1e-10;
            }
        }
        battery.check("operators: defect PSD and spectral monotonicity",
                      ok && min_defect_eig >= -1e-10);
    }

    // spectral: inertia counts match full spectra; switch-trace sandwich
    {
        bool ok = true;
        for (int trial = 0; trial < 50 && ok; ++trial) {
            const int n = 3 + static_cast<int>(site_uniform(21, trial, 0) * 57);
            const SymmetricOperator op = random_dense_operator(1000 + trial, n);
            const EigenSpectrum spectrum = full_spectrum(op);
            for (int q = 0; q < 10 && ok; ++q) {
                const double e =
                    spectrum.values.front() - 0.3 +
                    (spectrum.values.back() - spectrum.values.front() + 0.6) *
                        site_uniform(22, trial, q);
                const auto expected = std::upper_bound(spectrum.values.begin(),
                                                       spectrum.values.end(), e) -
                                      spectrum.values.begin();
                ok = ok && count_below(op, e) == expected;
            }
            const SwitchFunction f(0.25);
            const double lambda = 2.0 * site_uniform(23, trial, 0) - 1.0;
            const double trace = switch_trace(op, lambda, f);
            ok = ok && count_below(op, lambda - f.width()) <= trace + 1e-9 &&
                 trace <= count_below(op, lambda) + 1e-9;
        }
        battery.check("spectral: inertia vs eigensolver, switch-trace sandwich", ok);
    }

    // free IDS: symmetry, endpoints, closed-form agreement at d=1
    {
        bool ok = true;
        double worst = 0.0;
        for (int i = 0; i <= 50; ++i) {
            const double lambda = -1.95 + 3.9 * i / 50.0;
            const double conv = free_ids_infinite(1, lambda);
            const double exact = free_ids_infinite_1d_closed_form(lambda);
            worst = std::max(worst, std::abs(conv - exact));
            ok = ok && std::abs(free_ids_infinite(2, lambda) +
                                free_ids_infinite(2, -lambda) - 1.0) < 1e-9;
        }
        ok = ok && worst < 1e-6;
        ok = ok && free_ids_infinite(2, -4.0) == 0.0 && free_ids_infinite(2, 4.0) == 1.0;
        std::ostringstream detail;
        detail << "max |conv - closed form| = " << worst;
        battery.check("free IDS: closed form, symmetry, endpoints", ok, detail.str());
    }

    // wegner: K limit example and certificate re-check identity
    {
        const double k = k_limit(1, 0.0, 0.0, 1.0, 0.1);
        const double expected = (std::acos(-0.4) - std::acos(-0.1)) / M_PI;
        bool ok = std::abs(k - expected) < 1e-6;
        const WegnerCertificate cert = lower_bound_constant(1, 0.0, 1.0, 1.0, 0.2);
        const WegnerCertificate again = recheck(cert);
        ok = ok && cert.to_json() == again.to_json() && std::isfinite(cert.log_c_delta);
        battery.check("wegner: K(E0) closed form, certificate recheck", ok);
    }

    // level statistics: KS accepts exponential spacings, rejects picket fence
    {
        SpacingSample synthetic;
        synthetic.realizations = 1;
        synthetic.window = 1.0;
        for (int i = 0; i < 2000; ++i)
            synthetic.spacings.push_back(-std::log(1.0 - site_uniform(31, 0, i)));
        const PoissonTestResult good = poisson_test(synthetic, 1.0, 0.15);
        SpacingSample fence;
        fence.realizations = 1;
        fence.window = 1.0;
        fence.spacings.assign(200, 1.0);
        const PoissonTestResult bad = poisson_test(fence, 1.0, 0.15);
        battery.check("level statistics: KS accepts Exp(1), rejects picket fence",
                      good.pass && !bad.pass);
    }

    // determinism: same seed twice, and 1 vs 4 workers
    {
        const SingleSiteDensity density = SingleSiteDensity::uniform(0.0, 1.0);
        const std::vector<double> grid = make_grid(-2.0, 3.0, 0.25);
        const SpectralCurve a = empirical_ids(1, 128, density, grid, 8, 99, 1);
        const SpectralCurve b = empirical_ids(1, 128, density, grid, 8, 99, 4);
        battery.check("determinism: worker budget does not change results",
                      a.values == b.values && a.stderrs == b.stderrs);
    }

    return battery.all_ok;
}

} // namespace anderson
