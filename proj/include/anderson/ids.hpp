#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "anderson/disorder.hpp"

namespace anderson {

/// Tabulated nondecreasing spectral function (IDS) or its derivative (DOS)
/// on an ascending energy grid, with per-point Monte Carlo standard errors
/// and key=value metadata describing how it was produced.
struct SpectralCurve {
    std::vector<double> energies;
    std::vector<double> values;
    std::vector<double> stderrs;
    std::map<std::string, std::string> metadata;

    /// `# key=value` comment lines (sorted keys), a header row, then
    /// `energy,value,stderr` rows at 17 significant digits.
    void write_csv(std::ostream& out) const;
};

/// Ascending grid lo, lo+step, ... up to hi (inclusive within half a step).
std::vector<double> make_grid(double lo, double hi, double step);

/// Monte Carlo integrated density of states: for each grid energy, the
/// average over `realizations` disorder samples of count_below(H, E) / L^d.
/// Realization r is a pure function of (seed, r); the reduction is an
/// ordered fold, so results do not depend on the worker budget.
SpectralCurve empirical_ids(int dimension, int side, const SingleSiteDensity& density,
                            const std::vector<double>& energies, int realizations,
                            std::uint64_t seed, int workers = 1);

/// Centered difference (N(E+h/2) - N(E-h/2)) / h on interior grid points,
/// linearly interpolating the tabulated curve at the half-offsets. Standard
/// errors are propagated in quadrature.
SpectralCurve empirical_dos(const SpectralCurve& ids, double bin_width);

/// Finite-volume free IDS: eigenvalue counting of the side-ell Dirichlet
/// Laplacian divided by ell^d. Spectra are cached per (d, ell).
double free_ids_finite(int dimension, int ell, double lambda);

/// Infinite-volume free IDS: CDF at lambda of the sum of d independent
/// arcsine-distributed variables on (-2, 2), computed by analytic per-cell
/// integration on a 2^16 grid and FFT self-convolution. Exact 0/1 outside
/// [-2d, 2d]. Tables are cached per dimension.
double free_ids_infinite(int dimension, double lambda);

/// d = 1 closed form 1 - arccos(lambda/2) / pi, clamped outside [-2, 2].
double free_ids_infinite_1d_closed_form(double lambda);

/// Tabulation of the infinite-volume free IDS with a crude sup-norm bound
/// on the tabulation error.
struct FreeIDSTable {
    int dimension = 0;
    std::vector<double> grid;
    std::vector<double> values;
    double error_bound = 0.0;
};

FreeIDSTable tabulate_free_ids(int dimension, const std::vector<double>& grid);

} // namespace anderson
