#pragma once

#include <utility>
#include <vector>

#include "anderson/operators.hpp"

namespace anderson {

/// Eigenvalues in ascending order plus a trace-consistency residual
/// |sum(values) - tr(A)| / (n * max(1, max |entry|)).
struct EigenSpectrum {
    std::vector<double> values;
    double trace_residual = 0.0;
};

/// All eigenvalues. Operators of bandwidth <= 1 go straight to the
/// tridiagonal QL iteration; anything else is Householder-reduced first
/// (dense path, size-budgeted). Throws SolverError on non-convergence.
EigenSpectrum full_spectrum(const SymmetricOperator& op);

struct CountMetadata {
    double energy_used = 0.0; ///< possibly nudged energy actually factorized
    int nudges = 0;           ///< zero-pivot retries taken
    const char* method = ""; ///< factorization path
};

/// Number of eigenvalues <= energy, via the inertia (negative pivot count)
/// of a symmetric factorization of A - E*I. Eigenvalues exactly at E are
/// counted: a zero pivot triggers a deterministic retry at
/// E + 10^-12 * scale, reported through `meta`.
int count_below(const SymmetricOperator& op, double energy, CountMetadata* meta = nullptr);

/// C^1 monotone ramp: 0 for t <= 0, 1 for t >= width, cubic smoothstep
/// 3u^2 - 2u^3 in between.
class SwitchFunction {
public:
    explicit SwitchFunction(double width);
    double width() const noexcept { return width_; }
    double operator()(double t) const noexcept;

private:
    double width_;
};

/// tr f(lambda - A) = sum_k f(lambda - lambda_k).
double switch_trace(const SymmetricOperator& op, double lambda, const SwitchFunction& f);

/// Switch trace before and after adding `increment` to one diagonal entry.
/// Raising a coupling can only lower the trace (up to solver noise).
std::pair<double, double> monotonicity_probe(const SymmetricOperator& op, int site,
                                             double increment, double lambda,
                                             const SwitchFunction& f);

namespace detail {

/// Householder reduction of a dense symmetric matrix (row-major, destroyed)
/// to tridiagonal form; returns diagonal (n) and subdiagonal (n-1).
void householder_tridiagonalize(std::vector<double>& dense, int n, std::vector<double>& diag,
                                std::vector<double>& sub);

/// Implicit-shift QL iteration on a tridiagonal matrix, eigenvalues only.
/// `diag` becomes the unsorted eigenvalues; `sub` is destroyed. Throws
/// SolverError when any eigenvalue needs more than `max_sweeps` sweeps.
void tql_implicit_shift(std::vector<double>& diag, std::vector<double>& sub,
                        int max_sweeps = 60);

/// Negative-pivot count of T - shift*I for a tridiagonal matrix; returns -1
/// when a pivot is exactly zero or small enough to risk overflow.
int sturm_negative_pivots(const std::vector<double>& diag, const std::vector<double>& sub,
                          double shift);

/// Negative-pivot count via no-pivot banded LDL^T; -1 on unusable pivot.
int banded_negative_pivots(const SymmetricOperator& op, double shift);

/// Negative-pivot count via dense Bunch-Kaufman LDL^T; -1 on unusable pivot.
int dense_bk_negative_pivots(std::vector<double> dense, int n, double scale);

} // namespace detail

} // namespace anderson
