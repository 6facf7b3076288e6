#include "anderson/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "anderson/errors.hpp"

namespace anderson {

namespace detail {

// Eigenvalue-only Householder reduction, after the classic tred lineage
// (Martin, Reinsch, Wilkinson; EISPACK tred1).
void householder_tridiagonalize(std::vector<double>& dense, int n, std::vector<double>& diag,
                                std::vector<double>& sub) {
    auto a = [&](int i, int j) -> double& { return dense[static_cast<std::size_t>(i) * n + j]; };
    std::vector<double> e(n, 0.0);

    for (int i = n - 1; i >= 1; --i) {
        const int l = i - 1;
        double h = 0.0;
        if (l > 0) {
            double scale = 0.0;
            for (int k = 0; k <= l; ++k) scale += std::abs(a(i, k));
            if (scale == 0.0) {
                e[i] = a(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    a(i, k) /= scale;
                    h += a(i, k) * a(i, k);
                }
                double f = a(i, l);
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                a(i, l) = f - g;
                // p = A u / h, then q = p - (u^T p / 2h) u, stored in e[0..l]
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
                    for (int k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
                    e[j] = g / h;
                    f += e[j] * a(i, j);
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = a(i, j);
                    g = e[j] - hh * f;
                    e[j] = g;
                    for (int k = 0; k <= j; ++k) a(j, k) -= f * e[k] + g * a(i, k);
                }
            }
        } else {
            e[i] = a(i, l);
        }
    }

    diag.resize(n);
    sub.assign(std::max(0, n - 1), 0.0);
    for (int i = 0; i < n; ++i) diag[i] = a(i, i);
    for (int i = 1; i < n; ++i) sub[i - 1] = e[i];
}

// QL iteration with implicit Wilkinson shifts, after the Algol tql1 of
// Bowdler, Martin, Reinsch and Wilkinson.
void tql_implicit_shift(std::vector<double>& diag, std::vector<double>& sub, int max_sweeps) {
    const int n = static_cast<int>(diag.size());
    if (n <= 1) return;
    std::vector<double> e(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) e[i] = sub[i];

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
                if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m != l) {
                if (iter++ == max_sweeps)
                    throw SolverError("tridiagonal QL failed to converge for eigenvalue " +
                                      std::to_string(l) + " after " + std::to_string(max_sweeps) +
                                      " sweeps (n = " + std::to_string(n) + ")");
                double g = (diag[l + 1] - diag[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = diag[m] - diag[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0;
                double c = 1.0;
                double p = 0.0;
                bool underflow = false;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        diag[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = diag[i + 1] - p;
                    r = (diag[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    diag[i + 1] = g + p;
                    g = c * r - b;
                }
                if (underflow) continue;
                diag[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

namespace {

// Overflow guard for unpivoted recurrences; exact zeros are handled first.
double pivot_floor(double scale) {
    return 1e-280 * std::max(1.0, scale * scale);
}

} // namespace

int sturm_negative_pivots(const std::vector<double>& diag, const std::vector<double>& sub,
                          double shift) {
    double scale = std::abs(shift);
    for (double v : diag) scale = std::max(scale, std::abs(v));
    for (double v : sub) scale = std::max(scale, std::abs(v));
    const double floor = pivot_floor(scale);

    int count = 0;
    double d = diag[0] - shift;
    if (d == 0.0 || std::abs(d) < floor) return -1;
    if (d < 0.0) ++count;
    for (std::size_t i = 1; i < diag.size(); ++i) {
        d = (diag[i] - shift) - sub[i - 1] * sub[i - 1] / d;
        if (d == 0.0 || std::abs(d) < floor) return -1;
        if (d < 0.0) ++count;
    }
    return count;
}

int banded_negative_pivots(const SymmetricOperator& op, double shift) {
    const int n = op.dim();
    const int b = op.bandwidth();
    const double scale = std::max(op.max_abs_entry(), std::abs(shift));
    const double floor = pivot_floor(scale);

    // w[r * n + j] holds entry (j + r, j) of the working matrix, r = 0..b.
    std::vector<double> w(static_cast<std::size_t>(b + 1) * n, 0.0);
    for (int j = 0; j < n; ++j) w[j] = op.diagonal()[j] - shift;
    const BondSet& bonds = op.bonds();
    const std::vector<double>& values = op.bond_values();
    for (std::size_t k = 0; k < bonds.size(); ++k)
        w[static_cast<std::size_t>(bonds[k].b - bonds[k].a) * n + bonds[k].a] = values[k];

    int count = 0;
    for (int j = 0; j < n; ++j) {
        const double d = w[j];
        if (d == 0.0 || std::abs(d) < floor) return -1;
        if (d < 0.0) ++count;
        const int reach = std::min(b, n - 1 - j);
        for (int p = 1; p <= reach; ++p) {
            const double lp = w[static_cast<std::size_t>(p) * n + j] / d;
            for (int q = p; q <= reach; ++q)
                w[static_cast<std::size_t>(q - p) * n + (j + p)] -=
                    lp * w[static_cast<std::size_t>(q) * n + j];
        }
    }
    return count;
}

int dense_bk_negative_pivots(std::vector<double> dense, int n, double scale) {
    auto a = [&](int i, int j) -> double& { return dense[static_cast<std::size_t>(i) * n + j]; };
    constexpr double kAlpha = 0.6403882032022076; // (1 + sqrt(17)) / 8
    const double floor = pivot_floor(scale);

    auto swap_rows_cols = [&](int p, int q) {
        if (p == q) return;
        for (int k = 0; k < n; ++k) std::swap(a(p, k), a(q, k));
        for (int k = 0; k < n; ++k) std::swap(a(k, p), a(k, q));
    };

    int count = 0;
    int k = 0;
    while (k < n) {
        if (k == n - 1) {
            const double piv = a(k, k);
            if (piv == 0.0 || std::abs(piv) < floor) return -1;
            if (piv < 0.0) ++count;
            break;
        }

        // largest off-diagonal magnitude in column k below the diagonal
        double lambda = 0.0;
        int r = k + 1;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > lambda) {
                lambda = std::abs(a(i, k));
                r = i;
            }

        bool use_two = false;
        if (std::abs(a(k, k)) >= kAlpha * lambda) {
            // 1x1 pivot at k
        } else {
            double sigma = 0.0;
            for (int i = k; i < n; ++i)
                if (i != r) sigma = std::max(sigma, std::abs(a(i, r)));
            if (std::abs(a(k, k)) * sigma >= kAlpha * lambda * lambda) {
                // 1x1 pivot at k
            } else if (std::abs(a(r, r)) >= kAlpha * sigma) {
                swap_rows_cols(k, r); // 1x1 pivot at the interchanged position
            } else {
                swap_rows_cols(k + 1, r);
                use_two = true;
            }
        }

        if (!use_two) {
            const double piv = a(k, k);
            if (piv == 0.0 || std::abs(piv) < floor) return -1;
            if (piv < 0.0) ++count;
            for (int i = k + 1; i < n; ++i) {
                const double l = a(i, k) / piv;
                if (l == 0.0) continue;
                for (int j = i; j < n; ++j) {
                    a(i, j) -= l * a(j, k);
                    a(j, i) = a(i, j);
                }
            }
            ++k;
        } else {
            const double p00 = a(k, k);
            const double p01 = a(k + 1, k);
            const double p11 = a(k + 1, k + 1);
            const double det = p00 * p11 - p01 * p01;
            if (det == 0.0 || std::abs(det) < floor * std::max(1.0, std::abs(p00) + std::abs(p11)))
                return -1;
            if (det < 0.0)
                ++count; // one negative, one positive
            else if (p00 + p11 < 0.0)
                count += 2;
            const double i00 = p11 / det;
            const double i01 = -p01 / det;
            const double i11 = p00 / det;
            for (int i = k + 2; i < n; ++i) {
                const double c0 = a(i, k);
                const double c1 = a(i, k + 1);
                const double x = c0 * i00 + c1 * i01;
                const double y = c0 * i01 + c1 * i11;
                if (x == 0.0 && y == 0.0) continue;
                for (int j = i; j < n; ++j) {
                    a(i, j) -= x * a(j, k) + y * a(j, k + 1);
                    a(j, i) = a(i, j);
                }
            }
            k += 2;
        }
    }
    return count;
}

} // namespace detail

namespace {

void extract_tridiagonal(const SymmetricOperator& op, std::vector<double>& diag,
                         std::vector<double>& sub) {
    diag = op.diagonal();
    sub.assign(std::max(0, op.dim() - 1), 0.0);
    const BondSet& bonds = op.bonds();
    const std::vector<double>& values = op.bond_values();
    for (std::size_t k = 0; k < bonds.size(); ++k) sub[bonds[k].a] = values[k];
}

} // namespace

EigenSpectrum full_spectrum(const SymmetricOperator& op) {
    EigenSpectrum spectrum;
    const int n = op.dim();
    if (n == 0) return spectrum;

    std::vector<double> diag;
    std::vector<double> sub;
    if (op.bandwidth() <= 1) {
        extract_tridiagonal(op, diag, sub);
    } else {
        std::vector<double> dense = op.to_dense();
        detail::householder_tridiagonalize(dense, n, diag, sub);
    }
    detail::tql_implicit_shift(diag, sub);
    std::sort(diag.begin(), diag.end());
    spectrum.values = std::move(diag);

    double sum = 0.0;
    for (double v : spectrum.values) sum += v;
    spectrum.trace_residual =
        std::abs(sum - op.trace()) / (n * std::max(1.0, op.max_abs_entry()));
    return spectrum;
}

int count_below(const SymmetricOperator& op, double energy, CountMetadata* meta) {
    const int n = op.dim();
    if (n == 0) {
        if (meta) *meta = {energy, 0, "empty"};
        return 0;
    }

    const double scale = std::max({1.0, op.max_abs_entry(), std::abs(energy)});
    const double nudge = 1e-12 * scale;

    const int bw = op.bandwidth();
    const char* method;
    std::vector<double> diag;
    std::vector<double> sub;
    std::vector<double> dense;
    if (bw <= 1) {
        method = "sturm-tridiagonal";
        extract_tridiagonal(op, diag, sub);
    } else if (bw <= 128) {
        method = "ldlt-banded";
    } else {
        method = "bunch-kaufman-dense";
        dense = op.to_dense();
    }

    for (int attempt = 0; attempt < 8; ++attempt) {
        const double shifted = energy + attempt * nudge;
        int negatives;
        if (bw <= 1) {
            negatives = detail::sturm_negative_pivots(diag, sub, shifted);
        } else if (bw <= 128) {
            negatives = detail::banded_negative_pivots(op, shifted);
        } else {
            std::vector<double> work = dense;
            for (int i = 0; i < n; ++i) work[static_cast<std::size_t>(i) * n + i] -= shifted;
            negatives = detail::dense_bk_negative_pivots(std::move(work), n, scale);
        }
        if (negatives >= 0) {
            if (meta) *meta = {shifted, attempt, method};
            return negatives;
        }
    }
    throw SolverError("inertia count hit unusable pivots after 8 nudges at E = " +
                      std::to_string(energy));
}

SwitchFunction::SwitchFunction(double width) : width_(width) {
    if (!(width > 0.0)) throw ConfigError("switch function width must be positive");
}

double SwitchFunction::operator()(double t) const noexcept {
    if (t <= 0.0) return 0.0;
    if (t >= width_) return 1.0;
    const double u = t / width_;
    return u * u * (3.0 - 2.0 * u);
}

double switch_trace(const SymmetricOperator& op, double lambda, const SwitchFunction& f) {
    const EigenSpectrum spectrum = full_spectrum(op);
    double total = 0.0;
    for (double v : spectrum.values) total += f(lambda - v);
    return total;
}

std::pair<double, double> monotonicity_probe(const SymmetricOperator& op, int site,
                                             double increment, double lambda,
                                             const SwitchFunction& f) {
    if (increment < 0.0) throw ConfigError("monotonicity probe requires increment >= 0");
    const double before = switch_trace(op, lambda, f);
    const double after = switch_trace(op.with_diagonal_increment(site, increment), lambda, f);
    return {before, after};
}

} // namespace anderson
