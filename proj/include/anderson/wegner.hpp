#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anderson/ids.hpp"

namespace anderson {

/// Difference of finite-volume free IDS values at shifted energies,
/// K_ell(E1, E2) = N0_ell(E1 - W- - delta) - N0_ell(E2 - W+ + delta).
struct KRecord {
    double e1 = 0.0;
    double e2 = 0.0;
    double delta = 0.0;
    int ell = 0;
    double value = 0.0;
};

KRecord k_ell(int dimension, int ell, double e1, double e2, double w_minus, double w_plus,
              double delta);

/// Infinite-volume limit K(E0) = N0(E0 - W- - 2 delta) - N0(E0 - W+ + 2 delta);
/// strictly positive inside ]-2d+W-+2delta, 2d+W+-2delta[ and 0 outside.
double k_limit(int dimension, double e0, double w_minus, double w_plus, double delta);

/// Default length cap: the largest ell with ell^d <= 4096 sites.
int default_ell_max(int dimension);

/// Smallest ell <= ell_max with K_ell(E0-delta, E0+delta) - d_rank/ell >=
/// K(E0)/2. Throws SearchError when E0 lies outside the positivity window
/// or the search exhausts ell_max (with the K_ell trajectory attached).
int find_ell(int dimension, double e0, double w_minus, double w_plus, double delta,
             double d_rank, int ell_max);

struct CenterRecord {
    double energy = 0.0;
    double k_value = 0.0;         ///< K(E_j) at the machinery half-width
    int ell = 0;                  ///< ell_{E_j} from find_ell
    double alpha = 0.0;           ///< ell^d
    double log_contribution = 0.0; ///< alpha*ln(delta_mach*rho_min) - ln(2 delta_mach) + ln K
};

/// Per-window certificate for the lower-bound constant. All products are
/// kept in natural-log space; the linear-scale constant is only ever
/// rendered as a decimal string. The covering runs at half the requested
/// window parameter (delta_mach = delta/2) so every center lies strictly
/// inside the K-positivity window while the 2*delta_mach intervals still
/// cover the closed target window [-2d+W-+delta, 2d+W+-delta].
struct WegnerCertificate {
    std::string tool_version;
    int dimension = 0;
    double w_minus = 0.0;
    double w_plus = 0.0;
    double rho_min = 0.0;
    double delta = 0.0;      ///< requested window parameter
    double delta_mach = 0.0; ///< covering half-width actually used (delta/2)
    double d_rank = 0.0;
    int ell_max = 0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::vector<CenterRecord> centers;
    double log_c_delta = 0.0; ///< natural log of the certified constant

    nlohmann::json to_json() const;
    std::string c_delta_string() const; ///< decimal mantissa/exponent rendering
};

/// Per-center contribution in natural-log space.
double center_log_contribution(double alpha, double delta_mach, double rho_min, double k_value);

/// Builds the covering, searches ell per center, and assembles the
/// certificate. Throws SearchError naming the failing center if any
/// find_ell search fails.
WegnerCertificate lower_bound_constant(int dimension, double w_minus, double w_plus,
                                       double rho_min, double delta, int ell_max = 0,
                                       double d_rank = -1.0, int workers = 1);

/// Recomputes every derived field of a certificate from its recorded
/// inputs; the result must reproduce the original bit-exactly.
WegnerCertificate recheck(const WegnerCertificate& certificate);

struct UpperBoundReport {
    bool skipped = false; ///< density declared an unbounded ceiling
    bool pass = false;
    double rho_max = 0.0;
    double max_ratio = 0.0; ///< max over bins of value / (rho_max + 3 stderr)
    int violations = 0;
    int bins = 0;

    nlohmann::json to_json() const;
};

/// Per-bin check value <= rho_max + 3*stderr against a DOS curve.
UpperBoundReport upper_bound_check(const SpectralCurve& dos, std::optional<double> rho_max);

} // namespace anderson
