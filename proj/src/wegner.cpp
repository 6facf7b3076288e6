#include "anderson/wegner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "anderson/errors.hpp"
#include "anderson/parallel.hpp"
#include "anderson/version.hpp"

namespace anderson {

namespace {

void require_delta(double w_minus, double w_plus, double delta) {
    if (!(w_minus < w_plus)) throw ConfigError("window requires W- < W+");
    if (!(delta > 0.0) || !(delta < 0.25 * (w_plus - w_minus)))
        throw ConfigError("delta must lie in ]0, (W+ - W-)/4[");
}

} // namespace

KRecord k_ell(int dimension, int ell, double e1, double e2, double w_minus, double w_plus,
              double delta) {
    if (ell < 1) throw ConfigError("k_ell needs ell >= 1");
    require_delta(w_minus, w_plus, delta);
    KRecord record;
    record.e1 = e1;
    record.e2 = e2;
    record.delta = delta;
    record.ell = ell;
    record.value = free_ids_finite(dimension, ell, e1 - w_minus - delta) -
                   free_ids_finite(dimension, ell, e2 - w_plus + delta);
    return record;
}

double k_limit(int dimension, double e0, double w_minus, double w_plus, double delta) {
    require_delta(w_minus, w_plus, delta);
    return free_ids_infinite(dimension, e0 - w_minus - 2.0 * delta) -
           free_ids_infinite(dimension, e0 - w_plus + 2.0 * delta);
}

int default_ell_max(int dimension) {
    int ell = 1;
    while (true) {
        std::int64_t sites = 1;
        for (int i = 0; i < dimension; ++i) sites *= (ell + 1);
        if (sites > 4096) return ell;
        ++ell;
    }
}

int find_ell(int dimension, double e0, double w_minus, double w_plus, double delta,
             double d_rank, int ell_max) {
    require_delta(w_minus, w_plus, delta);
    if (ell_max < 1) throw ConfigError("find_ell needs ell_max >= 1");
    if (d_rank < 0.0) throw ConfigError("find_ell needs d_rank >= 0");

    const double k_target = k_limit(dimension, e0, w_minus, w_plus, delta);
    if (!(k_target > 0.0))
        throw SearchError("E0 = " + std::to_string(e0) +
                          " lies outside the positivity window (K(E0) = " +
                          std::to_string(k_target) + ")");

    std::vector<double> trajectory;
    trajectory.reserve(static_cast<std::size_t>(ell_max));
    for (int ell = 1; ell <= ell_max; ++ell) {
        const double k_value =
            k_ell(dimension, ell, e0 - delta, e0 + delta, w_minus, w_plus, delta).value;
        trajectory.push_back(k_value);
        if (k_value - d_rank / ell >= 0.5 * k_target) return ell;
    }

    std::ostringstream message;
    message << "no ell <= " << ell_max << " satisfies K_ell - D/ell >= K/2 at E0 = " << e0
            << " (K = " << k_target << "); trajectory tail:";
    const std::size_t tail = std::min<std::size_t>(8, trajectory.size());
    for (std::size_t i = trajectory.size() - tail; i < trajectory.size(); ++i)
        message << ' ' << trajectory[i];
    throw SearchError(message.str());
}

double center_log_contribution(double alpha, double delta_mach, double rho_min, double k_value) {
    return alpha * std::log(delta_mach * rho_min) - std::log(2.0 * delta_mach) +
           std::log(k_value);
}

namespace {

std::vector<double> covering_centers(int dimension, double w_minus, double w_plus,
                                     double delta) {
    const double delta_mach = 0.5 * delta;
    const double window_lo = -2.0 * dimension + w_minus + delta;
    const double window_hi = 2.0 * dimension + w_plus - delta;
    const double last_valid = window_hi - delta_mach;
    const double tol = 1e-12 * std::max(1.0, std::abs(window_hi));
    std::vector<double> centers;
    for (int j = 0;; ++j) {
        const double e = window_lo + delta_mach * (2 * j + 1);
        if (e > last_valid + tol) break;
        centers.push_back(std::min(e, last_valid));
    }
    // clamp a final center when the regular spacing leaves the right edge
    // uncovered
    if (centers.empty() || centers.back() + delta_mach < window_hi - tol) {
        if (centers.empty() || last_valid - centers.back() > tol)
            centers.push_back(last_valid);
    }
    return centers;
}

} // namespace

WegnerCertificate lower_bound_constant(int dimension, double w_minus, double w_plus,
                                       double rho_min, double delta, int ell_max, double d_rank,
                                       int workers) {
    require_delta(w_minus, w_plus, delta);
    if (!(rho_min > 0.0)) throw ConfigError("rho_min must be positive");
    if (ell_max <= 0) ell_max = default_ell_max(dimension);
    if (d_rank < 0.0) d_rank = 4.0 * dimension;

    WegnerCertificate cert;
    cert.tool_version = kToolVersion;
    cert.dimension = dimension;
    cert.w_minus = w_minus;
    cert.w_plus = w_plus;
    cert.rho_min = rho_min;
    cert.delta = delta;
    cert.delta_mach = 0.5 * delta;
    cert.d_rank = d_rank;
    cert.ell_max = ell_max;
    cert.window_lo = -2.0 * dimension + w_minus + delta;
    cert.window_hi = 2.0 * dimension + w_plus - delta;

    const std::vector<double> centers = covering_centers(dimension, w_minus, w_plus, delta);
    const std::function<CenterRecord(int)> solve_center = [&](int j) {
        const double e0 = centers[static_cast<std::size_t>(j)];
        CenterRecord record;
        record.energy = e0;
        record.k_value = k_limit(dimension, e0, w_minus, w_plus, cert.delta_mach);
        record.ell = find_ell(dimension, e0, w_minus, w_plus, cert.delta_mach, d_rank, ell_max);
        record.alpha = std::pow(static_cast<double>(record.ell), dimension);
        record.log_contribution =
            center_log_contribution(record.alpha, cert.delta_mach, rho_min, record.k_value);
        return record;
    };
    cert.centers = parallel_map<CenterRecord>(static_cast<int>(centers.size()), workers,
                                              solve_center, "certificate center");

    cert.log_c_delta = cert.centers.front().log_contribution;
    for (const CenterRecord& record : cert.centers)
        cert.log_c_delta = std::min(cert.log_c_delta, record.log_contribution);
    if (!std::isfinite(cert.log_c_delta))
        throw SolverError("certificate log C_delta is not finite");
    return cert;
}

WegnerCertificate recheck(const WegnerCertificate& certificate) {
    return lower_bound_constant(certificate.dimension, certificate.w_minus, certificate.w_plus,
                                certificate.rho_min, certificate.delta, certificate.ell_max,
                                certificate.d_rank);
}

std::string WegnerCertificate::c_delta_string() const {
    const double log10_c = log_c_delta / std::log(10.0);
    const double exponent = std::floor(log10_c);
    const double mantissa = std::pow(10.0, log10_c - exponent);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6fe%+d", mantissa, static_cast<int>(exponent));
    return buf;
}

nlohmann::json WegnerCertificate::to_json() const {
    nlohmann::json centers_json = nlohmann::json::array();
    for (const CenterRecord& record : centers) {
        centers_json.push_back({{"E", record.energy},
                                {"K", record.k_value},
                                {"ell", record.ell},
                                {"alpha", record.alpha},
                                {"log_contribution", record.log_contribution}});
    }
    return nlohmann::json{
        {"tool_version", tool_version},
        {"d", dimension},
        {"W_minus", w_minus},
        {"W_plus", w_plus},
        {"rho_min", rho_min},
        {"delta", delta},
        {"delta_mach", delta_mach},
        {"D_rank", d_rank},
        {"ell_max", ell_max},
        {"window", {window_lo, window_hi}},
        {"covering_halfwidth", delta_mach},
        {"centers", centers_json},
        {"log_C_delta", log_c_delta},
        {"log10_C_delta", log_c_delta / std::log(10.0)},
        {"C_delta", c_delta_string()},
        {"note", "covering runs at delta_mach = delta/2 so all centers stay strictly inside "
                 "the open positivity window while the intervals cover the closed target "
                 "window; D_rank is the recorded rank constant, not a sharp value"}};
}

UpperBoundReport upper_bound_check(const SpectralCurve& dos, std::optional<double> rho_max) {
    UpperBoundReport report;
    if (!rho_max.has_value()) {
        report.skipped = true;
        return report;
    }
    report.rho_max = *rho_max;
    report.bins = static_cast<int>(dos.values.size());
    for (std::size_t i = 0; i < dos.values.size(); ++i) {
        const double se = i < dos.stderrs.size() ? dos.stderrs[i] : 0.0;
        const double allowance = *rho_max + 3.0 * se;
        if (allowance > 0.0)
            report.max_ratio = std::max(report.max_ratio, dos.values[i] / allowance);
        if (dos.values[i] > allowance) ++report.violations;
    }
    report.pass = report.violations == 0;
    return report;
}

nlohmann::json UpperBoundReport::to_json() const {
    if (skipped)
        return nlohmann::json{{"skipped", true},
                              {"reason", "density declares an unbounded rho_max"}};
    return nlohmann::json{{"skipped", false},     {"pass", pass},
                          {"rho_max", rho_max},   {"max_ratio", max_ratio},
                          {"violations", violations}, {"bins", bins}};
}

} // namespace anderson
