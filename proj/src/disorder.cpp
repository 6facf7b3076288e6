#include "anderson/disorder.hpp"

#include <algorithm>
#include <cmath>

#include "anderson/errors.hpp"
#include "anderson/rng.hpp"

namespace anderson {

namespace {

void require_support(double w_minus, double w_plus) {
    if (!(w_minus < w_plus)) throw ConfigError("density support requires W- < W+");
    if (!std::isfinite(w_minus) || !std::isfinite(w_plus))
        throw ConfigError("density support endpoints must be finite");
}

} // namespace

SingleSiteDensity SingleSiteDensity::uniform(double w_minus, double w_plus) {
    require_support(w_minus, w_plus);
    SingleSiteDensity rho;
    rho.kind_ = Kind::Uniform;
    rho.w_minus_ = w_minus;
    rho.w_plus_ = w_plus;
    const double height = 1.0 / (w_plus - w_minus);
    rho.rho_min_ = height;
    rho.rho_max_ = height;
    return rho;
}

SingleSiteDensity SingleSiteDensity::piecewise_constant(std::vector<double> breaks,
                                                        std::vector<double> values) {
    if (breaks.size() < 2 || values.size() + 1 != breaks.size())
        throw ConfigError("piecewise-constant density needs breaks.size() == values.size() + 1");
    if (!std::is_sorted(breaks.begin(), breaks.end()) ||
        std::adjacent_find(breaks.begin(), breaks.end()) != breaks.end())
        throw ConfigError("piecewise-constant breaks must be strictly increasing");
    require_support(breaks.front(), breaks.back());

    double mass = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 0.0) throw ConfigError("density values must be nonnegative");
        mass += values[i] * (breaks[i + 1] - breaks[i]);
    }
    if (mass <= 0.0) throw ConfigError("density has zero total mass");

    SingleSiteDensity rho;
    rho.kind_ = Kind::PiecewiseConstant;
    rho.w_minus_ = breaks.front();
    rho.w_plus_ = breaks.back();
    rho.nodes_ = std::move(breaks);
    rho.values_ = std::move(values);
    for (double& v : rho.values_) v /= mass;

    rho.cdf_.assign(rho.nodes_.size(), 0.0);
    for (std::size_t i = 0; i < rho.values_.size(); ++i)
        rho.cdf_[i + 1] = rho.cdf_[i] + rho.values_[i] * (rho.nodes_[i + 1] - rho.nodes_[i]);
    rho.cdf_.back() = 1.0;

    rho.rho_min_ = *std::min_element(rho.values_.begin(), rho.values_.end());
    rho.rho_max_ = *std::max_element(rho.values_.begin(), rho.values_.end());
    return rho;
}

SingleSiteDensity SingleSiteDensity::tabulated(std::vector<double> points,
                                               std::vector<double> densities) {
    if (points.size() < 2 || points.size() != densities.size())
        throw ConfigError("tabulated density needs matching point/value lists, >= 2 entries");
    if (!std::is_sorted(points.begin(), points.end()) ||
        std::adjacent_find(points.begin(), points.end()) != points.end())
        throw ConfigError("tabulated density points must be strictly increasing");
    require_support(points.front(), points.back());
    for (double v : densities)
        if (v < 0.0) throw ConfigError("density values must be nonnegative");

    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        mass += 0.5 * (densities[i] + densities[i + 1]) * (points[i + 1] - points[i]);
    if (mass <= 0.0) throw ConfigError("density has zero total mass");

    SingleSiteDensity rho;
    rho.kind_ = Kind::TruncatedCustom;
    rho.w_minus_ = points.front();
    rho.w_plus_ = points.back();
    rho.nodes_ = std::move(points);
    rho.values_ = std::move(densities);
    for (double& v : rho.values_) v /= mass;

    rho.cdf_.assign(rho.nodes_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < rho.nodes_.size(); ++i)
        rho.cdf_[i + 1] = rho.cdf_[i] + 0.5 * (rho.values_[i] + rho.values_[i + 1]) *
                                            (rho.nodes_[i + 1] - rho.nodes_[i]);
    rho.cdf_.back() = 1.0;

    rho.rho_min_ = *std::min_element(rho.values_.begin(), rho.values_.end());
    rho.rho_max_ = *std::max_element(rho.values_.begin(), rho.values_.end());
    return rho;
}

std::string SingleSiteDensity::kind_name() const {
    switch (kind_) {
        case Kind::Uniform: return "uniform";
        case Kind::PiecewiseConstant: return "piecewise-constant";
        case Kind::TruncatedCustom: return "truncated-custom";
    }
    return "unknown";
}

double SingleSiteDensity::density(double w) const {
    if (w < w_minus_ || w > w_plus_) return 0.0;
    switch (kind_) {
        case Kind::Uniform:
            return 1.0 / (w_plus_ - w_minus_);
        case Kind::PiecewiseConstant: {
            auto it = std::upper_bound(nodes_.begin(), nodes_.end(), w);
            std::size_t seg = (it == nodes_.begin()) ? 0 : (it - nodes_.begin() - 1);
            if (seg >= values_.size()) seg = values_.size() - 1;
            return values_[seg];
        }
        case Kind::TruncatedCustom: {
            auto it = std::upper_bound(nodes_.begin(), nodes_.end(), w);
            std::size_t seg = (it == nodes_.begin()) ? 0 : (it - nodes_.begin() - 1);
            if (seg + 1 >= nodes_.size()) seg = nodes_.size() - 2;
            const double t = (w - nodes_[seg]) / (nodes_[seg + 1] - nodes_[seg]);
            return values_[seg] + t * (values_[seg + 1] - values_[seg]);
        }
    }
    return 0.0;
}

double SingleSiteDensity::quantile(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    switch (kind_) {
        case Kind::Uniform:
            return w_minus_ + u * (w_plus_ - w_minus_);
        case Kind::PiecewiseConstant: {
            auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
            std::size_t seg = (it == cdf_.begin()) ? 0 : (it - cdf_.begin() - 1);
            if (seg >= values_.size()) seg = values_.size() - 1;
            // skip zero-mass segments the search may have landed on
            while (seg + 1 < values_.size() && values_[seg] == 0.0 && u >= cdf_[seg + 1]) ++seg;
            if (values_[seg] == 0.0) return nodes_[seg];
            return nodes_[seg] + (u - cdf_[seg]) / values_[seg];
        }
        case Kind::TruncatedCustom: {
            auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
            std::size_t seg = (it == cdf_.begin()) ? 0 : (it - cdf_.begin() - 1);
            if (seg + 1 >= nodes_.size()) seg = nodes_.size() - 2;
            const double width = nodes_[seg + 1] - nodes_[seg];
            const double a = values_[seg];
            const double slope = (values_[seg + 1] - values_[seg]) / width;
            const double target = u - cdf_[seg];
            // F(node + t) - F(node) = a t + slope t^2 / 2, monotone on [0, width]
            double t;
            if (std::abs(slope) < 1e-30) {
                t = (a > 0.0) ? target / a : 0.0;
            } else {
                const double disc = std::max(0.0, a * a + 2.0 * slope * target);
                t = (-a + std::sqrt(disc)) / slope;
            }
            return nodes_[seg] + std::clamp(t, 0.0, width);
        }
    }
    return w_minus_;
}

DisorderField sample_field(const SingleSiteDensity& density, const CubeGeometry& geometry,
                           std::uint64_t seed, std::int64_t realization) {
    DisorderField field;
    field.geometry = &geometry;
    field.seed = seed;
    field.realization = realization;
    field.values.resize(geometry.site_count());
    for (int site = 0; site < geometry.site_count(); ++site) {
        const double u = site_uniform(seed, static_cast<std::uint64_t>(realization),
                                      static_cast<std::uint64_t>(site));
        field.values[site] = density.quantile(u);
    }
    return field;
}

std::vector<Interval> deterministic_spectrum(const SingleSiteDensity& density, int dimension) {
    if (dimension < 1) throw ConfigError("dimension must be >= 1");
    return {{-2.0 * dimension + density.w_minus(), 2.0 * dimension + density.w_plus()}};
}

FloorCheckResult density_floor_check(const SingleSiteDensity& density, int grid_points) {
    if (grid_points < 2) throw ConfigError("density_floor_check needs >= 2 grid points");
    const double lo = density.w_minus();
    const double hi = density.w_plus();
    double measured = density.density(lo);
    for (int i = 1; i < grid_points; ++i) {
        const double w = lo + (hi - lo) * static_cast<double>(i) / (grid_points - 1);
        measured = std::min(measured, density.density(w));
    }
    const double tolerance = 1e-12 + 1e-9 * std::abs(density.rho_min());
    return {measured >= density.rho_min() - tolerance, measured};
}

} // namespace anderson
