#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "anderson/lattice.hpp"

namespace anderson {

/// Single-site law of the random couplings. Supported shapes: uniform on
/// [W-, W+], piecewise-constant, and a tabulated ("truncated-custom")
/// piecewise-linear density. The density integrates to one over [W-, W+]
/// and carries a declared essential floor rho_min (> 0 on the support) and
/// an optional ceiling rho_max; absent rho_max marks an unbounded declared
/// ceiling, which downstream upper-bound checks must skip.
class SingleSiteDensity {
public:
    enum class Kind { Uniform, PiecewiseConstant, TruncatedCustom };

    static SingleSiteDensity uniform(double w_minus, double w_plus);

    /// breaks.size() == values.size() + 1; density is values[i] on
    /// [breaks[i], breaks[i+1]). Values are normalized to unit mass.
    static SingleSiteDensity piecewise_constant(std::vector<double> breaks,
                                                std::vector<double> values);

    /// Tabulated density, linearly interpolated between nodes and normalized.
    static SingleSiteDensity tabulated(std::vector<double> points,
                                       std::vector<double> densities);

    Kind kind() const noexcept { return kind_; }
    std::string kind_name() const;
    double w_minus() const noexcept { return w_minus_; }
    double w_plus() const noexcept { return w_plus_; }

    double rho_min() const noexcept { return rho_min_; }
    std::optional<double> rho_max() const noexcept { return rho_max_; }

    /// Override the declared floor/ceiling (e.g. from a config file).
    void declare_rho_min(double value) { rho_min_ = value; }
    void declare_rho_max(std::optional<double> value) { rho_max_ = value; }

    /// Density value at w (0 outside [W-, W+]).
    double density(double w) const;

    /// Inverse CDF: maps u in [0,1) to a sample in [W-, W+].
    double quantile(double u) const;

private:
    SingleSiteDensity() = default;

    Kind kind_ = Kind::Uniform;
    double w_minus_ = 0.0;
    double w_plus_ = 1.0;
    double rho_min_ = 1.0;
    std::optional<double> rho_max_ = 1.0;
    // piecewise-constant: nodes_/values_ are segment breaks and heights;
    // tabulated: nodes_/values_ are interpolation points, cdf_ cumulative.
    std::vector<double> nodes_;
    std::vector<double> values_;
    std::vector<double> cdf_;
};

/// One i.i.d. coupling per site plus the seed record that regenerates it.
struct DisorderField {
    const CubeGeometry* geometry = nullptr;
    std::uint64_t seed = 0;
    std::int64_t realization = 0;
    std::vector<double> values;
};

/// Draws the field for one realization. Each value depends only on
/// (seed, realization, site index); parallel schedules cannot change it.
DisorderField sample_field(const SingleSiteDensity& density, const CubeGeometry& geometry,
                           std::uint64_t seed, std::int64_t realization);

/// Almost-sure spectrum [-2d + W-, 2d + W+] of the infinite-volume operator.
struct Interval {
    double lo;
    double hi;
};
std::vector<Interval> deterministic_spectrum(const SingleSiteDensity& density, int dimension);

struct FloorCheckResult {
    bool pass;
    double measured_min;
};

/// Evaluates the density on an even grid over [W-, W+] and compares the
/// measured minimum against the declared floor.
FloorCheckResult density_floor_check(const SingleSiteDensity& density, int grid_points);

} // namespace anderson
