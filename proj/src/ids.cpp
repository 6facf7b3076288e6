#include "anderson/ids.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "anderson/errors.hpp"
#include "anderson/operators.hpp"
#include "anderson/parallel.hpp"
#include "anderson/spectral.hpp"

namespace anderson {

namespace {

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

} // namespace

void SpectralCurve::write_csv(std::ostream& out) const {
    for (const auto& [key, value] : metadata) out << "# " << key << "=" << value << "\n";
    out << "energy,value,stderr\n";
    for (std::size_t i = 0; i < energies.size(); ++i) {
        out << format_number(energies[i]) << ',' << format_number(values[i]) << ','
            << format_number(i < stderrs.size() ? stderrs[i] : 0.0) << "\n";
    }
}

std::vector<double> make_grid(double lo, double hi, double step) {
    if (!(step > 0.0)) throw ConfigError("grid step must be positive");
    if (!(hi >= lo)) throw ConfigError("grid requires max >= min");
    std::vector<double> grid;
    const int count = static_cast<int>(std::floor((hi - lo) / step + 0.5)) + 1;
    grid.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double e = lo + i * step;
        if (e > hi + 0.5 * step) break;
        grid.push_back(e);
    }
    return grid;
}

SpectralCurve empirical_ids(int dimension, int side, const SingleSiteDensity& density,
                            const std::vector<double>& energies, int realizations,
                            std::uint64_t seed, int workers) {
    if (realizations < 1) throw ConfigError("empirical_ids needs at least one realization");
    if (energies.empty()) throw ConfigError("empirical_ids needs a nonempty energy grid");
    if (!std::is_sorted(energies.begin(), energies.end()))
        throw ConfigError("energy grid must be ascending");

    const CubeGeometry geometry = CubeGeometry::build(dimension, side);
    const double volume = static_cast<double>(geometry.site_count());

    const std::function<std::vector<double>(int)> one_realization = [&](int r) {
        const DisorderField field = sample_field(density, geometry, seed, r);
        const SymmetricOperator hamiltonian = build_anderson(geometry, field);
        std::vector<double> counts(energies.size());
        for (std::size_t k = 0; k < energies.size(); ++k)
            counts[k] = count_below(hamiltonian, energies[k]) / volume;
        return counts;
    };
    const std::vector<std::vector<double>> per_realization =
        parallel_map<std::vector<double>>(realizations, workers, one_realization);

    SpectralCurve curve;
    curve.energies = energies;
    curve.values.assign(energies.size(), 0.0);
    curve.stderrs.assign(energies.size(), 0.0);
    for (int r = 0; r < realizations; ++r)
        for (std::size_t k = 0; k < energies.size(); ++k)
            curve.values[k] += per_realization[static_cast<std::size_t>(r)][k];
    for (double& v : curve.values) v /= realizations;
    if (realizations >= 2) {
        for (int r = 0; r < realizations; ++r)
            for (std::size_t k = 0; k < energies.size(); ++k) {
                const double dev = per_realization[static_cast<std::size_t>(r)][k] -
                                   curve.values[k];
                curve.stderrs[k] += dev * dev;
            }
        for (double& s : curve.stderrs)
            s = std::sqrt(s / (static_cast<double>(realizations) * (realizations - 1)));
    }

    curve.metadata["kind"] = "ids";
    curve.metadata["d"] = std::to_string(dimension);
    curve.metadata["L"] = std::to_string(side);
    curve.metadata["density"] = density.kind_name();
    curve.metadata["W_minus"] = format_number(density.w_minus());
    curve.metadata["W_plus"] = format_number(density.w_plus());
    curve.metadata["R"] = std::to_string(realizations);
    curve.metadata["seed"] = std::to_string(seed);
    return curve;
}

SpectralCurve empirical_dos(const SpectralCurve& ids, double bin_width) {
    if (ids.energies.size() < 2) throw ConfigError("dos needs an ids curve with >= 2 points");
    double spacing = ids.energies[1] - ids.energies[0];
    for (std::size_t i = 1; i + 1 < ids.energies.size(); ++i)
        spacing = std::min(spacing, ids.energies[i + 1] - ids.energies[i]);
    if (!(bin_width >= 2.0 * spacing - 1e-12 * std::abs(spacing)))
        throw ConfigError("dos bin width must be at least twice the grid spacing");

    SpectralCurve dos;
    const double half = 0.5 * bin_width;
    for (std::size_t i = 0; i < ids.energies.size(); ++i) {
        const double e = ids.energies[i];
        if (e - half < ids.energies.front() - 1e-12 || e + half > ids.energies.back() + 1e-12)
            continue;
        const double above = interpolate(ids.energies, ids.values, e + half);
        const double below = interpolate(ids.energies, ids.values, e - half);
        dos.energies.push_back(e);
        dos.values.push_back((above - below) / bin_width);
        if (!ids.stderrs.empty()) {
            const double se_above = interpolate(ids.energies, ids.stderrs, e + half);
            const double se_below = interpolate(ids.energies, ids.stderrs, e - half);
            dos.stderrs.push_back(std::sqrt(se_above * se_above + se_below * se_below) /
                                  bin_width);
        } else {
            dos.stderrs.push_back(0.0);
        }
    }
    dos.metadata = ids.metadata;
    dos.metadata["kind"] = "dos";
    dos.metadata["h"] = format_number(bin_width);
    return dos;
}

namespace {

std::mutex& cache_mutex() {
    static std::mutex m;
    return m;
}

// The compensated cube Laplacian is the Kronecker sum of per-axis chain
// operators, so its spectrum is every d-fold sum of the chain eigenvalues;
// one chain diagonalization per ell covers all dimensions.
const std::vector<double>& free_spectrum(int dimension, int ell) {
    static std::map<std::pair<int, int>, std::vector<double>> cache;
    const std::pair<int, int> key{dimension, ell};
    {
        std::lock_guard<std::mutex> lock(cache_mutex());
        const auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    std::vector<double> values;
    if (dimension == 1) {
        const CubeGeometry geometry = CubeGeometry::build(1, ell);
        values = full_spectrum(build_dirichlet_laplacian(geometry)).values;
    } else {
        std::int64_t count = 1;
        for (int i = 0; i < dimension; ++i) {
            count *= ell;
            if (count > CubeGeometry::kDefaultSiteBudget)
                throw ResourceError("free spectrum with ell^d = " + std::to_string(ell) + "^" +
                                    std::to_string(dimension) + " exceeds the site budget");
        }
        const std::vector<double> axis = free_spectrum(1, ell);
        values = axis;
        for (int rep = 1; rep < dimension; ++rep) {
            std::vector<double> next;
            next.reserve(values.size() * axis.size());
            for (double base : values)
                for (double step : axis) next.push_back(base + step);
            values = std::move(next);
        }
        std::sort(values.begin(), values.end());
    }
    std::lock_guard<std::mutex> lock(cache_mutex());
    return cache.emplace(key, std::move(values)).first->second;
}

// --- infinite-volume free IDS via arcsine-law self-convolution ---

constexpr int kConvCells = 1 << 16;

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
        const std::complex<double> step(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= step;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

struct ConvTable {
    double first_node = 0.0; // position of the first jump
    double cell_width = 0.0;
    std::vector<double> mid; // mid-jump CDF values at the node positions
    double max_mass = 0.0;
};

// CDF of the arcsine law with density 1/(pi sqrt(4 - x^2)) on (-2, 2).
double arcsine_cdf(double x) {
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    return 0.5 + std::asin(0.5 * x) / M_PI;
}

ConvTable build_conv_table(int dimension) {
    const double lo = -(2.0 * dimension + 1.0);
    const double hi = 2.0 * dimension + 1.0;
    const double width = (hi - lo) / kConvCells;

    // one-dimensional cell masses, integrated analytically per cell
    std::vector<double> mass(kConvCells);
    double prev = arcsine_cdf(lo);
    for (int k = 0; k < kConvCells; ++k) {
        const double edge = lo + (k + 1) * width;
        const double next = arcsine_cdf(edge);
        mass[static_cast<std::size_t>(k)] = next - prev;
        prev = next;
    }

    std::vector<double> law;
    if (dimension == 1) {
        law = std::move(mass);
    } else {
        const std::size_t need = static_cast<std::size_t>(dimension) * (kConvCells - 1) + 1;
        std::size_t fft_size = 1;
        while (fft_size < need) fft_size <<= 1;
        std::vector<std::complex<double>> spectrum(fft_size);
        for (int k = 0; k < kConvCells; ++k) spectrum[static_cast<std::size_t>(k)] = mass[k];
        fft_inplace(spectrum, false);
        for (auto& c : spectrum) {
            std::complex<double> p(1.0, 0.0);
            for (int rep = 0; rep < dimension; ++rep) p *= c;
            c = p;
        }
        fft_inplace(spectrum, true);
        law.resize(need);
        for (std::size_t k = 0; k < need; ++k) law[k] = std::max(0.0, spectrum[k].real());
    }

    double total = 0.0;
    for (double m : law) total += m;

    ConvTable table;
    table.cell_width = width;
    // snapping each factor to its cell center puts the k-th jump at
    // d*lo + (k + d/2) * width
    table.first_node = dimension * lo + 0.5 * dimension * width;
    table.mid.resize(law.size());
    double cum = 0.0;
    for (std::size_t k = 0; k < law.size(); ++k) {
        const double m = law[k] / total;
        table.mid[k] = cum + 0.5 * m;
        cum += m;
        table.max_mass = std::max(table.max_mass, m);
    }
    return table;
}

const ConvTable& conv_table(int dimension) {
    static std::map<int, ConvTable> cache;
    {
        std::lock_guard<std::mutex> lock(cache_mutex());
        const auto it = cache.find(dimension);
        if (it != cache.end()) return it->second;
    }
    ConvTable table = build_conv_table(dimension);
    std::lock_guard<std::mutex> lock(cache_mutex());
    return cache.emplace(dimension, std::move(table)).first->second;
}

} // namespace

double free_ids_finite(int dimension, int ell, double lambda) {
    if (dimension < 1 || ell < 1) throw ConfigError("free_ids_finite needs d >= 1, ell >= 1");
    const std::vector<double>& values = free_spectrum(dimension, ell);
    const auto count = std::upper_bound(values.begin(), values.end(), lambda) - values.begin();
    return static_cast<double>(count) / static_cast<double>(values.size());
}

double free_ids_infinite(int dimension, double lambda) {
    if (dimension < 1) throw ConfigError("free_ids_infinite needs d >= 1");
    if (lambda <= -2.0 * dimension) return 0.0;
    if (lambda >= 2.0 * dimension) return 1.0;
    const ConvTable& table = conv_table(dimension);
    const double t = (lambda - table.first_node) / table.cell_width;
    if (t <= 0.0) return 0.0;
    const std::size_t last = table.mid.size() - 1;
    if (t >= static_cast<double>(last)) return 1.0;
    const std::size_t j = static_cast<std::size_t>(t);
    const double frac = t - static_cast<double>(j);
    const double value = table.mid[j] + frac * (table.mid[j + 1] - table.mid[j]);
    return std::clamp(value, 0.0, 1.0);
}

double free_ids_infinite_1d_closed_form(double lambda) {
    if (lambda <= -2.0) return 0.0;
    if (lambda >= 2.0) return 1.0;
    return 1.0 - std::acos(0.5 * lambda) / M_PI;
}

FreeIDSTable tabulate_free_ids(int dimension, const std::vector<double>& grid) {
    FreeIDSTable table;
    table.dimension = dimension;
    table.grid = grid;
    table.values.reserve(grid.size());
    for (double lambda : grid) table.values.push_back(free_ids_infinite(dimension, lambda));
    table.error_bound = conv_table(dimension).max_mass;
    return table;
}

} // namespace anderson
