#include "anderson/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anderson/errors.hpp"
#include "anderson/spectral.hpp"

namespace anderson {

namespace {

bool bond_less(const Bond& x, const Bond& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
}

} // namespace

SymmetricOperator::SymmetricOperator(int dim, std::vector<double> diag, BondSet bonds,
                                     std::vector<double> bond_values, Provenance provenance)
    : dim_(dim), bandwidth_(0), provenance_(provenance), diag_(std::move(diag)),
      bonds_(std::move(bonds)), bond_values_(std::move(bond_values)) {
    if (static_cast<int>(diag_.size()) != dim_)
        throw ShapeError("diagonal length does not match operator dimension");
    if (bonds_.size() != bond_values_.size())
        throw ShapeError("bond list and bond values differ in length");
    for (Bond& b : bonds_) {
        if (b.a > b.b) std::swap(b.a, b.b);
        if (b.a < 0 || b.b >= dim_ || b.a == b.b) throw ShapeError("bond endpoint out of range");
    }
    // sort bonds and values together
    std::vector<std::size_t> order(bonds_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return bond_less(bonds_[i], bonds_[j]); });
    BondSet sorted_bonds(bonds_.size());
    std::vector<double> sorted_values(bond_values_.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted_bonds[i] = bonds_[order[i]];
        sorted_values[i] = bond_values_[order[i]];
    }
    bonds_ = std::move(sorted_bonds);
    bond_values_ = std::move(sorted_values);
    for (std::size_t i = 0; i + 1 < bonds_.size(); ++i)
        if (bonds_[i] == bonds_[i + 1]) throw ShapeError("duplicate bond in operator assembly");
    for (const Bond& b : bonds_) bandwidth_ = std::max(bandwidth_, b.b - b.a);
}

SymmetricOperator SymmetricOperator::from_dense(const std::vector<double>& dense, int dim,
                                                Provenance provenance) {
    if (static_cast<int>(dense.size()) != dim * dim) throw ShapeError("dense buffer size mismatch");
    std::vector<double> diag(dim);
    BondSet bonds;
    std::vector<double> values;
    for (int i = 0; i < dim; ++i) {
        diag[i] = dense[static_cast<std::size_t>(i) * dim + i];
        for (int j = i + 1; j < dim; ++j) {
            const double v = dense[static_cast<std::size_t>(i) * dim + j];
            if (v != 0.0) {
                bonds.push_back({i, j});
                values.push_back(v);
            }
        }
    }
    return SymmetricOperator(dim, std::move(diag), std::move(bonds), std::move(values),
                             provenance);
}

double SymmetricOperator::trace() const {
    double t = 0.0;
    for (double v : diag_) t += v;
    return t;
}

double SymmetricOperator::max_abs_entry() const {
    double m = 0.0;
    for (double v : diag_) m = std::max(m, std::abs(v));
    for (double v : bond_values_) m = std::max(m, std::abs(v));
    return m;
}

double SymmetricOperator::entry(int i, int j) const {
    if (i < 0 || j < 0 || i >= dim_ || j >= dim_) throw ShapeError("entry index out of range");
    if (i == j) return diag_[i];
    Bond key{std::min(i, j), std::max(i, j)};
    auto it = std::lower_bound(bonds_.begin(), bonds_.end(), key, bond_less);
    if (it != bonds_.end() && *it == key) return bond_values_[it - bonds_.begin()];
    return 0.0;
}

std::vector<double> SymmetricOperator::to_dense() const {
    if (dim_ > kDenseLimit)
        throw ResourceError("dense materialization refused for n = " + std::to_string(dim_) +
                            " > " + std::to_string(kDenseLimit));
    std::vector<double> dense(static_cast<std::size_t>(dim_) * dim_, 0.0);
    for (int i = 0; i < dim_; ++i) dense[static_cast<std::size_t>(i) * dim_ + i] = diag_[i];
    for (std::size_t k = 0; k < bonds_.size(); ++k) {
        const Bond& b = bonds_[k];
        dense[static_cast<std::size_t>(b.a) * dim_ + b.b] = bond_values_[k];
        dense[static_cast<std::size_t>(b.b) * dim_ + b.a] = bond_values_[k];
    }
    return dense;
}

SymmetricOperator SymmetricOperator::with_diagonal_increment(int site, double increment) const {
    if (site < 0 || site >= dim_) throw ShapeError("site index out of range");
    SymmetricOperator out = *this;
    out.diag_[site] += increment;
    return out;
}

SymmetricOperator build_dirichlet_laplacian(const CubeGeometry& geometry) {
    std::vector<double> diag(geometry.site_count());
    for (int site = 0; site < geometry.site_count(); ++site)
        diag[site] = static_cast<double>(geometry.exterior_neighbor_count(site));
    BondSet bonds = geometry.bonds();
    std::vector<double> values(bonds.size(), 1.0);
    return SymmetricOperator(geometry.site_count(), std::move(diag), std::move(bonds),
                             std::move(values), Provenance::FreeLaplacian);
}

SymmetricOperator build_anderson(const CubeGeometry& geometry, const DisorderField& field) {
    if (field.geometry != &geometry ||
        static_cast<int>(field.values.size()) != geometry.site_count())
        throw ShapeError("disorder field does not match geometry");
    std::vector<double> diag(geometry.site_count());
    for (int site = 0; site < geometry.site_count(); ++site)
        diag[site] = static_cast<double>(geometry.exterior_neighbor_count(site)) +
                     field.values[site];
    BondSet bonds = geometry.bonds();
    std::vector<double> values(bonds.size(), 1.0);
    return SymmetricOperator(geometry.site_count(), std::move(diag), std::move(bonds),
                             std::move(values), Provenance::Anderson);
}

SymmetricOperator build_decoupled(const CubeGeometry& geometry, const Partition& partition,
                                  const DisorderField* field) {
    if (&partition.parent() != &geometry) throw ShapeError("partition does not match geometry");
    if (field && (field->geometry != &geometry ||
                  static_cast<int>(field->values.size()) != geometry.site_count()))
        throw ShapeError("disorder field does not match geometry");

    const int d = geometry.dimension();
    // In-cell degree: interior neighbors that stay in the same cell.
    std::vector<double> diag(geometry.site_count());
    for (int site = 0; site < geometry.site_count(); ++site) {
        int in_cell = 0;
        for (int nb : geometry.neighbors(site))
            if (partition.cell_of(nb) == partition.cell_of(site)) ++in_cell;
        diag[site] = static_cast<double>(2 * d - in_cell);
        if (field) diag[site] += field->values[site];
    }
    BondSet bonds;
    for (const Bond& b : geometry.bonds())
        if (partition.cell_of(b.a) == partition.cell_of(b.b)) bonds.push_back(b);
    std::vector<double> values(bonds.size(), 1.0);
    return SymmetricOperator(geometry.site_count(), std::move(diag), std::move(bonds),
                             std::move(values), Provenance::Decoupled);
}

namespace {

void validate_optional_field(const CubeGeometry& geometry, const DisorderField* field) {
    if (field && (field->geometry != &geometry ||
                  static_cast<int>(field->values.size()) != geometry.site_count()))
        throw ShapeError("disorder field does not match geometry");
}

SymmetricOperator defect_from_cut(const CubeGeometry& geometry, const BondSet& cut) {
    std::vector<double> diag(geometry.site_count(), 0.0);
    BondSet bonds;
    std::vector<double> values;
    for (const Bond& b : cut) {
        diag[b.a] += 1.0;
        diag[b.b] += 1.0;
        bonds.push_back(b);
        values.push_back(-1.0);
    }
    return SymmetricOperator(geometry.site_count(), std::move(diag), std::move(bonds),
                             std::move(values), Provenance::Defect);
}

} // namespace

DefectResult decoupling_defect(const CubeGeometry& geometry, const Partition& partition,
                               const DisorderField* field) {
    if (&partition.parent() != &geometry) throw ShapeError("partition does not match geometry");
    validate_optional_field(geometry, field);
    SymmetricOperator defect = defect_from_cut(geometry, cross_bonds(partition));
    const EigenSpectrum spectrum = full_spectrum(defect);
    double largest = 0.0;
    for (double v : spectrum.values) largest = std::max(largest, std::abs(v));
    int rank = 0;
    if (largest > 0.0)
        for (double v : spectrum.values)
            if (std::abs(v) > 1e-9 * largest) ++rank;
    return {std::move(defect), rank};
}

SymmetricOperator cell_boundary_defect(const CubeGeometry& geometry, const Partition& partition,
                                       int cell, const DisorderField* field) {
    if (&partition.parent() != &geometry) throw ShapeError("partition does not match geometry");
    if (cell < 0 || cell >= partition.cell_count()) throw ConfigError("cell index out of range");
    validate_optional_field(geometry, field);
    BondSet cut;
    for (const Bond& b : geometry.bonds()) {
        const bool a_in = partition.cell_of(b.a) == cell;
        const bool b_in = partition.cell_of(b.b) == cell;
        if (a_in != b_in) cut.push_back(b);
    }
    return defect_from_cut(geometry, cut);
}

} // namespace anderson
