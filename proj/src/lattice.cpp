#include "anderson/lattice.hpp"

#include <algorithm>
#include <string>

#include "anderson/errors.hpp"

namespace anderson {

CubeGeometry CubeGeometry::build(int dimension, int side, std::int64_t site_budget) {
    if (dimension < 1) throw ConfigError("cube dimension must be >= 1");
    if (side < 1) throw ConfigError("cube side must be >= 1");

    std::int64_t count = 1;
    for (int i = 0; i < dimension; ++i) {
        count *= side;
        if (count > site_budget) {
            throw ResourceError("cube with L^d = " + std::to_string(side) + "^" +
                                std::to_string(dimension) + " sites exceeds budget " +
                                std::to_string(site_budget));
        }
    }

    CubeGeometry g;
    g.dimension_ = dimension;
    g.side_ = side;
    g.site_count_ = static_cast<int>(count);
    g.neighbors_.resize(g.site_count_);

    // Strides for lexicographic order: coordinate 0 is most significant.
    std::vector<std::int64_t> stride(dimension);
    stride[dimension - 1] = 1;
    for (int axis = dimension - 2; axis >= 0; --axis)
        stride[axis] = stride[axis + 1] * side;

    std::vector<int> coords(dimension, 0);
    for (int site = 0; site < g.site_count_; ++site) {
        for (int axis = 0; axis < dimension; ++axis) {
            const int c = coords[axis];
            if (c > 0) g.neighbors_[site].push_back(site - static_cast<int>(stride[axis]));
            if (c + 1 < side) {
                const int other = site + static_cast<int>(stride[axis]);
                g.neighbors_[site].push_back(other);
                g.bonds_.push_back({site, other});
            }
        }
        std::sort(g.neighbors_[site].begin(), g.neighbors_[site].end());
        // advance odometer (last coordinate fastest)
        for (int axis = dimension - 1; axis >= 0; --axis) {
            if (++coords[axis] < side) break;
            coords[axis] = 0;
        }
    }
    std::sort(g.bonds_.begin(), g.bonds_.end(),
              [](const Bond& x, const Bond& y) { return x.a != y.a ? x.a < y.a : x.b < y.b; });
    return g;
}

int CubeGeometry::index_of(const std::vector<int>& coords) const {
    if (static_cast<int>(coords.size()) != dimension_)
        throw ShapeError("coordinate tuple has wrong dimension");
    int idx = 0;
    for (int axis = 0; axis < dimension_; ++axis) {
        const int c = coords[axis];
        if (c < 0 || c >= side_) throw ConfigError("coordinate out of range");
        idx = idx * side_ + c;
    }
    return idx;
}

std::vector<int> CubeGeometry::coords_of(int site) const {
    if (site < 0 || site >= site_count_) throw ConfigError("site index out of range");
    std::vector<int> coords(dimension_);
    for (int axis = dimension_ - 1; axis >= 0; --axis) {
        coords[axis] = site % side_;
        site /= side_;
    }
    return coords;
}

Partition Partition::build(const CubeGeometry& parent, int cell_side) {
    if (cell_side < 1) throw ConfigError("cell side must be >= 1");
    if (parent.side() % cell_side != 0)
        throw ConfigError("cell side " + std::to_string(cell_side) +
                          " does not divide cube side " + std::to_string(parent.side()));

    const int d = parent.dimension();
    const int per_axis = parent.side() / cell_side;
    std::int64_t cell_count = 1;
    for (int i = 0; i < d; ++i) cell_count *= per_axis;

    Partition p;
    p.parent_ = &parent;
    p.cell_side_ = cell_side;
    p.cells_.resize(static_cast<std::size_t>(cell_count));
    p.cell_of_.resize(parent.site_count());

    for (int site = 0; site < parent.site_count(); ++site) {
        const std::vector<int> coords = parent.coords_of(site);
        int cell = 0;
        for (int axis = 0; axis < d; ++axis) cell = cell * per_axis + coords[axis] / cell_side;
        p.cell_of_[site] = cell;
        p.cells_[cell].push_back(site);
    }
    return p;
}

BondSet cross_bonds(const Partition& partition) {
    BondSet out;
    for (const Bond& b : partition.parent().bonds())
        if (partition.cell_of(b.a) != partition.cell_of(b.b)) out.push_back(b);
    return out;
}

} // namespace anderson
