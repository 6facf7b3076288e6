#pragma once

#include <cstdint>
#include <vector>

namespace anderson {

/// Unordered nearest-neighbor pair of site indices, stored with a < b.
struct Bond {
    int a;
    int b;
    friend bool operator==(const Bond&, const Bond&) = default;
};

using BondSet = std::vector<Bond>;

/// Finite cube [0, L-1]^d in Z^d with lexicographic site ordering (first
/// coordinate most significant). Immutable after construction.
class CubeGeometry {
public:
    static constexpr std::int64_t kDefaultSiteBudget = 1000000;

    /// Enumerates sites, neighbor lists and interior bonds.
    /// Throws ResourceError if L^d exceeds the site budget.
    static CubeGeometry build(int dimension, int side,
                              std::int64_t site_budget = kDefaultSiteBudget);

    int dimension() const noexcept { return dimension_; }
    int side() const noexcept { return side_; }
    int site_count() const noexcept { return site_count_; }

    /// Lexicographic linear index of a coordinate tuple.
    int index_of(const std::vector<int>& coords) const;
    /// Coordinate tuple of a linear index.
    std::vector<int> coords_of(int site) const;

    /// Interior neighbors (|x-y|_1 = 1, both inside the cube), ascending.
    const std::vector<int>& neighbors(int site) const { return neighbors_[site]; }

    /// Number of lattice neighbors outside the cube; equals 2d minus the
    /// interior degree.
    int exterior_neighbor_count(int site) const {
        return 2 * dimension_ - static_cast<int>(neighbors_[site].size());
    }

    /// All interior bonds, each listed once with a < b, sorted.
    const BondSet& bonds() const noexcept { return bonds_; }

private:
    CubeGeometry() = default;

    int dimension_ = 0;
    int side_ = 0;
    int site_count_ = 0;
    std::vector<std::vector<int>> neighbors_;
    BondSet bonds_;
};

/// Decomposition of a cube of side L into (L/cell_side)^d aligned subcubes.
class Partition {
public:
    /// Throws ConfigError unless cell_side divides the parent side.
    static Partition build(const CubeGeometry& parent, int cell_side);

    const CubeGeometry& parent() const noexcept { return *parent_; }
    int cell_side() const noexcept { return cell_side_; }
    int cell_count() const noexcept { return static_cast<int>(cells_.size()); }

    /// Sites of one cell, ascending parent indices.
    const std::vector<int>& cell_sites(int cell) const { return cells_[cell]; }
    /// Cell id containing a parent site.
    int cell_of(int site) const { return cell_of_[site]; }

private:
    Partition() = default;

    const CubeGeometry* parent_ = nullptr;
    int cell_side_ = 0;
    std::vector<std::vector<int>> cells_;
    std::vector<int> cell_of_;
};

/// Bonds of the parent cube whose endpoints lie in different cells.
BondSet cross_bonds(const Partition& partition);

} // namespace anderson
