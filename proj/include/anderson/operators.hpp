#pragma once

#include <vector>

#include "anderson/disorder.hpp"
#include "anderson/lattice.hpp"

namespace anderson {

enum class Provenance { FreeLaplacian, Anderson, Decoupled, Defect };

/// Real symmetric operator stored as a diagonal plus a sorted bond list of
/// upper-triangle entries. Immutable after assembly; dense form is
/// materialized on demand under a size budget.
class SymmetricOperator {
public:
    static constexpr int kDenseLimit = 4096;

    SymmetricOperator(int dim, std::vector<double> diag, BondSet bonds,
                      std::vector<double> bond_values, Provenance provenance);

    /// Dense symmetric matrix from explicit entries (tests, random instances).
    static SymmetricOperator from_dense(const std::vector<double>& dense, int dim,
                                        Provenance provenance = Provenance::Anderson);

    int dim() const noexcept { return dim_; }
    Provenance provenance() const noexcept { return provenance_; }
    const std::vector<double>& diagonal() const noexcept { return diag_; }
    const BondSet& bonds() const noexcept { return bonds_; }
    const std::vector<double>& bond_values() const noexcept { return bond_values_; }

    /// Max |i - j| over stored off-diagonal entries (0 for diagonal matrices).
    int bandwidth() const noexcept { return bandwidth_; }

    double trace() const;
    double max_abs_entry() const;
    /// Entry (i, j); off-diagonal lookups are binary searches in the bond list.
    double entry(int i, int j) const;

    /// Row-major dense copy. Throws ResourceError above kDenseLimit.
    std::vector<double> to_dense() const;

    /// Copy with `increment` added to one diagonal entry.
    SymmetricOperator with_diagonal_increment(int site, double increment) const;

private:
    int dim_;
    int bandwidth_;
    Provenance provenance_;
    std::vector<double> diag_;
    BondSet bonds_;
    std::vector<double> bond_values_;
};

/// Finite-volume lattice Laplacian with the boundary compensation term:
/// hopping 1 on interior bonds, diagonal entry = exterior neighbor count.
SymmetricOperator build_dirichlet_laplacian(const CubeGeometry& geometry);

/// Laplacian plus the diagonal coupling field.
SymmetricOperator build_anderson(const CubeGeometry& geometry, const DisorderField& field);

/// Direct sum of per-cell Laplacians (each cell compensated relative to its
/// own boundary), plus the coupling field when provided. Stored in parent
/// site ordering; block-diagonal once sites are grouped by cell.
SymmetricOperator build_decoupled(const CubeGeometry& geometry, const Partition& partition,
                                  const DisorderField* field = nullptr);

struct DefectResult {
    SymmetricOperator defect;
    int rank;
};

/// Difference decoupled - full with the same field on both sides. The
/// coupling field cancels exactly, so the defect is assembled structurally
/// from the cross bonds: each severed bond (x, y) contributes the positive
/// semidefinite block (e_x - e_y)(e_x - e_y)^T, and any supplied field only
/// undergoes shape validation. The reported rank is the numerical rank at
/// relative threshold 1e-9.
DefectResult decoupling_defect(const CubeGeometry& geometry, const Partition& partition,
                               const DisorderField* field = nullptr);

/// Defect of severing only the bonds between one cell and its complement;
/// the field cancels exactly as above.
SymmetricOperator cell_boundary_defect(const CubeGeometry& geometry, const Partition& partition,
                                       int cell, const DisorderField* field = nullptr);

} // namespace anderson
