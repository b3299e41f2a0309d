#ifndef RTE_ASSEMBLY_HPP
#define RTE_ASSEMBLY_HPP

#include "rte/dg_space.hpp"
#include "rte/quadrature.hpp"

#include <span>

namespace rte {

/// Block-diagonal weighted mass matrix, one dense (K+1)^d block per cell.
class CoefficientMass {
public:
    CoefficientMass() = default;
    CoefficientMass(int num_cells, int local_size);

    int num_cells() const { return num_cells_; }
    int local_size() const { return local_size_; }
    int size() const { return num_cells_ * local_size_; }

    Eigen::Map<Matrix> block(int cell);
    Eigen::Map<const Matrix> block(int cell) const;

    /// y = M x, both of length size().
    void apply(const double* x, double* y) const;
    Vector operator*(const Vector& x) const;

    /// Applies the same block operator to every column of a stacked state.
    Matrix apply_columns(const Matrix& x) const;

    Matrix dense() const;

private:
    int num_cells_ = 0;
    int local_size_ = 0;
    std::vector<double> data_;
};

/// Mass matrix weighted by a field given as DG coefficients on the same space.
CoefficientMass assemble_coefficient_mass(const DGSpace& space, const Vector& field);

/// Parameter-independent streaming blocks D_j with upwind couplings.
///
/// Cells in sweep_order(j) are ordered along the upwind direction; zero
/// direction components count as positive.
class StreamingOperator {
public:
    struct Coupling {
        int neighbor;
        std::size_t offset;
    };

    StreamingOperator(const DGSpace& space, const AngularQuadrature& quadrature);

    int num_directions() const { return static_cast<int>(dirs_.size()); }
    int local_size() const { return local_size_; }
    int num_cells() const { return num_cells_; }

    std::span<const int> sweep_order(int j) const { return dirs_[j].order; }
    Eigen::Map<const Matrix> diagonal_block(int j, int cell) const;
    std::span<const Coupling> upwind(int j, int cell) const;
    Eigen::Map<const Matrix> coupling_block(int j, const Coupling& c) const;

    /// y = D_j x in natural cell ordering.
    void apply(int j, const double* x, double* y) const;

    /// Dense D_j for small meshes.
    Matrix dense(int j) const;

private:
    struct Direction {
        std::vector<int> order;
        std::vector<double> diag;
        std::vector<int> ptr;
        std::vector<Coupling> couplings;
        std::vector<double> coupling_data;
    };

    int local_size_ = 0;
    int num_cells_ = 0;
    std::vector<Direction> dirs_;
};

/// Inflow boundary vector g_j for an isotropic boundary function g.
Vector assemble_inflow(const DGSpace& space, const std::array<double, 3>& direction, const ScalarField& g);

} // namespace rte

#endif
