#ifndef RTE_DG_SPACE_HPP
#define RTE_DG_SPACE_HPP

#include "rte/core.hpp"
#include "rte/mesh.hpp"
#include "rte/quadrature.hpp"

#include <array>
#include <functional>

namespace rte {

using ScalarField = std::function<double(double x, double y)>;

/// Tensor Gauss rule on the reference cell [-1,1]^d with the basis tabulated at its points.
struct ReferenceTable {
    std::vector<std::array<double, 2>> points;
    std::vector<double> weights;
    Matrix values;                 // points x local basis
    std::array<Matrix, 2> derivs;  // reference derivatives per axis
};

/// Discontinuous tensor-product Legendre space, orthonormal on every cell.
///
/// Local index p = a + (K+1) b, with a the x degree and b the y degree.
class DGSpace {
public:
    DGSpace(SpatialMesh mesh, int degree);

    const SpatialMesh& mesh() const { return mesh_; }
    int dimension() const { return mesh_.dimension(); }
    int degree() const { return degree_; }
    int local_size() const { return local_size_; }
    int size() const { return local_size_ * mesh_.num_cells(); }
    int num_cells() const { return mesh_.num_cells(); }

    /// Per-axis degrees of local function p.
    std::array<int, 2> degrees(int p) const { return {p % (degree_ + 1), p / (degree_ + 1)}; }

    /// Reference basis orthonormal on [-1,1]^d.
    double reference_value(int p, std::array<double, 2> xi) const;
    std::array<double, 2> reference_gradient(int p, std::array<double, 2> xi) const;

    /// Physical basis value and gradient at a point of the given cell.
    double value(int cell, int p, double x, double y = 0.0) const;
    std::array<double, 2> gradient(int cell, int p, double x, double y = 0.0) const;

    /// Evaluates a coefficient vector on one cell.
    double evaluate(const Vector& coeffs, int cell, double x, double y = 0.0) const;

    /// Volume of a cell (length in 1D).
    double measure(int cell) const;

    /// L2 projection using a tensor Gauss rule with the given number of points per axis.
    Vector project(const ScalarField& f, int points_per_axis = projection_points) const;

    /// Element rule with K+2 points per axis, exact for the bilinear forms.
    const ReferenceTable& element_table() const { return element_; }
    ReferenceTable make_table(int points_per_axis) const;

    /// Map a reference point to physical coordinates on a cell.
    std::array<double, 2> to_physical(int cell, std::array<double, 2> xi) const;

    static constexpr int projection_points = 12;

private:
    SpatialMesh mesh_;
    int degree_;
    int local_size_;
    ReferenceTable element_;
};

} // namespace rte

#endif
