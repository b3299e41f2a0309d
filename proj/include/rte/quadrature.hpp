#ifndef RTE_QUADRATURE_HPP
#define RTE_QUADRATURE_HPP

#include <array>
#include <vector>

namespace rte {

/// Gauss-Legendre rule on [-1, 1]; weights sum to 2, nodes ascending.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussRule gauss_rule(int n);

/// Legendre polynomial P_k and its derivative at x.
double legendre(int k, double x);
double legendre_derivative(int k, double x);

enum class QuadratureMode { slab_1d, sphere_2d };

/// Discrete ordinates set with weights normalized to sum to one.
///
/// In slab mode each direction is (xi, 0, 0).
struct AngularQuadrature {
    QuadratureMode mode = QuadratureMode::slab_1d;
    std::vector<std::array<double, 3>> directions;
    std::vector<double> weights;

    int size() const { return static_cast<int>(weights.size()); }

    /// Diagonal of the second angular moment tensor, sum_j w_j v_j v_j^T.
    std::array<double, 3> second_moments() const;
};

AngularQuadrature gauss_legendre(int n);

/// Product rule: uniform azimuthal nodes times normalized Gauss-Legendre in z.
AngularQuadrature chebyshev_legendre(int n_alpha, int n_z);

} // namespace rte

#endif
