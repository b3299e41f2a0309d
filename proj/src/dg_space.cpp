#include "rte/dg_space.hpp"

#include <cmath>

namespace rte {

namespace {

double scaled_legendre(int k, double x)
{
    return std::sqrt((2.0 * k + 1.0) / 2.0) * legendre(k, x);
}

double scaled_legendre_derivative(int k, double x)
{
    return std::sqrt((2.0 * k + 1.0) / 2.0) * legendre_derivative(k, x);
}

} // namespace

DGSpace::DGSpace(SpatialMesh mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree)
{
    if (degree < 0 || degree > 2)
        throw InvalidArgument("DGSpace: degree must be 0, 1 or 2");
    local_size_ = mesh_.dimension() == 1 ? degree + 1 : (degree + 1) * (degree + 1);
    element_ = make_table(degree + 2);
}

double DGSpace::reference_value(int p, std::array<double, 2> xi) const
{
    const auto [a, b] = degrees(p);
    double v = scaled_legendre(a, xi[0]);
    if (dimension() == 2)
        v *= scaled_legendre(b, xi[1]);
    return v;
}

std::array<double, 2> DGSpace::reference_gradient(int p, std::array<double, 2> xi) const
{
    const auto [a, b] = degrees(p);
    if (dimension() == 1)
        return {scaled_legendre_derivative(a, xi[0]), 0.0};
    return {scaled_legendre_derivative(a, xi[0]) * scaled_legendre(b, xi[1]),
            scaled_legendre(a, xi[0]) * scaled_legendre_derivative(b, xi[1])};
}

double DGSpace::measure(int cell) const
{
    const Cell& c = mesh_.cell(cell);
    return dimension() == 1 ? c.width(0) : c.width(0) * c.width(1);
}

namespace {

std::array<double, 2> to_reference(const Cell& c, int dim, double x, double y)
{
    std::array<double, 2> xi{2.0 * (x - c.lower[0]) / c.width(0) - 1.0, 0.0};
    if (dim == 2)
        xi[1] = 2.0 * (y - c.lower[1]) / c.width(1) - 1.0;
    return xi;
}

} // namespace

std::array<double, 2> DGSpace::to_physical(int cell, std::array<double, 2> xi) const
{
    const Cell& c = mesh_.cell(cell);
    std::array<double, 2> r{c.lower[0] + 0.5 * (xi[0] + 1.0) * c.width(0), 0.0};
    if (dimension() == 2)
        r[1] = c.lower[1] + 0.5 * (xi[1] + 1.0) * c.width(1);
    return r;
}

double DGSpace::value(int cell, int p, double x, double y) const
{
    const Cell& c = mesh_.cell(cell);
    const double jac = measure(cell) / (dimension() == 1 ? 2.0 : 4.0);
    return reference_value(p, to_reference(c, dimension(), x, y)) / std::sqrt(jac);
}

std::array<double, 2> DGSpace::gradient(int cell, int p, double x, double y) const
{
    const Cell& c = mesh_.cell(cell);
    const double jac = measure(cell) / (dimension() == 1 ? 2.0 : 4.0);
    auto g = reference_gradient(p, to_reference(c, dimension(), x, y));
    const double s = 1.0 / std::sqrt(jac);
    g[0] *= 2.0 / c.width(0) * s;
    g[1] = dimension() == 2 ? g[1] * 2.0 / c.width(1) * s : 0.0;
    return g;
}

double DGSpace::evaluate(const Vector& coeffs, int cell, double x, double y) const
{
    double v = 0.0;
    for (int p = 0; p < local_size_; ++p)
        v += coeffs[cell * local_size_ + p] * value(cell, p, x, y);
    return v;
}

ReferenceTable DGSpace::make_table(int points_per_axis) const
{
    const GaussRule rule = gauss_rule(points_per_axis);
    ReferenceTable t;
    const int ny = dimension() == 2 ? points_per_axis : 1;
    for (int b = 0; b < ny; ++b) {
        for (int a = 0; a < points_per_axis; ++a) {
            t.points.push_back({rule.nodes[a], dimension() == 2 ? rule.nodes[b] : 0.0});
            t.weights.push_back(rule.weights[a] * (dimension() == 2 ? rule.weights[b] : 1.0));
        }
    }
    const int nq = static_cast<int>(t.points.size());
    t.values.resize(nq, local_size_);
    t.derivs[0].resize(nq, local_size_);
    t.derivs[1].resize(nq, local_size_);
    for (int q = 0; q < nq; ++q) {
        for (int p = 0; p < local_size_; ++p) {
            t.values(q, p) = reference_value(p, t.points[q]);
            const auto g = reference_gradient(p, t.points[q]);
            t.derivs[0](q, p) = g[0];
            t.derivs[1](q, p) = g[1];
        }
    }
    return t;
}

Vector DGSpace::project(const ScalarField& f, int points_per_axis) const
{
    const ReferenceTable t = make_table(points_per_axis);
    Vector coeffs = Vector::Zero(size());
    const double ref_measure = dimension() == 1 ? 2.0 : 4.0;
    for (int i = 0; i < num_cells(); ++i) {
        // int_cell f phi_p = sqrt(J) * sum_q w_q f(x_q) phihat_p(xi_q)
        const double sqrt_jac = std::sqrt(measure(i) / ref_measure);
        for (std::size_t q = 0; q < t.points.size(); ++q) {
            const auto r = to_physical(i, t.points[q]);
            const double fw = f(r[0], r[1]) * t.weights[q] * sqrt_jac;
            for (int p = 0; p < local_size_; ++p)
                coeffs[i * local_size_ + p] += fw * t.values(q, p);
        }
    }
    return coeffs;
}

} // namespace rte
