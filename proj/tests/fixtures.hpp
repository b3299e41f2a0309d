#ifndef RTE_TESTS_FIXTURES_HPP
#define RTE_TESTS_FIXTURES_HPP

#include "rte/problem.hpp"

#include <cmath>
#include <random>

namespace fixtures {

inline std::shared_ptr<rte::DGSpace> uniform_1d(int cells, double length, int degree = 1)
{
    const rte::MeshSegment seg{0.0, length, length / cells};
    return std::make_shared<rte::DGSpace>(rte::build_mesh_1d({&seg, 1}), degree);
}

inline std::shared_ptr<rte::DGSpace> uniform_2d(int nx, int ny, int degree = 1)
{
    return std::make_shared<rte::DGSpace>(rte::build_mesh_2d(nx, ny, {0.0, 0.0}, {1.0, 1.0}), degree);
}

/// Slab with piecewise constant materials, a source, and left inflow.
struct Slab {
    double sigma_a = 0.5;
    double sigma_s = 2.0;
    double q = 1.0;
    double inflow = 1.5;
    rte::ScalarField source() const
    {
        return [q = q](double x, double) { return x < 0.5 ? q : 0.25 * q; };
    }
    rte::ScalarField boundary() const
    {
        return [g = inflow](double x, double) { return x < 1e-12 ? g : 0.0; };
    }
    std::shared_ptr<rte::ParametricProblem> family(int cells = 8, int nq = 4, int degree = 1) const
    {
        auto space = uniform_1d(cells, 2.0, degree);
        const double a = sigma_a;
        const double s = sigma_s;
        return rte::make_fixed_problem(
            space, rte::gauss_legendre(nq), [a](double x, double) { return x < 1.0 ? a : 2 * a; },
            [s](double x, double) { return x < 1.0 ? s : 0.5 * s; }, source(), boundary());
    }
};

/// Unit square with smooth scattering, a bump source, and inflow on the left and bottom.
struct Square {
    double sigma_s = 3.0;
    rte::ScalarField scattering() const
    {
        return [s = sigma_s](double x, double y) { return s * (1.0 + 0.5 * std::sin(3 * x) * std::cos(2 * y)); };
    }
    rte::ScalarField absorption() const
    {
        return [](double x, double y) { return x + y < 1.0 ? 0.3 : 0.1; };
    }
    rte::ScalarField source() const
    {
        return [](double x, double y) { return std::exp(-10 * ((x - 0.4) * (x - 0.4) + (y - 0.6) * (y - 0.6))); };
    }
    rte::ScalarField boundary() const
    {
        return [](double x, double y) { return x < 1e-12 || y < 1e-12 ? 1.0 + y : 0.0; };
    }
    std::shared_ptr<rte::ParametricProblem> family(int n = 3, int na = 4, int nz = 2, int degree = 1) const
    {
        return rte::make_fixed_problem(uniform_2d(n, n, degree), rte::chebyshev_legendre(na, nz), absorption(),
                                       scattering(), source(), boundary());
    }
};

/// Two-parameter slab: mu_a scales an absorber on [0, 1), mu_s a scatterer on [1, 4];
/// a fixed source on the absorber and a left inflow scaled by mu_a.
struct ParamSlab {
    int cells = 16;
    int nq = 4;
    int degree = 1;
    static rte::ScalarField absorber() { return [](double x, double) { return x < 1.0 ? 1.0 : 0.05; }; }
    static rte::ScalarField scatterer() { return [](double x, double) { return x < 1.0 ? 0.0 : 1.0; }; }
    static rte::ScalarField source() { return [](double x, double) { return x < 1.0 ? 1.0 : 0.0; }; }
    static rte::ScalarField inflow() { return [](double x, double) { return x < 1e-12 ? 2.0 : 0.0; }; }
    std::shared_ptr<rte::ParametricProblem> family() const
    {
        auto space = uniform_1d(cells, 4.0, degree);
        rte::AffineDecomposition affine;
        affine.ranges = {{"mu_a", 0.5, 1.5}, {"mu_s", 1.0, 10.0}};
        affine.materials.push_back({"absorber", [](const rte::Parameter& m) { return m[0]; },
                                    space->project(absorber()), {}});
        affine.materials.push_back({"scatterer", [](const rte::Parameter& m) { return m[1]; }, {},
                                    space->project(scatterer())});
        affine.sources.push_back({"source", [](const rte::Parameter&) { return 1.0; }, space->project(source()), {}});
        affine.sources.push_back({"inflow", [](const rte::Parameter& m) { return m[0]; },
                                  rte::Vector::Zero(space->size()), inflow()});
        return rte::ParametricProblem::create(space, rte::gauss_legendre(nq), affine);
    }
    /// Inflow data at mu, for dense oracles.
    static rte::ScalarField inflow_at(const rte::Parameter& mu)
    {
        return [a = mu[0]](double x, double y) { return a * inflow()(x, y); };
    }
};

inline rte::Vector random_vector(Eigen::Index n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    rte::Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = u(rng);
    return v;
}

} // namespace fixtures

#endif
