#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"

#include "rte/dsa.hpp"

#include <cmath>
#include <cstring>

using namespace rte;

TEST_CASE("Eddington moments")
{
    auto space = fixtures::uniform_1d(4, 1.0);
    auto p = make_fixed_problem(space, gauss_legendre(16), {}, [](double, double) { return 1.0; }, {}, {})
                 ->instantiate({});
    const DiffusionOperator dsa(*p);
    CHECK(std::abs(dsa.eddington()[0] - 1.0 / 3.0) < 1e-14);

    const auto q = chebyshev_legendre(30, 6);
    const auto m = q.second_moments();
    double sx = 0.0;
    for (int j = 0; j < q.size(); ++j)
        sx += q.weights[j] * q.directions[j][0] * q.directions[j][0];
    CHECK(std::abs(m[0] - sx) < 1e-14);
    for (double v : m)
        CHECK(std::abs(v - 1.0 / 3.0) < 1e-3);
}

TEST_CASE("one-cell SIP matrix matches the hand-assembled form")
{
    const double h = 0.7;
    const double sa = 0.4;
    const double ss = 2.5;
    auto space = fixtures::uniform_1d(1, h);
    auto p = make_fixed_problem(space, gauss_legendre(8), [sa](double, double) { return sa; },
                                [ss](double, double) { return ss; }, {}, {})
                 ->instantiate({});
    DsaOptions sip;
    sip.scheme = DsaScheme::sip;
    const DiffusionOperator dsa(*p, sip);
    const Matrix a = Matrix(dsa.matrix());
    const double kappa = dsa.eddington()[0] / (sa + ss);
    const double eta = 4.0 * 4.0 * kappa / h;
    // Stiffness 12 kappa / h^2 on the linear mode, consistency terms -24 kappa / h^2,
    // penalty 2 eta / h and 6 eta / h.
    CHECK(std::abs(a(0, 0) - (sa + 2 * eta / h)) < 1e-12);
    CHECK(std::abs(a(0, 1)) < 1e-12);
    CHECK(std::abs(a(1, 0)) < 1e-12);
    CHECK(std::abs(a(1, 1) - (sa + 12 * kappa / (h * h) - 24 * kappa / (h * h) + 6 * eta / h)) < 1e-12);
}

TEST_CASE("SIP diffusion operator is symmetric and deterministic")
{
    fixtures::Square sq;
    auto p = sq.family(5, 4, 2)->instantiate({});
    DsaOptions sip;
    sip.scheme = DsaScheme::sip;
    const DiffusionOperator dsa(*p, sip);
    const Matrix a = Matrix(dsa.matrix());
    CHECK(oracle::max_abs(a - a.transpose()) <= 1e-10 * oracle::max_abs(a));
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    CHECK(es.eigenvalues().minCoeff() > 0.0);

    const Vector r = fixtures::random_vector(p->num_dofs(), 4);
    const Vector x1 = dsa_correct(dsa, r, *p);
    const Vector x2 = dsa_correct(dsa, r, *p);
    CHECK(std::memcmp(x1.data(), x2.data(), sizeof(double) * x1.size()) == 0);
    CHECK(oracle::inf_norm(a * x1 - p->scattering_mass() * r) < 1e-10 * oracle::inf_norm(x1) * oracle::max_abs(a));

    CHECK(dsa_correct(dsa, Vector::Zero(p->num_dofs()), *p).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pure absorber region gets no diffusion source")
{
    auto space = fixtures::uniform_1d(10, 2.0);
    auto p = make_fixed_problem(space, gauss_legendre(8), [](double, double) { return 1.0; },
                                [](double x, double) { return x < 1.0 ? 0.0 : 5.0; }, {}, {})
                 ->instantiate({});
    const Vector r = Vector::Ones(p->num_dofs());
    const Vector rhs = p->scattering_mass() * r;
    CHECK(rhs.head(10).cwiseAbs().maxCoeff() == 0.0);
    CHECK(rhs.tail(10).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("DSA accelerates a scattering-dominated slab")
{
    auto space = fixtures::uniform_1d(50, 5.0);
    auto p = make_fixed_problem(space, gauss_legendre(16), {}, [](double, double) { return 50.0; },
                                [](double, double) { return 1.0; }, {})
                 ->instantiate({});
    const TransportOperator op(p);
    SolveOptions opt;
    opt.tol = 1e-11;
    opt.max_iter = 101;
    NoCorrection none;
    const SolveReport plain = source_iteration(op, none, Vector::Zero(p->num_dofs()), opt);
    CHECK_FALSE(plain.converged);
    CHECK(plain.iterations > 100);

    DsaCorrection dsa(p, assemble_dsa(*p));
    const SolveReport acc = source_iteration(op, dsa, Vector::Zero(p->num_dofs()), opt);
    CHECK(acc.converged);
    CHECK(acc.iterations <= 15);
    MESSAGE("SI-DSA iterations on the sigma_s = 50 slab: " << acc.iterations);
}

TEST_CASE("SI-DSA equals left-preconditioned Richardson")
{
    const fixtures::Slab slab;
    auto p = slab.family(8, 4)->instantiate({});
    const TransportOperator op(p);
    const auto d = oracle::dense_system(*p, slab.source(), slab.boundary());
    auto diffusion = assemble_dsa(*p);
    DsaCorrection dsa(p, diffusion);
    SolveOptions opt;
    opt.tol = 1e-300;
    opt.max_iter = 10;
    opt.record_trajectory = true;
    const Vector rho0 = fixtures::random_vector(p->num_dofs(), 2);
    const SolveReport rep = source_iteration(op, dsa, rho0, opt);
    REQUIRE(rep.iterates.size() == 10);

    // Dense C^{-1} Sigma_s: density block of the mixed system's inverse.
    const int n = p->num_dofs();
    Matrix padded = Matrix::Zero(diffusion->matrix().rows(), n);
    padded.topRows(n) = d.sigma_s;
    const Matrix cinv_s = Matrix(diffusion->matrix()).partialPivLu().solve(padded).topRows(n);
    const Matrix m = Matrix::Identity(p->num_dofs(), p->num_dofs()) + cinv_s;
    Vector rho = rho0;
    for (int l = 0; l < 10; ++l) {
        rho = rho + m * (d.b_tilde - d.A_tilde * rho);
        CHECK(oracle::inf_norm(rho - rep.iterates[l]) < 1e-11);
    }
}

TEST_CASE("consistent correction is exact for a two-direction slab")
{
    // With two directions the flux is exactly rho + 3 mu J, so the correction
    // removes the whole error after one sweep.
    const fixtures::Slab slab;
    for (double ss : {2.0, 40.0}) {
        fixtures::Slab s2 = slab;
        s2.sigma_s = ss;
        auto p = s2.family(12, 2)->instantiate({});
        const TransportOperator op(p);
        DsaCorrection dsa(p, assemble_dsa(*p));
        SolveOptions opt;
        opt.tol = 1e-11;
        const SolveReport rep = source_iteration(op, dsa, Vector::Zero(p->num_dofs()), opt);
        CHECK(rep.converged);
        CHECK(rep.iterations <= 2);
        const auto d = oracle::dense_system(*p, s2.source(), s2.boundary());
        const Vector exact = oracle::density(d.A.partialPivLu().solve(d.b), d.w);
        CHECK(oracle::inf_norm(rep.final_density - exact) < 1e-9 * oracle::inf_norm(exact));
    }
}

TEST_CASE("consistent correction accelerates a diffusive square")
{
    const auto space = fixtures::uniform_2d(12, 12);
    auto p = make_fixed_problem(space, chebyshev_legendre(8, 2), [](double, double) { return 0.1; },
                                [](double, double) { return 40.0; }, [](double, double) { return 1.0; }, {})
                 ->instantiate({});
    const TransportOperator op(p);
    SolveOptions opt;
    opt.tol = 1e-10;
    opt.max_iter = 60;
    NoCorrection none;
    const SolveReport plain = source_iteration(op, none, Vector::Zero(p->num_dofs()), opt);
    CHECK_FALSE(plain.converged);
    DsaCorrection dsa(p, assemble_dsa(*p));
    const SolveReport acc = source_iteration(op, dsa, Vector::Zero(p->num_dofs()), opt);
    CHECK(acc.converged);
    CHECK(acc.iterations <= 20);
    MESSAGE("SI-DSA iterations on the diffusive square: " << acc.iterations);
}
