#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"

#include "rte/dsa.hpp"
#include "rte/rom.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace rte;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, unsigned seed)
{
    Matrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        m.col(c) = fixtures::random_vector(rows, seed * 1000 + static_cast<unsigned>(c));
    return m;
}

SnapshotMatrix from_matrix(const Matrix& m)
{
    SnapshotMatrix s(m.rows());
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        s.add(m.col(c));
    return s;
}

/// Orthonormal basis with the given columns first.
Matrix orthonormal(const Matrix& m)
{
    Eigen::HouseholderQR<Matrix> qr(m);
    return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

ReducedBasis basis_from(const Matrix& u, const ParametricProblem& family)
{
    ReducedBasis b;
    b.U = u;
    b.singular_values = Vector::Ones(u.cols());
    project_operators(b, family);
    return b;
}

/// Exact solutions of the param slab family at mu, from dense oracle assembly.
oracle::DenseSystem dense_at(const DiscreteProblem& p)
{
    return oracle::dense_system(p, fixtures::ParamSlab::source(), fixtures::ParamSlab::inflow_at(p.parameter()));
}

} // namespace

TEST_CASE("pod of two identical columns has rank one")
{
    const Vector v = fixtures::random_vector(30, 1);
    SnapshotMatrix s(30);
    s.add(v);
    s.add(v);
    const ReducedBasis b = pod(s, 1e-10);
    REQUIRE(b.rank() == 1);
    const Vector u = b.U.col(0);
    CHECK(std::abs(std::abs(u.dot(v)) - v.norm()) < 1e-12 * v.norm());
}

TEST_CASE("pod with tiny tolerance recovers the numerical rank")
{
    const Matrix f = random_matrix(50, 3, 2) * random_matrix(3, 10, 3);
    const ReducedBasis b = pod(from_matrix(f), 1e-15);
    CHECK(b.rank() == 3);
    CHECK(oracle::max_abs(b.U.transpose() * b.U - Matrix::Identity(3, 3)) < 1e-10);
}

TEST_CASE("pod truncation error equals the discarded singular values")
{
    const Matrix f = random_matrix(100, 20, 4);
    for (double eps : {0.5, 0.2, 0.05, 1e-3}) {
        const ReducedBasis b = pod(from_matrix(f), eps);
        const int r = b.rank();
        // Singular values from the eigenvalues of the Gram matrix, descending.
        Eigen::SelfAdjointEigenSolver<Matrix> es(f.transpose() * f);
        Vector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().reverse();
        const double err = (f - b.U * (b.U.transpose() * f)).norm();
        CHECK(std::abs(err - s.tail(20 - r).norm()) < 1e-10 * f.norm());
        CHECK(oracle::max_abs(b.U.transpose() * b.U - Matrix::Identity(r, r)) < 1e-10);
        // Smallest rank meeting the singular-value sum criterion.
        CHECK(s.head(r).sum() / s.sum() >= 1.0 - eps - 1e-12);
        CHECK(s.head(r - 1).sum() / s.sum() < 1.0 - eps);
        CHECK(b.retained_energy() >= 1.0 - eps - 1e-12);
    }
}

TEST_CASE("pod edge cases")
{
    SnapshotMatrix zero(10);
    zero.add(Vector::Zero(10));
    zero.add(Vector::Zero(10));
    CHECK(pod(zero, 1e-6).rank() == 0);

    // A column at round-off scale does not create a noise mode.
    SnapshotMatrix tiny(10);
    tiny.add(fixtures::random_vector(10, 5));
    tiny.add(1e-17 * fixtures::random_vector(10, 6));
    CHECK(pod(tiny, 1e-15).rank() == 1);

    SnapshotMatrix s(10);
    CHECK_THROWS_AS(s.add(Vector::Zero(11)), InvalidArgument);
    CHECK_THROWS_AS(pod(tiny, 0.0), InvalidArgument);
}

TEST_CASE("Galerkin consistency of the basis")
{
    const ReducedBasis b = pod(from_matrix(random_matrix(40, 6, 7)), 1e-15);
    const Vector w = b.U * fixtures::random_vector(b.rank(), 8);
    CHECK((b.U * (b.U.transpose() * w) - w).norm() < 1e-10 * w.norm());
}

TEST_CASE("projected blocks match dense products")
{
    const fixtures::Slab slab;
    auto fam = slab.family(8, 4);
    auto p = fam->instantiate({});
    const auto d = oracle::dense_system(*p, slab.source(), slab.boundary());
    const Matrix u = orthonormal(random_matrix(p->state_size(), 5, 9));
    const ReducedBasis b = basis_from(u, *fam);
    const Matrix direct = u.transpose() * d.A * u;
    CHECK(oracle::max_abs(reduced_matrix(b, fam->affine(), {}) - direct) < 1e-12 * oracle::max_abs(direct));
    CHECK(oracle::inf_norm(reduced_rhs(b, fam->affine(), {}) - u.transpose() * d.b) < 1e-12 * oracle::inf_norm(d.b));
    for (int k = 0; k < 5; ++k) {
        CHECK(oracle::inf_norm(b.U_rho.col(k) - oracle::density(u.col(k), d.w)) < 1e-14);
        CHECK(oracle::inf_norm(b.U_iso.col(k) - oracle::density(u.col(k), std::vector<double>(d.w.size(), 1.0))) <
              1e-13);
    }

    ReducedBasis empty = basis_from(Matrix(p->state_size(), 0), *fam);
    CHECK(reduced_matrix(empty, fam->affine(), {}).size() == 0);
}

TEST_CASE("reduced operator matches projection of the assembled operator at random parameters")
{
    const fixtures::ParamSlab ps;
    auto fam = ps.family();
    const Matrix u = orthonormal(random_matrix(fam->state_size(), 7, 10));
    const ReducedBasis b = basis_from(u, *fam);
    for (unsigned seed = 1; seed <= 4; ++seed) {
        const Parameter mu{0.5 + 0.23 * seed, 1.0 + 2.1 * seed};
        auto p = fam->instantiate(mu);
        const auto d = dense_at(*p);
        const Matrix direct = u.transpose() * d.A * u;
        CHECK(oracle::max_abs(reduced_matrix(b, fam->affine(), mu) - direct) < 1e-11 * oracle::max_abs(direct));
        CHECK(oracle::inf_norm(reduced_rhs(b, fam->affine(), mu) - u.transpose() * d.b) <
              1e-11 * oracle::inf_norm(d.b));
    }
}

TEST_CASE("reduced solves")
{
    const fixtures::ParamSlab ps;
    auto fam = ps.family();
    ReducedBasis b;
    b.operator_blocks = {Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 3.0), Matrix::Constant(1, 1, -1.0)};
    b.U = Matrix::Zero(fam->state_size(), 1);
    const Parameter mu{1.0, 4.0};
    const Vector c = reduced_solve(b, fam->affine(), mu, Vector::Constant(1, 6.0));
    CHECK(std::abs(c[0] - 6.0 / (2.0 + 3.0 * 1.0 - 4.0)) < 1e-15);

    // Random well-conditioned systems against a pseudo-inverse.
    for (unsigned seed = 1; seed <= 5; ++seed) {
        const int r = 3 + static_cast<int>(seed);
        ReducedBasis rb;
        rb.U = Matrix::Zero(fam->state_size(), r);
        rb.operator_blocks = {Matrix::Identity(r, r) * 4.0 + 0.3 * random_matrix(r, r, seed), 0.2 * random_matrix(r, r, seed + 20),
                              0.1 * random_matrix(r, r, seed + 40)};
        const Vector rhs = fixtures::random_vector(r, seed + 60);
        const Matrix a = reduced_matrix(rb, fam->affine(), mu);
        const Vector expect = a.completeOrthogonalDecomposition().pseudoInverse() * rhs;
        CHECK(oracle::inf_norm(reduced_solve(rb, fam->affine(), mu, rhs) - expect) < 1e-12 * oracle::inf_norm(expect));
    }

    ReducedBasis singular;
    singular.U = Matrix::Zero(fam->state_size(), 2);
    singular.operator_blocks = {Matrix::Zero(2, 2), Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
    CHECK_THROWS_AS(reduced_solve(singular, fam->affine(), mu, Vector::Ones(2)), NumericalFailure);
}

TEST_CASE("solution basis reproduces training solutions")
{
    const fixtures::ParamSlab ps;
    auto fam = ps.family();
    const std::vector<Parameter> train{{0.5, 1.0}, {1.0, 5.0}, {1.5, 10.0}, {0.7, 8.0}, {1.2, 2.0}};
    SnapshotMatrix snaps(fam->state_size());
    std::vector<Vector> exact;
    for (const auto& mu : train) {
        const auto d = dense_at(*fam->instantiate(mu));
        exact.push_back(d.A.partialPivLu().solve(d.b));
        snaps.add(exact.back(), {mu, 0});
    }
    ReducedBasis b = pod(snaps, 1e-12);
    project_operators(b, *fam);
    CHECK(b.rank() == 5);
    for (std::size_t i = 0; i < train.size(); ++i) {
        auto p = fam->instantiate(train[i]);
        const Vector c = reduced_solve(b, fam->affine(), train[i], reduced_rhs(b, fam->affine(), train[i]));
        CHECK(oracle::inf_norm(b.U * c - exact[i]) < 1e-8);
        const Vector rho0 = rom_initial_guess(b, *p);
        CHECK(oracle::inf_norm(rho0 - oracle::density(exact[i], p->quadrature().weights)) <= 1e-6);
    }

    ReducedBasis empty = basis_from(Matrix(fam->state_size(), 0), *fam);
    auto p = fam->instantiate(train[0]);
    CHECK(rom_initial_guess(empty, *p).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ROM correction matches the explicitly assembled operator")
{
    const fixtures::ParamSlab ps;
    auto fam = ps.family();
    const Parameter mu{0.9, 6.0};
    auto p = fam->instantiate(mu);
    const auto d = dense_at(*p);
    const Matrix u = orthonormal(random_matrix(fam->state_size(), 6, 11));
    const ReducedBasis b = basis_from(u, *fam);
    const ReducedOperator red(b, fam->affine(), mu);

    const int nd = p->num_dofs();
    const int nv = p->num_directions();
    Matrix u_rho = Matrix::Zero(nd, 6);
    Matrix u_iso = Matrix::Zero(nd, 6);
    for (int j = 0; j < nv; ++j) {
        u_rho += d.w[j] * u.middleRows(j * nd, nd);
        u_iso += u.middleRows(j * nd, nd);
    }
    const Matrix c_inv_s = u_rho * (u.transpose() * d.A * u).inverse() * u_iso.transpose() * d.sigma_s;
    const Vector q = fixtures::random_vector(nd, 12);
    const Vector expect = c_inv_s * q;
    CHECK(oracle::inf_norm(apply_rom_correction(b, red, *p, q) - expect) < 1e-11 * oracle::inf_norm(expect));

    const ReducedBasis empty = basis_from(Matrix(fam->state_size(), 0), *fam);
    CHECK(apply_rom_correction(empty, ReducedOperator(empty, fam->affine(), mu), *p, q).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ROM correction is ideal when the basis contains the ideal correction")
{
    const fixtures::ParamSlab ps;
    auto fam = ps.family();
    const Parameter mu{1.1, 7.0};
    auto p = fam->instantiate(mu);
    const auto d = dense_at(*p);
    const int nd = p->num_dofs();
    const int nv = p->num_directions();
    const Vector r = fixtures::random_vector(nd, 13);
    Vector rhs(static_cast<Eigen::Index>(nd) * nv);
    for (int j = 0; j < nv; ++j)
        rhs.segment(j * nd, nd) = d.sigma_s * r;
    const Vector df = d.A.partialPivLu().solve(rhs);
    Matrix cols(df.size(), 3);
    cols.col(0) = df;
    cols.col(1) = fixtures::random_vector(df.size(), 14);
    cols.col(2) = fixtures::random_vector(df.size(), 15);
    const ReducedBasis b = basis_from(orthonormal(cols), *fam);
    const Vector got = apply_rom_correction(b, ReducedOperator(b, fam->affine(), mu), *p, r);
    const Vector ideal = oracle::ideal_correction(d, r);
    CHECK(oracle::inf_norm(got - ideal) < 1e-9 * oracle::inf_norm(ideal));
}

TEST_CASE("ROM correction cost scales linearly with the number of unknowns")
{
    std::vector<long long> totals;
    std::vector<int> dofs;
    for (int cells : {40, 80}) {
        fixtures::ParamSlab ps;
        ps.cells = cells;
        auto fam = ps.family();
        auto p = fam->instantiate({1.0, 5.0});
        const ReducedBasis b = basis_from(orthonormal(random_matrix(fam->state_size(), 8, 16)), *fam);
        const ReducedOperator red(b, fam->affine(), p->parameter());
        RomOpCount count;
        apply_rom_correction(b, red, *p, fixtures::random_vector(p->num_dofs(), 17), &count);
        CHECK(count.total() <= 4LL * p->num_dofs() * (b.rank() + 2) + b.rank() * b.rank());
        totals.push_back(count.total());
        dofs.push_back(p->num_dofs());
    }
    const double ratio = static_cast<double>(totals[1]) / static_cast<double>(totals[0]);
    CHECK(ratio > 1.9);
    CHECK(ratio < 2.1);
}

TEST_CASE("ROM correction schedule drives source iteration")
{
    const fixtures::ParamSlab ps;
    auto fam = ps.family();
    const Parameter mu{1.0, 9.0};
    auto p = fam->instantiate(mu);
    const auto d = dense_at(*p);
    // Ideal corrections for the first residual fill the basis, so two iterations suffice.
    const TransportOperator op(p);
    const Vector rho0 = Vector::Zero(p->num_dofs());
    const auto [f1, rho1] = op.si_step(rho0);
    const Vector exact = d.A.partialPivLu().solve(d.b);
    const Vector df = exact - stacked(f1);
    Matrix cols(df.size(), 1);
    cols.col(0) = df;
    auto b = std::make_shared<ReducedBasis>(basis_from(orthonormal(cols), *fam));
    RomCorrection rom(p, b);
    SolveOptions opt;
    opt.tol = 1e-10;
    const SolveReport rep = source_iteration(op, rom, rho0, opt);
    CHECK(rep.converged);
    CHECK(rep.iterations <= 2);
}
