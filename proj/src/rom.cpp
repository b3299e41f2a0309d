#include "rte/rom.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <iostream>
#include <limits>

namespace rte {

void SnapshotMatrix::add(const Vector& column, SnapshotLabel label)
{
    if (rows_ == 0 && columns_.empty())
        rows_ = column.size();
    if (column.size() != rows_)
        throw InvalidArgument("snapshot column has length " + std::to_string(column.size()) + ", expected " +
                              std::to_string(rows_));
    columns_.push_back(column);
    labels_.push_back(std::move(label));
}

Matrix SnapshotMatrix::matrix() const
{
    Matrix m(rows_, cols());
    for (int i = 0; i < cols(); ++i)
        m.col(i) = columns_[i];
    return m;
}

double ReducedBasis::retained_energy() const
{
    const double total = singular_values.sum();
    if (total <= 0.0)
        return 1.0;
    return singular_values.head(rank()).sum() / total;
}

ReducedBasis pod(const SnapshotMatrix& snapshots, double eps_svd)
{
    if (!(eps_svd > 0.0 && eps_svd <= 1.0))
        throw InvalidArgument("pod: eps_svd must lie in (0, 1]");
    ReducedBasis basis;
    basis.eps_svd = eps_svd;

    double max_norm = 0.0;
    for (int i = 0; i < snapshots.cols(); ++i)
        max_norm = std::max(max_norm, snapshots.column(i).norm());
    std::vector<int> keep;
    for (int i = 0; i < snapshots.cols(); ++i)
        if (max_norm > 0.0 && snapshots.column(i).norm() >= 1e-14 * max_norm)
            keep.push_back(i);
    if (keep.empty()) {
        std::clog << "warning: pod on an all-zero snapshot matrix, basis is empty\n";
        basis.U.resize(snapshots.rows(), 0);
        basis.singular_values.resize(0);
        return basis;
    }

    Matrix f(snapshots.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i)
        f.col(static_cast<Eigen::Index>(i)) = snapshots.column(keep[i]);
    Eigen::BDCSVD<Matrix> svd(f, Eigen::ComputeThinU);
    basis.singular_values = svd.singularValues();
    const Vector& s = basis.singular_values;

    // Numerical rank, then the smallest rank meeting the energy criterion.
    const double cutoff = static_cast<double>(std::max(f.rows(), f.cols())) *
                          std::numeric_limits<double>::epsilon() * s(0);
    int numerical = 0;
    while (numerical < s.size() && s(numerical) > cutoff)
        ++numerical;
    const double total = s.sum();
    double partial = 0.0;
    int r = 0;
    while (r < numerical && partial < (1.0 - eps_svd) * total)
        partial += s(r++);
    r = std::max(r, 1);
    basis.U = svd.matrixU().leftCols(r);
    return basis;
}

void project_operators(ReducedBasis& basis, const ParametricProblem& family)
{
    const int nd = family.num_dofs();
    const int nv = family.num_directions();
    if (basis.U.rows() != family.state_size())
        throw InvalidArgument("project_operators: basis rows do not match the state size");
    const int r = basis.rank();
    basis.num_dofs = nd;
    basis.num_directions = nv;
    basis.U_rho = Matrix::Zero(nd, r);
    basis.U_iso = Matrix::Zero(nd, r);
    const auto& w = family.quadrature().weights;
    for (int j = 0; j < nv; ++j) {
        const auto uj = basis.U.middleRows(static_cast<Eigen::Index>(j) * nd, nd);
        basis.U_rho += w[j] * uj;
        basis.U_iso += uj;
    }

    const int nq = static_cast<int>(family.affine().materials.size()) + 1;
    basis.operator_blocks.assign(nq, Matrix::Zero(r, r));
    for (int q = 0; q < nq; ++q) {
        Matrix au(basis.U.rows(), r);
        for (int k = 0; k < r; ++k)
            au.col(k) = family.apply_term(q, basis.U.col(k));
        basis.operator_blocks[q] = basis.U.transpose() * au;
    }
    const int np = static_cast<int>(family.affine().sources.size());
    basis.rhs_blocks.assign(np, Vector::Zero(r));
    for (int p = 0; p < np; ++p)
        basis.rhs_blocks[p] = basis.U.transpose() * family.rhs_term(p);
}

Matrix reduced_matrix(const ReducedBasis& basis, const AffineDecomposition& affine, const Parameter& mu)
{
    const auto theta = affine.operator_thetas(mu);
    if (theta.size() != basis.operator_blocks.size())
        throw InvalidArgument("reduced_matrix: basis was projected with a different affine family");
    Matrix a = Matrix::Zero(basis.rank(), basis.rank());
    for (std::size_t q = 0; q < theta.size(); ++q)
        a += theta[q] * basis.operator_blocks[q];
    return a;
}

Vector reduced_rhs(const ReducedBasis& basis, const AffineDecomposition& affine, const Parameter& mu)
{
    const auto theta = affine.source_thetas(mu);
    if (theta.size() != basis.rhs_blocks.size())
        throw InvalidArgument("reduced_rhs: basis was projected with a different affine family");
    Vector b = Vector::Zero(basis.rank());
    for (std::size_t p = 0; p < theta.size(); ++p)
        b += theta[p] * basis.rhs_blocks[p];
    return b;
}

ReducedOperator::ReducedOperator(const ReducedBasis& basis, const AffineDecomposition& affine, const Parameter& mu)
    : matrix_(basis.rank() == 0 ? Matrix(0, 0) : reduced_matrix(basis, affine, mu))
{
    if (rank() == 0)
        return;
    if (!matrix_.allFinite())
        throw NumericalFailure("reduced operator has non-finite entries");
    lu_.compute(matrix_);
    rcond_ = lu_.rcond();
    if (!(rcond_ >= 1e-14))
        throw NumericalFailure("reduced operator is singular to working precision (rcond " +
                               std::to_string(rcond_) + ")");
}

Vector ReducedOperator::solve(const Vector& rhs) const
{
    if (rhs.size() != rank())
        throw InvalidArgument("reduced solve: right-hand side has the wrong length");
    if (rank() == 0)
        return Vector(0);
    Vector c = lu_.solve(rhs);
    if (!c.allFinite())
        throw NumericalFailure("reduced solve produced non-finite values");
    return c;
}

Vector reduced_solve(const ReducedBasis& basis, const AffineDecomposition& affine, const Parameter& mu,
                     const Vector& rhs)
{
    return ReducedOperator(basis, affine, mu).solve(rhs);
}

DensityField rom_initial_guess(const ReducedBasis& basis, const DiscreteProblem& problem)
{
    if (basis.rank() == 0)
        return DensityField::Zero(problem.num_dofs());
    const auto& affine = problem.family().affine();
    const Vector c = reduced_solve(basis, affine, problem.parameter(), reduced_rhs(basis, affine, problem.parameter()));
    return basis.U_rho * c;
}

DensityField apply_rom_correction(const ReducedBasis& basis, const ReducedOperator& reduced,
                                  const DiscreteProblem& problem, const DensityField& q, RomOpCount* count)
{
    const int nd = problem.num_dofs();
    if (q.size() != nd)
        throw InvalidArgument("apply_rom_correction: density has the wrong length");
    const int r = basis.rank();
    if (r == 0)
        return DensityField::Zero(nd);
    const Vector y = problem.scattering_mass() * q;
    const Vector yr = basis.U_iso.transpose() * y;
    const Vector c = reduced.solve(yr);
    if (count) {
        const long long n = problem.space().local_size();
        count->scattering += static_cast<long long>(nd) * n;
        count->restrict += static_cast<long long>(nd) * r;
        count->reduced += static_cast<long long>(r) * r;
        count->prolong += static_cast<long long>(nd) * r;
    }
    return basis.U_rho * c;
}

RomCorrection::RomCorrection(std::shared_ptr<const DiscreteProblem> problem, std::shared_ptr<const ReducedBasis> basis)
    : problem_(std::move(problem)), basis_(std::move(basis)),
      reduced_(*basis_, problem_->family().affine(), problem_->parameter())
{
}

DensityField RomCorrection::correct(int, const DensityField& v)
{
    return apply_rom_correction(*basis_, reduced_, *problem_, v);
}

} // namespace rte
