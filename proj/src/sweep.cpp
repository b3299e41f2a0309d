#include "rte/sweep.hpp"

#include <cmath>

namespace rte {

SweepOperator::SweepOperator(const DiscreteProblem& problem, int j)
    : streaming_(&problem.streaming()), total_(&problem.total_mass()), j_(j), n_(problem.space().local_size())
{
    if (j < 0 || j >= problem.num_directions())
        throw InvalidArgument("SweepOperator: direction index out of range");
    const int cells = problem.space().num_cells();
    const std::size_t nn = static_cast<std::size_t>(n_) * n_;
    lu_.resize(cells * nn);
    perm_.resize(static_cast<std::size_t>(cells) * n_);
    for (int i = 0; i < cells; ++i) {
        const Eigen::PartialPivLU<Matrix> lu(diagonal_block(i));
        const Matrix& f = lu.matrixLU();
        for (int k = 0; k < n_; ++k) {
            const double u = f(k, k);
            if (!std::isfinite(u) || std::abs(u) < 1e-300)
                throw NumericalFailure("transport sweep: singular block in cell " + std::to_string(i)
                                       + " for direction " + std::to_string(j));
        }
        std::copy(f.data(), f.data() + nn, lu_.begin() + i * nn);
        const auto& idx = lu.permutationP().indices();
        for (int k = 0; k < n_; ++k)
            perm_[static_cast<std::size_t>(i) * n_ + k] = idx[k];
    }
}

Matrix SweepOperator::diagonal_block(int cell) const
{
    return streaming_->diagonal_block(j_, cell) + total_->block(cell);
}

void SweepOperator::solve(const double* rhs, double* x) const
{
    const int n = n_;
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    double b[16];
    double c[16];
    for (const int i : order()) {
        const std::size_t off = static_cast<std::size_t>(i) * n;
        for (int k = 0; k < n; ++k)
            b[k] = rhs[off + k];
        for (const auto& cp : upwind(i)) {
            const double* blk = streaming_->coupling_block(j_, cp).data();
            const double* xn = x + static_cast<std::size_t>(cp.neighbor) * n;
            for (int col = 0; col < n; ++col) {
                const double v = xn[col];
                for (int row = 0; row < n; ++row)
                    b[row] -= blk[row + col * n] * v;
            }
        }
        // P A = L U with P mapping row k to row perm[k].
        const int* p = perm_.data() + off;
        for (int k = 0; k < n; ++k)
            c[p[k]] = b[k];
        const double* f = lu_.data() + i * nn;
        for (int r = 1; r < n; ++r)
            for (int k = 0; k < r; ++k)
                c[r] -= f[r + k * n] * c[k];
        for (int r = n - 1; r >= 0; --r) {
            for (int k = r + 1; k < n; ++k)
                c[r] -= f[r + k * n] * c[k];
            c[r] /= f[r + r * n];
        }
        for (int k = 0; k < n; ++k)
            x[off + k] = c[k];
    }
}

Vector SweepOperator::solve(const Vector& rhs) const
{
    Vector x(rhs.size());
    solve(rhs.data(), x.data());
    return x;
}

SweepOperator assemble_direction_operator(const DiscreteProblem& problem, int j)
{
    return SweepOperator(problem, j);
}

} // namespace rte
