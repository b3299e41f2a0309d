#ifndef RTE_SWEEP_HPP
#define RTE_SWEEP_HPP

#include "rte/problem.hpp"

namespace rte {

/// D_j + Sigma_t for one direction, with LU-factored diagonal blocks.
///
/// Holds references into the problem, which must outlive the operator.
class SweepOperator {
public:
    SweepOperator(const DiscreteProblem& problem, int j);

    int direction() const { return j_; }
    int local_size() const { return n_; }
    std::span<const int> order() const { return streaming_->sweep_order(j_); }

    /// Unfactored diagonal block of D_j + Sigma_t.
    Matrix diagonal_block(int cell) const;
    std::span<const StreamingOperator::Coupling> upwind(int cell) const { return streaming_->upwind(j_, cell); }
    Eigen::Map<const Matrix> coupling_block(const StreamingOperator::Coupling& c) const
    {
        return streaming_->coupling_block(j_, c);
    }

    /// Solves (D_j + Sigma_t) x = rhs by block forward substitution; x may not alias rhs.
    void solve(const double* rhs, double* x) const;
    Vector solve(const Vector& rhs) const;

private:
    const StreamingOperator* streaming_;
    const CoefficientMass* total_;
    int j_;
    int n_;
    std::vector<double> lu_;
    std::vector<int> perm_;
};

SweepOperator assemble_direction_operator(const DiscreteProblem& problem, int j);

} // namespace rte

#endif
