#ifndef RTE_KRYLOV_HPP
#define RTE_KRYLOV_HPP

#include "rte/transport.hpp"

namespace rte {

/// Incremental least squares min ||beta e1 - H y||_2 for an upper Hessenberg H, via Givens rotations.
class HessenbergLeastSquares {
public:
    explicit HessenbergLeastSquares(double beta);

    /// Appends column m (0-based) with entries H(0..m+1, m); returns the updated residual norm.
    double add_column(const Vector& h);

    int size() const { return static_cast<int>(cs_.size()); }
    double residual() const { return std::abs(g_[size()]); }
    Vector solve() const;

private:
    std::vector<double> cs_;
    std::vector<double> sn_;
    std::vector<Vector> r_;   // rotated columns, upper triangular part
    std::vector<double> g_;
};

/// Least-squares solution and residual norm for an (m+1) x m Hessenberg matrix.
std::pair<Vector, double> hessenberg_lsq(const Matrix& H, double beta);

/// Krylov vectors of a flexible Arnoldi process.
struct KrylovState {
    std::vector<Vector> q;   // orthonormal basis, one more than z once a step is taken
    std::vector<Vector> z;   // preconditioned vectors
    Matrix H;                // (m+1) x m
    double beta = 0.0;
};

/// Flexible Arnoldi process on (I - K Sigma_s) with one sweep per step.
///
/// Orthogonalization is modified Gram-Schmidt with a second pass when the norm
/// drops by more than a factor 1e3.
class FlexibleArnoldi {
public:
    /// Starts from r0 = b~ - A~ rho0; breakdown when H(l+1, l) <= 1e-14 breakdown_scale.
    FlexibleArnoldi(const Vector& r0, double breakdown_scale);

    int steps() const { return static_cast<int>(state_.z.size()); }
    double beta() const { return state_.beta; }
    /// The Krylov vector the next step preconditions.
    const Vector& current() const { return state_.q.back(); }
    bool broken_down() const { return broken_; }

    /// Takes one step with z = M^{-1} current(); returns the least-squares residual.
    double step(const TransportOperator& op, const Vector& z);

    double residual() const { return lsq_.residual(); }
    /// rho0 + Z y* for the current least-squares solution.
    Vector solution(const Vector& rho0) const;
    const KrylovState& state() const { return state_; }

private:
    KrylovState state_;
    HessenbergLeastSquares lsq_;
    double breakdown_tol_;
    bool broken_ = false;
};

/// Flexible GMRES for (I - K Sigma_s) rho = b~ with z_l = q_l + schedule.correct(l, q_l).
///
/// Sweeps: one for b~, one for the initial residual when rho0 is nonzero, one per iteration.
/// residual_history holds the least-squares residual of each iteration. keep_flux costs one
/// extra sweep that is not counted.
SolveReport fgmres(const TransportOperator& op, CorrectionSchedule& schedule, const DensityField& rho0,
                   const SolveOptions& options = {}, KrylovState* state = nullptr);

} // namespace rte

#endif
