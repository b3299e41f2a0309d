#ifndef RTE_TRANSPORT_HPP
#define RTE_TRANSPORT_HPP

#include "rte/sweep.hpp"

#include <atomic>
#include <memory>
#include <optional>
#include <string>

namespace rte {

/// Angular flux coefficients, one column per direction (N_DOF x N_v).
/// Column-major storage makes the stacked state f = [f_1; ...; f_Nv] a plain reshape.
using AngularFlux = Matrix;

/// Density coefficients rho = sum_j w_j f_j.
using DensityField = Vector;

inline Eigen::Map<const Vector> stacked(const AngularFlux& f) { return {f.data(), f.size()}; }

DensityField compute_density(const AngularFlux& flux, const AngularQuadrature& quadrature);

/// Matrix-free transport operators of one discrete problem.
class TransportOperator {
public:
    explicit TransportOperator(std::shared_ptr<const DiscreteProblem> problem);

    const DiscreteProblem& problem() const { return *problem_; }
    std::shared_ptr<const DiscreteProblem> problem_ptr() const { return problem_; }
    int num_dofs() const { return problem_->num_dofs(); }
    int num_directions() const { return problem_->num_directions(); }
    const SweepOperator& direction(int j) const { return sweeps_[j]; }

    /// Solves (D_j + Sigma_t) x = rhs.
    Vector transport_sweep(int j, const Vector& rhs) const;

    /// One full sweep with the isotropic right-hand side s (plus Q~_j when with_rhs).
    AngularFlux sweep(const Vector& s, bool with_rhs) const;

    /// f^(l) and rho^(l,*) from rho^(l-1); one sweep.
    std::pair<AngularFlux, DensityField> si_step(const DensityField& rho_prev) const;

    /// (I - K Sigma_s) rho; one sweep.
    DensityField apply_lhs_tilde(const DensityField& rho) const;

    /// K Q~, the density-space right-hand side; one sweep.
    DensityField b_tilde() const;

    /// ||(I - K Sigma_s) rho - b~||_inf; two sweeps, not counted by solvers.
    double operator_residual(const DensityField& rho) const;

    /// Full sweeps performed so far by this operator, for bookkeeping checks.
    long long sweeps_performed() const { return sweeps_done_.load(); }

private:
    std::shared_ptr<const DiscreteProblem> problem_;
    std::vector<SweepOperator> sweeps_;
    Vector weights_;
    mutable std::atomic<long long> sweeps_done_{0};
};

/// Pluggable synthetic-acceleration correction, possibly varying by iteration.
///
/// correct(l, v) returns C_l^{-1} Sigma_s v for 1-based iteration l.
class CorrectionSchedule {
public:
    virtual ~CorrectionSchedule() = default;

    virtual DensityField correct(int iteration, const DensityField& v) = 0;

    /// Clears per-solve state before a new run.
    virtual void reset() {}

    /// Name of the correction used by the most recent call.
    virtual std::string last_kind() const = 0;
};

class NoCorrection final : public CorrectionSchedule {
public:
    DensityField correct(int, const DensityField& v) override { return DensityField::Zero(v.size()); }
    std::string last_kind() const override { return "none"; }
};

struct SolveOptions {
    double tol = 1e-12;
    int max_iter = 50;
    bool record_trajectory = false;
    bool keep_flux = false;
    bool relative = false;  // Krylov only: stop on residual < tol * beta
    int flux_window = 0;    // SI only: keep f^(l) for l <= flux_window
};

struct SolveReport {
    bool converged = false;
    int iterations = 0;
    int sweep_count = 0;
    std::vector<double> residual_history;
    DensityField final_density;
    std::optional<AngularFlux> final_flux;

    // Filled when SolveOptions::record_trajectory is set.
    std::vector<DensityField> increments;
    std::vector<DensityField> iterates;
    std::vector<std::string> corrections;
    std::vector<AngularFlux> window_fluxes;
};

/// Source iteration with synthetic acceleration.
SolveReport source_iteration(const TransportOperator& op, CorrectionSchedule& schedule,
                             const DensityField& rho0, const SolveOptions& options = {});

} // namespace rte

#endif
