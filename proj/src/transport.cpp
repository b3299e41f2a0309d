#include "rte/transport.hpp"

namespace rte {

DensityField compute_density(const AngularFlux& flux, const AngularQuadrature& quadrature)
{
    if (flux.cols() != quadrature.size())
        throw InvalidArgument("compute_density: flux has the wrong number of directions");
    return flux * Eigen::Map<const Vector>(quadrature.weights.data(), quadrature.size());
}

TransportOperator::TransportOperator(std::shared_ptr<const DiscreteProblem> problem)
    : problem_(std::move(problem))
{
    const auto& w = problem_->quadrature().weights;
    weights_ = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
    sweeps_.reserve(problem_->num_directions());
    for (int j = 0; j < problem_->num_directions(); ++j)
        sweeps_.emplace_back(*problem_, j);
}

Vector TransportOperator::transport_sweep(int j, const Vector& rhs) const
{
    if (rhs.size() != num_dofs())
        throw InvalidArgument("transport_sweep: rhs has the wrong length");
    return sweeps_.at(j).solve(rhs);
}

AngularFlux TransportOperator::sweep(const Vector& s, bool with_rhs) const
{
    const int nv = num_directions();
    AngularFlux f(num_dofs(), nv);
    Vector r(num_dofs());
    for (int j = 0; j < nv; ++j) {
        if (with_rhs)
            r = s + problem_->rhs().col(j);
        else
            r = s;
        sweeps_[j].solve(r.data(), f.col(j).data());
    }
    ++sweeps_done_;
    return f;
}

std::pair<AngularFlux, DensityField> TransportOperator::si_step(const DensityField& rho_prev) const
{
    AngularFlux f = sweep(problem_->scattering_mass() * rho_prev, true);
    DensityField rho = f * weights_;
    return {std::move(f), std::move(rho)};
}

DensityField TransportOperator::apply_lhs_tilde(const DensityField& rho) const
{
    return rho - sweep(problem_->scattering_mass() * rho, false) * weights_;
}

DensityField TransportOperator::b_tilde() const
{
    return sweep(Vector::Zero(num_dofs()), true) * weights_;
}

double TransportOperator::operator_residual(const DensityField& rho) const
{
    return (apply_lhs_tilde(rho) - b_tilde()).lpNorm<Eigen::Infinity>();
}

SolveReport source_iteration(const TransportOperator& op, CorrectionSchedule& schedule,
                             const DensityField& rho0, const SolveOptions& options)
{
    if (!(options.tol > 0.0))
        throw InvalidArgument("source_iteration: tol must be positive");
    if (rho0.size() != op.num_dofs())
        throw InvalidArgument("source_iteration: initial guess has the wrong length");
    schedule.reset();
    SolveReport report;
    DensityField rho = rho0;
    for (int l = 1; l <= options.max_iter; ++l) {
        auto [flux, rho_star] = op.si_step(rho);
        ++report.sweep_count;
        report.iterations = l;
        if (l <= options.flux_window)
            report.window_fluxes.push_back(flux);
        DensityField increment = rho_star - rho;
        const double e = increment.lpNorm<Eigen::Infinity>();
        report.residual_history.push_back(e);
        if (options.record_trajectory)
            report.increments.push_back(increment);
        if (e < options.tol) {
            report.converged = true;
            rho = std::move(rho_star);
            if (options.keep_flux)
                report.final_flux = std::move(flux);
            break;
        }
        DensityField delta = schedule.correct(l, increment);
        rho = rho_star + delta;
        if (options.record_trajectory) {
            report.iterates.push_back(rho);
            report.corrections.push_back(schedule.last_kind());
        }
        if (l == options.max_iter && options.keep_flux)
            report.final_flux = std::move(flux);
    }
    report.final_density = std::move(rho);
    return report;
}

} // namespace rte
