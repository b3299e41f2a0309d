#include "rte/tar.hpp"

#include <chrono>
#include <sstream>

namespace rte {

namespace {

std::string earlier_levels(int l)
{
    return l == 1 ? "no earlier levels" : "levels 1.." + std::to_string(l - 1);
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::shared_ptr<const DiscreteProblem>> instantiate_all(const ParametricProblem& family,
                                                                    const TrainingSet& training)
{
    std::vector<std::shared_ptr<const DiscreteProblem>> out;
    out.reserve(training.mu.size());
    for (const auto& mu : training.mu)
        out.push_back(family.instantiate(mu));
    return out;
}

std::shared_ptr<ReducedBasis> projected_pod(const ParametricProblem& family, const SnapshotMatrix& snapshots,
                                            double eps_pod, OfflineTrace* trace)
{
    auto t0 = Clock::now();
    auto basis = std::make_shared<ReducedBasis>(pod(snapshots, eps_pod));
    if (trace)
        trace->basis_seconds += seconds_since(t0);
    t0 = Clock::now();
    project_operators(*basis, family);
    if (trace)
        trace->projection_seconds += seconds_since(t0);
    return basis;
}

void check_training(const ParametricProblem& family, const TrainingSet& training, int n_w, double eps_pod)
{
    if (training.size() == 0)
        throw InvalidArgument("offline build needs at least one training parameter");
    if (n_w < 0)
        throw InvalidArgument("aware level count must be nonnegative");
    if (!(eps_pod > 0.0 && eps_pod <= 1.0))
        throw InvalidArgument("eps_pod must lie in (0, 1]");
    for (const auto& f : training.flux)
        if (f.size() != family.state_size())
            throw InvalidArgument("training solution does not match the family's state size");
}

} // namespace

std::string to_string(TarMode mode)
{
    return mode == TarMode::si ? "si" : "fgmres";
}

std::string to_string(InitialGuessPolicy policy)
{
    return policy == InitialGuessPolicy::zero ? "zero" : "rom";
}

TrainingSet compute_training_set(const ParametricProblem& family, const std::vector<Parameter>& mu,
                                 const TrainingOptions& options)
{
    TrainingSet set;
    SolveOptions opt;
    opt.tol = options.tol;
    opt.max_iter = options.max_iter;
    opt.keep_flux = true;
    opt.flux_window = options.window;
    for (const auto& m : mu) {
        auto p = family.instantiate(m);
        const TransportOperator op(p);
        DsaCorrection dsa(p, assemble_dsa(*p, options.dsa));
        SolveReport rep = source_iteration(op, dsa, DensityField::Zero(p->num_dofs()), opt);
        if (!rep.converged) {
            std::ostringstream msg;
            msg << "training solve at mu = (" << format_parameter(m, ',') << ") stopped after " << rep.iterations
                << " iterations with increment " << rep.residual_history.back();
            set.warnings.push_back(msg.str());
        }
        set.mu.push_back(m);
        set.flux.push_back(stacked(*rep.final_flux));
        set.density.push_back(rep.final_density);
        set.converged.push_back(rep.converged);
        std::vector<Vector> window;
        for (const auto& f : rep.window_fluxes)
            window.push_back(stacked(f));
        set.window.push_back(std::move(window));
        set.sweeps += rep.sweep_count;
    }
    return set;
}

std::shared_ptr<ReducedBasis> build_solution_basis(const ParametricProblem& family, const TrainingSet& training,
                                                   double eps_pod)
{
    SnapshotMatrix snaps(family.state_size());
    for (int i = 0; i < training.size(); ++i)
        snaps.add(training.flux[i], {training.mu[i], 0});
    return projected_pod(family, snaps, eps_pod, nullptr);
}

DensityField artifact_initial_guess(const TarArtifact& artifact, const DiscreteProblem& problem)
{
    if (artifact.policy == InitialGuessPolicy::zero || !artifact.ig_basis)
        return DensityField::Zero(problem.num_dofs());
    try {
        return rom_initial_guess(*artifact.ig_basis, problem);
    } catch (const NumericalFailure&) {
        return DensityField::Zero(problem.num_dofs());
    }
}

TarArtifact tar_offline_si(const ParametricProblem& family, const TrainingSet& training, InitialGuessPolicy policy,
                           int n_w, double eps_pod, OfflineTrace* trace,
                           std::shared_ptr<const ReducedBasis> ig_basis)
{
    check_training(family, training, n_w, eps_pod);
    TarArtifact art;
    art.mode = TarMode::si;
    art.policy = policy;
    art.eps_pod = eps_pod;
    art.requested_levels = n_w;
    art.training = training.mu;
    if (policy == InitialGuessPolicy::rom)
        art.ig_basis = ig_basis ? ig_basis : build_solution_basis(family, training, eps_pod);

    const int n = training.size();
    const auto problems = instantiate_all(family, training);
    std::vector<DensityField> rho(n);
    for (int i = 0; i < n; ++i)
        rho[i] = artifact_initial_guess(art, *problems[i]);

    for (int l = 1; l <= n_w; ++l) {
        SnapshotMatrix snaps(family.state_size());
        std::vector<DensityField> increment(n);
        std::vector<DensityField> star(n);
        auto t0 = Clock::now();
        for (int i = 0; i < n; ++i) {
            const TransportOperator op(problems[i]);
            auto [f, rho_star] = op.si_step(rho[i]);
            snaps.add(training.flux[i] - stacked(f), {training.mu[i], l});
            increment[i] = rho_star - rho[i];
            star[i] = std::move(rho_star);
        }
        if (trace) {
            trace->sweep_seconds += seconds_since(t0);
            trace->sweeps += n;
            trace->residuals.push_back(increment);
        }
        auto basis = projected_pod(family, snaps, eps_pod, trace);
        for (int i = 0; i < n; ++i) {
            try {
                const ReducedOperator red(*basis, family.affine(), training.mu[i]);
                rho[i] = star[i] + apply_rom_correction(*basis, red, *problems[i], increment[i]);
            } catch (const NumericalFailure& e) {
                throw NumericalFailure("offline level " + std::to_string(l) + " at mu = (" +
                                       format_parameter(training.mu[i], ',') + "): " + e.what());
            }
        }
        std::ostringstream prov;
        prov << "level " << l << ": rank " << basis->rank() << " from " << n
             << " SI correction snapshots; trajectories advanced with " << earlier_levels(l)
             << "; initial guess " << to_string(policy);
        art.provenance.push_back(prov.str());
        art.levels.push_back(std::move(basis));
    }
    return art;
}

EtaResult compute_eta(int l, const DensityField& rho, const DensityField& rho0, const KrylovState& state,
                      const std::vector<DensityField>& previous)
{
    if (l < 1)
        throw InvalidArgument("compute_eta: level must be at least 1");
    EtaResult out;
    if (l == 1) {
        if (!(state.beta > 0.0)) {
            out.status = EtaStatus::converged;
            return out;
        }
        out.eta = (rho - rho0) / state.beta;
        return out;
    }
    if (static_cast<int>(previous.size()) < l - 1 || static_cast<int>(state.z.size()) < l - 1)
        throw InvalidArgument("compute_eta: missing earlier levels");
    // q^(l) exists only if step l-1 did not break down.
    const double h = state.H(l - 1, l - 2);
    if (static_cast<int>(state.q.size()) < l || h == 0.0) {
        out.status = EtaStatus::breakdown;
        return out;
    }
    DensityField eta = state.z[l - 2];
    for (int k = 1; k < l; ++k)
        eta -= state.H(k - 1, l - 2) * previous[k - 1];
    out.eta = eta / h;
    return out;
}

TarArtifact tar_offline_fgmres(const ParametricProblem& family, const TrainingSet& training,
                               InitialGuessPolicy policy, int n_w, double eps_pod, OfflineTrace* trace,
                               std::shared_ptr<const ReducedBasis> ig_basis)
{
    check_training(family, training, n_w, eps_pod);
    TarArtifact art;
    art.mode = TarMode::fgmres;
    art.policy = policy;
    art.eps_pod = eps_pod;
    art.requested_levels = n_w;
    art.training = training.mu;
    if (policy == InitialGuessPolicy::rom)
        art.ig_basis = ig_basis ? ig_basis : build_solution_basis(family, training, eps_pod);

    const int n = training.size();
    const auto problems = instantiate_all(family, training);
    std::vector<DensityField> rho0(n);
    std::vector<FlexibleArnoldi> arnoldi;
    std::vector<std::vector<DensityField>> etas(n);
    std::vector<bool> active(n, true);
    auto t0 = Clock::now();
    for (int i = 0; i < n; ++i) {
        rho0[i] = artifact_initial_guess(art, *problems[i]);
        const TransportOperator op(problems[i]);
        const DensityField b = op.b_tilde();
        Vector r0 = b;
        if (rho0[i].cwiseAbs().maxCoeff() > 0.0)
            r0 -= op.apply_lhs_tilde(rho0[i]);
        if (trace)
            trace->sweeps += op.sweeps_performed();
        arnoldi.emplace_back(r0, b.norm());
        active[i] = !arnoldi.back().broken_down();
    }
    if (trace)
        trace->sweep_seconds += seconds_since(t0);

    for (int l = 1; l <= n_w; ++l) {
        SnapshotMatrix snaps(family.state_size());
        std::vector<DensityField> qs(n);
        std::vector<DensityField> level_etas(n);
        int frozen = 0;
        t0 = Clock::now();
        for (int i = 0; i < n; ++i) {
            if (!active[i]) {
                ++frozen;
                continue;
            }
            EtaResult e = compute_eta(l, training.density[i], rho0[i], arnoldi[i].state(), etas[i]);
            if (e.status != EtaStatus::ok) {
                active[i] = false;
                ++frozen;
                continue;
            }
            const TransportOperator op(problems[i]);
            const AngularFlux df = op.sweep(problems[i]->scattering_mass() * e.eta, false);
            if (trace)
                trace->sweeps += 1;
            snaps.add(stacked(df), {training.mu[i], l});
            qs[i] = arnoldi[i].current();
            level_etas[i] = e.eta;
            etas[i].push_back(std::move(e.eta));
        }
        if (trace) {
            trace->sweep_seconds += seconds_since(t0);
            trace->residuals.push_back(qs);
            trace->etas.push_back(level_etas);
            trace->frozen.push_back(frozen);
        }
        if (snaps.cols() == 0)
            break;
        auto basis = projected_pod(family, snaps, eps_pod, trace);

        // Continue each Arnoldi process with the new level as its preconditioner.
        if (l < n_w) {
            t0 = Clock::now();
            for (int i = 0; i < n; ++i) {
                if (!active[i])
                    continue;
                const TransportOperator op(problems[i]);
                try {
                    const ReducedOperator red(*basis, family.affine(), training.mu[i]);
                    const Vector& q = arnoldi[i].current();
                    arnoldi[i].step(op, q + apply_rom_correction(*basis, red, *problems[i], q));
                } catch (const NumericalFailure& e) {
                    throw NumericalFailure("offline level " + std::to_string(l) + " at mu = (" +
                                           format_parameter(training.mu[i], ',') + "): " + e.what());
                }
                if (trace)
                    trace->sweeps += 1;
                if (arnoldi[i].broken_down())
                    active[i] = false;
            }
            if (trace)
                trace->sweep_seconds += seconds_since(t0);
        }
        std::ostringstream prov;
        prov << "level " << l << ": rank " << basis->rank() << " from " << snaps.cols()
             << " eta-vector correction snapshots (" << frozen << " parameters frozen); Arnoldi advanced with "
             << earlier_levels(l) << "; initial guess " << to_string(policy);
        art.provenance.push_back(prov.str());
        art.levels.push_back(std::move(basis));
    }
    return art;
}

TarSchedule::TarSchedule(std::vector<std::shared_ptr<const ReducedBasis>> levels,
                         std::shared_ptr<const DiscreteProblem> problem, std::shared_ptr<const DiffusionOperator> dsa)
    : levels_(std::move(levels)), reduced_(levels_.size()), problem_(problem), dsa_(problem, std::move(dsa))
{
}

void TarSchedule::reset()
{
    failed_ = false;
    kind_ = "none";
}

DensityField TarSchedule::correct(int iteration, const DensityField& v)
{
    const int l = iteration - 1;
    if (!failed_ && l >= 0 && l < static_cast<int>(levels_.size())) {
        try {
            if (!reduced_[l])
                reduced_[l] = std::make_unique<ReducedOperator>(*levels_[l], problem_->family().affine(),
                                                                problem_->parameter());
            DensityField d = apply_rom_correction(*levels_[l], *reduced_[l], *problem_, v);
            kind_ = "rom" + std::to_string(iteration);
            return d;
        } catch (const NumericalFailure&) {
            failed_ = true;
        }
    }
    kind_ = "dsa";
    return dsa_.correct(iteration, v);
}

std::unique_ptr<TarSchedule> build_preconditioner_schedule(const TarArtifact& artifact,
                                                           std::shared_ptr<const DiscreteProblem> problem,
                                                           std::shared_ptr<const DiffusionOperator> dsa)
{
    return std::make_unique<TarSchedule>(artifact.levels, std::move(problem), std::move(dsa));
}

SolveReport tar_online_si(const TarArtifact& artifact, const TransportOperator& op,
                          std::shared_ptr<const DiffusionOperator> dsa, const SolveOptions& options)
{
    if (artifact.mode != TarMode::si)
        throw InvalidArgument("tar_online_si needs an artifact built for source iteration");
    auto schedule = build_preconditioner_schedule(artifact, op.problem_ptr(), std::move(dsa));
    return source_iteration(op, *schedule, artifact_initial_guess(artifact, op.problem()), options);
}

SolveReport tar_online_fgmres(const TarArtifact& artifact, const TransportOperator& op,
                              std::shared_ptr<const DiffusionOperator> dsa, const SolveOptions& options)
{
    if (artifact.mode != TarMode::fgmres)
        throw InvalidArgument("tar_online_fgmres needs an artifact built for flexible GMRES");
    auto schedule = build_preconditioner_schedule(artifact, op.problem_ptr(), std::move(dsa));
    return fgmres(op, *schedule, artifact_initial_guess(artifact, op.problem()), options);
}

std::shared_ptr<ReducedBasis> romsad_offline(const ParametricProblem& family, const TrainingSet& training,
                                             int window, double eps_pod)
{
    if (window < 1)
        throw InvalidArgument("ROMSAD window must be at least 1");
    SnapshotMatrix snaps(family.state_size());
    for (int i = 0; i < training.size(); ++i) {
        const auto& w = training.window.at(i);
        if (w.empty())
            throw InvalidArgument("training set carries no window fluxes; set TrainingOptions::window");
        const int k = std::min(window, static_cast<int>(w.size()));
        for (int l = 0; l < k; ++l)
            snaps.add(training.flux[i] - w[l], {training.mu[i], l + 1});
    }
    return projected_pod(family, snaps, eps_pod, nullptr);
}

RomsadSchedule::RomsadSchedule(RomsadConfig config, std::shared_ptr<const ReducedBasis> basis,
                               std::shared_ptr<const DiscreteProblem> problem,
                               std::shared_ptr<const DiffusionOperator> dsa)
    : config_(config), basis_(std::move(basis)), problem_(problem), dsa_(problem, std::move(dsa))
{
    if (config_.switch_iteration < 0)
        throw InvalidArgument("ROMSAD switch iteration must be nonnegative");
}

void RomsadSchedule::reset()
{
    tolerance_ = 0.0;
    failed_ = false;
    kind_ = "none";
}

DensityField RomsadSchedule::correct(int iteration, const DensityField& v)
{
    const double e = v.lpNorm<Eigen::Infinity>();
    if (iteration == 1)
        tolerance_ = config_.tolerance > 0.0 ? config_.tolerance : 1e-3 * e;
    if (!failed_ && iteration >= 1 && iteration <= config_.switch_iteration && e >= tolerance_) {
        try {
            if (!reduced_)
                reduced_ = std::make_unique<ReducedOperator>(*basis_, problem_->family().affine(),
                                                             problem_->parameter());
            DensityField d = apply_rom_correction(*basis_, *reduced_, *problem_, v);
            kind_ = "rom";
            return d;
        } catch (const NumericalFailure&) {
            failed_ = true;
        }
    }
    kind_ = "dsa";
    return dsa_.correct(iteration, v);
}

std::unique_ptr<RomsadSchedule> romsad_schedule(const RomsadConfig& config, std::shared_ptr<const ReducedBasis> basis,
                                                std::shared_ptr<const DiscreteProblem> problem,
                                                std::shared_ptr<const DiffusionOperator> dsa)
{
    return std::make_unique<RomsadSchedule>(config, std::move(basis), std::move(problem), std::move(dsa));
}

} // namespace rte
