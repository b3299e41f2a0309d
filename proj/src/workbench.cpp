#include "rte/workbench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <limits>
#include <ostream>

namespace rte {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool wants(const BenchmarkSpec& spec, Method m)
{
    return std::find(spec.methods.begin(), spec.methods.end(), m) != spec.methods.end();
}

PhaseTiming phase(const OfflineTrace& trace)
{
    return {trace.sweep_seconds, trace.basis_seconds, trace.projection_seconds, trace.sweeps};
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

void require(bool present, const BenchmarkSpec& spec, Method m, const std::string& product)
{
    if (!present)
        throw InvalidArgument("method " + method_label(spec, m) + " needs the " + product
                              + " offline product; run the offline stage first");
}

MethodRun digest(const BenchmarkSpec& spec, Method m, const Parameter& mu, const SolveReport& report,
                 const TransportOperator& op, bool krylov)
{
    MethodRun run;
    run.method = m;
    run.label = method_label(spec, m);
    run.mu = mu;
    run.converged = report.converged;
    run.iterations = report.iterations;
    run.sweeps = report.sweep_count;
    run.sweeps_before_first_iteration = report.sweep_count - report.iterations;
    run.residual_inf = op.operator_residual(report.final_density);
    run.history = report.residual_history;
    run.krylov = krylov;
    return run;
}

double max_abs(const Vector& v)
{
    return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

} // namespace

OfflineResult run_offline(const BenchmarkSpec& spec, const ParametricProblem& family)
{
    OfflineResult result;
    const std::vector<Parameter> grid = training_grid(spec);
    const bool tar_si = wants(spec, Method::tar);
    const bool tar_fgmres = wants(spec, Method::fgmres_tar);
    const bool romsad = wants(spec, Method::romsad);
    const bool ig = wants(spec, Method::pgmres_ig) || ((tar_si || tar_fgmres) && spec.policy == InitialGuessPolicy::rom);

    TrainingOptions options;
    options.tol = spec.train_tol;
    options.max_iter = spec.train_max_iter;
    options.window = romsad ? spec.romsad.window : 0;
    options.dsa = spec.dsa;
    auto t0 = Clock::now();
    const TrainingSet training = compute_training_set(family, grid, options);
    result.timings.training_seconds = seconds_since(t0);
    result.timings.training_size = training.size();
    result.timings.training_sweeps = training.sweeps;
    result.warnings = training.warnings;

    if (ig) {
        t0 = Clock::now();
        result.bundle.ig = build_solution_basis(family, training, spec.eps_pod);
        result.timings.ig_seconds = seconds_since(t0);
    }
    if (tar_si) {
        OfflineTrace trace;
        result.bundle.tar_si =
            tar_offline_si(family, training, spec.policy, spec.n_w, spec.eps_pod, &trace, result.bundle.ig);
        result.timings.tar_si = phase(trace);
    }
    if (tar_fgmres) {
        OfflineTrace trace;
        result.bundle.tar_fgmres =
            tar_offline_fgmres(family, training, spec.policy, spec.fgmres_n_w, spec.eps_pod, &trace, result.bundle.ig);
        result.timings.tar_fgmres = phase(trace);
    }
    if (romsad) {
        t0 = Clock::now();
        result.bundle.romsad = romsad_offline(family, training, spec.romsad.window, spec.eps_pod);
        result.bundle.romsad_config = spec.romsad;
        result.timings.romsad_seconds = seconds_since(t0);
    }
    result.bundle.metadata = {{"problem", to_string(spec.problem)},
                              {"training_size", std::to_string(training.size())},
                              {"eps_pod", format_number(spec.eps_pod)}};
    if (!spec.artifact_path.empty())
        save_bundle(result.bundle, spec.artifact_path);
    return result;
}

bool RunSummary::all_converged() const
{
    return std::all_of(runs.begin(), runs.end(), [](const MethodRun& r) { return r.converged; });
}

const MethodSummary& RunSummary::summary(Method method) const
{
    for (const MethodSummary& s : methods)
        if (s.method == method)
            return s;
    throw InvalidArgument("method " + to_string(method) + " was not run");
}

std::string method_label(const BenchmarkSpec& spec, Method method)
{
    const std::string ig = spec.policy == InitialGuessPolicy::rom ? "-IG" : "";
    switch (method) {
    case Method::si_dsa:
        return "SI-DSA";
    case Method::romsad:
        return "ROMSAD-" + std::to_string(spec.romsad.window) + "," + std::to_string(spec.romsad.switch_iteration);
    case Method::tar:
        return "TAR" + ig + "-" + std::to_string(spec.n_w);
    case Method::pgmres:
        return "PGMRES";
    case Method::pgmres_ig:
        return "PGMRES-IG";
    case Method::fgmres_tar:
        return "FGMRES-TAR" + ig + "-" + std::to_string(spec.fgmres_n_w);
    }
    return "unknown";
}

RunSummary run_suite(const BenchmarkSpec& spec, const ParametricProblem& family, const OfflineBundle& bundle,
                     const std::vector<Parameter>& parameters)
{
    for (Method m : spec.methods) {
        if (m == Method::tar)
            require(bundle.tar_si.has_value(), spec, m, "TAR source-iteration");
        if (m == Method::fgmres_tar)
            require(bundle.tar_fgmres.has_value(), spec, m, "TAR FGMRES");
        if (m == Method::romsad)
            require(bundle.romsad != nullptr, spec, m, "ROMSAD basis");
        if (m == Method::pgmres_ig)
            require(bundle.ig != nullptr, spec, m, "initial-guess basis");
    }
    SolveOptions options;
    options.tol = spec.tol;
    options.max_iter = spec.max_iter;

    RunSummary summary;
    for (const Parameter& mu : parameters) {
        const auto problem = family.instantiate(mu);
        const TransportOperator op(problem);
        const auto dsa = assemble_dsa(*problem, spec.dsa);
        const DensityField zero = DensityField::Zero(problem->num_dofs());
        for (Method m : spec.methods) {
            SolveReport report;
            bool krylov = false;
            switch (m) {
            case Method::si_dsa: {
                DsaCorrection schedule(problem, dsa);
                report = source_iteration(op, schedule, zero, options);
                break;
            }
            case Method::romsad: {
                auto schedule = romsad_schedule(bundle.romsad_config, bundle.romsad, problem, dsa);
                report = source_iteration(op, *schedule, zero, options);
                break;
            }
            case Method::tar:
                report = tar_online_si(*bundle.tar_si, op, dsa, options);
                break;
            case Method::pgmres: {
                DsaCorrection schedule(problem, dsa);
                report = fgmres(op, schedule, zero, options);
                krylov = true;
                break;
            }
            case Method::pgmres_ig: {
                DsaCorrection schedule(problem, dsa);
                DensityField rho0 = zero;
                try {
                    rho0 = rom_initial_guess(*bundle.ig, *problem);
                } catch (const NumericalFailure&) {
                }
                report = fgmres(op, schedule, rho0, options);
                krylov = true;
                break;
            }
            case Method::fgmres_tar:
                report = tar_online_fgmres(*bundle.tar_fgmres, op, dsa, options);
                krylov = true;
                break;
            }
            summary.runs.push_back(digest(spec, m, mu, report, op, krylov));
        }
    }
    for (Method m : spec.methods) {
        MethodSummary s;
        s.method = m;
        s.label = method_label(spec, m);
        for (const MethodRun& r : summary.runs) {
            if (r.method != m)
                continue;
            ++s.runs;
            s.converged += r.converged ? 1 : 0;
            s.mean_sweeps += r.sweeps;
            s.mean_iterations += r.iterations;
            s.mean_residual += r.residual_inf;
        }
        if (s.runs) {
            s.mean_sweeps /= s.runs;
            s.mean_iterations /= s.runs;
            s.mean_residual /= s.runs;
        }
        summary.methods.push_back(s);
    }
    return summary;
}

std::string format_number(double x)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

void write_history_csv(std::ostream& out, const RunSummary& summary)
{
    out << "method,mu_components,iter,cumulative_sweeps,increment_inf,lsq_residual\n";
    for (const MethodRun& r : summary.runs) {
        const std::string mu = format_parameter(r.mu);
        for (std::size_t i = 0; i < r.history.size(); ++i) {
            const int iter = static_cast<int>(i) + 1;
            out << csv_field(r.label) << ',' << csv_field(mu) << ',' << iter << ','
                << r.sweeps_before_first_iteration + iter << ',';
            if (r.krylov)
                out << ',' << format_number(r.history[i]);
            else
                out << format_number(r.history[i]) << ',';
            out << '\n';
        }
    }
}

void write_runs_csv(std::ostream& out, const RunSummary& summary)
{
    out << "method,mu_components,converged,iterations,sweeps,residual_inf\n";
    for (const MethodRun& r : summary.runs)
        out << csv_field(r.label) << ',' << csv_field(format_parameter(r.mu)) << ',' << (r.converged ? 1 : 0) << ','
            << r.iterations << ',' << r.sweeps << ',' << format_number(r.residual_inf) << '\n';
}

void write_summary_csv(std::ostream& out, const RunSummary& summary)
{
    out << "method,runs,converged,mean_sweeps,mean_iterations,mean_residual_inf\n";
    for (const MethodSummary& s : summary.methods)
        out << csv_field(s.label) << ',' << s.runs << ',' << s.converged << ',' << format_number(s.mean_sweeps) << ','
            << format_number(s.mean_iterations) << ',' << format_number(s.mean_residual) << '\n';
}

void write_offline_csv(std::ostream& out, const OfflineTimings& t)
{
    const double unit = t.mean_solve_seconds();
    const auto row = [&](const std::string& name, double seconds) {
        out << name << ',' << format_number(seconds) << ',' << format_number(unit > 0 ? seconds / unit : 0.0) << '\n';
    };
    out << "phase,seconds,relative_to_one_solve\n";
    row("training_solves", t.training_seconds);
    row("ig_basis", t.ig_seconds);
    row("tar_si_sweeps", t.tar_si.sweep_seconds);
    row("tar_si_basis", t.tar_si.basis_seconds);
    row("tar_si_operators", t.tar_si.projection_seconds);
    row("tar_fgmres_sweeps", t.tar_fgmres.sweep_seconds);
    row("tar_fgmres_basis", t.tar_fgmres.basis_seconds);
    row("tar_fgmres_operators", t.tar_fgmres.projection_seconds);
    row("romsad_basis", t.romsad_seconds);
}

BenchmarkSpec oracle_spec(const BenchmarkSpec& spec)
{
    BenchmarkSpec s = spec;
    s.degree = 1;
    switch (spec.problem) {
    case ProblemId::two_material:
        s.dx_absorber = 0.25;
        s.dx_scatterer = 2.5;
        s.quad_n = 4;
        break;
    case ProblemId::lattice:
        s.nx = s.ny = 5;
        s.quad_alpha = 4;
        s.quad_z = 2;
        break;
    default:
        s.nx = s.ny = 4;
        s.quad_alpha = 4;
        s.quad_z = 2;
        break;
    }
    return s;
}

std::vector<OracleCheck> run_oracle(const BenchmarkSpec& spec)
{
    const BenchmarkSpec small = oracle_spec(spec);
    Parameter mu;
    for (const ParameterRange& r : small.ranges)
        mu.push_back(0.5 * (r.lower + r.upper));
    const auto family = make_family(small);
    const auto problem = family->instantiate(mu);
    const TransportOperator op(problem);

    const auto [A, b] = assemble_dense_full_system(*problem);
    const Vector f = A.partialPivLu().solve(b);
    const Matrix flux = Eigen::Map<const Matrix>(f.data(), problem->num_dofs(), problem->num_directions());
    const DensityField rho = compute_density(flux, problem->quadrature());
    const double scale = std::max(1.0, max_abs(rho));
    const double limit = 1e-10 * scale;

    SolveOptions options;
    options.tol = 1e-13;
    options.max_iter = 500;
    const auto dsa = assemble_dsa(*problem, small.dsa);
    DsaCorrection si_schedule(problem, dsa);
    const SolveReport si = source_iteration(op, si_schedule, DensityField::Zero(rho.size()), options);
    DsaCorrection krylov_schedule(problem, dsa);
    const SolveReport gm = fgmres(op, krylov_schedule, DensityField::Zero(rho.size()), options);

    std::vector<OracleCheck> checks;
    checks.push_back({"si_fixed_point", si.converged ? max_abs(si.final_density - rho) : std::numeric_limits<double>::infinity(), limit});
    checks.push_back({"lhs_tilde_residual", max_abs(op.apply_lhs_tilde(rho) - op.b_tilde()), limit});
    checks.push_back({"fgmres_solution", gm.converged ? max_abs(gm.final_density - rho) : std::numeric_limits<double>::infinity(), limit});
    checks.push_back({"full_operator_residual", max_abs(apply_full_operator(*problem, f) - b),
                      1e-10 * std::max(1.0, max_abs(b))});
    return checks;
}

} // namespace rte
