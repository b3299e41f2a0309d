#ifndef RTE_WORKBENCH_HPP
#define RTE_WORKBENCH_HPP

#include "rte/artifact_io.hpp"
#include "rte/benchmarks.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace rte {

/// Wall-clock cost of one offline phase.
struct PhaseTiming {
    double sweep_seconds = 0.0;
    double basis_seconds = 0.0;
    double projection_seconds = 0.0;
    long long sweeps = 0;
};

struct OfflineTimings {
    int training_size = 0;
    long long training_sweeps = 0;
    double training_seconds = 0.0;
    double ig_seconds = 0.0;  // POD and projection of the solution basis
    PhaseTiming tar_si;
    PhaseTiming tar_fgmres;
    double romsad_seconds = 0.0;
    /// Average wall time of one training solve, the unit of the relative costs.
    double mean_solve_seconds() const { return training_size ? training_seconds / training_size : 0.0; }
};

struct OfflineResult {
    OfflineBundle bundle;
    OfflineTimings timings;
    std::vector<std::string> warnings;
};

/// Training solves plus every ROM product the configured methods need. Unconverged
/// training solves only produce warnings. Saves the bundle when spec.artifact_path is set.
OfflineResult run_offline(const BenchmarkSpec& spec, const ParametricProblem& family);

/// Digest of one online solve.
struct MethodRun {
    Method method = Method::si_dsa;
    std::string label;
    Parameter mu;
    bool converged = false;
    int iterations = 0;
    int sweeps = 0;
    int sweeps_before_first_iteration = 0;
    double residual_inf = 0.0;  // ||(I - K Sigma_s) rho - b~||_inf of the final density
    std::vector<double> history;  // SI increments or Krylov least-squares residuals
    bool krylov = false;
};

struct MethodSummary {
    Method method = Method::si_dsa;
    std::string label;
    int runs = 0;
    int converged = 0;
    double mean_sweeps = 0.0;
    double mean_iterations = 0.0;
    double mean_residual = 0.0;
};

struct RunSummary {
    std::vector<MethodRun> runs;
    std::vector<MethodSummary> methods;
    bool all_converged() const;
    /// Throws InvalidArgument when the method was not run.
    const MethodSummary& summary(Method method) const;
};

/// Display name such as "TAR-IG-2" or "ROMSAD-3,3".
std::string method_label(const BenchmarkSpec& spec, Method method);

/// Runs every configured method on every parameter. Throws InvalidArgument when a ROM
/// method lacks its offline product.
RunSummary run_suite(const BenchmarkSpec& spec, const ParametricProblem& family, const OfflineBundle& bundle,
                     const std::vector<Parameter>& parameters);

/// Per-iteration rows: method, mu_components, iter, cumulative_sweeps, increment_inf, lsq_residual.
void write_history_csv(std::ostream& out, const RunSummary& summary);
/// Per-parameter rows: method, mu_components, converged, iterations, sweeps, residual_inf.
void write_runs_csv(std::ostream& out, const RunSummary& summary);
/// Per-method means: method, runs, converged, mean_sweeps, mean_iterations, mean_residual_inf.
void write_summary_csv(std::ostream& out, const RunSummary& summary);
/// Offline phases with absolute seconds and cost relative to one training solve.
void write_offline_csv(std::ostream& out, const OfflineTimings& timings);

/// Shortest round-trip decimal text of a double.
std::string format_number(double x);

struct OracleCheck {
    std::string name;
    double error = 0.0;
    double limit = 0.0;
    bool passed() const { return error <= limit; }
};

/// Coarse version of the configured problem whose dense system is cheap to solve.
BenchmarkSpec oracle_spec(const BenchmarkSpec& spec);

/// Matrix-free SI fixed point, transport operator and FGMRES solution against the dense solve
/// at the centre of the parameter box of oracle_spec(spec).
std::vector<OracleCheck> run_oracle(const BenchmarkSpec& spec);

} // namespace rte

#endif
