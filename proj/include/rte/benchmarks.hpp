#ifndef RTE_BENCHMARKS_HPP
#define RTE_BENCHMARKS_HPP

#include "rte/tar.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace rte {

enum class ProblemId { two_material, variable_scattering, pin_cell, lattice };

std::string to_string(ProblemId id);
ProblemId parse_problem_id(const std::string& name);

/// Online methods of a benchmark suite.
enum class Method { si_dsa, romsad, tar, pgmres, pgmres_ig, fgmres_tar };

std::string to_string(Method method);
Method parse_method(const std::string& name);

/// Everything needed to reproduce one benchmark study.
struct BenchmarkSpec {
    ProblemId problem = ProblemId::two_material;

    // Two-material slab: cell sizes of the absorbing and scattering segments.
    double dx_absorber = 0.01;
    double dx_scatterer = 0.1;
    // 2D problems: uniform nx x ny grid.
    int nx = 0;
    int ny = 0;
    int degree = 1;

    int quad_n = 16;     // Gauss-Legendre points (slab)
    int quad_alpha = 0;  // Chebyshev-Legendre azimuthal points
    int quad_z = 0;      // Chebyshev-Legendre polar points

    std::vector<ParameterRange> ranges;
    // Training grid: train_counts[i] equispaced values over [train_lower[i], train_upper[i]].
    std::vector<int> train_counts;
    std::vector<double> train_lower;
    std::vector<double> train_upper;
    double train_tol = 1e-13;
    int train_max_iter = 500;

    int test_count = 20;
    std::uint64_t seed = 20240601;

    double tol = 1e-12;
    int max_iter = 200;
    std::vector<Method> methods;

    double eps_pod = 1e-7;
    InitialGuessPolicy policy = InitialGuessPolicy::rom;
    int n_w = 2;
    int fgmres_n_w = 1;
    RomsadConfig romsad;
    DsaOptions dsa;

    std::string out_dir;
    std::string artifact_path;
};

/// Defaults of a problem at its reference resolution.
BenchmarkSpec default_spec(ProblemId id);

/// The parametric family of a benchmark: mesh, quadrature and affine data.
std::shared_ptr<ParametricProblem> make_family(const BenchmarkSpec& spec);

/// One benchmark instance; throws InvalidArgument when mu leaves the declared box.
std::shared_ptr<const DiscreteProblem> make_problem(const BenchmarkSpec& spec, const Parameter& mu);

/// Tensor grid of training parameters, first component slowest.
std::vector<Parameter> training_grid(const BenchmarkSpec& spec);

/// Seeded uniform samples over the declared box, resampled on collision with the training grid.
std::vector<Parameter> sample_test_parameters(const BenchmarkSpec& spec);

/// Parses a flat "key = value" config; '#' starts a comment, unknown keys are rejected.
///
/// Keys: problem, mesh.nx, mesh.ny, mesh.degree, mesh.dx_absorber, mesh.dx_scatterer,
/// quad.n, quad.n_alpha, quad.n_z, train.counts, train.lower, train.upper, train.tol,
/// train.max_iter, test.count, seed, solver.method, solver.tol, solver.max_iter,
/// rom.eps_pod, tar.policy, tar.n_w, tar.fgmres_n_w, romsad.window, romsad.switch,
/// romsad.tol, dsa.scheme, paths.out, paths.artifact. Values override the defaults of the
/// chosen problem, wherever the problem key appears.
BenchmarkSpec parse_config(std::istream& in);
BenchmarkSpec load_config(const std::string& path);

} // namespace rte

#endif
