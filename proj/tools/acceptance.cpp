// Acceptance checks: one PASS/FAIL line per criterion. Pass criterion ids (AC1 ... AC9)
// as arguments to run a subset.

#include "fixtures.hpp"
#include "oracle.hpp"
#include "rte/workbench.hpp"

#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace rte;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string sci(double x)
{
    std::ostringstream os;
    os.precision(2);
    os << std::scientific << x;
    return os.str();
}

std::string fixed2(double x)
{
    std::ostringstream os;
    os.precision(2);
    os << std::fixed << x;
    return os.str();
}

Vector random_vector(Eigen::Index n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = u(rng);
    return v;
}

double inf(const Vector& v)
{
    return oracle::inf_norm(v);
}

/// Small instance of a benchmark: the coarse grid used by the oracle subcommand.
BenchmarkSpec small(ProblemId id)
{
    return oracle_spec(default_spec(id));
}

Parameter centre(const BenchmarkSpec& s)
{
    Parameter mu;
    for (const ParameterRange& r : s.ranges)
        mu.push_back(0.5 * (r.lower + r.upper));
    return mu;
}

/// The exact correction from a dense solve of the coupled system.
class IdealCorrection final : public CorrectionSchedule {
public:
    explicit IdealCorrection(const oracle::DenseSystem& d) : d_(d) {}
    DensityField correct(int, const DensityField& v) override { return oracle::ideal_correction(d_, v); }
    std::string last_kind() const override { return "ideal"; }

private:
    const oracle::DenseSystem& d_;
};

/// Dense reference system with the benchmark's own source and inflow, defined here
/// independently of the library. Only the slab and lattice are used, whose data are
/// piecewise constant on cell boundaries and therefore projected exactly by any rule.
oracle::DenseSystem reference_system(ProblemId id, const DiscreteProblem& p)
{
    if (id == ProblemId::two_material)
        return oracle::dense_system(p, {}, [](double x, double) { return x < 1e-12 ? 5.0 : 0.0; });
    if (id == ProblemId::lattice)
        return oracle::dense_system(
            p, [](double x, double y) { return std::abs(x - 2.5) < 0.5 && std::abs(y - 2.5) < 0.5 ? 1.0 : 0.0; }, {});
    throw InvalidArgument("no reference data for " + to_string(id));
}

double elapsed(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome ac1()
{
    const BenchmarkSpec spec = small(ProblemId::two_material);
    const auto family = make_family(spec);
    const auto p = family->instantiate({1.0, 30.0});
    if (p->state_size() != 64)
        return {false, "unexpected state size " + std::to_string(p->state_size())};
    const TransportOperator op(p);
    const auto d = oracle::dense_system(*p, {}, [](double x, double) { return x < 1e-12 ? 5.0 : 0.0; });
    const Vector rho = oracle::density(d.A.partialPivLu().solve(d.b), d.w);

    SolveOptions opt;
    opt.tol = 1e-13;
    opt.max_iter = 200;
    const auto dsa = assemble_dsa(*p);
    DsaCorrection si_schedule(p, dsa);
    const SolveReport si = source_iteration(op, si_schedule, Vector::Zero(p->num_dofs()), opt);
    DsaCorrection gm_schedule(p, dsa);
    const SolveReport gm = fgmres(op, gm_schedule, Vector::Zero(p->num_dofs()), opt);

    const double e_si = inf(si.final_density - rho);
    double e_op = inf(op.b_tilde() - d.b_tilde);
    for (unsigned seed = 1; seed <= 3; ++seed) {
        const Vector v = random_vector(p->num_dofs(), seed);
        e_op = std::max(e_op, inf(op.apply_lhs_tilde(v) - d.A_tilde * v));
    }
    const double e_density_form = inf(d.A_tilde.partialPivLu().solve(d.b_tilde) - rho);
    const double e_gm = inf(gm.final_density - rho);
    const bool pass = si.converged && gm.converged && e_si <= 1e-10 && e_op <= 1e-10 && e_gm <= 1e-10
                      && e_density_form <= 1e-10;
    return {pass, "N_h 64; SI " + sci(e_si) + ", operator " + sci(e_op) + ", FGMRES " + sci(e_gm)
                      + ", density form " + sci(e_density_form) + " (limit 1e-10)"};
}

Outcome ac2()
{
    int worst = 0;
    int runs = 0;
    bool pass = true;
    for (ProblemId id :
         {ProblemId::two_material, ProblemId::variable_scattering, ProblemId::pin_cell, ProblemId::lattice}) {
        const BenchmarkSpec spec = small(id);
        const auto family = make_family(spec);
        Parameter lo, hi;
        for (const ParameterRange& r : spec.ranges) {
            lo.push_back(r.lower);
            hi.push_back(r.upper);
        }
        for (const Parameter& mu : {lo, centre(spec), hi}) {
            const auto p = family->instantiate(mu);
            const TransportOperator op(p);
            const auto d = oracle::dense_system(*p, {}, {});
            IdealCorrection ideal(d);
            SolveOptions opt;
            opt.tol = 1e-12;
            opt.max_iter = 10;
            const SolveReport r = source_iteration(op, ideal, Vector::Zero(p->num_dofs()), opt);
            pass = pass && r.converged && r.iterations <= 2;
            worst = std::max(worst, r.iterations);
            ++runs;
        }
    }
    return {pass, std::to_string(runs) + " instances over 4 benchmarks, at most " + std::to_string(worst)
                      + " iterations to increment < 1e-12"};
}

Outcome ac3()
{
    double worst = 0.0;
    for (ProblemId id : {ProblemId::two_material, ProblemId::lattice}) {
        const BenchmarkSpec spec = small(id);
        const auto p = make_family(spec)->instantiate(centre(spec));
        const TransportOperator op(p);
        const auto d = reference_system(id, *p);
        const auto diffusion = assemble_dsa(*p);
        DsaCorrection dsa(p, diffusion);
        SolveOptions opt;
        opt.tol = 1e-300;
        opt.max_iter = 10;
        opt.record_trajectory = true;
        const Vector rho0 = random_vector(p->num_dofs(), 11);
        const SolveReport rep = source_iteration(op, dsa, rho0, opt);
        if (rep.iterates.size() != 10)
            return {false, "trajectory has " + std::to_string(rep.iterates.size()) + " iterates"};

        const int n = p->num_dofs();
        Matrix padded = Matrix::Zero(diffusion->matrix().rows(), n);
        padded.topRows(n) = d.sigma_s;
        const Matrix cinv_s = Matrix(diffusion->matrix()).partialPivLu().solve(padded).topRows(n);
        const Matrix m = Matrix::Identity(n, n) + cinv_s;
        Vector rho = rho0;
        for (int l = 0; l < 10; ++l) {
            rho = rho + m * (d.b_tilde - d.A_tilde * rho);
            worst = std::max(worst, inf(rho - rep.iterates[l]));
        }
    }
    return {worst <= 1e-11, "10 iterations on slab and lattice, max deviation " + sci(worst) + " (limit 1e-11)"};
}

struct EtaErrors {
    double identity = 0.0;
    double correction = 0.0;
    double correction_scale = 0.0;
    double inverse_norm = 0.0;
    bool complete = true;
};

/// Levels 1..3 of eta generation from zero and warm starts, against dense solves.
EtaErrors eta_errors(const std::shared_ptr<const DiscreteProblem>& p)
{
    EtaErrors out;
    const TransportOperator op(p);
    const auto d = oracle::dense_system(*p, {}, {});
    // The right-hand side only fixes the trajectory; b~ itself is checked in AC1.
    const Vector rho = d.A_tilde.partialPivLu().solve(op.b_tilde());
    const auto A_lu = d.A.partialPivLu();
    out.inverse_norm = d.A_tilde.inverse().cwiseAbs().rowwise().sum().maxCoeff();
    for (bool warm : {false, true}) {
        const Vector rho0 = warm ? Vector(0.1 * random_vector(p->num_dofs(), 5)) : Vector::Zero(p->num_dofs());
        DsaCorrection dsa(p, assemble_dsa(*p));
        SolveOptions opt;
        opt.tol = 1e-300;
        opt.max_iter = 3;
        KrylovState st;
        fgmres(op, dsa, rho0, opt, &st);
        std::vector<DensityField> etas;
        for (int l = 1; l <= 3; ++l) {
            const EtaResult e = compute_eta(l, rho, rho0, st, etas);
            if (e.status != EtaStatus::ok) {
                out.complete = false;
                return out;
            }
            out.identity = std::max(out.identity, inf(d.A_tilde * e.eta - st.q[l - 1]));
            const AngularFlux df = op.sweep(p->scattering_mass() * e.eta, false);
            const int nd = p->num_dofs();
            Vector rhs(p->state_size());
            for (int j = 0; j < p->num_directions(); ++j)
                rhs.segment(j * nd, nd) = d.sigma_s * st.q[l - 1];
            const Vector ideal = A_lu.solve(rhs);
            out.correction = std::max(out.correction, inf(stacked(df) - ideal));
            out.correction_scale = std::max(out.correction_scale, inf(ideal));
            etas.push_back(e.eta);
        }
    }
    return out;
}

Outcome ac4()
{
    // Small instances whose density operator is moderately conditioned. Roundoff in eta
    // grows as the Krylov residual falls and is then multiplied by the norm of A~^{-1}.
    // The strongly diffusive coarse instances are reported below but not judged.
    std::vector<std::pair<std::string, std::shared_ptr<const DiscreteProblem>>> judged;
    judged.emplace_back("slab", fixtures::Slab{}.family(8, 4)->instantiate({}));
    judged.emplace_back("square", fixtures::Square{}.family(3, 4, 2)->instantiate({}));
    for (ProblemId id : {ProblemId::pin_cell, ProblemId::lattice}) {
        const BenchmarkSpec spec = small(id);
        judged.emplace_back(to_string(id), make_family(spec)->instantiate(centre(spec)));
    }
    double identity = 0.0;
    double correction = 0.0;
    for (const auto& [name, p] : judged) {
        const EtaErrors e = eta_errors(p);
        if (!e.complete)
            return {false, "eta generation stopped early on " + name};
        identity = std::max(identity, e.identity);
        correction = std::max(correction, e.correction);
    }
    std::string info;
    for (ProblemId id : {ProblemId::two_material, ProblemId::variable_scattering}) {
        const BenchmarkSpec spec = small(id);
        const EtaErrors e = eta_errors(make_family(spec)->instantiate(centre(spec)));
        info += "; " + to_string(id) + " |A~^-1| " + sci(e.inverse_norm) + ", identity " + sci(e.identity)
                + ", correction " + sci(e.correction) + " of " + sci(e.correction_scale);
    }
    return {identity <= 1e-10 && correction <= 1e-9,
            "slab, square, pin_cell, lattice: Krylov identity " + sci(identity) + " (limit 1e-10), swept correction "
                + sci(correction) + " (limit 1e-9). Not judged" + info};
}

Outcome ac5()
{
    const BenchmarkSpec spec = small(ProblemId::two_material);
    const auto family = make_family(spec);
    const std::vector<Parameter> train{{0.6, 15.0}, {0.9, 25.0}, {1.0, 30.0}, {1.2, 35.0}, {1.4, 45.0}};
    const TrainingSet t = compute_training_set(*family, train);
    double worst = 0.0;
    int most = 0;
    bool converged = true;
    for (InitialGuessPolicy policy : {InitialGuessPolicy::zero, InitialGuessPolicy::rom}) {
        OfflineTrace trace;
        const TarArtifact art = tar_offline_si(*family, t, policy, 2, 1e-13, &trace);
        for (int i = 0; i < t.size(); ++i) {
            const auto p = family->instantiate(train[i]);
            const TransportOperator op(p);
            SolveOptions opt;
            opt.tol = 1e-11;
            opt.record_trajectory = true;
            const SolveReport rep = tar_online_si(art, op, assemble_dsa(*p), opt);
            converged = converged && rep.converged;
            most = std::max(most, rep.iterations);
            const int levels = std::min<int>(2, static_cast<int>(rep.increments.size()));
            for (int l = 0; l < levels; ++l)
                worst = std::max(worst, inf(rep.increments[l] - trace.residuals[l][i]));
        }
    }
    return {converged && most <= 3 && worst <= 1e-10,
            "5 training parameters, both initial-guess policies: residual mismatch " + sci(worst)
                + " (limit 1e-10), at most " + std::to_string(most) + " iterations (limit 3)"};
}

struct Study {
    RunSummary summary;
    double seconds = 0.0;
};

Study run_study(const BenchmarkSpec& spec)
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto family = make_family(spec);
    const OfflineResult off = run_offline(spec, *family);
    Study s;
    s.summary = run_suite(spec, *family, off.bundle, sample_test_parameters(spec));
    s.seconds = elapsed(t0);
    return s;
}

double worst_residual(const RunSummary& s)
{
    double r = 0.0;
    for (const MethodSummary& m : s.methods)
        r = std::max(r, m.mean_residual);
    return r;
}

std::string means(const RunSummary& s)
{
    std::string out;
    for (const MethodSummary& m : s.methods)
        out += (out.empty() ? "" : ", ") + m.label + " " + fixed2(m.mean_sweeps);
    return out;
}

Outcome ac6()
{
    BenchmarkSpec spec = default_spec(ProblemId::two_material);
    spec.eps_pod = 1e-7;
    spec.tol = 1e-12;
    spec.test_count = 20;
    spec.n_w = 2;
    spec.fgmres_n_w = 1;
    spec.romsad.window = 3;
    spec.romsad.switch_iteration = 3;
    const Study st = run_study(spec);
    const RunSummary& s = st.summary;
    const double si = s.summary(Method::si_dsa).mean_sweeps;
    const double romsad = s.summary(Method::romsad).mean_sweeps;
    const double tar = s.summary(Method::tar).mean_sweeps;
    const MethodSummary& fg = s.summary(Method::fgmres_tar);
    bool bookkeeping = true;
    for (const MethodRun& r : s.runs)
        if (r.method == Method::fgmres_tar)
            bookkeeping = bookkeeping && r.sweeps == r.iterations + 2;
    const double resid = worst_residual(s);
    const bool pass = s.all_converged() && si >= 12 && si <= 18 && romsad >= 6 && romsad <= 12 && tar <= 4
                      && fg.mean_iterations <= 2 && bookkeeping && resid <= 1e-11 && st.seconds <= 900;
    return {pass, "mean sweeps " + means(s) + "; FGMRES-TAR-IG iterations " + fixed2(fg.mean_iterations)
                      + (bookkeeping ? ", sweeps = iterations + 2" : ", sweep count mismatch") + "; max mean R_inf "
                      + sci(resid) + "; " + fixed2(st.seconds) + " s"};
}

Outcome ac7()
{
    BenchmarkSpec spec = default_spec(ProblemId::variable_scattering);
    spec.nx = spec.ny = 40;
    spec.quad_alpha = 8;
    spec.quad_z = 4;
    spec.train_counts = {20};
    spec.eps_pod = 1e-7;
    spec.n_w = 1;
    spec.fgmres_n_w = 1;
    spec.romsad.window = 2;
    spec.romsad.switch_iteration = 3;
    const Study st = run_study(spec);
    const RunSummary& s = st.summary;
    const double si = s.summary(Method::si_dsa).mean_sweeps;
    const double romsad = s.summary(Method::romsad).mean_sweeps;
    const double tar = s.summary(Method::tar).mean_sweeps;
    const double resid = worst_residual(s);
    const bool pass = s.all_converged() && tar < romsad && romsad < si && tar <= 5 && resid <= 1e-9
                      && st.seconds <= 1800;
    return {pass, "mean sweeps " + means(s) + "; max mean R_inf " + sci(resid) + "; " + fixed2(st.seconds) + " s"};
}

Outcome ac8()
{
    BenchmarkSpec spec = default_spec(ProblemId::lattice);
    spec.nx = spec.ny = 25;
    spec.quad_alpha = 8;
    spec.quad_z = 4;
    spec.train_counts = {5, 5};
    spec.test_count = 10;
    spec.n_w = 1;
    spec.methods = {Method::si_dsa, Method::romsad, Method::tar};
    const Study st = run_study(spec);
    const RunSummary& s = st.summary;
    bool si_converged = true;
    int wins = 0;
    const std::size_t m = spec.methods.size();
    for (std::size_t k = 0; k + m <= s.runs.size(); k += m) {
        const MethodRun& si = s.runs[k];
        const MethodRun& romsad = s.runs[k + 1];
        const MethodRun& tar = s.runs[k + 2];
        if (si.method != Method::si_dsa || romsad.method != Method::romsad || tar.method != Method::tar
            || si.mu != tar.mu || romsad.mu != tar.mu)
            return {false, "unexpected run layout"};
        si_converged = si_converged && si.converged;
        wins += tar.converged && tar.sweeps < si.sweeps && tar.sweeps < romsad.sweeps ? 1 : 0;
    }
    return {si_converged && wins >= 8, "SI-DSA converged on all: " + std::string(si_converged ? "yes" : "no")
                                           + "; TAR-IG-1 fewest sweeps on " + std::to_string(wins)
                                           + " of 10 (need 8); mean sweeps " + means(s)};
}

Outcome ac9()
{
    std::vector<std::string> failed;
    const auto expect = [&](bool ok, const std::string& what) {
        if (!ok)
            failed.push_back(what);
    };

    // Quadrature normalization and unit directions.
    for (const AngularQuadrature& q : {gauss_legendre(16), chebyshev_legendre(8, 4), chebyshev_legendre(30, 6)}) {
        double sum = 0.0;
        double norm = 0.0;
        for (int j = 0; j < q.size(); ++j) {
            sum += q.weights[j];
            const auto& v = q.directions[j];
            if (q.mode == QuadratureMode::sphere_2d)
                norm = std::max(norm, std::abs(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] - 1.0));
        }
        expect(std::abs(sum - 1.0) <= 1e-14 && norm <= 1e-14, "quadrature normalization");
    }

    // POD orthonormality and the singular-value energy criterion.
    const BenchmarkSpec spec = small(ProblemId::two_material);
    const auto family = make_family(spec);
    BenchmarkSpec grid = spec;
    grid.train_counts = {4, 5};
    const TrainingSet t = compute_training_set(*family, training_grid(grid));
    SnapshotMatrix snaps(family->state_size());
    for (const Vector& f : t.flux)
        snaps.add(f);
    for (double eps : {1e-3, 1e-7, 1e-12}) {
        const ReducedBasis b = pod(snaps, eps);
        const Matrix gram = b.U.transpose() * b.U;
        expect((gram - Matrix::Identity(b.rank(), b.rank())).cwiseAbs().maxCoeff() <= 1e-12, "POD orthonormality");
        const Vector& s = b.singular_values;
        const double total = s.sum();
        expect(s.head(b.rank()).sum() >= (1.0 - eps) * total, "POD energy bound");
        if (b.rank() > 1)
            expect(s.head(b.rank() - 1).sum() < (1.0 - eps) * total, "POD rank minimality");
    }

    // Affine reconstruction probe at random parameters.
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 3; ++trial) {
        Parameter mu;
        for (const ParameterRange& r : spec.ranges)
            mu.push_back(std::uniform_real_distribution<double>(r.lower, r.upper)(rng));
        const auto p = family->instantiate(mu);
        const Vector f = random_vector(p->state_size(), 20 + trial);
        const auto th = family->affine().operator_thetas(mu);
        Vector sum = Vector::Zero(f.size());
        for (std::size_t q = 0; q < th.size(); ++q)
            sum += th[q] * family->apply_term(static_cast<int>(q), f);
        const Vector full = apply_full_operator(*p, f);
        expect(inf(sum - full) <= 1e-12 * std::max(1.0, inf(full)), "affine operator reconstruction");
        const auto ts = family->affine().source_thetas(mu);
        Vector rhs = Vector::Zero(f.size());
        for (std::size_t k = 0; k < ts.size(); ++k)
            rhs += ts[k] * family->rhs_term(static_cast<int>(k));
        expect(inf(rhs - stacked(p->rhs())) <= 1e-12 * std::max(1.0, inf(rhs)), "affine rhs reconstruction");
    }

    // Flexible Arnoldi relation under a varying preconditioner, and sweep bookkeeping.
    const auto p = family->instantiate({0.8, 22.0});
    const TransportOperator op(p);
    const auto dsa = assemble_dsa(*p);
    const TarArtifact art = tar_offline_si(*family, t, InitialGuessPolicy::rom, 2, 1e-10);
    {
        auto schedule = build_preconditioner_schedule(art, p, dsa);
        SolveOptions opt;
        opt.tol = 1e-300;
        opt.max_iter = 5;
        KrylovState st;
        fgmres(op, *schedule, Vector::Zero(p->num_dofs()), opt, &st);
        const int m = static_cast<int>(st.z.size());
        double rel = 0.0;
        for (int l = 0; l < m; ++l) {
            Vector rhs = Vector::Zero(p->num_dofs());
            for (int k = 0; k <= l + 1 && k < static_cast<int>(st.q.size()); ++k)
                rhs += st.H(k, l) * st.q[k];
            rel = std::max(rel, inf(op.apply_lhs_tilde(st.z[l]) - rhs));
        }
        expect(m > 0 && rel <= 1e-9, "flexible Arnoldi relation");
    }
    {
        SolveOptions opt;
        opt.tol = 1e-10;
        const DensityField zero = DensityField::Zero(p->num_dofs());
        const DensityField guess = rom_initial_guess(*art.ig_basis, *p);
        DsaCorrection c1(p, dsa);
        long long before = op.sweeps_performed();
        const SolveReport si = source_iteration(op, c1, zero, opt);
        expect(op.sweeps_performed() - before == si.sweep_count && si.sweep_count == si.iterations, "SI sweeps");
        DsaCorrection c2(p, dsa);
        before = op.sweeps_performed();
        const SolveReport g0 = fgmres(op, c2, zero, opt);
        expect(op.sweeps_performed() - before == g0.sweep_count && g0.sweep_count == g0.iterations + 1,
               "FGMRES sweeps from zero");
        DsaCorrection c3(p, dsa);
        before = op.sweeps_performed();
        const SolveReport g1 = fgmres(op, c3, guess, opt);
        expect(op.sweeps_performed() - before == g1.sweep_count && g1.sweep_count == g1.iterations + 2,
               "FGMRES sweeps from a guess");
    }

    // Artifact round trip and determinism of sampling and CSV output.
    BenchmarkSpec suite = spec;
    suite.train_counts = {3, 3};
    suite.test_count = 3;
    suite.n_w = 1;
    suite.romsad.window = 2;
    const OfflineResult off = run_offline(suite, *family);
    const fs::path dir = fs::temp_directory_path() / "rte_acceptance";
    fs::create_directories(dir);
    save_bundle(off.bundle, (dir / "a.tarrom").string());
    const OfflineBundle back = load_bundle((dir / "a.tarrom").string());
    save_bundle(back, (dir / "b.tarrom").string());
    const auto bytes = [](const fs::path& f) {
        std::ifstream in(f, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };
    expect(bytes(dir / "a.tarrom") == bytes(dir / "b.tarrom"), "artifact byte round trip");
    const auto same = [](const Matrix& a, const Matrix& b) {
        return a.rows() == b.rows() && a.cols() == b.cols()
               && std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
    };
    bool bases = same(off.bundle.ig->U, back.ig->U) && same(off.bundle.romsad->U, back.romsad->U);
    for (int l = 0; l < off.bundle.tar_si->aware_levels(); ++l) {
        const ReducedBasis& a = *off.bundle.tar_si->levels[l];
        const ReducedBasis& b = *back.tar_si->levels[l];
        bases = bases && same(a.U, b.U) && same(a.U_rho, b.U_rho) && same(a.U_iso, b.U_iso);
        for (std::size_t q = 0; q < a.operator_blocks.size(); ++q)
            bases = bases && same(a.operator_blocks[q], b.operator_blocks[q]);
    }
    expect(bases, "artifact bitwise bases");

    const auto mus = sample_test_parameters(suite);
    expect(mus == sample_test_parameters(suite), "seeded sampling");
    const auto csv = [&](const OfflineBundle& b) {
        const RunSummary s = run_suite(suite, *family, b, sample_test_parameters(suite));
        std::ostringstream os;
        write_history_csv(os, s);
        write_runs_csv(os, s);
        write_summary_csv(os, s);
        return os.str();
    };
    const std::string first = csv(off.bundle);
    expect(first == csv(off.bundle), "CSV determinism");
    expect(first == csv(back), "loaded artifact replay");

    std::string detail = failed.empty() ? "quadrature, POD, affine probe, Arnoldi relation, sweep counts, artifact "
                                          "round trip, determinism all hold"
                                        : "failed:";
    for (const std::string& f : failed)
        detail += " " + f + ";";
    return {failed.empty(), detail};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::tuple<std::string, std::string, std::function<Outcome()>>> criteria{
        {"AC1", "dense-oracle equivalence", ac1},
        {"AC2", "ideal correction converges in two steps", ac2},
        {"AC3", "SI-DSA equals preconditioned Richardson", ac3},
        {"AC4", "eta vectors and swept corrections", ac4},
        {"AC5", "trajectory consistency", ac5},
        {"AC6", "two-material slab at full scale", ac6},
        {"AC7", "variable scattering at reduced scale", ac7},
        {"AC8", "lattice robustness at reduced scale", ac8},
        {"AC9", "property suites", ac9},
    };
    const std::set<std::string> only(argv + 1, argv + argc);
    bool all = true;
    for (const auto& [id, title, run] : criteria) {
        if (!only.empty() && !only.count(id))
            continue;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << id << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << title << ": " << o.detail << std::endl;
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
