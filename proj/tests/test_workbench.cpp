#include "rte/workbench.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace fs = std::filesystem;
using namespace rte;

namespace {

/// Coarse two-material instance: 8 cells, GL(4), 3x3 training grid.
BenchmarkSpec small_slab()
{
    BenchmarkSpec s = default_spec(ProblemId::two_material);
    s.dx_absorber = 0.25;
    s.dx_scatterer = 2.5;
    s.quad_n = 4;
    s.train_counts = {3, 3};
    s.test_count = 3;
    s.n_w = 1;
    s.fgmres_n_w = 1;
    s.romsad.window = 2;
    s.romsad.switch_iteration = 2;
    s.eps_pod = 1e-10;
    return s;
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "rte_workbench_tests";
    fs::create_directories(dir);
    return dir / name;
}

bool same_bits(const Matrix& a, const Matrix& b)
{
    return a.rows() == b.rows() && a.cols() == b.cols()
           && std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

bool same_bits(const Vector& a, const Vector& b)
{
    return a.size() == b.size()
           && std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

void check_same_basis(const ReducedBasis& a, const ReducedBasis& b)
{
    CHECK(same_bits(a.U, b.U));
    CHECK(same_bits(a.singular_values, b.singular_values));
    CHECK(same_bits(a.U_rho, b.U_rho));
    CHECK(same_bits(a.U_iso, b.U_iso));
    CHECK(std::memcmp(&a.eps_svd, &b.eps_svd, sizeof(double)) == 0);
    CHECK(a.num_dofs == b.num_dofs);
    CHECK(a.num_directions == b.num_directions);
    REQUIRE(a.operator_blocks.size() == b.operator_blocks.size());
    for (std::size_t q = 0; q < a.operator_blocks.size(); ++q)
        CHECK(same_bits(a.operator_blocks[q], b.operator_blocks[q]));
    REQUIRE(a.rhs_blocks.size() == b.rhs_blocks.size());
    for (std::size_t q = 0; q < a.rhs_blocks.size(); ++q)
        CHECK(same_bits(a.rhs_blocks[q], b.rhs_blocks[q]));
}

void check_same_artifact(const TarArtifact& a, const TarArtifact& b)
{
    CHECK(a.mode == b.mode);
    CHECK(a.policy == b.policy);
    CHECK(std::memcmp(&a.eps_pod, &b.eps_pod, sizeof(double)) == 0);
    CHECK(a.requested_levels == b.requested_levels);
    CHECK(a.training == b.training);
    CHECK(a.provenance == b.provenance);
    REQUIRE(a.aware_levels() == b.aware_levels());
    for (int l = 0; l < a.aware_levels(); ++l)
        check_same_basis(*a.levels[l], *b.levels[l]);
    REQUIRE(static_cast<bool>(a.ig_basis) == static_cast<bool>(b.ig_basis));
    if (a.ig_basis)
        check_same_basis(*a.ig_basis, *b.ig_basis);
}

std::string read_bytes(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_bytes(const fs::path& p, const std::string& bytes)
{
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string csv(void (*writer)(std::ostream&, const RunSummary&), const RunSummary& s)
{
    std::ostringstream os;
    writer(os, s);
    return os.str();
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"')
            quoted = !quoted;
        else if (c == sep && !quoted) {
            out.push_back(cur);
            cur.clear();
        } else
            cur += c;
    }
    out.push_back(cur);
    return out;
}

/// Shared offline products of the small slab, built once.
const OfflineResult& small_offline()
{
    static const OfflineResult result = [] {
        const BenchmarkSpec spec = small_slab();
        return run_offline(spec, *make_family(spec));
    }();
    return result;
}

double cell_value(const DiscreteProblem& p, const Vector& field, double x, double y = 0.0)
{
    const SpatialMesh& mesh = p.space().mesh();
    for (int i = 0; i < mesh.num_cells(); ++i) {
        const Cell& c = mesh.cell(i);
        const bool inside_x = x >= c.lower[0] && x <= c.upper[0];
        const bool inside_y = mesh.dimension() == 1 || (y >= c.lower[1] && y <= c.upper[1]);
        if (inside_x && inside_y)
            return p.space().evaluate(field, i, x, y);
    }
    throw std::runtime_error("point outside mesh");
}

} // namespace

TEST_CASE("config keys override the problem defaults and unknown keys are rejected")
{
    std::istringstream in("# comment\nsolver.tol = 1e-9   # trailing\nproblem = lattice\nmesh.nx = 25\n"
                          "mesh.ny = 25\ntrain.counts = 5, 5\nsolver.method = si_dsa, tar\ntar.policy = zero\n"
                          "seed = 7\n");
    const BenchmarkSpec s = parse_config(in);
    CHECK(s.problem == ProblemId::lattice);
    CHECK(s.tol == 1e-9);
    CHECK(s.nx == 25);
    CHECK(s.train_counts == std::vector<int>{5, 5});
    CHECK(s.methods == std::vector<Method>{Method::si_dsa, Method::tar});
    CHECK(s.policy == InitialGuessPolicy::zero);
    CHECK(s.seed == 7u);
    CHECK(s.quad_alpha == 40);
    CHECK(s.ranges.size() == 2);

    std::istringstream unknown("problem = lattice\nmesh.nz = 3\n");
    CHECK_THROWS_AS(parse_config(unknown), InvalidArgument);
    std::istringstream bad_number("problem = lattice\nsolver.tol = tight\n");
    CHECK_THROWS_AS(parse_config(bad_number), InvalidArgument);
    std::istringstream no_problem("solver.tol = 1e-9\n");
    CHECK_THROWS_AS(parse_config(no_problem), InvalidArgument);
    std::istringstream bad_method("problem = lattice\nsolver.method = magic\n");
    CHECK_THROWS_AS(parse_config(bad_method), InvalidArgument);
}

TEST_CASE("shipped configs parse")
{
    for (const auto& entry : fs::directory_iterator(fs::path(RTE_SOURCE_DIR) / "configs")) {
        CAPTURE(entry.path().string());
        const BenchmarkSpec s = load_config(entry.path().string());
        CHECK_FALSE(training_grid(s).empty());
    }
}

TEST_CASE("training grids reproduce the benchmark formulas")
{
    const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };

    const auto slab = training_grid(default_spec(ProblemId::two_material));
    REQUIRE(slab.size() == 451);
    for (int m = 0; m <= 10; ++m)
        for (int n = 0; n <= 40; ++n) {
            const Parameter& mu = slab[static_cast<std::size_t>(m * 41 + n)];
            CHECK(close(mu[0], 0.5 + 0.1 * m));
            CHECK(close(mu[1], 10.0 + n));
        }

    const auto scattering = training_grid(default_spec(ProblemId::variable_scattering));
    REQUIRE(scattering.size() == 50);
    CHECK(close(scattering.front()[0], 49.9));
    CHECK(close(scattering.back()[0], 99.9));
    for (std::size_t i = 1; i < scattering.size(); ++i)
        CHECK(close(scattering[i][0] - scattering[i - 1][0], 50.0 / 49.0));

    const auto pin = training_grid(default_spec(ProblemId::pin_cell));
    REQUIRE(pin.size() == 25);
    for (int i = 1; i <= 5; ++i)
        for (int j = 1; j <= 5; ++j) {
            const Parameter& mu = pin[static_cast<std::size_t>((i - 1) * 5 + (j - 1))];
            CHECK(close(mu[0], 0.05 * i));
            CHECK(close(mu[1], 0.05 * j));
        }

    const auto lattice = training_grid(default_spec(ProblemId::lattice));
    REQUIRE(lattice.size() == 121);
    for (int i = 0; i <= 10; ++i)
        for (int j = 0; j <= 10; ++j) {
            const Parameter& mu = lattice[static_cast<std::size_t>(i * 11 + j)];
            CHECK(close(mu[0], 95.0 + i));
            CHECK(close(mu[1], 0.5 + 0.1 * j));
        }
}

TEST_CASE("test samples are seeded, inside the box, and off the training grid")
{
    for (ProblemId id : {ProblemId::two_material, ProblemId::variable_scattering, ProblemId::lattice}) {
        BenchmarkSpec s = default_spec(id);
        s.test_count = 50;
        const auto a = sample_test_parameters(s);
        const auto b = sample_test_parameters(s);
        CHECK(a == b);
        REQUIRE(a.size() == 50);
        const auto train = training_grid(s);
        for (const Parameter& mu : a) {
            for (std::size_t k = 0; k < mu.size(); ++k) {
                CHECK(mu[k] >= s.ranges[k].lower);
                CHECK(mu[k] <= s.ranges[k].upper);
            }
            CHECK(std::find(train.begin(), train.end(), mu) == train.end());
        }
        s.seed += 1;
        CHECK(sample_test_parameters(s) != a);
    }
    CHECK(default_spec(ProblemId::two_material).test_count == 20);
    CHECK(default_spec(ProblemId::lattice).test_count == 10);
}

TEST_CASE("two-material instance has the stated mesh, cross sections and inflow")
{
    const BenchmarkSpec spec = default_spec(ProblemId::two_material);
    const auto p = make_problem(spec, {1.0, 30.0});
    const SpatialMesh& mesh = p->space().mesh();
    REQUIRE(mesh.num_cells() == 200);
    for (int i = 0; i < 200; ++i) {
        const Cell& c = mesh.cell(i);
        CHECK(c.upper[0] - c.lower[0] == doctest::Approx(i < 100 ? 0.01 : 0.1).epsilon(1e-12));
    }
    CHECK(p->quadrature().size() == 16);
    for (double x : {0.005, 0.5, 0.995}) {
        CHECK(cell_value(*p, p->sigma_a(), x) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(std::abs(cell_value(*p, p->sigma_s(), x)) < 1e-13);
    }
    for (double x : {1.05, 6.0, 10.95}) {
        CHECK(std::abs(cell_value(*p, p->sigma_a(), x)) < 1e-13);
        CHECK(cell_value(*p, p->sigma_s(), x) == doctest::Approx(30.0).epsilon(1e-13));
    }
    CHECK(p->source().cwiseAbs().maxCoeff() == 0.0);

    // Upwind inflow: xi * 5 * phi_m(0) in the first cell for incoming directions only.
    const int n = p->space().local_size();
    for (int j = 0; j < p->num_directions(); ++j) {
        const double xi = p->quadrature().directions[j][0];
        const Vector col = p->rhs().col(j);
        if (xi < 0.0) {
            CHECK(col.cwiseAbs().maxCoeff() < 1e-14);
            continue;
        }
        for (int m = 0; m < n; ++m)
            CHECK(col[m] == doctest::Approx(xi * 5.0 * p->space().value(0, m, 0.0)).epsilon(1e-12));
        CHECK(col.tail(col.size() - n).cwiseAbs().maxCoeff() < 1e-14);
    }
    CHECK_THROWS_AS(make_problem(spec, {2.0, 30.0}), InvalidArgument);
    CHECK_THROWS_AS(make_problem(spec, {1.0}), InvalidArgument);
}

TEST_CASE("2D instances follow their region definitions")
{
    BenchmarkSpec lattice = default_spec(ProblemId::lattice);
    lattice.nx = lattice.ny = 10;
    lattice.quad_alpha = 4;
    lattice.quad_z = 2;
    const auto l = make_problem(lattice, {100.0, 1.2});
    CHECK(cell_value(*l, l->source(), 2.5, 2.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(cell_value(*l, l->source(), 0.5, 2.5)) < 1e-12);
    const double absorbers[][2] = {{0.5, 0.5}, {1.5, 1.5}, {4.5, 4.5}, {0.5, 4.5}, {2.5, 0.5}};
    for (const auto& pt : absorbers) {
        CHECK(cell_value(*l, l->sigma_a(), pt[0], pt[1]) == doctest::Approx(100.0).epsilon(1e-12));
        CHECK(std::abs(cell_value(*l, l->sigma_s(), pt[0], pt[1])) < 1e-11);
    }
    const double scatterers[][2] = {{2.5, 2.5}, {1.5, 0.5}, {0.5, 3.5}, {4.5, 3.5}};
    for (const auto& pt : scatterers) {
        CHECK(std::abs(cell_value(*l, l->sigma_a(), pt[0], pt[1])) < 1e-11);
        CHECK(cell_value(*l, l->sigma_s(), pt[0], pt[1]) == doctest::Approx(1.2).epsilon(1e-12));
    }

    BenchmarkSpec pin = default_spec(ProblemId::pin_cell);
    pin.nx = pin.ny = 8;
    pin.quad_alpha = 4;
    pin.quad_z = 2;
    const auto p = make_problem(pin, {0.3, 0.2});
    CHECK(cell_value(*p, p->sigma_a(), 0.1, -0.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(cell_value(*p, p->sigma_s(), 0.1, -0.3) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(std::abs(cell_value(*p, p->sigma_a(), 0.8, 0.1)) < 1e-11);
    CHECK(cell_value(*p, p->sigma_s(), 0.8, 0.1) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK_THROWS_AS(make_problem(pin, {0.6, 0.2}), InvalidArgument);

    BenchmarkSpec var = default_spec(ProblemId::variable_scattering);
    var.nx = var.ny = 20;
    var.quad_alpha = 4;
    var.quad_z = 2;
    const auto v = make_problem(var, {80.0});
    CHECK(std::abs(cell_value(*v, v->sigma_a(), 0.3, 0.3)) < 1e-12);
    CHECK(cell_value(*v, v->sigma_s(), -0.95, 0.95) == doctest::Approx(80.1).epsilon(1e-12));
    CHECK(cell_value(*v, v->sigma_s(), 0.02, 0.02) == doctest::Approx(0.1).epsilon(1e-2));
    // The Gaussian source integrates to 10/pi * pi/100 = 0.1; cell integral = c_0 phi_0 |cell|.
    double mass = 0.0;
    const DGSpace& space = v->space();
    const ReferenceTable& t = space.element_table();
    for (int i = 0; i < space.num_cells(); ++i)
        mass += v->source()[i * space.local_size()] * t.values(0, 0) * 2.0 * std::sqrt(space.measure(i));
    CHECK(mass == doctest::Approx(0.1).epsilon(1e-5));
}

TEST_CASE("artifact save and load round trip bit for bit")
{
    const OfflineResult& off = small_offline();
    REQUIRE(off.bundle.tar_si);
    REQUIRE(off.bundle.tar_fgmres);
    REQUIRE(off.bundle.romsad);
    REQUIRE(off.bundle.ig);

    const fs::path single = scratch("single.tarrom");
    save_artifact(*off.bundle.tar_si, single.string());
    check_same_artifact(*off.bundle.tar_si, load_artifact(single.string()));

    const fs::path path = scratch("bundle.tarrom");
    save_bundle(off.bundle, path.string());
    const OfflineBundle back = load_bundle(path.string());
    check_same_basis(*off.bundle.ig, *back.ig);
    check_same_artifact(*off.bundle.tar_si, *back.tar_si);
    check_same_artifact(*off.bundle.tar_fgmres, *back.tar_fgmres);
    check_same_basis(*off.bundle.romsad, *back.romsad);
    CHECK(back.romsad_config.window == off.bundle.romsad_config.window);
    CHECK(back.romsad_config.switch_iteration == off.bundle.romsad_config.switch_iteration);
    CHECK(back.metadata == off.bundle.metadata);
    // The initial-guess basis is stored once and shared again after loading.
    CHECK(back.tar_si->ig_basis == back.ig);
    CHECK(back.tar_fgmres->ig_basis == back.ig);

    // Saving the loaded bundle reproduces the file byte for byte.
    const fs::path again = scratch("bundle_again.tarrom");
    save_bundle(back, again.string());
    CHECK(read_bytes(path) == read_bytes(again));

    CHECK_THROWS_AS(load_artifact(path.string()), FormatError);
    CHECK_THROWS_AS(load_bundle(single.string()), FormatError);
}

TEST_CASE("malformed artifacts raise format errors")
{
    const OfflineResult& off = small_offline();
    const fs::path path = scratch("good.tarrom");
    save_artifact(*off.bundle.tar_si, path.string());
    const std::string bytes = read_bytes(path);
    const fs::path bad = scratch("bad.tarrom");

    for (std::size_t cut : {std::size_t{0}, std::size_t{4}, std::size_t{8}, std::size_t{9}, std::size_t{20},
                            bytes.size() / 3, bytes.size() / 2, bytes.size() - 1}) {
        CAPTURE(cut);
        write_bytes(bad, bytes.substr(0, cut));
        CHECK_THROWS_AS(load_artifact(bad.string()), FormatError);
    }
    std::string wrong_magic = bytes;
    wrong_magic[0] = 'X';
    write_bytes(bad, wrong_magic);
    CHECK_THROWS_AS(load_artifact(bad.string()), FormatError);

    std::string wrong_version = bytes;
    wrong_version[8] = static_cast<char>(archive_version + 1);
    write_bytes(bad, wrong_version);
    CHECK_THROWS_AS(load_artifact(bad.string()), FormatError);

    write_bytes(bad, bytes + "x");
    CHECK_THROWS_AS(load_artifact(bad.string()), FormatError);
    CHECK_THROWS_AS(load_artifact(scratch("missing.tarrom").string()), FormatError);

    // A basis whose rows disagree with its recorded state size.
    TensorArchive a = read_archive(path.string());
    for (auto& [k, v] : a.metadata)
        if (k == "tar.level.1.num_dofs")
            v = std::to_string(std::stoi(v) + 1);
    write_archive(a, bad.string());
    CHECK_THROWS_AS(load_artifact(bad.string()), FormatError);

    TensorArchive b = read_archive(path.string());
    for (Tensor& t : b.tensors)
        if (t.name == "tar.level.1.A.0") {
            t.dims = {t.dims[0], t.dims[1] - 1};
            t.data.resize(t.dims[0] * t.dims[1]);
        }
    write_archive(b, bad.string());
    CHECK_THROWS_AS(load_artifact(bad.string()), FormatError);
}

TEST_CASE("loaded artifacts replay the in-memory solve exactly")
{
    const BenchmarkSpec spec = small_slab();
    const auto family = make_family(spec);
    const OfflineResult& off = small_offline();
    const fs::path path = scratch("replay.tarrom");
    save_bundle(off.bundle, path.string());
    const OfflineBundle back = load_bundle(path.string());
    const auto mus = sample_test_parameters(spec);
    const RunSummary a = run_suite(spec, *family, off.bundle, mus);
    const RunSummary b = run_suite(spec, *family, back, mus);
    REQUIRE(a.runs.size() == b.runs.size());
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        CHECK(a.runs[i].iterations == b.runs[i].iterations);
        CHECK(a.runs[i].history == b.runs[i].history);
        CHECK(a.runs[i].residual_inf == b.runs[i].residual_inf);
    }
}

TEST_CASE("suite summaries are means of the per-parameter rows and CSVs are deterministic")
{
    const BenchmarkSpec spec = small_slab();
    const auto family = make_family(spec);
    const OfflineResult& off = small_offline();
    const auto mus = sample_test_parameters(spec);
    const RunSummary s = run_suite(spec, *family, off.bundle, mus);
    REQUIRE(s.runs.size() == mus.size() * spec.methods.size());
    CHECK(s.all_converged());

    // Means from the CSV text, parsed back.
    const std::string runs = csv(write_runs_csv, s);
    std::istringstream rows(runs);
    std::string line;
    std::getline(rows, line);
    CHECK(line == "method,mu_components,converged,iterations,sweeps,residual_inf");
    std::map<std::string, std::vector<double>> sweeps, iters, resid;
    while (std::getline(rows, line)) {
        const auto f = split(line, ',');
        REQUIRE(f.size() == 6);
        sweeps[f[0]].push_back(std::stod(f[4]));
        iters[f[0]].push_back(std::stod(f[3]));
        resid[f[0]].push_back(std::stod(f[5]));
    }
    const auto mean = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    for (const MethodSummary& m : s.methods) {
        CAPTURE(m.label);
        CHECK(m.runs == static_cast<int>(mus.size()));
        CHECK(m.mean_sweeps == doctest::Approx(mean(sweeps[m.label])).epsilon(1e-15));
        CHECK(m.mean_iterations == doctest::Approx(mean(iters[m.label])).epsilon(1e-15));
        CHECK(m.mean_residual == doctest::Approx(mean(resid[m.label])).epsilon(1e-14));
    }

    // History rows: one per iteration, blank lsq column for SI and blank increment for Krylov.
    const std::string history = csv(write_history_csv, s);
    std::istringstream hist(history);
    std::getline(hist, line);
    CHECK(line == "method,mu_components,iter,cumulative_sweeps,increment_inf,lsq_residual");
    std::size_t count = 0;
    while (std::getline(hist, line)) {
        const auto f = split(line, ',');
        REQUIRE(f.size() == 6);
        const bool krylov = f[0].find("GMRES") != std::string::npos;
        CHECK(f[krylov ? 4 : 5].empty());
        CHECK_FALSE(f[krylov ? 5 : 4].empty());
        ++count;
    }
    std::size_t expected = 0;
    for (const MethodRun& r : s.runs) {
        expected += static_cast<std::size_t>(r.iterations);
        CHECK(r.sweeps_before_first_iteration + r.iterations == r.sweeps);
    }
    CHECK(count == expected);

    const RunSummary again = run_suite(spec, *family, off.bundle, sample_test_parameters(spec));
    CHECK(csv(write_history_csv, again) == history);
    CHECK(csv(write_runs_csv, again) == runs);
    CHECK(csv(write_summary_csv, again) == csv(write_summary_csv, s));
}

TEST_CASE("final residuals are operator residuals, not increments")
{
    const BenchmarkSpec spec = small_slab();
    const auto family = make_family(spec);
    BenchmarkSpec loose = spec;
    loose.tol = 1e-4;
    loose.methods = {Method::si_dsa};
    const Parameter mu{1.0, 30.0};
    const RunSummary s = run_suite(loose, *family, {}, {mu});
    const auto problem = family->instantiate(mu);
    const TransportOperator op(problem);
    DsaCorrection schedule(problem, assemble_dsa(*problem, loose.dsa));
    SolveOptions options;
    options.tol = 1e-4;
    const SolveReport r = source_iteration(op, schedule, DensityField::Zero(problem->num_dofs()), options);
    const Vector res = op.apply_lhs_tilde(r.final_density) - op.b_tilde();
    CHECK(s.runs.front().residual_inf == res.cwiseAbs().maxCoeff());
    CHECK(s.runs.front().residual_inf != r.residual_history.back());
}

TEST_CASE("ROM methods without offline products are refused")
{
    const BenchmarkSpec spec = small_slab();
    const auto family = make_family(spec);
    for (Method m : {Method::tar, Method::fgmres_tar, Method::romsad, Method::pgmres_ig}) {
        BenchmarkSpec s = spec;
        s.methods = {m};
        CHECK_THROWS_WITH_AS(run_suite(s, *family, {}, {{1.0, 30.0}}), doctest::Contains("offline"), InvalidArgument);
    }
}

TEST_CASE("every method converges within two iterations without scattering")
{
    const auto space = std::make_shared<DGSpace>(
        build_mesh_1d(std::vector<MeshSegment>{{0.0, 2.0, 0.25}}), 1);
    const auto family = make_fixed_problem(
        space, gauss_legendre(4), [](double, double) { return 1.0; }, [](double, double) { return 0.0; },
        [](double x, double) { return x < 1.0 ? 1.0 : 0.5; }, [](double x, double) { return x < 1e-12 ? 1.0 : 0.0; });
    BenchmarkSpec spec = small_slab();
    spec.ranges.clear();
    spec.train_counts.clear();
    spec.train_lower.clear();
    spec.train_upper.clear();
    spec.romsad.window = 1;
    const OfflineResult off = run_offline(spec, *family);
    const RunSummary s = run_suite(spec, *family, off.bundle, {Parameter{}});
    REQUIRE(s.runs.size() == spec.methods.size());
    for (const MethodRun& r : s.runs) {
        CAPTURE(r.label);
        CHECK(r.converged);
        CHECK(r.iterations <= 2);
        CHECK(r.residual_inf < 1e-12);
    }
}

TEST_CASE("dense oracle checks pass on every benchmark")
{
    for (ProblemId id :
         {ProblemId::two_material, ProblemId::variable_scattering, ProblemId::pin_cell, ProblemId::lattice}) {
        for (const OracleCheck& c : run_oracle(default_spec(id))) {
            CAPTURE(to_string(id));
            CAPTURE(c.name);
            CHECK(c.passed());
        }
    }
}

TEST_CASE("offline timings and warnings are recorded")
{
    const OfflineResult& off = small_offline();
    CHECK(off.timings.training_size == 9);
    CHECK(off.timings.training_sweeps > 0);
    CHECK(off.timings.training_seconds > 0.0);
    CHECK(off.timings.tar_si.sweeps > 0);
    CHECK(off.warnings.empty());
    std::ostringstream os;
    write_offline_csv(os, off.timings);
    CHECK(os.str().rfind("phase,seconds,relative_to_one_solve\ntraining_solves,", 0) == 0);

    BenchmarkSpec starved = small_slab();
    starved.train_max_iter = 2;
    starved.methods = {Method::si_dsa, Method::tar};
    const OfflineResult r = run_offline(starved, *make_family(starved));
    CHECK(r.warnings.size() == 9);
    CHECK(r.bundle.tar_si.has_value());
}
