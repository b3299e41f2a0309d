#include "rte/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace rte {

namespace {

const std::map<std::string, ProblemId>& problem_names()
{
    static const std::map<std::string, ProblemId> names{{"two_material", ProblemId::two_material},
                                                        {"variable_scattering", ProblemId::variable_scattering},
                                                        {"pin_cell", ProblemId::pin_cell},
                                                        {"lattice", ProblemId::lattice}};
    return names;
}

const std::map<std::string, Method>& method_names()
{
    static const std::map<std::string, Method> names{{"si_dsa", Method::si_dsa},   {"romsad", Method::romsad},
                                                     {"tar", Method::tar},         {"pgmres", Method::pgmres},
                                                     {"pgmres_ig", Method::pgmres_ig}, {"fgmres_tar", Method::fgmres_tar}};
    return names;
}

Coefficient constant(double c)
{
    return [c](const Parameter&) { return c; };
}

Coefficient component(int i)
{
    return [i](const Parameter& mu) { return mu[i]; };
}

std::shared_ptr<DGSpace> square_space(const BenchmarkSpec& spec, double lo, double hi)
{
    if (spec.nx < 1 || spec.ny < 1)
        throw InvalidArgument("2D benchmarks need mesh.nx and mesh.ny");
    return std::make_shared<DGSpace>(build_mesh_2d(spec.nx, spec.ny, {lo, lo}, {hi, hi}), spec.degree);
}

AngularQuadrature spec_quadrature(const BenchmarkSpec& spec)
{
    if (spec.problem == ProblemId::two_material)
        return gauss_legendre(spec.quad_n);
    return chebyshev_legendre(spec.quad_alpha, spec.quad_z);
}

// Unit blocks of [0,5]^2 in checkerboard order; the centre block holds the source instead.
bool lattice_absorber(double x, double y)
{
    const int i = std::clamp(static_cast<int>(std::floor(x)), 0, 4);
    const int j = std::clamp(static_cast<int>(std::floor(y)), 0, 4);
    return (i + j) % 2 == 0 && !(i == 2 && j == 2);
}

// L2 projection with slopes scaled toward the cell mean wherever it dips below zero
// at a quadrature point; cell means are unchanged.
Vector project_nonnegative(const DGSpace& space, const ScalarField& f)
{
    Vector c = space.project(f);
    const ReferenceTable& t = space.element_table();
    const int n = space.local_size();
    for (int i = 0; i < space.num_cells(); ++i) {
        auto local = c.segment(i * n, n);
        const double mean = t.values(0, 0) * local[0];
        const double lowest = (t.values * local).minCoeff();
        if (lowest < 0.0 && mean > lowest)
            local.tail(n - 1) *= std::max(0.0, mean) / (mean - lowest);
    }
    return c;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value)
{
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(trim(item));
    return out;
}

double to_double(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size())
        throw InvalidArgument("config key " + key + ": expected a number, got '" + v + "'");
    return x;
}

long long to_integer(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size())
        throw InvalidArgument("config key " + key + ": expected an integer, got '" + v + "'");
    return x;
}

int to_int(const std::string& key, const std::string& v)
{
    return static_cast<int>(to_integer(key, v));
}

std::vector<double> to_doubles(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    for (const std::string& s : split_list(v))
        out.push_back(to_double(key, s));
    return out;
}

using Setter = std::function<void(BenchmarkSpec&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table{
        {"problem", [](BenchmarkSpec&, const std::string&, const std::string&) {}},
        {"mesh.nx", [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.nx = to_int(k, v); }},
        {"mesh.ny", [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.ny = to_int(k, v); }},
        {"mesh.degree", [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.degree = to_int(k, v); }},
        {"mesh.dx_absorber",
         [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.dx_absorber = to_double(k, v); }},
        {"mesh.dx_scatterer",
         [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.dx_scatterer = to_double(k, v); }},
        {"quad.n", [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.quad_n = to_int(k, v); }},
        {"quad.n_alpha",
         [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.quad_alpha = to_int(k, v); }},
        {"quad.n_z", [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.quad_z = to_int(k, v); }},
        {"train.counts",
         [](BenchmarkSpec& s, const std::string& k, const std::string& v) {
             s.train_counts.clear();
             for (const std::string& c : split_list(v))
                 s.train_counts.push_back(to_int(k, c));
         }},
        {"train.lower",
         [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.train_lower = to_doubles(k, v); }},
        {"train.upper",
         [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.train_upper = to_doubles(k, v); }},
        {"train.tol", [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.train_tol = to_double(k, v); }},
        {"train.max_iter",
         [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.train_max_iter = to_int(k, v); }},
        {"test.count", [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.test_count = to_int(k, v); }},
        {"seed",
         [](BenchmarkSpec& s, const std::string& k, const std::string& v) {
             s.seed = static_cast<std::uint64_t>(to_integer(k, v));
         }},
        {"solver.method",
         [](BenchmarkSpec& s, const std::string&, const std::string& v) {
             s.methods.clear();
             for (const std::string& m : split_list(v))
                 s.methods.push_back(parse_method(m));
         }},
        {"solver.tol", [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.tol = to_double(k, v); }},
        {"solver.max_iter",
         [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.max_iter = to_int(k, v); }},
        {"rom.eps_pod", [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.eps_pod = to_double(k, v); }},
        {"tar.policy",
         [](BenchmarkSpec& s, const std::string& k, const std::string& v) {
             if (v == "rom")
                 s.policy = InitialGuessPolicy::rom;
             else if (v == "zero")
                 s.policy = InitialGuessPolicy::zero;
             else
                 throw InvalidArgument("config key " + k + ": expected rom or zero, got '" + v + "'");
         }},
        {"tar.n_w", [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.n_w = to_int(k, v); }},
        {"tar.fgmres_n_w",
         [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.fgmres_n_w = to_int(k, v); }},
        {"romsad.window",
         [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.romsad.window = to_int(k, v); }},
        {"romsad.switch",
         [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.romsad.switch_iteration = to_int(k, v); }},
        {"romsad.tol",
         [](BenchmarkSpec& s, const std::string& k, const std::string& v) { s.romsad.tolerance = to_double(k, v); }},
        {"dsa.scheme",
         [](BenchmarkSpec& s, const std::string& k, const std::string& v) {
             if (v == "p1")
                 s.dsa.scheme = DsaScheme::p1_consistent;
             else if (v == "sip")
                 s.dsa.scheme = DsaScheme::sip;
             else
                 throw InvalidArgument("config key " + k + ": expected p1 or sip, got '" + v + "'");
         }},
        {"paths.out", [](BenchmarkSpec& s, const std::string&, const std::string& v) { s.out_dir = v; }},
        {"paths.artifact", [](BenchmarkSpec& s, const std::string&, const std::string& v) { s.artifact_path = v; }},
    };
    return table;
}

} // namespace

std::string to_string(ProblemId id)
{
    for (const auto& [name, value] : problem_names())
        if (value == id)
            return name;
    return "unknown";
}

ProblemId parse_problem_id(const std::string& name)
{
    const auto it = problem_names().find(name);
    if (it == problem_names().end())
        throw InvalidArgument("unknown problem '" + name + "'");
    return it->second;
}

std::string to_string(Method method)
{
    for (const auto& [name, value] : method_names())
        if (value == method)
            return name;
    return "unknown";
}

Method parse_method(const std::string& name)
{
    const auto it = method_names().find(name);
    if (it == method_names().end())
        throw InvalidArgument("unknown method '" + name + "'");
    return it->second;
}

BenchmarkSpec default_spec(ProblemId id)
{
    BenchmarkSpec s;
    s.problem = id;
    s.methods = {Method::si_dsa, Method::romsad, Method::tar, Method::pgmres, Method::pgmres_ig, Method::fgmres_tar};
    switch (id) {
    case ProblemId::two_material:
        s.ranges = {{"mu_a", 0.5, 1.5}, {"mu_s", 10.0, 50.0}};
        s.train_counts = {11, 41};
        s.test_count = 20;
        s.tol = 1e-12;
        s.n_w = 2;
        s.fgmres_n_w = 1;
        break;
    case ProblemId::variable_scattering:
        s.nx = s.ny = 80;
        s.quad_alpha = 30;
        s.quad_z = 6;
        s.ranges = {{"mu_s", 49.9, 99.9}};
        s.train_counts = {50};
        s.test_count = 10;
        s.tol = 1e-11;
        s.n_w = 1;
        s.fgmres_n_w = 1;
        s.romsad.window = 2;
        break;
    case ProblemId::pin_cell:
        s.nx = s.ny = 80;
        s.quad_alpha = 30;
        s.quad_z = 6;
        s.ranges = {{"mu_a", 0.05, 0.5}, {"mu_s", 0.05, 0.5}};
        s.train_counts = {5, 5};
        s.train_lower = {0.05, 0.05};
        s.train_upper = {0.25, 0.25};
        s.test_count = 10;
        s.tol = 1e-11;
        s.n_w = 1;
        s.fgmres_n_w = 1;
        break;
    case ProblemId::lattice:
        s.nx = s.ny = 50;
        s.quad_alpha = 40;
        s.quad_z = 6;
        s.ranges = {{"mu_a", 95.0, 105.0}, {"mu_s", 0.5, 1.5}};
        s.train_counts = {11, 11};
        s.test_count = 10;
        s.tol = 1e-12;
        s.n_w = 1;
        s.fgmres_n_w = 1;
        break;
    }
    if (s.train_lower.empty())
        for (const ParameterRange& r : s.ranges) {
            s.train_lower.push_back(r.lower);
            s.train_upper.push_back(r.upper);
        }
    return s;
}

std::shared_ptr<ParametricProblem> make_family(const BenchmarkSpec& spec)
{
    AffineDecomposition affine;
    affine.ranges = spec.ranges;
    std::shared_ptr<DGSpace> space;
    switch (spec.problem) {
    case ProblemId::two_material: {
        const MeshSegment segments[] = {{0.0, 1.0, spec.dx_absorber}, {1.0, 11.0, spec.dx_scatterer}};
        space = std::make_shared<DGSpace>(build_mesh_1d(segments), spec.degree);
        affine.materials.push_back(
            {"absorber", component(0), space->project([](double x, double) { return x <= 1.0 ? 1.0 : 0.0; }), {}});
        affine.materials.push_back(
            {"scatterer", component(1), {}, space->project([](double x, double) { return x > 1.0 ? 1.0 : 0.0; })});
        affine.sources.push_back(
            {"inflow", constant(1.0), {}, [](double x, double) { return x < 1e-12 ? 5.0 : 0.0; }});
        break;
    }
    case ProblemId::variable_scattering: {
        space = square_space(spec, -1.0, 1.0);
        const auto shape = [](double x, double y) {
            const double r2 = x * x + y * y;
            if (r2 > 1.0)
                return 1.0;
            const double r4 = r2 * r2;
            return r4 * (2.0 - r4) * (2.0 - r4);
        };
        affine.materials.push_back(
            {"background", constant(1.0), {}, space->project([](double, double) { return 0.1; })});
        affine.materials.push_back({"shape", component(0), {}, project_nonnegative(*space, shape)});
        affine.sources.push_back({"gaussian", constant(1.0), space->project([](double x, double y) {
                                      return 10.0 / std::numbers::pi * std::exp(-100.0 * (x * x + y * y));
                                  }),
                                  {}});
        break;
    }
    case ProblemId::pin_cell: {
        space = square_space(spec, -1.0, 1.0);
        const auto inner = [](double x, double y) { return std::abs(x) <= 0.5 && std::abs(y) <= 0.5 ? 1.0 : 0.0; };
        affine.materials.push_back(
            {"outer", constant(1.0), {}, space->project([inner](double x, double y) { return 100.0 * (1.0 - inner(x, y)); })});
        affine.materials.push_back({"inner_absorption", component(0), space->project(inner), {}});
        affine.materials.push_back({"inner_scattering", component(1), {}, space->project(inner)});
        affine.sources.push_back(
            {"gaussian", constant(1.0),
             space->project([](double x, double y) { return std::exp(-100.0 * (x * x + y * y)); }), {}});
        break;
    }
    case ProblemId::lattice: {
        space = square_space(spec, 0.0, 5.0);
        affine.materials.push_back(
            {"absorber", component(0), space->project([](double x, double y) { return lattice_absorber(x, y) ? 1.0 : 0.0; }), {}});
        affine.materials.push_back(
            {"scatterer", component(1), {}, space->project([](double x, double y) { return lattice_absorber(x, y) ? 0.0 : 1.0; })});
        affine.sources.push_back({"source", constant(1.0), space->project([](double x, double y) {
                                      return std::abs(x - 2.5) < 0.5 && std::abs(y - 2.5) < 0.5 ? 1.0 : 0.0;
                                  }),
                                  {}});
        break;
    }
    }
    return ParametricProblem::create(space, spec_quadrature(spec), std::move(affine));
}

std::shared_ptr<const DiscreteProblem> make_problem(const BenchmarkSpec& spec, const Parameter& mu)
{
    AffineDecomposition box;
    box.ranges = spec.ranges;
    box.check(mu);
    return make_family(spec)->instantiate(mu);
}

std::vector<Parameter> training_grid(const BenchmarkSpec& spec)
{
    const std::size_t d = spec.ranges.size();
    if (spec.train_counts.size() != d || spec.train_lower.size() != d || spec.train_upper.size() != d)
        throw InvalidArgument("training grid needs one count and bound per parameter");
    std::vector<std::vector<double>> axes(d);
    for (std::size_t i = 0; i < d; ++i) {
        const int n = spec.train_counts[i];
        if (n < 1)
            throw InvalidArgument("training counts must be positive");
        for (int k = 0; k < n; ++k)
            axes[i].push_back(n == 1 ? spec.train_lower[i]
                                     : spec.train_lower[i] + (spec.train_upper[i] - spec.train_lower[i]) * k / (n - 1));
    }
    std::vector<Parameter> grid{Parameter{}};
    for (const auto& axis : axes) {
        std::vector<Parameter> next;
        for (const Parameter& p : grid)
            for (double v : axis) {
                Parameter q = p;
                q.push_back(v);
                next.push_back(std::move(q));
            }
        grid = std::move(next);
    }
    return grid;
}

std::vector<Parameter> sample_test_parameters(const BenchmarkSpec& spec)
{
    if (spec.ranges.empty())
        throw InvalidArgument("test sampling needs at least one parameter range");
    const std::vector<Parameter> train = training_grid(spec);
    const auto coincides = [&](const Parameter& mu) {
        return std::any_of(train.begin(), train.end(), [&](const Parameter& t) {
            for (std::size_t i = 0; i < mu.size(); ++i)
                if (std::abs(mu[i] - t[i]) > 1e-12 * std::max(1.0, std::abs(t[i])))
                    return false;
            return true;
        });
    };
    std::mt19937_64 rng(spec.seed);
    std::vector<Parameter> out;
    while (static_cast<int>(out.size()) < spec.test_count) {
        Parameter mu;
        for (const ParameterRange& r : spec.ranges)
            mu.push_back(std::uniform_real_distribution<double>(r.lower, r.upper)(rng));
        if (!coincides(mu))
            out.push_back(std::move(mu));
    }
    return out;
}

BenchmarkSpec parse_config(std::istream& in)
{
    std::vector<std::pair<std::string, std::string>> entries;
    std::string problem;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config line " + std::to_string(number) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!setters().count(key))
            throw InvalidArgument("config line " + std::to_string(number) + ": unknown key '" + key + "'");
        if (key == "problem")
            problem = value;
        entries.emplace_back(key, value);
    }
    if (problem.empty())
        throw InvalidArgument("config has no problem key");
    BenchmarkSpec spec = default_spec(parse_problem_id(problem));
    for (const auto& [key, value] : entries)
        setters().at(key)(spec, key, value);
    return spec;
}

BenchmarkSpec load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidArgument("cannot open config " + path);
    return parse_config(in);
}

} // namespace rte
