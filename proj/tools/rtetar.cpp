// Command-line front end of the benchmark workbench.

#include "rte/workbench.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace fs = std::filesystem;

namespace {

struct Paths {
    fs::path out;
    fs::path artifact;
};

Paths resolve(const rte::BenchmarkSpec& spec, const std::string& out_flag)
{
    Paths p;
    p.out = !out_flag.empty() ? fs::path(out_flag) : !spec.out_dir.empty() ? fs::path(spec.out_dir) : fs::path(".");
    p.artifact = !spec.artifact_path.empty() ? fs::path(spec.artifact_path) : p.out / "offline.tarrom";
    fs::create_directories(p.out);
    if (p.artifact.has_parent_path())
        fs::create_directories(p.artifact.parent_path());
    return p;
}

bool needs_bundle(const rte::BenchmarkSpec& spec)
{
    for (rte::Method m : spec.methods)
        if (m != rte::Method::si_dsa && m != rte::Method::pgmres)
            return true;
    return false;
}

rte::OfflineBundle bundle_for(const rte::BenchmarkSpec& spec, const Paths& paths)
{
    if (!needs_bundle(spec))
        return {};
    if (!fs::exists(paths.artifact))
        throw rte::InvalidArgument("artifact " + paths.artifact.string()
                                   + " not found; run `rtetar offline` with this config first");
    return rte::load_bundle(paths.artifact.string());
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body)
{
    std::ofstream out(path);
    if (!out)
        throw rte::InvalidArgument("cannot write " + path.string());
    body(out);
}

void print_summary(const rte::RunSummary& summary)
{
    std::cout << std::left << std::setw(20) << "method" << std::right << std::setw(8) << "runs" << std::setw(11)
              << "converged" << std::setw(12) << "n_sweep" << std::setw(12) << "n_iter" << std::setw(14) << "R_inf"
              << '\n';
    for (const rte::MethodSummary& s : summary.methods)
        std::cout << std::left << std::setw(20) << s.label << std::right << std::setw(8) << s.runs << std::setw(11)
                  << s.converged << std::setw(12) << std::fixed << std::setprecision(2) << s.mean_sweeps
                  << std::setw(12) << s.mean_iterations << std::setw(14) << std::scientific << std::setprecision(3)
                  << s.mean_residual << std::defaultfloat << '\n';
}

int cmd_offline(const std::string& config, const std::string& out_flag)
{
    rte::BenchmarkSpec spec = rte::load_config(config);
    const Paths paths = resolve(spec, out_flag);
    spec.artifact_path = paths.artifact.string();
    const auto family = rte::make_family(spec);
    const rte::OfflineResult result = rte::run_offline(spec, *family);
    write_file(paths.out / "offline_timing.csv", [&](std::ostream& os) { rte::write_offline_csv(os, result.timings); });
    for (const std::string& w : result.warnings)
        std::cerr << "warning: " << w << '\n';
    std::cout << "training solves: " << result.timings.training_size << " (" << result.timings.training_sweeps
              << " sweeps, " << result.timings.training_seconds << " s)\n";
    if (result.bundle.ig)
        std::cout << "initial-guess basis rank " << result.bundle.ig->rank() << '\n';
    for (const auto* art : {&result.bundle.tar_si, &result.bundle.tar_fgmres})
        if (art->has_value())
            for (const std::string& line : (*art)->provenance)
                std::cout << to_string((*art)->mode) << ": " << line << '\n';
    if (result.bundle.romsad)
        std::cout << "ROMSAD basis rank " << result.bundle.romsad->rank() << '\n';
    std::cout << "artifact written to " << paths.artifact.string() << '\n';
    return result.warnings.empty() ? 0 : 1;
}

int run_and_report(const rte::BenchmarkSpec& spec, const Paths& paths, const std::vector<rte::Parameter>& mus)
{
    const auto family = rte::make_family(spec);
    const rte::OfflineBundle bundle = bundle_for(spec, paths);
    const rte::RunSummary summary = rte::run_suite(spec, *family, bundle, mus);
    write_file(paths.out / "history.csv", [&](std::ostream& os) { rte::write_history_csv(os, summary); });
    write_file(paths.out / "runs.csv", [&](std::ostream& os) { rte::write_runs_csv(os, summary); });
    write_file(paths.out / "summary.csv", [&](std::ostream& os) { rte::write_summary_csv(os, summary); });
    print_summary(summary);
    return summary.all_converged() ? 0 : 1;
}

int cmd_solve(const std::string& config, const std::string& out_flag, const std::vector<double>& mu,
              const std::vector<std::string>& methods)
{
    rte::BenchmarkSpec spec = rte::load_config(config);
    if (!methods.empty()) {
        spec.methods.clear();
        for (const std::string& m : methods)
            spec.methods.push_back(rte::parse_method(m));
    }
    rte::AffineDecomposition box;
    box.ranges = spec.ranges;
    box.check(mu);
    return run_and_report(spec, resolve(spec, out_flag), {mu});
}

int cmd_bench(const std::string& config, const std::string& out_flag)
{
    const rte::BenchmarkSpec spec = rte::load_config(config);
    return run_and_report(spec, resolve(spec, out_flag), rte::sample_test_parameters(spec));
}

int cmd_oracle(const std::string& config)
{
    const rte::BenchmarkSpec spec = rte::load_config(config);
    bool ok = true;
    for (const rte::OracleCheck& c : rte::run_oracle(spec)) {
        std::cout << (c.passed() ? "PASS " : "FAIL ") << c.name << " error " << c.error << " limit " << c.limit << '\n';
        ok = ok && c.passed();
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Parametric radiative transfer benchmarks with trajectory-aware ROM acceleration"};
    app.require_subcommand(1);
    std::string config;
    std::string out;
    std::vector<double> mu;
    std::vector<std::string> methods;

    auto* offline = app.add_subcommand("offline", "Training solves and ROM construction");
    auto* solve = app.add_subcommand("solve", "Solve one parameter with the configured methods");
    auto* bench = app.add_subcommand("bench", "Run the configured methods on seeded test parameters");
    auto* oracle = app.add_subcommand("oracle", "Check matrix-free solvers against a dense solve");
    for (auto* sub : {offline, solve, bench, oracle})
        sub->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
    for (auto* sub : {offline, solve, bench})
        sub->add_option("--out", out, "Directory for CSV files and artifacts");
    solve->add_option("--mu", mu, "Parameter components, comma separated")->required()->delimiter(',');
    solve->add_option("--method", methods, "Methods to run instead of the configured ones")->delimiter(',');

    CLI11_PARSE(app, argc, argv);
    try {
        if (*offline)
            return cmd_offline(config, out);
        if (*solve)
            return cmd_solve(config, out, mu, methods);
        if (*bench)
            return cmd_bench(config, out);
        return cmd_oracle(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
