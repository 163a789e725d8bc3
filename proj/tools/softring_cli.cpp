// Command-line front end: single solves, theorem checks and parameter sweeps.

#include "softring/report.hpp"
#include "softring/verify.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Common {
    std::string config;
    std::string out = "softring_out";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> resolution;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "scenario file (TOML); defaults apply without it")->check(CLI::ExistingFile);
    cmd->add_option("--out", c.out, "output directory")->capture_default_str();
    cmd->add_option("--seed", c.seed, "seed of the Lanczos start vector");
    cmd->add_option("--resolution", c.resolution, "low | default | high")
        ->check(CLI::IsMember({"low", "default", "high"}));
}

softring::Scenario scenario_from(const Common& c) {
    softring::Scenario s = c.config.empty() ? softring::Scenario{} : softring::load_scenario(c.config);
    if (c.seed) s.seed = *c.seed;
    if (c.resolution) s.resolution = softring::parse_resolution(*c.resolution);
    s.validate();
    return s;
}

void summarize(const softring::VerificationReport& rep, const std::filesystem::path& out) {
    for (const auto& c : rep.checks)
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  (" << c.left << " " << c.relation << " " << c.right
                  << ", tol " << c.tolerance << ")\n";
    for (const auto& n : rep.notes) std::cout << "note: " << n << '\n';
    std::cout << rep.name << ": " << (rep.passed() ? "pass" : "fail") << "  ->  " << out.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"softring: spectral laboratory for -Delta - mu with measures on curvilinear strips"};
    app.require_subcommand(1);

    Common radial_opts, fem_opts, verify_opts, sweep_opts;
    CLI::App* radial = app.add_subcommand("solve-radial", "ground state of the circle via the radial fiber problem");
    add_common(radial, radial_opts);
    CLI::App* fem = app.add_subcommand("solve-2d", "ground state on the configured curves by 2D finite elements");
    add_common(fem, fem_opts);
    CLI::App* verify = app.add_subcommand("verify", "theorem and lemma checks");
    std::string which;
    verify->add_option("check", which, "thm1 | thm1b | thm2 | rstar | continuity | savo | transplant | negativity")
        ->required()
        ->check(CLI::IsMember({"thm1", "thm1b", "thm2", "rstar", "continuity", "savo", "transplant", "negativity"}));
    add_common(verify, verify_opts);
    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep from the [sweep] table");
    add_common(sweep, sweep_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        softring::VerificationReport rep;
        std::filesystem::path out;
        if (radial->parsed()) {
            const auto s = scenario_from(radial_opts);
            out = radial_opts.out;
            rep = softring::solve_radial_report(s);
        } else if (fem->parsed()) {
            const auto s = scenario_from(fem_opts);
            out = fem_opts.out;
            rep = softring::solve_2d_report(s);
        } else if (verify->parsed()) {
            const auto s = scenario_from(verify_opts);
            out = verify_opts.out;
            rep = softring::run_verification(which, s);
        } else {
            const auto s = scenario_from(sweep_opts);
            out = sweep_opts.out;
            softring::SweepResult result = softring::run_sweep(s);
            rep = std::move(result.report);
            softring::write_report(rep, out);
            softring::RadiusSweep table;
            table.rows = result.rows;
            softring::write_sweep_csv(table, out / "results.csv");
            summarize(rep, out);
            return rep.passed() ? 0 : 1;
        }
        softring::write_report(rep, out);
        summarize(rep, out);
        return rep.passed() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
