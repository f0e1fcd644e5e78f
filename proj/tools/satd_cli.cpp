#include <iostream>

#include <CLI11.hpp>

#include "satd/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"SATD tripod-gate pulse synthesis and simulation"};
    app.require_subcommand(1, 1);

    std::string scenario_path, out_dir, protocol;
    int workers = 1, levels = 0;
    double rel_tol = 0;
    bool seedless = false, convergence = false;
    double dt_ns = 0;

    for (const char* name : {"spectrum", "pulses", "power", "simulate", "sweep", "cavity"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--scenario", scenario_path, "scenario JSON file")->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides outputs.dir)");
        sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--levels", levels, "retained levels (overrides circuit.levels)")->check(CLI::PositiveNumber);
        sub->add_option("--rel-tol", rel_tol, "integrator relative tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--protocol", protocol, "adiabatic, satd, satd_chirped, direct or direct_chirped");
        sub->add_flag("--seedless", seedless, "accepted for compatibility; the pipeline never uses an RNG");
        if (std::string(name) == "spectrum")
            sub->add_flag("--convergence", convergence, "also write the basis-size convergence sweep");
        if (std::string(name) == "pulses" || std::string(name) == "cavity")
            sub->add_option("--dt", dt_ns, "sampling step in ns")->check(CLI::PositiveNumber);
    }
    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        satd::Scenario s = scenario_path.empty() ? satd::Scenario{} : satd::load_scenario(scenario_path);
        nlohmann::json overrides = satd::to_json(s);
        if (!out_dir.empty()) overrides["outputs"]["dir"] = out_dir;
        if (levels > 0) overrides["circuit"]["levels"] = levels;
        if (rel_tol > 0) overrides["solver"]["rel_tol"] = rel_tol;
        if (!protocol.empty()) overrides["gate"]["protocol"] = protocol;
        s = satd::parse_scenario(overrides);  // re-validate after overrides

        nlohmann::json extra = nlohmann::json::object();
        if (convergence) extra["convergence"] = true;
        if (dt_ns > 0) extra["dt_ns"] = dt_ns;
        return satd::run(sub, s, workers, extra);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
