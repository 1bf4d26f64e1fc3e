#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "bounce/acceptance.hpp"
#include "bounce/commands.hpp"
#include "bounce/parallel.hpp"

int main(int argc, char **argv)
{
    CLI::App app{"bounce_lab: event-driven bouncing-ball and Fermi-Ulam simulations"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir = ".";
    std::string grid;
    std::string coords = "tv";

    auto *simulate = app.add_subcommand("simulate", "run one scenario, write events.csv and summary.json");
    simulate->add_option("config", config, "scenario file")->required();
    simulate->add_option("--out", out_dir, "output directory");

    auto *sweep = app.add_subcommand("sweep", "run a parameter grid, write sweep.csv");
    sweep->add_option("config", config, "scenario file")->required();
    sweep->add_option("--grid", grid, "name=lo:hi:count[,name=lo:hi:count]")->required();
    sweep->add_option("--out", out_dir, "output directory");

    auto *portrait = app.add_subcommand("portrait", "write portrait.csv in (t, v) or (t, y) coordinates");
    portrait->add_option("config", config, "scenario file")->required();
    portrait->add_option("--coords", coords, "tv or ty")->check(CLI::IsMember({"tv", "ty"}));
    portrait->add_option("--out", out_dir, "output directory");

    bounce::AcceptanceOptions acceptance;
    double t_tol = 0.0;
    auto *validate = app.add_subcommand("validate", "run the acceptance criteria, one line each");
    validate->add_option("--t-tol", t_tol, "event-time tolerance")->check(CLI::PositiveNumber);
    validate->add_option("--only", acceptance.only, "criterion ids")->check(CLI::Range(1, bounce::criterion_count));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), 2);
    }

    const int threads = bounce::thread_count();
    if (*simulate) {
        return bounce::cmd_simulate(config, out_dir, threads, std::cerr);
    }
    if (*sweep) {
        return bounce::cmd_sweep(config, grid, out_dir, threads, std::cerr);
    }
    if (*portrait) {
        const auto c = coords == "ty" ? bounce::PortraitCoords::ty : bounce::PortraitCoords::tv;
        return bounce::cmd_portrait(config, c, out_dir, std::cerr);
    }
    if (validate->count("--t-tol") > 0) {
        acceptance.t_tol = t_tol;
    }
    acceptance.threads = threads;
    bool ok = true;
    for (const auto &r : bounce::run_acceptance(acceptance, std::cout)) {
        ok = ok && r.status == bounce::CriterionStatus::pass;
    }
    return ok ? 0 : 1;
}
