#include <ldf/cli.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace ldf::cli;

    CLI::App app{"ldfctl: deficit-based scheduling analysis and simulation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ldfctl 1.0");

    CheckOptions check;
    auto* check_cmd = app.add_subcommand("check", "Test monotonicity, subset payoff equivalence and exchangeability");
    check_cmd->add_option("model", check.model, "Model file (JSON)")->required()->check(CLI::ExistingFile);
    check_cmd->add_option("--properties", check.properties, "monotone, equivalence, exchangeable")->delimiter(',');
    check_cmd->add_option("--subset", check.exchange_subset, "Users for the exchangeability test (0-based)")->delimiter(',');
    std::optional<std::uint64_t> check_seed;
    check_cmd->add_option("--seed", check_seed, "Seed for Monte Carlo expected payoffs");
    check_cmd->add_option("--json", check.json_out, "Write the verdicts as JSON");

    RegionOptions region;
    auto* region_cmd = app.add_subcommand("region", "Membership in C, B, R_IB, R; subset payoff ratios; efficiency bound");
    region_cmd->add_option("model", region.model, "Model file (JSON)")->required()->check(CLI::ExistingFile);
    region_cmd->add_option("--which", region.which, "C, B, RIB, R, sigma or efficiency")
        ->required()
        ->check(CLI::IsMember({"C", "B", "RIB", "R", "sigma", "efficiency"}));
    region_cmd->add_option("--q", region.q, "Requirement vector")->delimiter(',');
    region_cmd->add_option("--subset", region.subset, "Subset of users (0-based)")->delimiter(',');
    region_cmd->add_flag("--exact", region.exact, "Use exact rational arithmetic");
    std::optional<std::uint64_t> region_seed;
    region_cmd->add_option("--seed", region_seed, "Seed for Monte Carlo expected payoffs");
    region_cmd->add_option("--json", region.json_out, "Write the result as JSON");
    region_cmd->add_option("--csv", region.csv_out, "Write the result as CSV");

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Run a policy on a model");
    sim_cmd->add_option("config", sim.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--seed", sim.seed, "Seed (overrides the config and LDF_SEED)");
    sim_cmd->add_option("--periods", sim.periods, "Number of periods T");
    sim_cmd->add_option("--warmup", sim.warmup, "Periods discarded before measuring");
    sim_cmd->add_option("--outdir", sim.outdir, "Output directory");

    ReproduceOptions repro;
    repro.seed = default_seed();
    auto* repro_cmd = app.add_subcommand("reproduce-paper", "Regenerate the two-user example and the single-resource study");
    repro_cmd->add_option("--outdir", repro.outdir, "Output directory");
    repro_cmd->add_option("--seed", repro.seed, "Seed (default LDF_SEED or the built-in seed)");
    repro_cmd->add_option("--periods", repro.periods, "Periods per run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config_error;
    }

    // LDF_SEED applies when no --seed flag was given; an explicit flag wins.
    const auto env_seed = [] { return std::optional<std::uint64_t>(default_seed()); };
    if (check_cmd->parsed()) {
        check.seed = check_seed ? check_seed : (std::getenv("LDF_SEED") ? env_seed() : std::nullopt);
        return cmd_check(check, std::cout, std::cerr);
    }
    if (region_cmd->parsed()) {
        region.seed = region_seed ? region_seed : (std::getenv("LDF_SEED") ? env_seed() : std::nullopt);
        return cmd_region(region, std::cout, std::cerr);
    }
    if (sim_cmd->parsed()) {
        if (!sim.seed && std::getenv("LDF_SEED")) sim.seed = default_seed();
        return cmd_simulate(sim, std::cout, std::cerr);
    }
    return cmd_reproduce_paper(repro, std::cout, std::cerr);
}
