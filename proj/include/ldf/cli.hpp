#pragma once

#include <ldf/sim.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ldf::cli {

/// Process exit codes.
enum ExitCode : int {
    exit_ok = 0,
    /// A checked property does not hold.
    exit_property_failed = 1,
    exit_config_error = 2,
    exit_capacity_error = 3,
    /// A reproduction check missed its tolerance.
    exit_acceptance_failure = 4,
};

/// LDF_SEED from the environment if set and valid, else the built-in default.
std::uint64_t default_seed();

struct CheckOptions {
    std::filesystem::path model;
    /// Any of "monotone", "equivalence", "exchangeable".
    std::vector<std::string> properties{"monotone", "equivalence", "exchangeable"};
    /// Users for the exchangeability test; all users when empty.
    std::vector<std::size_t> exchange_subset;
    /// Overrides the file's estimation seed for Monte Carlo tables.
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> json_out;
};

struct RegionOptions {
    std::filesystem::path model;
    /// C, B, RIB, R, sigma or efficiency.
    std::string which;
    std::vector<double> q;
    /// Restricts C, B and sigma to a subset; all users when empty.
    std::vector<std::size_t> subset;
    bool exact = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> json_out;
    std::optional<std::filesystem::path> csv_out;
};

struct SimulateOptions {
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> periods;
    std::optional<std::size_t> warmup;
    std::filesystem::path outdir = ".";
};

struct ReproduceOptions {
    std::filesystem::path outdir = "reproduction";
    std::uint64_t seed = kDefaultSeed;
    std::size_t periods = 30000;
};

int cmd_check(const CheckOptions& opt, std::ostream& out, std::ostream& err);
int cmd_region(const RegionOptions& opt, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err);
int cmd_reproduce_paper(const ReproduceOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace ldf::cli
