#include <ldf/cli.hpp>
#include <ldf/errors.hpp>
#include <ldf/io.hpp>
#include <ldf/oracle.hpp>

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

using namespace ldf;
namespace fs = std::filesystem;

namespace {

const fs::path examples = LDF_EXAMPLES_DIR;

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("ldf_tests_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string config_error(std::string_view text) {
    try {
        io::parse_model(text, "m.json");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("model parsing") {
    const auto spec = io::parse_model(R"j({"type": "table", "n": 2, "dist": {"0,1": [1, 0], "(1,0)": ["0", "1/2"]}})j");
    const auto p = expected_payoffs(spec.model, spec.estimation);
    CHECK(p.exact(1, 1) == Rational(1, 2));

    const auto sr = io::parse_model(R"j({"type": "single_resource", "delta": 10,
        "workloads": [{"kind": "deterministic", "value": 6}, {"kind": "exponential", "rate": 0.5}],
        "estimation": {"kind": "monte_carlo", "samples": 1000, "seed": 3}})j");
    CHECK(users(sr.model) == 2);
    CHECK(std::get<MonteCarloEstimation>(sr.estimation).samples == 1000);
}

TEST_CASE("model errors carry a line number") {
    const auto unknown = config_error("{\n  \"type\": \"table\",\n  \"n\": 2,\n  \"colour\": 1,\n  \"dist\": {}\n}");
    CHECK(unknown.find("m.json:4") != std::string::npos);
    CHECK(unknown.find("colour") != std::string::npos);
    CHECK(config_error(R"j({"type": "table", "n": 2, "dist": {"0,1": [1, 0]}})j").find("no entry") != std::string::npos);
    CHECK_FALSE(config_error("{ not json").empty());
    CHECK_FALSE(config_error(R"j({"type": "cube"})j").empty());
    CHECK_FALSE(config_error(R"j({"type": "single_resource", "delta": 10, "workloads": [{"kind": "gamma", "shape": 2}]})j").empty());
    CHECK_FALSE(config_error(R"j({"type": "table", "n": 2, "dist": {"0,1": [1], "1,0": [0, 1]}})j").empty());
    CHECK_FALSE(config_error(R"j({"type": "table", "n": 2, "dist": {"0,0": [1, 0], "1,0": [0, 1]}})j").empty());
}

TEST_CASE("experiment configs") {
    const auto cfg = io::load_experiment(examples / "wldf_heavy_first.json");
    CHECK(cfg.policy == "wldf");
    CHECK(cfg.w == std::vector<double>{10, 1, 1});
    CHECK(cfg.sim.mode == DeficitMode::signed_);
    CHECK(cfg.sim.periods == 30000);
    CHECK(users(cfg.model.model) == 3);
    CHECK_THROWS_AS(io::parse_experiment(R"j({"model": "x.json", "policy": "mw", "q": [0.1], "speed": 3})j", "."), ConfigError);
    CHECK_THROWS_AS(io::parse_experiment(R"j({"model": {"type": "table", "n": 1, "dist": {"0": [1]}}, "policy": "mw",
        "q": [0.1], "mode": "clipped"})j", "."), ConfigError);
}

TEST_CASE("csv and number formatting") {
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(1.0 / 3.0) == "0.3333333333333333");
    CHECK(io::format_double(-0.0) == "0");
    CHECK(io::format_double(1e300) == "1e+300");
    CHECK(io::CsvWriter::escape("a,b") == "\"a,b\"");
    CHECK(io::CsvWriter::escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(io::CsvWriter::escape("plain") == "plain");
    std::ostringstream out;
    io::CsvWriter w(out);
    w.row({"x", "y,z"});
    w.row({"1", "line\nbreak"});
    CHECK(out.str() == "x,\"y,z\"\r\n1,\"line\nbreak\"\r\n");
    const auto rows = io::read_csv(out.str());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][1] == "y,z");
    CHECK(rows[1][1] == "line\nbreak");
}

TEST_CASE("check command") {
    std::ostringstream out, err;
    cli::CheckOptions opt;
    opt.model = examples / "two_user.json";
    CHECK(cli::cmd_check(opt, out, err) == cli::exit_ok);
    CHECK(out.str().find("monotone: yes") != std::string::npos);
    CHECK(out.str().find("subset payoff equivalence: yes") != std::string::npos);

    std::ostringstream out2;
    opt.model = examples / "non_monotone.json";
    opt.properties = {"monotone"};
    CHECK(cli::cmd_check(opt, out2, err) == cli::exit_property_failed);
    CHECK(out2.str().find("monotone: no") != std::string::npos);
    CHECK(out2.str().find("witness") != std::string::npos);

    std::ostringstream out3, err3;
    opt.model = examples / "single_resource.json";
    opt.properties = {"monotone", "equivalence"};
    CHECK(cli::cmd_check(opt, out3, err3) == cli::exit_property_failed);
    CHECK(out3.str().find("monotone: yes") != std::string::npos);
    CHECK(out3.str().find("subset payoff equivalence: no") != std::string::npos);

    std::ostringstream out4, err4;
    opt.properties = {"sparkle"};
    CHECK(cli::cmd_check(opt, out4, err4) == cli::exit_config_error);
    opt.model = examples / "missing.json";
    CHECK(cli::cmd_check(opt, out4, err4) == cli::exit_config_error);
}

TEST_CASE("region command") {
    const auto dir = scratch("region");
    std::ostringstream out, err;
    cli::RegionOptions opt;
    opt.model = examples / "two_user.json";
    opt.which = "C";
    opt.q = {0.1, 0.5};
    opt.json_out = dir / "c.json";
    opt.csv_out = dir / "c.csv";
    CHECK(cli::cmd_region(opt, out, err) == cli::exit_ok);
    const auto j = io::Json::parse(io::read_text(dir / "c.json"));
    CHECK(j["verdict"]["member"] == true);
    CHECK(io::read_csv(io::read_text(dir / "c.csv")).size() == 2);

    std::ostringstream o2;
    opt.which = "efficiency";
    opt.exact = true;
    opt.json_out.reset();
    opt.csv_out.reset();
    CHECK(cli::cmd_region(opt, o2, err) == cli::exit_ok);
    CHECK(io::Json::parse(o2.str())["efficiency"]["value"] == 1.0);

    std::ostringstream o3;
    opt.model = examples / "skew3.json";
    opt.which = "sigma";
    opt.exact = false;
    CHECK(cli::cmd_region(opt, o3, err) == cli::exit_ok);
    const double sigma = io::Json::parse(o3.str())["sigma"]["sigma"];
    const auto p = expected_payoffs(io::load_model(examples / "skew3.json").model, ExactEstimation{});
    CHECK(std::abs(sigma - oracle::sigma_grid_search(p, UserSubset::full(3)).sigma) <= 1e-3);

    std::ostringstream o4, e4;
    opt.which = "C";
    opt.q = {0.1};
    CHECK(cli::cmd_region(opt, o4, e4) == cli::exit_config_error);
}

TEST_CASE("capacity errors map to their exit code") {
    const auto dir = scratch("capacity");
    std::string dist;
    for (const auto& d : enumerate_decisions(6)) {
        std::string key;
        for (auto u : d) key += (key.empty() ? "" : ",") + std::to_string(u);
        dist += (dist.empty() ? "" : ", ") + ("\"" + key + "\": [1, 1, 1, 1, 1, 1]");
    }
    io::write_text(dir / "six.json", "{\"type\": \"table\", \"n\": 6, \"dist\": {" + dist + "}}");
    std::ostringstream out, err;
    cli::RegionOptions opt;
    opt.model = dir / "six.json";
    opt.which = "R";
    opt.q = std::vector<double>(6, 0.1);
    CHECK(cli::cmd_region(opt, out, err) == cli::exit_capacity_error);
    cli::CheckOptions chk;
    chk.model = dir / "six.json";
    chk.properties = {"equivalence"};
    CHECK(cli::cmd_check(chk, out, err) == cli::exit_capacity_error);
}

TEST_CASE("simulate command") {
    const auto dir = scratch("simulate");
    std::ostringstream out, err;
    cli::SimulateOptions opt;
    opt.config = examples / "wldf_equal_weights.json";
    opt.outdir = dir;
    opt.periods = 5000;
    CHECK(cli::cmd_simulate(opt, out, err) == cli::exit_ok);
    const auto rows = io::read_csv(io::read_text(dir / "wldf-1-1-1.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"run_id", "user", "q", "w", "p_hat", "excess", "sd_ratio", "max_deficit"});
    const auto first = io::read_text(dir / "wldf-1-1-1.csv");
    std::ostringstream again;
    CHECK(cli::cmd_simulate(opt, again, err) == cli::exit_ok);
    CHECK(io::read_text(dir / "wldf-1-1-1.csv") == first);

    opt.periods = 0;
    std::ostringstream o2, e2;
    CHECK(cli::cmd_simulate(opt, o2, e2) == cli::exit_config_error);
    CHECK(e2.str().find("periods") != std::string::npos);

    cli::SimulateOptions mw;
    mw.config = examples / "mw_two_user.json";
    mw.outdir = dir;
    std::ostringstream o3;
    CHECK(cli::cmd_simulate(mw, o3, err) == cli::exit_ok);
    CHECK(io::read_csv(io::read_text(dir / "mw-two-user.csv")).size() == 1 + 4 * 2);

    io::write_text(dir / "traj.json", R"j({"model": ")j" + (examples / "two_user.json").string() +
                                          R"j(", "policy": "ldf", "q": [0.1, 0.5], "periods": 20,
        "mode": "signed", "record_trajectory": true, "run_id": "traj"})j");
    cli::SimulateOptions tr;
    tr.config = dir / "traj.json";
    tr.outdir = dir;
    std::ostringstream o4;
    CHECK(cli::cmd_simulate(tr, o4, err) == cli::exit_ok);
    const auto rows_t = io::read_csv(io::read_text(dir / "traj_trajectory.csv"));
    REQUIRE(rows_t.size() == 21);
    CHECK(rows_t[1] == std::vector<std::string>{"traj", "1", "-0.9", "0.5"});
}

TEST_CASE("default seed from the environment") {
    ::setenv("LDF_SEED", "77", 1);
    CHECK(cli::default_seed() == 77);
    ::setenv("LDF_SEED", "junk", 1);
    CHECK(cli::default_seed() == kDefaultSeed);
    ::unsetenv("LDF_SEED");
    CHECK(cli::default_seed() == kDefaultSeed);
}
