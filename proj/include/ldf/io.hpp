#pragma once

#include <ldf/geometry.hpp>
#include <ldf/model.hpp>
#include <ldf/sim.hpp>

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ldf::io {

using Json = nlohmann::ordered_json;

struct ModelSpec {
    PayoffModel model;
    Estimation estimation = ExactEstimation{};
};

/// Parses a model description; `source` names the input in error messages.
/// Throws ConfigError (with a line number where one can be found).
ModelSpec parse_model(std::string_view text, std::string_view source = "<model>");
ModelSpec load_model(const std::filesystem::path& path);
ModelSpec model_from_json(const Json& j, std::string_view text, std::string_view source);

struct ExperimentConfig {
    explicit ExperimentConfig(ModelSpec m) : model(std::move(m)) {}

    ModelSpec model;
    std::string policy;
    std::vector<double> q;
    /// Weights for the excess-balance metric; defaults to the policy's.
    std::optional<std::vector<double>> w;
    SimConfig sim;
    std::size_t replications = 1;
    std::string run_id = "run";
};

/// A relative "model" path is resolved against `base_dir`.
ExperimentConfig parse_experiment(std::string_view text, const std::filesystem::path& base_dir,
                                  std::string_view source = "<config>");
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// Shortest text that reads back as the same double; "inf", "-inf", "nan"
/// for non-finite values.
std::string format_double(double value);

/// RFC 4180 rows: CRLF line ends, fields quoted when they contain a comma,
/// quote, CR or LF.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(&out) {}
    void row(const std::vector<std::string>& fields);
    static std::string escape(std::string_view field);

private:
    std::ostream* out_;
};

/// Reads the CSV written by CsvWriter back into rows (used by tests and
/// the determinism check).
std::vector<std::vector<std::string>> read_csv(std::string_view text);

Json to_json(const RegionVerdict& v);
Json to_json(const SigmaResult& s);
Json to_json(const EfficiencyBound& b);
Json to_json(const PropertyVerdict& v);
Json to_json(const ExpectedPayoffTable& p);

/// Finite doubles as numbers, non-finite as null.
Json number_or_null(double value);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace ldf::io
