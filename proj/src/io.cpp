#include <ldf/io.hpp>

#include <ldf/errors.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace ldf::io {

namespace {

std::size_t line_at(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Best-effort location of a key in the raw text.
std::string where(std::string_view text, std::string_view source, std::string_view key) {
    const std::string quoted = "\"" + std::string(key) + "\"";
    const auto pos = text.find(quoted);
    if (pos == std::string_view::npos) return std::string(source);
    return std::string(source) + ":" + std::to_string(line_at(text, pos));
}

class Context {
public:
    Context(std::string_view text, std::string_view source) : text_(text), source_(source) {}

    [[noreturn]] void fail(std::string_view key, const std::string& message) const {
        throw ConfigError(where(text_, source_, key) + ": " + message);
    }

    void check_keys(const Json& obj, std::string_view what, std::initializer_list<std::string_view> allowed) const {
        if (!obj.is_object()) fail(what, std::string(what) + " must be a JSON object");
        for (const auto& item : obj.items()) {
            if (std::find(allowed.begin(), allowed.end(), item.key()) != allowed.end()) continue;
            std::string list;
            for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
            fail(item.key(), "unknown key \"" + item.key() + "\" in " + std::string(what) + " (allowed: " + list + ")");
        }
    }

    const Json& require(const Json& obj, std::string_view key, std::string_view what) const {
        auto it = obj.find(std::string(key));
        if (it == obj.end()) fail(what, std::string(what) + " is missing required key \"" + std::string(key) + "\"");
        return *it;
    }

    double number(const Json& j, std::string_view key) const {
        if (!j.is_number()) fail(key, "\"" + std::string(key) + "\" must be a number");
        return j.get<double>();
    }

    std::uint64_t count(const Json& j, std::string_view key) const {
        if (j.is_number_unsigned()) return j.get<std::uint64_t>();
        if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
        fail(key, "\"" + std::string(key) + "\" must be a nonnegative integer");
    }

    std::string string(const Json& j, std::string_view key) const {
        if (!j.is_string()) fail(key, "\"" + std::string(key) + "\" must be a string");
        return j.get<std::string>();
    }

    Rational rational(const Json& j, std::string_view key) const {
        try {
            if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
            if (j.is_number()) return rational_from_double(j.get<double>());
            if (j.is_string()) return parse_rational(j.get<std::string>());
        } catch (const std::exception& e) {
            fail(key, "bad rational in \"" + std::string(key) + "\": " + e.what());
        }
        fail(key, "\"" + std::string(key) + "\" entries must be numbers or rational strings like \"1/3\"");
    }

    std::vector<double> numbers(const Json& j, std::string_view key) const {
        if (!j.is_array()) fail(key, "\"" + std::string(key) + "\" must be an array of numbers");
        std::vector<double> out;
        for (const auto& v : j) out.push_back(number(v, key));
        return out;
    }

    std::string_view text() const { return text_; }
    std::string_view source() const { return source_; }

private:
    std::string_view text_;
    std::string_view source_;
};

Json parse_json(std::string_view text, std::string_view source) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string(source) + ":" + std::to_string(line_at(text, e.byte == 0 ? 0 : e.byte - 1)) +
                          ": malformed JSON: " + e.what());
    }
}

PriorityDecision parse_decision_key(const Context& ctx, const std::string& key, std::size_t n) {
    std::string_view body = key;
    if (body.size() >= 2 && body.front() == '(' && body.back() == ')') body = body.substr(1, body.size() - 2);
    std::vector<std::size_t> order;
    std::size_t start = 0;
    while (start <= body.size()) {
        auto comma = body.find(',', start);
        auto part = body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
        while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || ptr != part.data() + part.size() || part.empty()) {
            ctx.fail(key, "decision key \"" + key + "\" must list user indices like \"0,1,2\"");
        }
        order.push_back(v);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (order.size() != n) ctx.fail(key, "decision \"" + key + "\" does not have n = " + std::to_string(n) + " entries");
    try {
        return PriorityDecision(std::move(order));
    } catch (const DomainError& e) {
        ctx.fail(key, e.what());
    }
}

std::vector<Rational> payoff_vector(const Context& ctx, const Json& j, const std::string& key, std::size_t n) {
    if (!j.is_array() || j.size() != n) ctx.fail(key, "payoff vector for \"" + key + "\" must have n entries");
    std::vector<Rational> out;
    for (const auto& v : j) out.push_back(ctx.rational(v, key));
    return out;
}

Estimation parse_estimation(const Context& ctx, const Json& j) {
    ctx.check_keys(j, "estimation", {"kind", "samples", "seed"});
    const auto kind = ctx.string(ctx.require(j, "kind", "estimation"), "kind");
    if (kind == "exact") {
        if (j.contains("samples") || j.contains("seed")) ctx.fail("samples", "exact estimation takes no samples or seed");
        return ExactEstimation{};
    }
    if (kind == "monte_carlo") {
        const auto samples = ctx.count(ctx.require(j, "samples", "estimation"), "samples");
        const auto seed = j.contains("seed") ? ctx.count(j["seed"], "seed") : kDefaultSeed;
        if (samples < 2) ctx.fail("samples", "monte_carlo estimation needs at least 2 samples");
        return MonteCarloEstimation{static_cast<std::size_t>(samples), seed};
    }
    ctx.fail("kind", "estimation kind must be \"exact\" or \"monte_carlo\", got \"" + kind + "\"");
}

Workload parse_workload(const Context& ctx, const Json& j) {
    if (!j.is_object()) ctx.fail("workloads", "each workload must be an object");
    const auto kind = ctx.string(ctx.require(j, "kind", "workload"), "kind");
    if (kind == "deterministic") {
        ctx.check_keys(j, "deterministic workload", {"kind", "value"});
        return Deterministic{ctx.number(ctx.require(j, "value", "workload"), "value")};
    }
    if (kind == "exponential") {
        ctx.check_keys(j, "exponential workload", {"kind", "rate"});
        return Exponential{ctx.number(ctx.require(j, "rate", "workload"), "rate")};
    }
    if (kind == "gamma") {
        ctx.check_keys(j, "gamma workload", {"kind", "shape", "scale"});
        return Gamma{ctx.number(ctx.require(j, "shape", "workload"), "shape"),
                     ctx.number(ctx.require(j, "scale", "workload"), "scale")};
    }
    ctx.fail("kind", "workload kind must be deterministic, exponential or gamma, got \"" + kind + "\"");
}

}  // namespace

ModelSpec model_from_json(const Json& j, std::string_view text, std::string_view source) {
    const Context ctx(text, source);
    if (!j.is_object()) ctx.fail("type", "model must be a JSON object");
    const auto type = ctx.string(ctx.require(j, "type", "model"), "type");
    std::optional<PayoffModel> model;
    try {
        if (type == "table") {
            ctx.check_keys(j, "table model", {"type", "n", "dist", "estimation"});
            const auto n = static_cast<std::size_t>(ctx.count(ctx.require(j, "n", "model"), "n"));
            if (n == 0) ctx.fail("n", "n must be at least 1");
            if (n > kDefaultDecisionCap) throw CapacityError("table model with n = " + std::to_string(n), kDefaultDecisionCap);
            const auto& dist = ctx.require(j, "dist", "model");
            if (!dist.is_object()) ctx.fail("dist", "\"dist\" must map decisions like \"0,1\" to payoffs");
            std::map<PriorityDecision, std::vector<PayoffAtom>> table;
            for (const auto& item : dist.items()) {
                auto d = parse_decision_key(ctx, item.key(), n);
                if (table.count(d)) ctx.fail(item.key(), "decision " + d.to_string() + " listed twice");
                const auto& value = item.value();
                std::vector<PayoffAtom> atoms;
                if (value.is_array() && !value.empty() && value.front().is_object()) {
                    for (const auto& atom : value) {
                        ctx.check_keys(atom, "payoff atom", {"prob", "payoff"});
                        atoms.push_back({ctx.rational(ctx.require(atom, "prob", "payoff atom"), "prob"),
                                         payoff_vector(ctx, ctx.require(atom, "payoff", "payoff atom"), item.key(), n)});
                    }
                } else {
                    atoms.push_back({Rational(1), payoff_vector(ctx, value, item.key(), n)});
                }
                table.emplace(std::move(d), std::move(atoms));
            }
            if (table.size() != factorial(n)) {
                for (const auto& d : enumerate_decisions(n)) {
                    if (!table.count(d)) ctx.fail("dist", "\"dist\" has no entry for decision " + d.to_string());
                }
            }
            model.emplace(TablePayoffModel(n, table));
        } else if (type == "single_resource") {
            ctx.check_keys(j, "single_resource model", {"type", "n", "delta", "workloads", "estimation"});
            const double delta = ctx.number(ctx.require(j, "delta", "model"), "delta");
            const auto& list = ctx.require(j, "workloads", "model");
            if (!list.is_array() || list.empty()) ctx.fail("workloads", "\"workloads\" must be a nonempty array");
            std::vector<Workload> workloads;
            for (const auto& w : list) workloads.push_back(parse_workload(ctx, w));
            if (j.contains("n") && ctx.count(j["n"], "n") != workloads.size()) {
                ctx.fail("n", "\"n\" does not match the number of workloads (" + std::to_string(workloads.size()) + ")");
            }
            model.emplace(SingleResourceModel(delta, std::move(workloads)));
        } else {
            ctx.fail("type", "model type must be \"table\" or \"single_resource\", got \"" + type + "\"");
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string(source) + ": " + e.what());
    }
    ModelSpec spec{std::move(*model)};
    if (j.contains("estimation")) spec.estimation = parse_estimation(ctx, j["estimation"]);
    return spec;
}

ModelSpec parse_model(std::string_view text, std::string_view source) {
    return model_from_json(parse_json(text, source), text, source);
}

ModelSpec load_model(const std::filesystem::path& path) {
    const auto text = read_text(path);
    return parse_model(text, path.string());
}

ExperimentConfig parse_experiment(std::string_view text, const std::filesystem::path& base_dir,
                                  std::string_view source) {
    const auto j = parse_json(text, source);
    const Context ctx(text, source);
    ctx.check_keys(j, "experiment config",
                   {"model", "policy", "q", "w", "periods", "warmup", "seed", "mode", "tie_break",
                    "record_trajectory", "replications", "run_id"});
    const auto& model = ctx.require(j, "model", "experiment config");
    if (!model.is_string() && !model.is_object()) {
        ctx.fail("model", "\"model\" must be a file path or an inline model object");
    }
    ExperimentConfig cfg{[&] {
        if (model.is_object()) return model_from_json(model, text, source);
        std::filesystem::path path = model.get<std::string>();
        if (path.is_relative()) path = base_dir / path;
        return load_model(path);
    }()};
    const std::size_t n = users(cfg.model.model);

    cfg.policy = ctx.string(ctx.require(j, "policy", "experiment config"), "policy");
    cfg.q = ctx.numbers(ctx.require(j, "q", "experiment config"), "q");
    if (cfg.q.size() != n) ctx.fail("q", "\"q\" has " + std::to_string(cfg.q.size()) + " entries but the model has n = " + std::to_string(n));
    for (double v : cfg.q) {
        if (!(v >= 0) || !std::isfinite(v)) ctx.fail("q", "\"q\" entries must be finite and nonnegative");
    }
    if (j.contains("w")) {
        cfg.w = ctx.numbers(j["w"], "w");
        if (cfg.w->size() != n) ctx.fail("w", "\"w\" has " + std::to_string(cfg.w->size()) + " entries but the model has n = " + std::to_string(n));
        for (double v : *cfg.w) {
            if (!(v > 0) || !std::isfinite(v)) ctx.fail("w", "\"w\" entries must be strictly positive");
        }
    }
    if (j.contains("periods")) cfg.sim.periods = static_cast<std::size_t>(ctx.count(j["periods"], "periods"));
    if (j.contains("warmup")) cfg.sim.warmup = static_cast<std::size_t>(ctx.count(j["warmup"], "warmup"));
    if (j.contains("seed")) cfg.sim.seed = ctx.count(j["seed"], "seed");
    if (j.contains("mode")) {
        try {
            cfg.sim.mode = parse_deficit_mode(ctx.string(j["mode"], "mode"));
        } catch (const ConfigError& e) {
            ctx.fail("mode", e.what());
        }
    }
    if (j.contains("tie_break")) {
        const auto tb = ctx.string(j["tie_break"], "tie_break");
        if (tb != "lowest_index" && tb != "random") ctx.fail("tie_break", "\"tie_break\" must be \"lowest_index\" or \"random\"");
        cfg.sim.random_ties = tb == "random";
    }
    if (j.contains("record_trajectory")) {
        if (!j["record_trajectory"].is_boolean()) ctx.fail("record_trajectory", "\"record_trajectory\" must be true or false");
        cfg.sim.record_trajectory = j["record_trajectory"].get<bool>();
    }
    if (j.contains("replications")) {
        cfg.replications = static_cast<std::size_t>(ctx.count(j["replications"], "replications"));
        if (cfg.replications == 0) ctx.fail("replications", "\"replications\" must be at least 1");
    }
    if (j.contains("run_id")) cfg.run_id = ctx.string(j["run_id"], "run_id");
    if (cfg.sim.periods <= cfg.sim.warmup) {
        ctx.fail("periods", "\"periods\" must exceed \"warmup\" (got " + std::to_string(cfg.sim.periods) + " <= " +
                                std::to_string(cfg.sim.warmup) + ")");
    }
    return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
    const auto text = read_text(path);
    return parse_experiment(text, path.parent_path(), path.string());
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (value == 0.0) return "0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string CsvWriter::escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (k) *out_ << ',';
        *out_ << escape(fields[k]);
    }
    *out_ << "\r\n";
}

std::vector<std::vector<std::string>> read_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    for (std::size_t k = 0; k < text.size(); ++k) {
        const char c = text[k];
        if (quoted) {
            if (c == '"') {
                if (k + 1 < text.size() && text[k + 1] == '"') {
                    field += '"';
                    ++k;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        any = true;
        if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && k + 1 < text.size() && text[k + 1] == '\n') ++k;
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
        } else {
            field += c;
        }
    }
    if (any || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json number_or_null(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

namespace {

Json subset_json(UserSubset s) { return Json(s.members()); }

}  // namespace

Json to_json(const RegionVerdict& v) {
    Json j;
    j["member"] = v.member;
    j["margin"] = number_or_null(v.margin);
    j["certificate_kind"] = std::string(to_string(v.kind));
    j["certificate"] = v.certificate;
    if (v.kind == CertificateKind::combination) j["certificate_ranks"] = v.certificate_ranks;
    j["failing_subset"] = v.failing_subset ? subset_json(*v.failing_subset) : Json(nullptr);
    j["path"] = std::string(to_string(v.path));
    return j;
}

Json to_json(const SigmaResult& s) {
    Json j;
    j["subset"] = subset_json(s.subset);
    j["sigma"] = s.sigma;
    if (s.exact_sigma) j["sigma_exact"] = to_string(*s.exact_sigma);
    j["alpha"] = s.alpha;
    j["path"] = std::string(to_string(s.path));
    return j;
}

Json to_json(const EfficiencyBound& b) {
    Json j;
    j["value"] = b.value;
    if (b.exact_value) j["value_exact"] = to_string(*b.exact_value);
    j["argmin_subset"] = subset_json(b.argmin);
    j["monotone"] = b.monotone;
    j["warning"] = b.warning ? Json(*b.warning) : Json(nullptr);
    Json per = Json::array();
    for (const auto& s : b.per_subset) per.push_back(to_json(s));
    j["subsets"] = per;
    return j;
}

Json to_json(const PropertyVerdict& v) {
    Json j;
    j["holds"] = v.holds;
    j["arithmetic"] = v.arithmetic == Arithmetic::exact ? "exact" : "floating";
    if (v.witness) {
        Json w;
        w["description"] = describe(*v.witness);
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, MonotonicityWitness>) {
                    w["d1"] = x.d1.order();
                    w["d2"] = x.d2.order();
                    w["user"] = x.user;
                } else if constexpr (std::is_same_v<T, SubsetWitness>) {
                    w["subset"] = subset_json(x.subset);
                } else {
                    w["d"] = x.d.order();
                    w["i"] = x.i;
                    w["j"] = x.j;
                }
            },
            *v.witness);
        j["witness"] = w;
    } else {
        j["witness"] = nullptr;
    }
    if (!v.certificates.empty()) {
        Json certs = Json::array();
        for (const auto& c : v.certificates) {
            certs.push_back({{"subset", subset_json(c.subset)}, {"alpha", c.alpha}, {"spread", c.spread}});
        }
        j["certificates"] = certs;
    }
    return j;
}

Json to_json(const ExpectedPayoffTable& p) {
    Json j;
    j["n"] = p.users();
    const auto& prov = p.provenance();
    if (prov.kind == Provenance::Kind::exact) {
        j["provenance"] = {{"kind", "exact"}};
    } else {
        j["provenance"] = {{"kind", "monte_carlo"}, {"samples", prov.samples}, {"seed", prov.seed}};
    }
    Json rows = Json::array();
    for (std::size_t r = 0; r < p.decisions(); ++r) {
        Json row;
        row["decision"] = decision_at(p.users(), r).order();
        const auto values = p.row(r);
        row["p"] = std::vector<double>(values.begin(), values.end());
        if (p.has_exact()) {
            std::vector<std::string> exact;
            for (std::size_t i = 0; i < p.users(); ++i) exact.push_back(to_string(p.exact(r, i)));
            row["p_exact"] = exact;
        }
        if (!p.standard_errors().empty()) {
            const auto se = p.standard_errors().subspan(r * p.users(), p.users());
            row["standard_error"] = std::vector<double>(se.begin(), se.end());
        }
        rows.push_back(row);
    }
    j["table"] = rows;
    return j;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace ldf::io
