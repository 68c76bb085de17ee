#include <ldf/cli.hpp>

#include <ldf/errors.hpp>
#include <ldf/geometry.hpp>
#include <ldf/io.hpp>
#include <ldf/kernels.hpp>
#include <ldf/oracle.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace ldf::cli {

using io::format_double;
using io::Json;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("LDF_SEED"); env != nullptr && *env != '\0') {
        std::uint64_t value = 0;
        const std::string_view text(env);
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec == std::errc() && ptr == text.data() + text.size()) return value;
    }
    return kDefaultSeed;
}

namespace {

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const CapacityError& e) {
        err << "capacity error: " << e.what() << "\n";
        return exit_capacity_error;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const ModeError& e) {
        err << "mode error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << "\n";
        return exit_config_error;
    } catch (const DegenerateError& e) {
        err << "degenerate input: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_config_error;
    }
}

std::string vec_text(std::span<const double> v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_double(v[i]);
    }
    return out + ")";
}

std::string fixed(double v, int digits = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

UserSubset subset_of(const std::vector<std::size_t>& members, std::size_t n) {
    if (members.empty()) return UserSubset::full(n);
    UserSubset s;
    for (auto m : members) s.insert(m);
    s.validate(n);
    return s;
}

ExpectedPayoffTable table_for(io::ModelSpec spec, std::optional<std::uint64_t> seed) {
    if (auto* mc = std::get_if<MonteCarloEstimation>(&spec.estimation); mc && seed) mc->seed = *seed;
    return expected_payoffs(spec.model, spec.estimation);
}

std::string provenance_text(const ExpectedPayoffTable& p) {
    const auto& prov = p.provenance();
    if (prov.kind == Provenance::Kind::exact) return p.has_exact() ? "exact (rational)" : "exact (numerical)";
    return "monte_carlo (samples=" + std::to_string(prov.samples) + ", seed=" + std::to_string(prov.seed) + ")";
}

}  // namespace

int cmd_check(const CheckOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto table = table_for(io::load_model(opt.model), opt.seed);
        const std::size_t n = table.users();
        const auto arithmetic = table.has_exact() ? Arithmetic::exact : Arithmetic::floating;
        out << "model: " << opt.model.string() << "\n";
        out << "users: " << n << "\n";
        out << "expected payoffs: " << provenance_text(table) << "\n";

        Json report;
        report["model"] = opt.model.string();
        report["expected_payoffs"] = io::to_json(table);
        Json props = Json::object();
        bool all_hold = true;
        for (const auto& name : opt.properties) {
            PropertyVerdict v;
            std::string label;
            if (name == "monotone") {
                v = check_monotonicity(table, arithmetic);
                label = "monotone";
            } else if (name == "equivalence") {
                v = check_subset_payoff_equivalence(table, arithmetic);
                label = "subset payoff equivalence";
            } else if (name == "exchangeable") {
                const auto s = subset_of(opt.exchange_subset, n);
                v = check_exchangeable(table, s, arithmetic);
                label = "exchangeable on " + s.to_string();
            } else {
                throw ConfigError("unknown property \"" + name + "\" (expected monotone, equivalence, exchangeable)");
            }
            all_hold = all_hold && v.holds;
            out << label << ": " << (v.holds ? "yes" : "no") << "\n";
            if (v.witness) out << "  witness: " << describe(*v.witness) << "\n";
            for (const auto& c : v.certificates) {
                out << "  S=" << c.subset.to_string() << " alpha=" << vec_text(c.alpha) << "\n";
            }
            props[name] = io::to_json(v);
        }
        report["properties"] = props;
        report["all_hold"] = all_hold;
        if (opt.json_out) io::write_text(*opt.json_out, report.dump(2) + "\n");
        return all_hold ? exit_ok : exit_property_failed;
    });
}

int cmd_region(const RegionOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto table = table_for(io::load_model(opt.model), opt.seed);
        const std::size_t n = table.users();
        GeometryOptions g;
        if (opt.exact) {
            if (!table.has_exact()) throw ModeError("--exact needs a model with exact rational expected payoffs");
            g.arithmetic = Arithmetic::exact;
        }
        const auto which = opt.which;
        const bool needs_q = which == "C" || which == "B" || which == "RIB" || which == "R";
        if (needs_q && opt.q.size() != n) {
            throw ConfigError("--q needs " + std::to_string(n) + " entries, got " + std::to_string(opt.q.size()));
        }
        if (n > g.cap) throw CapacityError("geometry on n = " + std::to_string(n) + " users", g.cap);

        Json report;
        report["region"] = which;
        if (needs_q) report["q"] = opt.q;
        std::vector<std::vector<std::string>> rows;
        auto verdict_rows = [&](const RegionVerdict& v) {
            rows.push_back({"region", "member", "margin", "failing_subset", "certificate_kind", "certificate"});
            rows.push_back({which, v.member ? "true" : "false", format_double(v.margin),
                            v.failing_subset ? v.failing_subset->to_string() : "", std::string(to_string(v.kind)),
                            vec_text(v.certificate)});
        };
        if (which == "C" || which == "B") {
            const RequirementVector q(opt.q);
            const auto s = subset_of(opt.subset, n);
            const auto v = which == "C" ? member_C(table, q, s, g) : member_B(table, q, s, g);
            report["subset"] = s.members();
            report["verdict"] = io::to_json(v);
            verdict_rows(v);
        } else if (which == "RIB" || which == "R") {
            const RequirementVector q(opt.q);
            const auto v = which == "RIB" ? member_RIB(table, q, g) : member_R(table, q, g);
            report["verdict"] = io::to_json(v);
            verdict_rows(v);
        } else if (which == "sigma") {
            const auto s = subset_payoff_ratio(table, subset_of(opt.subset, n), g);
            report["sigma"] = io::to_json(s);
            rows.push_back({"subset", "sigma", "alpha"});
            rows.push_back({s.subset.to_string(), format_double(s.sigma), vec_text(s.alpha)});
        } else if (which == "efficiency") {
            const auto b = efficiency_lower_bound(table, g);
            report["efficiency"] = io::to_json(b);
            if (b.warning) err << "warning: " << *b.warning << "\n";
            rows.push_back({"subset", "sigma", "alpha"});
            for (const auto& s : b.per_subset) rows.push_back({s.subset.to_string(), format_double(s.sigma), vec_text(s.alpha)});
        } else {
            throw ConfigError("unknown region \"" + which + "\" (expected C, B, RIB, R, sigma, efficiency)");
        }
        out << report.dump(2) << "\n";
        if (opt.json_out) io::write_text(*opt.json_out, report.dump(2) + "\n");
        if (opt.csv_out) {
            std::ostringstream csv;
            io::CsvWriter w(csv);
            for (const auto& r : rows) w.row(r);
            io::write_text(*opt.csv_out, csv.str());
        }
        return exit_ok;
    });
}

namespace {

struct RunSummary {
    std::string run_id;
    SimReport report;
    ExcessBalance excess;
    std::optional<IfiStats> ifi;
};

Json run_json(const RunSummary& run, const RequirementVector& q, const WeightVector& w) {
    Json j;
    j["run_id"] = run.run_id;
    j["periods"] = run.report.periods;
    j["warmup"] = run.report.warmup;
    Json users = Json::array();
    for (std::size_t i = 0; i < run.report.users; ++i) {
        Json u;
        u["user"] = i;
        u["q"] = q[i];
        u["w"] = w[i];
        u["p_hat"] = run.report.p_hat[i];
        u["excess"] = run.excess.values[i];
        u["max_deficit"] = run.report.max_deficit[i];
        u["final_deficit"] = run.report.final_deficit[i];
        if (run.report.unit_payoffs) u["failures"] = run.report.failures[i].size();
        if (run.ifi && run.ifi->users[i]) {
            u["ifi_sd"] = run.ifi->users[i]->sample_sd;
            u["benchmark_sd"] = run.ifi->users[i]->benchmark_sd;
            u["sd_ratio"] = run.ifi->users[i]->sd_ratio;
        } else {
            u["sd_ratio"] = nullptr;
        }
        users.push_back(u);
    }
    j["users"] = users;
    j["excess_spread"] = run.excess.spread;
    Json hist = Json::array();
    for (std::size_t r = 0; r < run.report.decision_histogram.size(); ++r) {
        if (run.report.decision_histogram[r] == 0) continue;
        hist.push_back({{"decision", decision_at(run.report.users, r).order()}, {"count", run.report.decision_histogram[r]}});
    }
    j["decision_histogram"] = hist;
    return j;
}

void run_rows(io::CsvWriter& csv, const RunSummary& run, const RequirementVector& q, const WeightVector& w) {
    for (std::size_t i = 0; i < run.report.users; ++i) {
        const bool has_ifi = run.ifi && run.ifi->users[i];
        csv.row({run.run_id, std::to_string(i), format_double(q[i]), format_double(w[i]), format_double(run.report.p_hat[i]),
                 format_double(run.excess.values[i]), has_ifi ? format_double(run.ifi->users[i]->sd_ratio) : "",
                 format_double(run.report.max_deficit[i])});
    }
}

RunSummary summarize(std::string run_id, SimReport report, const RequirementVector& q, const WeightVector& w) {
    RunSummary s{std::move(run_id), std::move(report), {}, std::nullopt};
    s.excess = excess_balance(s.report, q, w);
    if (s.report.unit_payoffs) s.ifi = ifi_stats(s.report);
    return s;
}

WeightVector policy_weights(const PolicySpec& spec, std::size_t n) {
    if (const auto* w = std::get_if<WldfSpec>(&spec)) return w->w;
    if (const auto* h = std::get_if<HldfSpec>(&spec)) return h->w;
    return WeightVector::ones(n);
}

}  // namespace

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto cfg = io::load_experiment(opt.config);
        if (opt.seed) cfg.sim.seed = *opt.seed;
        if (opt.periods) cfg.sim.periods = *opt.periods;
        if (opt.warmup) cfg.sim.warmup = *opt.warmup;
        if (cfg.sim.periods <= cfg.sim.warmup) {
            throw ConfigError("periods must exceed warmup (got " + std::to_string(cfg.sim.periods) + " <= " +
                              std::to_string(cfg.sim.warmup) + ")");
        }
        const std::size_t n = users(cfg.model.model);
        std::string policy_text = cfg.policy;
        if (policy_text == "wldf" && cfg.w) {
            policy_text = "wldf:";
            for (std::size_t i = 0; i < n; ++i) policy_text += (i ? "," : "") + format_double((*cfg.w)[i]);
        }
        auto spec = parse_policy(policy_text, n);
        const WeightVector w = cfg.w ? WeightVector(*cfg.w) : policy_weights(spec, n);
        std::optional<ExpectedPayoffTable> table;
        if (std::holds_alternative<MwSpec>(spec)) table = expected_payoffs(cfg.model.model, cfg.model.estimation);
        const Policy policy(spec, n, std::move(table));
        const RequirementVector q(cfg.q);

        std::vector<SimReport> reports;
        if (cfg.replications == 1) reports.push_back(simulate(cfg.model.model, policy, q, cfg.sim));
        else reports = kernels::run_replications_parallel(cfg.model.model, policy, q, cfg.sim, cfg.replications);

        std::ostringstream csv_text;
        io::CsvWriter csv(csv_text);
        csv.row({"run_id", "user", "q", "w", "p_hat", "excess", "sd_ratio", "max_deficit"});
        Json report;
        report["policy"] = to_string(spec);
        report["mode"] = std::string(to_string(cfg.sim.mode));
        report["tie_break"] = cfg.sim.random_ties ? "random" : "lowest_index";
        report["seed"] = cfg.sim.seed;
        report["replications"] = cfg.replications;
        Json runs = Json::array();

        std::ostringstream traj_text;
        io::CsvWriter traj(traj_text);
        if (cfg.sim.record_trajectory) {
            std::vector<std::string> header{"run_id", "t"};
            for (std::size_t i = 0; i < n; ++i) header.push_back("x" + std::to_string(i));
            traj.row(header);
        }

        out << "policy " << to_string(spec) << ", " << to_string(cfg.sim.mode) << " deficits, T=" << cfg.sim.periods
            << ", seed=" << cfg.sim.seed << "\n";
        for (std::size_t k = 0; k < reports.size(); ++k) {
            const std::string run_id = cfg.replications == 1 ? cfg.run_id : cfg.run_id + "-" + std::to_string(k);
            for (std::size_t t = 0; t < reports[k].trajectory.size(); ++t) {
                std::vector<std::string> row{run_id, std::to_string(t + 1)};
                for (double x : reports[k].trajectory[t]) row.push_back(format_double(x));
                traj.row(row);
            }
            const auto run = summarize(run_id, std::move(reports[k]), q, w);
            run_rows(csv, run, q, w);
            runs.push_back(run_json(run, q, w));
            out << run_id << "\n";
            out << "  user  q       w       p_hat   excess   sd_ratio\n";
            for (std::size_t i = 0; i < n; ++i) {
                const bool has_ifi = run.ifi && run.ifi->users[i];
                out << "  " << std::setw(4) << std::left << i << "  " << std::setw(6) << fixed(q[i], 3) << "  "
                    << std::setw(6) << format_double(w[i]) << "  " << fixed(run.report.p_hat[i]) << "  "
                    << std::setw(7) << fixed(run.excess.values[i]) << "  " << (has_ifi ? fixed(run.ifi->users[i]->sd_ratio, 3) : "-")
                    << std::right << "\n";
            }
            out << "  excess spread " << fixed(run.excess.spread) << "\n";
        }
        report["runs"] = runs;
        io::write_text(opt.outdir / (cfg.run_id + ".csv"), csv_text.str());
        io::write_text(opt.outdir / (cfg.run_id + ".json"), report.dump(2) + "\n");
        if (cfg.sim.record_trajectory) io::write_text(opt.outdir / (cfg.run_id + "_trajectory.csv"), traj_text.str());
        return exit_ok;
    });
}

namespace {

struct Check {
    std::string name;
    double observed;
    double target;
    double tolerance;
    bool pass;
};

struct StudyRun {
    std::vector<double> w;
    SimReport report;
    ExcessBalance excess;
    IfiStats ifi;
};

SingleResourceModel study_model(bool shape_rate) {
    auto gamma = [&](double a, double b) { return Gamma{a, shape_rate ? 1.0 / b : b}; };
    return SingleResourceModel(10.0, {gamma(12, 0.5), gamma(4, 1), gamma(10, 0.1)});
}

StudyRun run_study(const SingleResourceModel& model, std::vector<double> w, std::uint64_t seed,
                         std::size_t periods) {
    const RequirementVector q({0.8, 0.6, 0.4});
    const WeightVector weights(w);
    const Policy policy(WldfSpec{weights}, 3);
    SimConfig cfg;
    cfg.periods = periods;
    cfg.seed = seed;
    cfg.mode = DeficitMode::signed_;
    StudyRun run{std::move(w), simulate(PayoffModel(model), policy, q, cfg), {}, {}};
    run.excess = excess_balance(run.report, q, weights);
    run.ifi = ifi_stats(run.report);
    return run;
}

std::string weights_label(const std::vector<double>& w) {
    std::string out = "(";
    for (std::size_t i = 0; i < w.size(); ++i) out += (i ? "," : "") + format_double(w[i]);
    return out + ")";
}

}  // namespace

int cmd_reproduce_paper(const ReproduceOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        std::vector<Check> checks;
        Json report;
        report["seed"] = opt.seed;
        report["periods"] = opt.periods;

        // two-user deterministic example, exact
        const std::size_t t5 = 10000;
        const auto trace = oracle::replay_two_user(t5);
        const std::array<double, 2> target_trunc{0.5, 0.5}, target_signed{0.3, 0.7};
        std::ostringstream s5;
        io::CsvWriter s5csv(s5);
        s5csv.row({"mode", "user", "p_hat", "p_hat_exact", "library_p_hat", "target", "abs_error", "pass"});
        const auto s5_model = PayoffModel(oracle::two_user_model());
        const RequirementVector s5_q({0.1, 0.5});
        const Policy ldf(WldfSpec{WeightVector::ones(2)}, 2);
        Json s5json = Json::array();
        for (int m = 0; m < 2; ++m) {
            const bool is_signed = m == 1;
            SimConfig cfg;
            cfg.periods = t5;
            cfg.seed = opt.seed;
            cfg.mode = is_signed ? DeficitMode::signed_ : DeficitMode::truncated;
            const auto lib = simulate(s5_model, ldf, s5_q, cfg);
            const auto& exact = is_signed ? trace.p_hat_signed : trace.p_hat_truncated;
            const auto& target = is_signed ? target_signed : target_trunc;
            for (std::size_t i = 0; i < 2; ++i) {
                const double p = to_double(exact[i]);
                const double error = std::abs(p - target[i]);
                const bool pass = error <= 1e-3 && std::abs(lib.p_hat[i] - p) <= 1e-12;
                const std::string mode = is_signed ? "signed" : "truncated";
                checks.push_back({"two-user " + mode + " p_hat[" + std::to_string(i) + "]", p, target[i], 1e-3, pass});
                s5csv.row({mode, std::to_string(i), format_double(p), to_string(exact[i]), format_double(lib.p_hat[i]),
                           format_double(target[i]), format_double(error), pass ? "true" : "false"});
                s5json.push_back({{"mode", mode}, {"user", i}, {"p_hat", p}, {"p_hat_exact", to_string(exact[i])},
                                  {"library_p_hat", lib.p_hat[i]}, {"target", target[i]}, {"pass", pass}});
            }
        }
        bool periodic = true;
        for (std::size_t t = 1; t + 2 < trace.truncated.size(); ++t) periodic = periodic && trace.truncated[t] == trace.truncated[t + 2];
        checks.push_back({"two-user truncated trajectory has period 2", periodic ? 1.0 : 0.0, 1.0, 0.0, periodic});
        report["two_user"] = s5json;

        // single-resource study
        const std::vector<double> w1{1, 1, 1}, w10{10, 1, 1};
        const std::vector<double> p1{0.85, 0.65, 0.45}, p10{0.809, 0.69, 0.49};
        const std::vector<double> sd1{0.88, 0.77, 0.92}, sd10{0.39, 0.97, 1.07};
        auto payoffs_pass = [&](const StudyRun& run, const std::vector<double>& target, double spread_tol) {
            bool ok = run.excess.spread < spread_tol;
            for (std::size_t i = 0; i < 3; ++i) ok = ok && std::abs(run.report.p_hat[i] - target[i]) <= 0.02;
            return ok;
        };
        std::string parameterization = "shape/scale";
        auto r1 = run_study(study_model(false), w1, opt.seed, opt.periods);
        auto r10 = run_study(study_model(false), w10, opt.seed, opt.periods);
        Json alt = nullptr;
        if (!payoffs_pass(r1, p1, 0.02) && !payoffs_pass(r10, p10, 0.03)) {
            auto a1 = run_study(study_model(true), w1, opt.seed, opt.periods);
            auto a10 = run_study(study_model(true), w10, opt.seed, opt.periods);
            alt = {{"shape_rate_passes_w1", payoffs_pass(a1, p1, 0.02)}, {"shape_rate_passes_w10", payoffs_pass(a10, p10, 0.03)}};
            if (payoffs_pass(a1, p1, 0.02) || payoffs_pass(a10, p10, 0.03)) {
                parameterization = "shape/rate";
                r1 = std::move(a1);
                r10 = std::move(a10);
            }
        }
        report["gamma_parameterization"] = parameterization;
        report["shape_rate_rerun"] = alt;

        std::ostringstream t2, t3;
        io::CsvWriter t2csv(t2), t3csv(t3);
        t2csv.row({"parameterization", "w", "user", "q", "p_hat", "target", "abs_error", "excess", "pass"});
        t3csv.row({"parameterization", "w", "user", "failures", "ifi_sd", "benchmark_sd", "sd_ratio", "target", "abs_error", "pass"});
        const std::vector<double> q{0.8, 0.6, 0.4};
        Json runs = Json::array();
        for (const auto* run : {&r1, &r10}) {
            const bool heavy = run->w[0] == 10;
            const auto& pt = heavy ? p10 : p1;
            const auto& st = heavy ? sd10 : sd1;
            const std::string label = weights_label(run->w);
            Json rj;
            rj["w"] = run->w;
            rj["p_hat"] = run->report.p_hat;
            rj["excess"] = run->excess.values;
            rj["excess_spread"] = run->excess.spread;
            std::vector<Json> ratios;
            for (std::size_t i = 0; i < 3; ++i) {
                const double p = run->report.p_hat[i];
                const bool pass = std::abs(p - pt[i]) <= 0.02;
                checks.push_back({"wldf payoff w=" + label + " p_hat[" + std::to_string(i) + "]", p, pt[i], 0.02, pass});
                t2csv.row({parameterization, label, std::to_string(i), format_double(q[i]), format_double(p), format_double(pt[i]),
                           format_double(std::abs(p - pt[i])), format_double(run->excess.values[i]), pass ? "true" : "false"});
            }
            const double spread_tol = heavy ? 0.03 : 0.02;
            checks.push_back({"wldf payoff w=" + label + " excess spread", run->excess.spread, 0.0, spread_tol,
                              run->excess.spread < spread_tol});
            for (std::size_t i = 0; i < 3; ++i) {
                const auto& u = run->ifi.users[i];
                const double ratio = u ? u->sd_ratio : std::nan("");
                const bool pass = u && std::abs(ratio - st[i]) <= 0.10;
                checks.push_back({"ifi w=" + label + " sd_ratio[" + std::to_string(i) + "]", ratio, st[i], 0.10, pass});
                t3csv.row({parameterization, label, std::to_string(i), std::to_string(run->report.failures[i].size()),
                           u ? format_double(u->sample_sd) : "", u ? format_double(u->benchmark_sd) : "", format_double(ratio),
                           format_double(st[i]), format_double(std::abs(ratio - st[i])), pass ? "true" : "false"});
                ratios.push_back(u ? Json(ratio) : Json(nullptr));
            }
            rj["sd_ratio"] = ratios;
            runs.push_back(rj);
        }
        report["single_resource"] = runs;

        auto ratio = [](const StudyRun& r, std::size_t i) { return r.ifi.users[i] ? r.ifi.users[i]->sd_ratio : std::nan(""); };
        const double d0 = ratio(r10, 0) - ratio(r1, 0);
        checks.push_back({"ifi raising user 0 weight lowers user 0 sd_ratio", d0, 0.0, 0.0, d0 < 0});
        for (std::size_t i = 1; i < 3; ++i) {
            const double d = ratio(r10, i) - ratio(r1, i);
            checks.push_back({"ifi raising user 0 weight does not lower user " + std::to_string(i) + " sd_ratio", d, 0.0, 0.0, d >= 0});
        }

        std::ostringstream sum;
        io::CsvWriter sumcsv(sum);
        sumcsv.row({"check", "observed", "target", "tolerance", "pass"});
        Json checks_json = Json::array();
        bool all_pass = true;
        out << "seed " << opt.seed << ", T=" << opt.periods << ", gamma parameterization " << parameterization << "\n";
        for (const auto& c : checks) {
            all_pass = all_pass && c.pass;
            sumcsv.row({c.name, format_double(c.observed), format_double(c.target), format_double(c.tolerance), c.pass ? "true" : "false"});
            checks_json.push_back({{"check", c.name}, {"observed", io::number_or_null(c.observed)}, {"target", c.target},
                                   {"tolerance", c.tolerance}, {"pass", c.pass}});
            out << (c.pass ? "PASS  " : "FAIL  ") << c.name << ": observed " << format_double(c.observed) << ", target "
                << format_double(c.target) << " +/- " << format_double(c.tolerance) << "\n";
        }
        report["checks"] = checks_json;
        report["all_pass"] = all_pass;

        io::write_text(opt.outdir / "two_user.csv", s5.str());
        io::write_text(opt.outdir / "wldf_payoffs.csv", t2.str());
        io::write_text(opt.outdir / "ifi_sd_ratio.csv", t3.str());
        io::write_text(opt.outdir / "summary.csv", sum.str());
        io::write_text(opt.outdir / "report.json", report.dump(2) + "\n");
        out << (all_pass ? "all checks passed" : "some checks failed") << "; results in " << opt.outdir.string() << "\n";
        return all_pass ? exit_ok : exit_acceptance_failure;
    });
}

}  // namespace ldf::cli
