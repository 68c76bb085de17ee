#include <ldf/policy.hpp>

#include <charconv>
#include <limits>
#include <cmath>
#include <numeric>

namespace ldf {

std::string_view to_string(DeficitMode mode) { return mode == DeficitMode::truncated ? "truncated" : "signed"; }

DeficitMode parse_deficit_mode(std::string_view text) {
    if (text == "truncated") return DeficitMode::truncated;
    if (text == "signed") return DeficitMode::signed_;
    throw ConfigError("deficit mode must be \"truncated\" or \"signed\", got \"" + std::string(text) + "\"");
}

RequirementVector::RequirementVector(std::vector<double> q) : q_(std::move(q)) {
    for (double v : q_) {
        if (!std::isfinite(v) || v < 0) throw DomainError("requirements must be finite and nonnegative");
    }
}

std::vector<Rational> RequirementVector::exact() const {
    std::vector<Rational> out;
    out.reserve(q_.size());
    for (double v : q_) out.push_back(rational_from_double(v));
    return out;
}

WeightVector::WeightVector(std::vector<double> w) : w_(std::move(w)) {
    for (double v : w_) {
        if (!std::isfinite(v) || v <= 0) throw DomainError("weights must be finite and strictly positive");
    }
}

ClassPartition::ClassPartition(std::vector<std::vector<std::size_t>> classes, std::size_t n)
    : classes_(std::move(classes)), n_(n) {
    std::vector<bool> seen(n, false);
    std::size_t covered = 0;
    for (const auto& c : classes_) {
        if (c.empty()) throw DomainError("class partition has an empty class");
        for (auto u : c) {
            if (u >= n) throw DomainError("class member " + std::to_string(u) + " is not a user");
            if (seen[u]) throw DomainError("user " + std::to_string(u) + " appears in two classes");
            seen[u] = true;
            ++covered;
        }
    }
    if (covered != n) throw DomainError("class partition does not cover every user");
}

ClassPartition ClassPartition::singletons(std::size_t n) {
    std::vector<std::vector<std::size_t>> classes;
    for (std::size_t i = 0; i < n; ++i) classes.push_back({i});
    return ClassPartition(std::move(classes), n);
}

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = text.find(sep, start);
        out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

template <class T>
T parse_number(std::string_view text, std::string_view what) {
    text = trim(text);
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError("cannot parse " + std::string(what) + " \"" + std::string(text) + "\"");
    }
    return value;
}

std::vector<double> parse_weights(std::string_view text, std::size_t n) {
    std::vector<double> w;
    for (auto part : split(text, ',')) w.push_back(parse_number<double>(part, "weight"));
    if (w.size() != n) {
        throw ConfigError("policy weights have " + std::to_string(w.size()) + " entries, expected n = " +
                          std::to_string(n));
    }
    for (double v : w) {
        if (!(v > 0) || !std::isfinite(v)) throw ConfigError("policy weights must be strictly positive");
    }
    return w;
}

}  // namespace

ClassPartition ClassPartition::parse(std::string_view text, std::size_t n) {
    text = trim(text);
    if (!text.empty() && text.front() == '[') {
        if (text.back() != ']') throw ConfigError("unbalanced brackets in class partition");
        text = text.substr(1, text.size() - 2);
    }
    std::vector<std::vector<std::size_t>> classes;
    for (auto group : split(text, '|')) {
        std::vector<std::size_t> members;
        for (auto part : split(group, ',')) members.push_back(parse_number<std::size_t>(part, "class member"));
        classes.push_back(std::move(members));
    }
    try {
        return ClassPartition(std::move(classes), n);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

std::string ClassPartition::to_string() const {
    std::string out = "[";
    for (std::size_t c = 0; c < classes_.size(); ++c) {
        if (c) out += "|";
        for (std::size_t k = 0; k < classes_[c].size(); ++k) {
            if (k) out += ",";
            out += std::to_string(classes_[c][k]);
        }
    }
    return out + "]";
}

std::size_t TieBreak::pick(std::size_t count) {
    if (count <= 1 || !rng_) return 0;
    return std::uniform_int_distribution<std::size_t>(0, count - 1)(*rng_);
}

namespace {

// Orders `items` by descending key. Keys within `tol` of the current maximum
// form a tie cluster; the tie-break picks among them in item order.
std::vector<std::size_t> order_by_key(std::vector<std::size_t> items, const std::vector<double>& key, TieBreak& tb,
                                      double tol) {
    std::vector<std::size_t> out;
    out.reserve(items.size());
    std::vector<std::size_t> tied;
    while (!items.empty()) {
        double best = key[items.front()];
        for (auto it : items) best = std::max(best, key[it]);
        tied.clear();
        for (std::size_t k = 0; k < items.size(); ++k) {
            if (key[items[k]] >= best - tol) tied.push_back(k);
        }
        const std::size_t k = tied[tb.pick(tied.size())];
        out.push_back(items[k]);
        items.erase(items.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return out;
}

std::vector<std::size_t> iota_vector(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

}  // namespace

PriorityDecision select_wldf(const DeficitState& state, const WeightVector& w, TieBreak& tb, double tol) {
    const std::size_t n = state.x.size();
    if (w.size() != n) throw DomainError("weight and deficit lengths differ");
    std::vector<double> key(n);
    for (std::size_t i = 0; i < n; ++i) key[i] = w[i] * state.x[i];
    return PriorityDecision(order_by_key(iota_vector(n), key, tb, tol));
}

PriorityDecision select_wldf(const ExactDeficitState& state, std::span<const Rational> w) {
    const std::size_t n = state.x.size();
    if (w.size() != n) throw DomainError("weight and deficit lengths differ");
    std::vector<Rational> key(n);
    for (std::size_t i = 0; i < n; ++i) key[i] = w[i] * state.x[i];
    auto order = iota_vector(n);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
    return PriorityDecision(std::move(order));
}

std::size_t select_mw_rank(std::span<const double> x, const ExpectedPayoffTable& p, TieBreak& tb, double tol) {
    const std::size_t n = p.users();
    if (x.size() != n) throw DomainError("deficit and payoff table lengths differ");
    const std::size_t count = p.decisions();
    std::vector<double> score(count, 0.0);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < count; ++r) {
        const auto row = p.row(r);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i] * row[i];
        score[r] = s;
        best = std::max(best, s);
    }
    std::vector<std::size_t> tied;
    for (std::size_t r = 0; r < count; ++r) {
        if (score[r] >= best - tol) tied.push_back(r);
    }
    return tied[tb.pick(tied.size())];
}

PriorityDecision select_mw(const DeficitState& state, const ExpectedPayoffTable& p, TieBreak& tb, double tol) {
    return decision_at(p.users(), select_mw_rank(state.x, p, tb, tol));
}

PriorityDecision select_hldf(const DeficitState& state, const ClassPartition& classes, const WeightVector& w,
                             TieBreak& tb, double tol) {
    const std::size_t n = state.x.size();
    if (w.size() != n || classes.users() != n) throw DomainError("class partition, weight and deficit lengths differ");
    std::vector<double> key(n);
    for (std::size_t i = 0; i < n; ++i) key[i] = w[i] * state.x[i];
    const auto& groups = classes.classes();
    std::vector<double> aggregate(groups.size(), 0.0);
    for (std::size_t c = 0; c < groups.size(); ++c) {
        for (auto u : groups[c]) aggregate[c] += key[u];
    }
    std::vector<std::size_t> order;
    order.reserve(n);
    for (auto c : order_by_key(iota_vector(groups.size()), aggregate, tb, tol)) {
        auto members = groups[c];
        std::sort(members.begin(), members.end());
        for (auto u : order_by_key(members, key, tb, tol)) order.push_back(u);
    }
    return PriorityDecision(std::move(order));
}

PolicySpec parse_policy(std::string_view text, std::size_t n) {
    text = trim(text);
    if (text == "mw") return MwSpec{};
    if (text == "ldf") return WldfSpec{WeightVector::ones(n)};
    if (text.starts_with("wldf:")) return WldfSpec{WeightVector(parse_weights(text.substr(5), n))};
    if (text.starts_with("hldf:")) {
        auto rest = text.substr(5);
        std::string_view classes_text = rest;
        std::string_view weights_text;
        if (rest.starts_with("[")) {
            auto close = rest.find(']');
            if (close == std::string_view::npos) throw ConfigError("unbalanced brackets in policy \"" + std::string(text) + "\"");
            classes_text = rest.substr(0, close + 1);
            weights_text = rest.substr(close + 1);
            if (!weights_text.empty()) {
                if (weights_text.front() != ':') throw ConfigError("expected ':' after class partition");
                weights_text.remove_prefix(1);
            }
        } else if (auto colon = rest.find(':'); colon != std::string_view::npos) {
            classes_text = rest.substr(0, colon);
            weights_text = rest.substr(colon + 1);
        }
        auto classes = ClassPartition::parse(classes_text, n);
        auto w = weights_text.empty() ? WeightVector::ones(n) : WeightVector(parse_weights(weights_text, n));
        return HldfSpec{std::move(classes), std::move(w)};
    }
    if (text.starts_with("static:")) {
        auto body = trim(text.substr(7));
        if (body.starts_with("(") && body.ends_with(")")) body = body.substr(1, body.size() - 2);
        std::vector<std::size_t> order;
        for (auto part : split(body, ',')) order.push_back(parse_number<std::size_t>(part, "decision entry"));
        if (order.size() != n) throw ConfigError("static decision length does not match n = " + std::to_string(n));
        try {
            return StaticSpec{PriorityDecision(std::move(order))};
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
    }
    throw ConfigError("unknown policy \"" + std::string(text) + "\" (expected mw, ldf, wldf:..., hldf:..., static:...)");
}

namespace {

std::string join_weights(const WeightVector& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += ",";
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof buf, w[i]);
        out.append(buf, res.ptr);
    }
    return out;
}

}  // namespace

std::string to_string(const PolicySpec& spec) {
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, MwSpec>) return "mw";
            else if constexpr (std::is_same_v<T, WldfSpec>) return "wldf:" + join_weights(s.w);
            else if constexpr (std::is_same_v<T, HldfSpec>) return "hldf:" + s.classes.to_string() + ":" + join_weights(s.w);
            else {
                auto d = s.d.to_string();
                return "static:" + d.substr(1, d.size() - 2);
            }
        },
        spec);
}

Policy::Policy(PolicySpec spec, std::size_t n, std::optional<ExpectedPayoffTable> table)
    : spec_(std::move(spec)), n_(n), table_(std::move(table)) {
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, MwSpec>) {
                if (!table_) throw DomainError("the MW policy needs an expected payoff table");
                if (table_->users() != n_) throw DomainError("MW table size does not match n");
            } else if constexpr (std::is_same_v<T, WldfSpec>) {
                if (s.w.size() != n_) throw DomainError("weight vector length does not match n");
            } else if constexpr (std::is_same_v<T, HldfSpec>) {
                if (s.w.size() != n_ || s.classes.users() != n_) throw DomainError("hierarchical policy does not match n");
            } else {
                if (s.d.size() != n_) throw DomainError("static decision length does not match n");
                static_rank_ = decision_rank(s.d);
            }
        },
        spec_);
}

PriorityDecision Policy::select(const DeficitState& state, TieBreak& tb) const {
    return std::visit(
        [&](const auto& s) -> PriorityDecision {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, MwSpec>) return select_mw(state, *table_, tb);
            else if constexpr (std::is_same_v<T, WldfSpec>) return select_wldf(state, s.w, tb);
            else if constexpr (std::is_same_v<T, HldfSpec>) return select_hldf(state, s.classes, s.w, tb);
            else return s.d;
        },
        spec_);
}

std::size_t Policy::select_rank(const DeficitState& state, TieBreak& tb) const {
    if (std::holds_alternative<MwSpec>(spec_)) return select_mw_rank(state.x, *table_, tb);
    if (std::holds_alternative<StaticSpec>(spec_)) return static_rank_;
    return decision_rank(select(state, tb));
}

}  // namespace ldf
