#include <ldf/oracle.hpp>

#include <ldf/errors.hpp>
#include <ldf/kernels.hpp>
#include <ldf/rng.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace ldf::oracle {

ExpectedPayoffTable brute_expected_payoffs(const TablePayoffModel& model) {
    const std::size_t n = model.users();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<Rational> out;
    std::size_t k = 0;
    do {
        std::vector<Rational> mean(n, Rational(0));
        for (const auto& atom : model.distribution(k)) {
            for (std::size_t i = 0; i < n; ++i) mean[i] += atom.probability * atom.payoff[i];
        }
        out.insert(out.end(), mean.begin(), mean.end());
        ++k;
    } while (std::next_permutation(order.begin(), order.end()));
    return ExpectedPayoffTable(n, std::move(out));
}

TablePayoffModel two_user_model() {
    return TablePayoffModel::point_mass(2, {{Rational(1), Rational(0)}, {Rational(0), Rational(1)}});
}

TablePayoffModel bernoulli_table(std::size_t n, const std::vector<std::vector<Rational>>& p) {
    std::vector<std::vector<PayoffAtom>> dist;
    for (const auto& row : p) {
        if (row.size() != n) throw DomainError("Bernoulli table row has the wrong length");
        std::vector<PayoffAtom> atoms;
        for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
            PayoffAtom atom{Rational(1), std::vector<Rational>(n, Rational(0))};
            for (std::size_t i = 0; i < n; ++i) {
                const bool success = (mask >> i) & 1U;
                atom.probability *= success ? row[i] : Rational(1) - row[i];
                if (success) atom.payoff[i] = 1;
            }
            if (atom.probability != 0) atoms.push_back(std::move(atom));
        }
        dist.push_back(std::move(atoms));
    }
    return TablePayoffModel(n, std::move(dist));
}

namespace {

Rational draw_fraction(RngStream& rng, int lo, int hi, int denominator) {
    const int k = std::uniform_int_distribution<int>(lo, hi)(rng);
    return Rational(k, denominator);
}

void require_generator_size(std::size_t n) {
    if (n == 0) throw DomainError("user count must be at least 1");
    if (n > kDefaultGeometryCap) throw CapacityError("table generator for n = " + std::to_string(n), kDefaultGeometryCap);
}

// Payoff row for each decision from a per-user function of the set above it.
std::vector<std::vector<Rational>> rows_from(std::size_t n,
                                             const std::function<Rational(std::size_t, std::uint32_t)>& payoff) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::vector<Rational>> rows;
    do {
        std::vector<Rational> row(n);
        std::uint32_t above = 0;
        for (auto u : order) {
            row[u] = payoff(u, above);
            above |= 1U << u;
        }
        rows.push_back(std::move(row));
    } while (std::next_permutation(order.begin(), order.end()));
    return rows;
}

}  // namespace

TablePayoffModel gen_monotone_table(std::size_t n, std::uint64_t seed, bool enforce_equivalence) {
    require_generator_size(n);
    RngStream rng(seed, Stream::generator, {n, enforce_equivalence ? 1U : 0U});
    const std::uint32_t subsets = 1U << n;

    if (!enforce_equivalence) {
        // g_i(A) = min over B subset of A of h_i(B) is nonincreasing in A
        std::vector<std::vector<Rational>> g(n, std::vector<Rational>(subsets));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::uint32_t a = 0; a < subsets; ++a) {
                if ((a >> i) & 1U) continue;
                g[i][a] = draw_fraction(rng, 1, 20, 20);
            }
            for (std::uint32_t a = 0; a < subsets; ++a) {
                if ((a >> i) & 1U) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    if ((a >> j) & 1U) g[i][a] = std::min(g[i][a], g[i][a & ~(1U << j)]);
                }
            }
        }
        return bernoulli_table(n, rows_from(n, [&](std::size_t u, std::uint32_t above) { return g[u][above]; }));
    }

    // F(A) = sum_{i in A} e_i + sum_k c_k min(cap_k, sum_{i in A} a_ik) is
    // submodular, so marginal gains shrink as A grows. With p_i(d) =
    // m(i | S_i(d)) / beta_i the beta-weighted sum over any prefix S
    // telescopes to F(S) whatever the order inside it.
    const std::size_t terms = 2;
    std::vector<Rational> e(n), beta(n), c(terms), cap(terms);
    std::vector<std::vector<Rational>> a(terms, std::vector<Rational>(n));
    for (auto& v : e) v = draw_fraction(rng, 1, 5, 10);
    for (auto& v : beta) v = draw_fraction(rng, 1, 4, 2);
    for (std::size_t k = 0; k < terms; ++k) {
        c[k] = draw_fraction(rng, 1, 10, 10);
        for (auto& v : a[k]) v = draw_fraction(rng, 0, 4, 2);
        cap[k] = draw_fraction(rng, 1, static_cast<int>(2 * n), 2);
    }
    auto f = [&](std::uint32_t set) {
        Rational total(0);
        for (std::size_t i = 0; i < n; ++i) {
            if ((set >> i) & 1U) total += e[i];
        }
        for (std::size_t k = 0; k < terms; ++k) {
            Rational load(0);
            for (std::size_t i = 0; i < n; ++i) {
                if ((set >> i) & 1U) load += a[k][i];
            }
            total += c[k] * std::min(cap[k], load);
        }
        return total;
    };
    auto rows = rows_from(n, [&](std::size_t u, std::uint32_t above) {
        return (f(above | (1U << u)) - f(above)) / beta[u];
    });
    Rational top(0);
    for (const auto& row : rows) {
        for (const auto& v : row) top = std::max(top, v);
    }
    for (auto& row : rows) {
        for (auto& v : row) v /= top;
    }
    return bernoulli_table(n, rows);
}

TablePayoffModel gen_random_table(std::size_t n, std::uint64_t seed) {
    require_generator_size(n);
    RngStream rng(seed, Stream::generator, {n, 2});
    std::vector<std::vector<Rational>> rows(factorial(n), std::vector<Rational>(n));
    for (auto& row : rows) {
        for (auto& v : row) v = draw_fraction(rng, 1, 20, 20);
    }
    return bernoulli_table(n, rows);
}

std::size_t mw_argmax(std::span<const double> x, const ExpectedPayoffTable& p, double tol) {
    const std::size_t n = p.users();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> scores;
    do {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i] * p.values()[scores.size() * n + i];
        scores.push_back(s);
    } while (std::next_permutation(order.begin(), order.end()));
    const double best = *std::max_element(scores.begin(), scores.end());
    for (std::size_t k = 0; k < scores.size(); ++k) {
        if (scores[k] >= best - tol) return k;
    }
    return 0;
}

namespace {

class RatioObjective {
public:
    RatioObjective(const ExpectedPayoffTable& p, UserSubset s) : members_(s.members()) {
        const std::size_t n = p.users();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::size_t k = 0;
        do {
            // keep decisions whose first |S| slots are exactly S
            bool prefix = true;
            for (std::size_t slot = 0; slot < members_.size(); ++slot) prefix = prefix && s.contains(order[slot]);
            if (prefix) {
                std::vector<double> proj;
                for (auto i : members_) proj.push_back(p(k, i));
                points_.push_back(std::move(proj));
            }
            ++k;
        } while (std::next_permutation(order.begin(), order.end()));
    }

    std::size_t dims() const { return members_.size(); }
    const std::vector<std::size_t>& members() const { return members_; }

    double operator()(const std::vector<double>& alpha) const {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& pt : points_) {
            double v = 0.0;
            for (std::size_t a = 0; a < alpha.size(); ++a) v += alpha[a] * pt[a];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return hi > 0.0 ? lo / hi : 0.0;
    }

private:
    std::vector<std::size_t> members_;
    std::vector<std::vector<double>> points_;
};

double binomial(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t j = 1; j <= k; ++j) r = r * static_cast<double>(n - k + j) / static_cast<double>(j);
    return r;
}

}  // namespace

SigmaSearch sigma_grid_search(const ExpectedPayoffTable& p, UserSubset s, double step) {
    s.validate(p.users());
    if (s.empty()) throw DomainError("sigma search needs a nonempty subset");
    const RatioObjective f(p, s);
    const std::size_t k = f.dims();

    auto resolution = static_cast<std::size_t>(std::llround(1.0 / step));
    while (resolution > 4 && binomial(resolution + k - 1, k - 1) > 3e6) resolution /= 2;

    std::vector<double> best_alpha(k, 1.0 / static_cast<double>(k));
    double best = f(best_alpha);
    std::vector<std::size_t> counts(k, 0);
    std::vector<double> alpha(k);
    std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t slot, std::size_t left) {
        if (slot + 1 == k) {
            counts[slot] = left;
            for (std::size_t a = 0; a < k; ++a) alpha[a] = static_cast<double>(counts[a]) / static_cast<double>(resolution);
            const double v = f(alpha);
            if (v > best) {
                best = v;
                best_alpha = alpha;
            }
            return;
        }
        for (std::size_t c = 0; c <= left; ++c) {
            counts[slot] = c;
            walk(slot + 1, left - c);
        }
    };
    walk(0, resolution);

    // pattern search moving mass between coordinates
    double h = 1.0 / static_cast<double>(resolution);
    for (int iter = 0; iter < 200000 && h > 1e-8; ++iter) {
        bool moved = false;
        for (std::size_t a = 0; a < k && !moved; ++a) {
            for (std::size_t b = 0; b < k && !moved; ++b) {
                if (a == b || best_alpha[b] < h) continue;
                auto trial = best_alpha;
                trial[a] += h;
                trial[b] -= h;
                const double v = f(trial);
                if (v > best + 1e-15) {
                    best = v;
                    best_alpha = trial;
                    moved = true;
                }
            }
        }
        if (!moved) h /= 2.0;
    }

    SigmaSearch out;
    out.sigma = best;
    out.alpha.assign(p.users(), 0.0);
    for (std::size_t a = 0; a < k; ++a) out.alpha[f.members()[a]] = best_alpha[a];
    return out;
}

TwoUserTrace replay_two_user(std::size_t periods) {
    if (periods < 10) throw DomainError("the replay needs at least 10 periods");
    const std::array<Rational, 2> q{Rational(1, 10), Rational(1, 2)};
    TwoUserTrace out;
    for (int signed_mode = 0; signed_mode < 2; ++signed_mode) {
        std::array<Rational, 2> x{Rational(0), Rational(0)};
        std::array<Rational, 2> earned{Rational(0), Rational(0)};
        auto& trace = signed_mode ? out.signed_ : out.truncated;
        for (std::size_t t = 0; t < periods; ++t) {
            // larger deficit gets the resource; ties go to user 0
            const std::size_t winner = x[0] >= x[1] ? 0 : 1;
            for (std::size_t i = 0; i < 2; ++i) {
                const Rational v = i == winner ? 1 : 0;
                earned[i] += v;
                x[i] += q[i] - v;
                if (!signed_mode && x[i] < 0) x[i] = 0;
            }
            trace.push_back(x);
        }
        auto& p_hat = signed_mode ? out.p_hat_signed : out.p_hat_truncated;
        for (std::size_t i = 0; i < 2; ++i) p_hat[i] = earned[i] / static_cast<long long>(periods);
    }
    return out;
}

ScanReport grid_scan_regions(const ExpectedPayoffTable& p, double resolution, double epsilon) {
    const std::size_t n = p.users();
    if (n > 4) throw CapacityError("grid scan on n = " + std::to_string(n) + " users", 4);
    if (!(resolution > 0)) throw DomainError("grid resolution must be positive");

    // one box [0, largest payoff]^n for every axis
    const auto per_axis = static_cast<std::size_t>(std::floor(p.max_entry() / resolution + 1e-9)) + 1;
    const std::vector<std::size_t> steps(n, per_axis);
    std::vector<std::vector<double>> points;
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        std::vector<double> q(n);
        for (std::size_t i = 0; i < n; ++i) q[i] = static_cast<double>(idx[i]) * resolution;
        points.push_back(std::move(q));
        std::size_t i = n;
        while (i > 0 && ++idx[i - 1] == steps[i - 1]) idx[--i] = 0;
        if (i == 0) break;
    }

    ScanReport report;
    report.monotone = check_monotonicity(p).holds;
    report.equivalent = check_subset_payoff_equivalence(p).holds;
    report.sandwich_checked = report.monotone;
    report.equivalence_checked = report.monotone && report.equivalent;
    if (!report.monotone) report.notes.push_back("table is not monotone: inclusion checks skipped");

    GeometryOptions opt;
    opt.first_failure_only = true;
    const auto classes = kernels::classify_points_parallel(p, points, opt);

    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& q = points[k];
        const auto& cls = classes[k];
        report.points.push_back({q, cls.c.member, cls.rib.member, cls.r.member, cls.c.margin, cls.rib.margin,
                                 cls.r.margin});
        if (report.sandwich_checked) {
            if (cls.r.member && cls.r.margin > epsilon && !cls.rib.member) {
                report.violations.push_back({q, "int(R) not in R_IB"});
                ++report.sandwich_violations;
            }
            if (cls.rib.member && cls.rib.margin > epsilon) {
                std::vector<double> shrunk(q);
                for (auto& v : shrunk) v *= 1.0 - epsilon;
                if (!member_R(p, RequirementVector(shrunk), opt).member) {
                    report.violations.push_back({q, "R_IB not in cl(R)"});
                    ++report.sandwich_violations;
                }
            }
        }
        if (report.equivalence_checked && cls.c.member && cls.c.margin > epsilon && !cls.rib.member) {
            report.violations.push_back({q, "int(C) not in R_IB"});
            ++report.equivalence_violations;
        }
    }
    return report;
}

}  // namespace ldf::oracle
