#include "analogy/model_finder.hpp"

#include "analogy/rng.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace analogy {

const char* relation_symbol(Relation r) {
    switch (r) {
        case Relation::Gt: return ">";
        case Relation::Ge: return ">=";
        case Relation::Lt: return "<";
        case Relation::Le: return "<=";
        case Relation::Eq: return "=";
    }
    return "?";
}

bool is_strict(Relation r) { return r == Relation::Gt || r == Relation::Lt; }

std::string Term::to_string() const {
    if (is_constant()) {
        std::ostringstream os;
        os << constant;
        return os.str();
    }
    std::string s = "P(" + target->to_string();
    if (given) s += " | " + given->to_string();
    return s + ")";
}

std::string ProbConstraint::to_string() const {
    std::ostringstream os;
    os << lhs.to_string() << ' ' << relation_symbol(relation) << ' ' << rhs.to_string();
    if (offset != 0.0) os << (offset > 0 ? " + " : " - ") << std::abs(offset);
    if (margin != 0.0) os << "  [margin " << margin << ']';
    return os.str();
}

namespace {

// Achieved margin from the two side values.
double achieved_margin(Relation rel, double lhs, double rhs, double offset) {
    switch (rel) {
        case Relation::Gt:
        case Relation::Ge: return lhs - (rhs + offset);
        case Relation::Lt:
        case Relation::Le: return (rhs + offset) - lhs;
        case Relation::Eq: return -std::abs(lhs - rhs - offset);
    }
    return 0.0;
}

bool margin_met(Relation rel, double achieved, double margin) {
    if (rel == Relation::Eq) return -achieved <= margin + kEvalTolerance;
    if (achieved < margin - kEvalTolerance) return false;
    return !is_strict(rel) || achieved > kEvalTolerance;
}

double hinge(Relation rel, double achieved, double margin) {
    const double v = rel == Relation::Eq ? (-achieved - margin) : (margin - achieved);
    return v > 0.0 ? v * v : 0.0;
}

std::optional<double> term_value(const JointDistribution& dist, const Term& t) {
    if (t.is_constant()) return t.constant;
    if (!t.given) return probability(dist, *t.target);
    try {
        return conditional(dist, *t.target, *t.given);
    } catch (const UndefinedConditional&) {
        return std::nullopt;
    }
}

void check_term_space(const WorldSpace& space, const Term& t, const std::string& id) {
    if (t.target && !(t.target->space() == space)) throw StructuralError("constraint '" + id + "' mixes spaces");
    if (t.given && !(t.given->space() == space)) throw StructuralError("constraint '" + id + "' mixes spaces");
}

Term rebind_term(const Term& t, const WorldSpace& space) {
    Term out = t;
    if (t.target) out.target = t.target->rebind(space);
    if (t.given) out.given = t.given->rebind(space);
    return out;
}

// Constraint set lowered to index lists over unique world sets, for the hot
// loops of the search and the grid oracle.
class Compiled {
public:
    struct TermRef {
        int num = -1;  // set index of target (& given); -1 for constants
        int den = -1;  // set index of given; -1 when unconditional
        double constant = 0.0;
    };
    struct Row {
        Relation rel;
        TermRef lhs;
        TermRef rhs;
        double offset;
        double margin;
    };

    explicit Compiled(const ConstraintSet& cs) {
        for (const auto& c : cs.constraints()) {
            rows_.push_back(Row{c.relation, lower(c.lhs), lower(c.rhs), c.offset, c.margin});
        }
    }

    [[nodiscard]] std::size_t set_count() const { return sets_.size(); }
    [[nodiscard]] const std::vector<Row>& rows() const { return rows_; }
    [[nodiscard]] const std::vector<std::vector<std::size_t>>& sets() const { return sets_; }

    template <class T>
    void masses(std::span<const T> weights, std::vector<T>& out) const {
        out.assign(sets_.size(), T{});
        for (std::size_t s = 0; s < sets_.size(); ++s) {
            T total{};
            for (std::size_t w : sets_[s]) total += weights[w];
            out[s] = total;
        }
    }

    /// Penalty with every margin raised by `slack` (equalities tightened).
    double penalty(std::span<const double> weights, double slack, double undefined_penalty,
                   std::vector<double>& scratch) const {
        masses(weights, scratch);
        double total = 0.0;
        for (const auto& r : rows_) {
            auto l = value(r.lhs, scratch);
            auto rv = value(r.rhs, scratch);
            if (!l || !rv) {
                total += undefined_penalty;
                continue;
            }
            double m = r.margin;
            if (r.rel == Relation::Eq) {
                m -= std::min(slack, 0.5 * m);
            } else {
                m += slack;
            }
            total += hinge(r.rel, achieved_margin(r.rel, *l, *rv, r.offset), m);
        }
        return total;
    }

    static std::optional<double> value(const TermRef& t, const std::vector<double>& m) {
        if (t.num < 0) return t.constant;
        const double num = std::clamp(m[static_cast<std::size_t>(t.num)], 0.0, 1.0);
        if (t.den < 0) return num;
        const double den = m[static_cast<std::size_t>(t.den)];
        if (!(den > 0.0)) return std::nullopt;
        return std::clamp(num / den, 0.0, 1.0);
    }

private:
    int intern(const WorldSet& s) {
        for (std::size_t i = 0; i < keys_.size(); ++i) {
            if (keys_[i] == s) return static_cast<int>(i);
        }
        keys_.push_back(s);
        sets_.push_back(s.indices());
        return static_cast<int>(keys_.size() - 1);
    }

    TermRef lower(const Term& t) {
        TermRef r;
        if (t.is_constant()) {
            r.constant = t.constant;
            return r;
        }
        if (t.given) {
            r.num = intern(t.target->extension().intersect(t.given->extension()));
            r.den = intern(t.given->extension());
        } else {
            r.num = intern(t.target->extension());
        }
        return r;
    }

    std::vector<WorldSet> keys_;
    std::vector<std::vector<std::size_t>> sets_;
    std::vector<Row> rows_;
};

}  // namespace

ConstraintEval evaluate(const JointDistribution& dist, const ProbConstraint& c) {
    auto l = term_value(dist, c.lhs);
    auto r = term_value(dist, c.rhs);
    if (!l || !r) return ConstraintEval{false, 0.0, false};
    const double a = achieved_margin(c.relation, *l, *r, c.offset);
    return ConstraintEval{true, a, margin_met(c.relation, a, c.margin)};
}

ConstraintSet::ConstraintSet(WorldSpace space, std::vector<ProbConstraint> constraints)
    : space_(std::move(space)), constraints_(std::move(constraints)) {
    if (constraints_.empty()) throw StructuralError("constraint set is empty");
    for (const auto& c : constraints_) {
        if (!(c.margin >= 0.0) || !std::isfinite(c.margin)) {
            throw StructuralError("constraint '" + c.id + "' has a negative or non-finite margin");
        }
        if (c.lhs.is_constant() && c.rhs.is_constant()) {
            throw StructuralError("constraint '" + c.id + "' compares two constants");
        }
        check_term_space(space_, c.lhs, c.id);
        check_term_space(space_, c.rhs, c.id);
    }
}

ConstraintSet ConstraintSet::rebind(const WorldSpace& space) const {
    std::vector<ProbConstraint> out;
    out.reserve(constraints_.size());
    for (const auto& c : constraints_) {
        ProbConstraint r = c;
        r.lhs = rebind_term(c.lhs, space);
        r.rhs = rebind_term(c.rhs, space);
        out.push_back(std::move(r));
    }
    return ConstraintSet(space, std::move(out));
}

ConstraintSet ConstraintSet::with(std::vector<ProbConstraint> extra) const {
    auto all = constraints_;
    for (auto& c : extra) all.push_back(std::move(c));
    return ConstraintSet(space_, std::move(all));
}

void SearchConfig::validate() const {
    if (max_samples < 1) throw std::invalid_argument("max_samples must be >= 1");
    if (!(penalty_tolerance > 0.0)) throw std::invalid_argument("penalty_tolerance must be > 0");
    if (!(search_slack >= 0.0)) throw std::invalid_argument("search_slack must be >= 0");
    if (!(undefined_penalty > 0.0)) throw std::invalid_argument("undefined_penalty must be > 0");
    if (pin && !(pin->value >= 0.0 && pin->value <= 1.0)) throw std::invalid_argument("pinned marginal must lie in [0, 1]");
}

JointDistribution sample_simplex(const WorldSpace& space, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> w(space.world_count());
    for (auto& x : w) x = rng.exponential();
    return JointDistribution::normalized(space, std::move(w));
}

double penalty(const JointDistribution& dist, const ConstraintSet& cs, double undefined_penalty) {
    if (!(dist.space() == cs.space())) throw StructuralError("distribution and constraint set are over different spaces");
    double total = 0.0;
    for (const auto& c : cs.constraints()) {
        const auto e = evaluate(dist, c);
        total += e.defined ? hinge(c.relation, e.achieved, c.margin) : undefined_penalty;
    }
    return total;
}

bool satisfies_all(const JointDistribution& dist, const ConstraintSet& cs) {
    return std::all_of(cs.constraints().begin(), cs.constraints().end(),
                       [&](const ProbConstraint& c) { return evaluate(dist, c).satisfied; });
}

namespace {

void renormalize(std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) total += x;
    for (double& x : w) x /= total;
}

// Derivative-free coordinate descent on the world weights. Each sweep tries
// +/- step on every coordinate (renormalizing after each move) and keeps the
// first improving move; a sweep without improvement halves the step.
void apply_pin(std::vector<double>& w, const SearchConfig& config) {
    if (config.pin) rescale_to_marginal(w, config.pin->event.extension(), config.pin->value);
}

double refine(std::vector<double>& w, const Compiled& compiled, const SearchConfig& config) {
    std::vector<double> scratch;
    double current = compiled.penalty(w, config.search_slack, config.undefined_penalty, scratch);
    double step = 0.25;
    std::vector<double> candidate;
    for (std::size_t sweep = 0; sweep < config.refine_steps && current > 0.0; ++sweep) {
        bool improved = false;
        for (std::size_t i = 0; i < w.size() && current > 0.0; ++i) {
            for (double sign : {1.0, -1.0}) {
                candidate = w;
                candidate[i] = std::max(0.0, w[i] + sign * step);
                if (candidate[i] == w[i]) continue;
                double total = 0.0;
                for (double x : candidate) total += x;
                if (!(total > 0.0)) continue;
                for (double& x : candidate) x /= total;
                apply_pin(candidate, config);
                const double p = compiled.penalty(candidate, config.search_slack, config.undefined_penalty, scratch);
                if (p < current) {
                    current = p;
                    w.swap(candidate);
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) {
            step *= 0.5;
            if (step < 1e-12) break;
        }
    }
    return current;
}

}  // namespace

FindResult find_model(const ConstraintSet& cs, const SearchConfig& config) {
    config.validate();
    const Compiled compiled(cs);
    const WorldSpace& space = cs.space();

    std::optional<JointDistribution> best;
    double best_penalty = std::numeric_limits<double>::infinity();
    std::uint64_t best_index = 0;
    std::vector<double> trace;
    trace.reserve(std::min<std::size_t>(config.max_samples, 1U << 16));

    for (std::size_t r = 0; r < config.max_samples; ++r) {
        auto start = sample_simplex(space, derive_seed(config.seed, r));
        std::vector<double> w(start.weights().begin(), start.weights().end());
        apply_pin(w, config);
        refine(w, compiled, config);
        renormalize(w);
        apply_pin(w, config);
        JointDistribution candidate(space, std::move(w));
        const double p = penalty(candidate, cs, config.undefined_penalty);
        const bool ok = p <= config.penalty_tolerance && satisfies_all(candidate, cs);

        if (p < best_penalty || ok) {
            best_penalty = p;
            best = candidate;
            best_index = r;
        }
        trace.push_back(best_penalty);

        if (ok) {
            std::vector<ConstraintEval> evals;
            for (const auto& c : cs.constraints()) evals.push_back(evaluate(*best, c));
            return FindResult{true, *best, best_penalty, std::move(evals), r + 1, r, std::move(trace)};
        }
    }

    std::vector<ConstraintEval> evals;
    for (const auto& c : cs.constraints()) evals.push_back(evaluate(*best, c));
    return FindResult{false, *best, best_penalty, std::move(evals), config.max_samples, best_index, std::move(trace)};
}

// ------------------------------------------------------------- grid oracle

JointDistribution GridPoint::to_distribution(const WorldSpace& space) const {
    std::vector<double> w(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) w[i] = static_cast<double>(counts[i]) / resolution;
    return JointDistribution::normalized(space, std::move(w));
}

std::uint64_t grid_size(std::size_t world_count, int resolution) {
    // C(resolution + n - 1, n - 1), computed incrementally (exact at every step).
    std::uint64_t c = 1;
    const std::uint64_t k = world_count - 1;
    for (std::uint64_t i = 1; i <= k; ++i) c = c * (static_cast<std::uint64_t>(resolution) + i) / i;
    return c;
}

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

// The decimal a user would have written: 0.6 becomes 3/5, not the binary
// double nearest to it.
cpp_rational decimal_rational(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific);
    const std::string text(buf, res.ptr);
    const auto e = text.find('e');
    cpp_int digits = 0;
    int frac = 0;
    bool after_point = false;
    for (std::size_t i = 0; i < e; ++i) {
        const char c = text[i];
        if (c == '.') {
            after_point = true;
        } else if (c >= '0' && c <= '9') {
            digits = digits * 10 + (c - '0');
            if (after_point) ++frac;
        }
    }
    const int exp10 = std::stoi(text.substr(e + 1)) - frac;
    const cpp_int scale = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(std::abs(exp10)));
    cpp_rational r = exp10 >= 0 ? cpp_rational(digits * scale) : cpp_rational(digits, scale);
    return text[0] == '-' ? cpp_rational(-r) : r;
}

// Exact comparison of a rational-valued constraint against its margin. A
// double-precision estimate decides when it is far from every threshold.
class ExactJudge {
public:
    ExactJudge(const Compiled& compiled, int resolution) : compiled_(compiled), resolution_(resolution) {}

    bool satisfied(const std::vector<long long>& mass) const {
        std::vector<double> approx(mass.size());
        for (std::size_t i = 0; i < mass.size(); ++i) approx[i] = static_cast<double>(mass[i]) / resolution_;
        for (const auto& row : compiled_.rows()) {
            if (!row_ok(row, mass, approx)) return false;
        }
        return true;
    }

private:
    bool row_ok(const Compiled::Row& row, const std::vector<long long>& mass, const std::vector<double>& approx) const {
        auto l = Compiled::value(row.lhs, approx);
        auto r = Compiled::value(row.rhs, approx);
        if (!l || !r) return false;
        const double a = achieved_margin(row.rel, *l, *r, row.offset);
        const double gap = row.rel == Relation::Eq ? (-a - row.margin) : (a - row.margin);
        constexpr double kClear = 1e-9;
        const bool near_zero = is_strict(row.rel) && std::abs(a) <= kClear;
        if (std::abs(gap) > kClear && !near_zero) return margin_met(row.rel, a, row.margin);

        const cpp_rational lv = exact(row.lhs, mass);
        const cpp_rational rv = exact(row.rhs, mass);
        const cpp_rational off = decimal_rational(row.offset);
        const cpp_rational margin = decimal_rational(row.margin);
        switch (row.rel) {
            case Relation::Gt: return lv - rv - off >= margin && lv - rv - off > 0;
            case Relation::Ge: return lv - rv - off >= margin;
            case Relation::Lt: return rv + off - lv >= margin && rv + off - lv > 0;
            case Relation::Le: return rv + off - lv >= margin;
            case Relation::Eq: {
                cpp_rational d = lv - rv - off;
                if (d < 0) d = -d;
                return d <= margin;
            }
        }
        return false;
    }

    cpp_rational exact(const Compiled::TermRef& t, const std::vector<long long>& mass) const {
        if (t.num < 0) return decimal_rational(t.constant);
        const long long num = mass[static_cast<std::size_t>(t.num)];
        if (t.den < 0) return cpp_rational(num, resolution_);
        return cpp_rational(num, mass[static_cast<std::size_t>(t.den)]);
    }

    const Compiled& compiled_;
    int resolution_;
};

}  // namespace

std::vector<GridPoint> grid_enumerate(const ConstraintSet& cs, int resolution) {
    const std::size_t n = cs.space().world_count();
    if (n > kGridMaxWorlds) {
        throw GridBudgetError("grid enumeration supports at most " + std::to_string(kGridMaxWorlds) +
                              " worlds; this space has " + std::to_string(n));
    }
    if (resolution < 1 || resolution > kGridMaxResolution) {
        throw GridBudgetError("grid resolution must be in [1, " + std::to_string(kGridMaxResolution) + "]");
    }
    const Compiled compiled(cs);
    const ExactJudge judge(compiled, resolution);

    std::vector<GridPoint> out;
    std::vector<int> counts(n, 0);
    std::vector<long long> mass;

    // Compositions of `resolution` into n parts in lexicographic order of
    // counts[0], counts[1], ...
    auto visit = [&]() {
        std::vector<long long> w(counts.begin(), counts.end());
        compiled.masses<long long>(w, mass);
        if (judge.satisfied(mass)) out.push_back(GridPoint{resolution, counts});
    };
    auto recurse = [&](auto&& self, std::size_t i, int remaining) -> void {
        if (i + 1 == n) {
            counts[i] = remaining;
            visit();
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            counts[i] = k;
            self(self, i + 1, remaining - k);
        }
    };
    recurse(recurse, 0, resolution);
    return out;
}

}  // namespace analogy
