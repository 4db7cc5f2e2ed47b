#include "analogy/model_finder.hpp"
#include "analogy/rng.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace analogy;

namespace {

ProbConstraint gt(std::string id, Term lhs, Term rhs, double margin = 0.0) {
    return ProbConstraint{std::move(id), Relation::Gt, std::move(lhs), std::move(rhs), 0.0, margin};
}

}  // namespace

TEST_CASE("rng streams are deterministic and distinct") {
    Rng r1(7), r2(7), r3(8);
    const auto a = r1.next();
    CHECK(a == r2.next());
    CHECK(a != r3.next());
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 5) == derive_seed(1, 5));
    Rng u(3);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.uniform();
        CHECK((x >= 0.0 && x < 1.0));
    }
}

TEST_CASE("simplex sampler is uniform in the mean") {
    WorldSpace s({"a", "b"});
    std::vector<double> mean(4, 0.0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        auto d = sample_simplex(s, derive_seed(99, static_cast<std::uint64_t>(i)));
        double sum = 0.0;
        for (std::size_t w = 0; w < 4; ++w) {
            mean[w] += d.weight(w);
            sum += d.weight(w);
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
    for (double m : mean) CHECK(m / n == doctest::Approx(0.25).epsilon(0.04));
}

TEST_CASE("sampler first-coordinate marginal matches Beta(1, n-1)") {
    // For a uniform point on the 4-world simplex, P(w0 <= t) = 1 - (1 - t)^3.
    WorldSpace s({"a", "b"});
    const int n = 50000;
    int below = 0;
    for (int i = 0; i < n; ++i) {
        if (sample_simplex(s, derive_seed(5, static_cast<std::uint64_t>(i))).weight(0) <= 0.2) ++below;
    }
    const double expected = 1.0 - std::pow(0.8, 3);
    CHECK(static_cast<double>(below) / n == doctest::Approx(expected).epsilon(0.03));
}

TEST_CASE("constraint evaluation") {
    WorldSpace s({"a", "b"});
    JointDistribution d(s, {0.4, 0.2, 0.1, 0.3});
    auto a = Proposition::atom(s, "a");
    auto b = Proposition::atom(s, "b");
    auto e = evaluate(d, gt("ab", Term::cond(a, b), Term::prob(a), 0.2));
    CHECK(e.defined);
    CHECK(e.achieved == doctest::Approx(0.25));
    CHECK(e.satisfied);
    CHECK_FALSE(evaluate(d, gt("ab", Term::cond(a, b), Term::prob(a), 0.3)).satisfied);

    auto lt = ProbConstraint{"lt", Relation::Lt, Term::prob(a), Term::value(0.4), 0.0, 0.0};
    CHECK_FALSE(evaluate(d, lt).satisfied);
    auto eq = ProbConstraint{"eq", Relation::Eq, Term::prob(a), Term::value(0.5), 0.0, 0.0};
    CHECK(evaluate(d, eq).satisfied);
    auto off = ProbConstraint{"off", Relation::Ge, Term::prob(a), Term::prob(b), 0.1, 0.0};
    CHECK(evaluate(d, off).achieved == doctest::Approx(0.0).epsilon(1e-12));

    auto zero = JointDistribution::point_mass(s, 0);
    auto u = evaluate(zero, gt("u", Term::cond(a, b), Term::prob(a)));
    CHECK_FALSE(u.defined);
    CHECK_FALSE(u.satisfied);
}

TEST_CASE("constraint set validation") {
    WorldSpace s({"a"});
    auto a = Proposition::atom(s, "a");
    CHECK_THROWS_AS(ConstraintSet(s, {}), StructuralError);
    CHECK_THROWS_AS(ConstraintSet(s, {gt("c", Term::value(1), Term::value(0))}), StructuralError);
    CHECK_THROWS_AS(ConstraintSet(s, {gt("m", Term::prob(a), Term::value(0), -0.1)}), StructuralError);
    WorldSpace other({"z"});
    CHECK_THROWS_AS(ConstraintSet(other, {gt("x", Term::prob(a), Term::value(0))}), StructuralError);
}

TEST_CASE("penalty is zero exactly on satisfying points") {
    WorldSpace s({"a", "b"});
    auto a = Proposition::atom(s, "a");
    ConstraintSet cs(s, {gt("a", Term::prob(a), Term::value(0.5))});
    CHECK(penalty(JointDistribution(s, {0.1, 0.4, 0.1, 0.4}), cs) == 0.0);
    CHECK(penalty(JointDistribution(s, {0.3, 0.2, 0.3, 0.2}), cs) == doctest::Approx(0.01));
}

TEST_CASE("grid enumeration sizes") {
    CHECK(grid_size(2, 4) == 5);
    CHECK(grid_size(8, 10) == 19448);
    CHECK(grid_size(4, 3) == 20);
}

TEST_CASE("grid enumeration on two worlds") {
    WorldSpace s({"a"});
    auto a = Proposition::atom(s, "a");
    ConstraintSet loose(s, {ProbConstraint{"any", Relation::Ge, Term::prob(a), Term::value(0.0), 0.0, 0.0}});
    CHECK(grid_enumerate(loose, 4).size() == 5);

    ConstraintSet half(s, {gt("a", Term::prob(a), Term::value(0.5))});
    auto pts = grid_enumerate(half, 4);
    REQUIRE(pts.size() == 2);
    std::set<std::vector<int>> got;
    for (const auto& p : pts) got.insert(p.counts);
    // World 1 is "a".
    CHECK(got == std::set<std::vector<int>>{{1, 3}, {0, 4}});
}

TEST_CASE("grid decides boundary cases exactly") {
    // P(a|b) > P(a) at exactly equal values must be rejected; at res 10 the
    // uniform point on two atoms is independent.
    WorldSpace s({"a", "b"});
    auto a = Proposition::atom(s, "a");
    auto b = Proposition::atom(s, "b");
    ConstraintSet cs(s, {gt("ab", Term::cond(a, b), Term::prob(a))});
    auto pts = grid_enumerate(cs, 4);
    for (const auto& p : pts) {
        CHECK_FALSE(p.counts == std::vector<int>{1, 1, 1, 1});
        // Independent reference check with integer arithmetic.
        const int pab = p.counts[3], pb = p.counts[2] + p.counts[3], pa = p.counts[1] + p.counts[3];
        CHECK(pab * 4 > pa * pb);
    }
    // Count all points by brute force.
    int expected = 0;
    for (int c0 = 0; c0 <= 4; ++c0)
        for (int c1 = 0; c0 + c1 <= 4; ++c1)
            for (int c2 = 0; c0 + c1 + c2 <= 4; ++c2) {
                const int c3 = 4 - c0 - c1 - c2;
                const int pb = c2 + c3, pa = c1 + c3;
                if (pb > 0 && c3 * 4 > pa * pb) ++expected;
            }
    CHECK(pts.size() == static_cast<std::size_t>(expected));
}

TEST_CASE("grid budget limits") {
    WorldSpace s({"a", "b", "c", "d"});
    auto a = Proposition::atom(s, "a");
    ConstraintSet cs(s, {gt("a", Term::prob(a), Term::value(0.5))});
    CHECK_THROWS_AS((void)grid_enumerate(cs, 4), GridBudgetError);
    WorldSpace t({"a"});
    ConstraintSet ct(t, {gt("a", Term::prob(Proposition::atom(t, "a")), Term::value(0.5))});
    CHECK_THROWS_AS((void)grid_enumerate(ct, 21), GridBudgetError);
    CHECK_THROWS_AS((void)grid_enumerate(ct, 0), GridBudgetError);
}

TEST_CASE("find_model solves a transitivity-style set") {
    WorldSpace s({"x", "y", "z"});
    auto x = Proposition::atom(s, "x");
    auto y = Proposition::atom(s, "y");
    auto z = Proposition::atom(s, "z");
    ConstraintSet cs(s, {gt("xy", Term::cond(y, x), Term::prob(y), 0.05),
                         gt("yz", Term::cond(z, y), Term::prob(z), 0.05),
                         ProbConstraint{"xz", Relation::Lt, Term::cond(z, x), Term::prob(z), 0.0, 0.05}});
    SearchConfig cfg;
    cfg.seed = 11;
    auto r = find_model(cs, cfg);
    REQUIRE(r.success);
    CHECK(satisfies_all(r.distribution, cs));
    const std::vector<double> w(r.distribution.weights().begin(), r.distribution.weights().end());
    auto bx = [](std::size_t i) { return oracle::bit(i, 0); };
    auto by = [](std::size_t i) { return oracle::bit(i, 1); };
    auto bz = [](std::size_t i) { return oracle::bit(i, 2); };
    CHECK(oracle::cond(w, by, bx) - oracle::prob(w, by) >= 0.05);
    CHECK(oracle::cond(w, bz, by) - oracle::prob(w, bz) >= 0.05);
    CHECK(oracle::prob(w, bz) - oracle::cond(w, bz, bx) >= 0.05);
}

TEST_CASE("find_model is deterministic and its trace never increases") {
    WorldSpace s({"a", "b"});
    auto a = Proposition::atom(s, "a");
    auto b = Proposition::atom(s, "b");
    ConstraintSet cs(s, {gt("ab", Term::cond(a, b), Term::prob(a), 0.3), gt("b", Term::prob(b), Term::value(0.4))});
    SearchConfig cfg;
    cfg.seed = 3;
    auto r1 = find_model(cs, cfg);
    auto r2 = find_model(cs, cfg);
    REQUIRE(r1.success);
    CHECK(std::equal(r1.distribution.weights().begin(), r1.distribution.weights().end(),
                     r2.distribution.weights().begin()));
    CHECK(r1.restart_index == r2.restart_index);
    CHECK(std::is_sorted(r1.best_penalty_trace.rbegin(), r1.best_penalty_trace.rend()));
}

TEST_CASE("find_model reports failure on an infeasible set") {
    WorldSpace s({"a"});
    auto a = Proposition::atom(s, "a");
    ConstraintSet cs(s, {gt("hi", Term::prob(a), Term::value(0.6)),
                         ProbConstraint{"lo", Relation::Lt, Term::prob(a), Term::value(0.4), 0.0, 0.0}});
    SearchConfig cfg;
    cfg.max_samples = 50;
    cfg.refine_steps = 20;
    auto r = find_model(cs, cfg);
    CHECK_FALSE(r.success);
    CHECK(r.penalty > 0.0);
    CHECK(r.restarts_used == 50);
    CHECK(std::is_sorted(r.best_penalty_trace.rbegin(), r.best_penalty_trace.rend()));
}

TEST_CASE("find_model honours a marginal pin") {
    WorldSpace s({"a", "b"});
    auto a = Proposition::atom(s, "a");
    auto b = Proposition::atom(s, "b");
    ConstraintSet cs(s, {gt("ab", Term::cond(a, b), Term::prob(a), 0.1)});
    SearchConfig cfg;
    cfg.pin = MarginalPin{b, 0.3};
    auto r = find_model(cs, cfg);
    REQUIRE(r.success);
    CHECK(probability(r.distribution, b) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("search config validation") {
    SearchConfig cfg;
    cfg.max_samples = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    SearchConfig neg;
    neg.penalty_tolerance = -1;
    CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
}

TEST_CASE("find_model and grid agree on small random sets") {
    // Random single-threshold constraints on one atom: feasible iff the
    // threshold leaves room, and both methods must say so.
    WorldSpace s({"a", "b"});
    auto a = Proposition::atom(s, "a");
    auto b = Proposition::atom(s, "b");
    for (double t : {0.1, 0.35, 0.6, 0.85}) {
        ConstraintSet cs(s, {gt("a", Term::prob(a && b), Term::value(t)),
                             gt("b", Term::cond(a, b), Term::prob(a), 0.02)});
        SearchConfig cfg;
        cfg.seed = 17;
        cfg.max_samples = 2000;
        auto r = find_model(cs, cfg);
        auto pts = grid_enumerate(cs, 10);
        CAPTURE(t);
        CHECK(r.success == !pts.empty());
        for (const auto& p : pts) CHECK(satisfies_all(p.to_distribution(s), cs));
    }
}
