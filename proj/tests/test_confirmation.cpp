#include "analogy/confirmation.hpp"
#include "analogy/model_finder.hpp"
#include "analogy/rng.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace analogy;

namespace {

WorldSpace xyz() { return WorldSpace({"X", "Y", "Z"}); }

struct Triple {
    Proposition x, y, z;
};

Triple atoms(const WorldSpace& s) {
    return {Proposition::atom(s, "X"), Proposition::atom(s, "Y"), Proposition::atom(s, "Z")};
}

}  // namespace

TEST_CASE("confirm on the four-world oracle") {
    WorldSpace s({"a", "b"});
    JointDistribution d(s, {0.4, 0.2, 0.1, 0.3});
    auto a = Proposition::atom(s, "a");
    auto b = Proposition::atom(s, "b");
    auto v = confirm(d, b, a);
    CHECK(v.confirms);
    CHECK(v.degree == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(v.measures.at("difference") == doctest::Approx(0.25));
    CHECK(v.measures.at("log_ratio") == doctest::Approx(std::log(0.75 / 0.5)));
    // P(b|a) = 0.6, P(b|!a) = 0.2
    CHECK(v.measures.at("log_likelihood_ratio") == doctest::Approx(std::log(3.0)));
    CHECK_FALSE(confirm(d, b, a, 0.3).confirms);
    auto u = confirm(JointDistribution::uniform(s), b, a);
    CHECK_FALSE(u.confirms);
    CHECK(u.degree == doctest::Approx(0.0));
    CHECK_THROWS_AS((void)confirm(JointDistribution::point_mass(s, 1), b, a), UndefinedConditional);
}

TEST_CASE("infinite measures are omitted") {
    WorldSpace s({"a", "b"});
    // b never happens without a.
    JointDistribution d(s, {0.5, 0.2, 0.0, 0.3});
    auto v = confirm(d, Proposition::atom(s, "b"), Proposition::atom(s, "a"));
    CHECK(v.measures.count("difference") == 1);
    CHECK(v.measures.count("log_likelihood_ratio") == 0);
}

TEST_CASE("check_transitivity on a screening-off distribution") {
    // Y raises Z, X raises Y, and Z depends on X only through Y.
    auto s = xyz();
    auto [x, y, z] = atoms(s);
    // P(Y)=.5; P(X|Y)=.8, P(X|!Y)=.2; P(Z|Y)=.9, P(Z|!Y)=.3; X,Z independent given Y.
    std::vector<double> w(8);
    for (std::size_t i = 0; i < 8; ++i) {
        const bool bx = oracle::bit(i, 0), by = oracle::bit(i, 1), bz = oracle::bit(i, 2);
        const double px = by ? 0.8 : 0.2;
        const double pz = by ? 0.9 : 0.3;
        w[i] = 0.5 * (bx ? px : 1 - px) * (bz ? pz : 1 - pz);
    }
    JointDistribution d(s, w);
    auto r = check_transitivity(d, x, y, z);
    CHECK(r.cond_i.holds);
    CHECK(r.cond_ii.holds);
    CHECK(r.cond_iii.holds);
    CHECK(r.cond_iii.at_boundary);
    CHECK(r.cond_iv.at_boundary);
    CHECK(r.antecedent_holds);
    CHECK(r.conclusion.holds);
    CHECK_FALSE(r.violation());
    CHECK(r.cond_i.margin == doctest::Approx(0.3));
    CHECK(r.cond_ii.margin == doctest::Approx(0.6));
    // P(Z|X) = (.4*.9 + .1*.3)/.5 = .78
    CHECK(r.conclusion.margin == doctest::Approx(0.18));
    CHECK(r.conclusion_relation == std::string(kConclusionRelation));
}

TEST_CASE("undefined conditions are reported as not applicable") {
    auto s = xyz();
    auto [x, y, z] = atoms(s);
    // Y always true: P(.|!Y) undefined.
    std::vector<double> w(8, 0.0);
    w[2] = 0.5;
    w[7] = 0.5;
    auto r = check_transitivity(JointDistribution(s, w), x, y, z);
    CHECK_FALSE(r.cond_ii.applicable);
    CHECK_FALSE(r.cond_iv.applicable);
    CHECK_FALSE(r.antecedent_holds);
}

TEST_CASE("corollary requires entailment") {
    auto s = xyz();
    auto [x, y, z] = atoms(s);
    auto d = JointDistribution::uniform(s);
    CHECK_THROWS_AS((void)check_corollary(d, x, y, z), PreconditionError);
    auto r = check_corollary(d, x, y && z, z);
    CHECK(r.corollary_mode);
    CHECK_FALSE(r.antecedent_holds);  // (ii) fails under the uniform distribution
}

TEST_CASE("corollary antecedent ignores (i) and (iii)") {
    // y = Y&Z entails z = Z. X raises y; z is independent of X outside y.
    auto s = xyz();
    auto [x, y, z] = atoms(s);
    std::vector<double> w(8);
    for (std::size_t i = 0; i < 8; ++i) {
        const bool bx = oracle::bit(i, 0), by = oracle::bit(i, 1), bz = oracle::bit(i, 2);
        const bool yz = by && bz;
        const double pyz = bx ? 0.6 : 0.2;
        double v = 0.5 * (yz ? pyz : (1 - pyz) / 3.0);
        w[i] = v;
    }
    JointDistribution d(s, w);
    auto r = check_corollary(d, x, y && z, z);
    CHECK(r.cond_ii.holds);
    CHECK(r.cond_iv.holds);
    CHECK(r.antecedent_holds);
    CHECK(r.conclusion.holds);
}

TEST_CASE("tolerances govern strict and weak conditions") {
    auto s = xyz();
    auto [x, y, z] = atoms(s);
    auto d = JointDistribution::uniform(s);
    auto loose = check_transitivity(d, x, y, z, Tolerances{0.0, 1e-12});
    CHECK_FALSE(loose.cond_i.holds);  // strict, margin exactly 0
    CHECK(loose.cond_iii.holds);      // weak, margin exactly 0
    CHECK(loose.cond_iii.at_boundary);
}

TEST_CASE("small theorem fuzz finds no violation") {
    auto f = fuzz_theorem(20000, 42, Tolerances{1e-6, 0.0});
    CHECK(f.samples == 20000);
    CHECK(f.filtered > 0);
    CHECK(f.violations == 0);
    CHECK(f.min_conclusion_margin > 0.0);
    CHECK_FALSE(f.first_violation.has_value());
}

TEST_CASE("fuzz is reproducible") {
    auto a = fuzz_theorem(3000, 9, Tolerances{1e-6, 0.0});
    auto b = fuzz_theorem(3000, 9, Tolerances{1e-6, 0.0});
    CHECK(a.filtered == b.filtered);
    CHECK(a.min_conclusion_margin == b.min_conclusion_margin);
    auto c = fuzz_corollary(3000, 9, Tolerances{1e-6, 0.0});
    CHECK(c.violations == 0);
    CHECK(c.filtered > 0);
}

// Independent check: with only (i) and (ii) required, the conclusion can fail,
// so the weak conditions are doing real work in the theorem.
TEST_CASE("dropping the weak conditions admits violations") {
    auto s = xyz();
    auto [x, y, z] = atoms(s);
    int violations = 0;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        auto d = sample_simplex(s, derive_seed(123, i));
        auto r = check_transitivity(d, x, y, z, Tolerances{1e-6, 0.0});
        if (r.cond_i.holds && r.cond_ii.holds && !r.conclusion.holds) ++violations;
    }
    CHECK(violations > 0);
}

TEST_CASE("mined counterexample verifies against brute-force sums") {
    auto c = mine_naive_transitivity_counterexample(1, 100000);
    REQUIRE(c.has_value());
    const std::vector<double> w(c->distribution.weights().begin(), c->distribution.weights().end());
    auto A = [](std::size_t i) { return oracle::bit(i, 0); };
    auto B = [](std::size_t i) { return oracle::bit(i, 1); };
    auto C = [](std::size_t i) { return oracle::bit(i, 2); };
    CHECK(oracle::cond(w, B, A) > oracle::prob(w, B) + 0.01);
    CHECK(oracle::cond(w, C, B) > oracle::prob(w, C) + 0.01);
    CHECK(oracle::cond(w, C, A) < oracle::prob(w, C) - 0.001);
    const bool some_fail = !c->report.cond_i.holds || !c->report.cond_ii.holds || !c->report.cond_iii.holds ||
                           !c->report.cond_iv.holds;
    CHECK(some_fail);
    auto again = mine_naive_transitivity_counterexample(1, 100000);
    REQUIRE(again.has_value());
    CHECK(again->sample_index == c->sample_index);
}

TEST_CASE("miner gives up when the budget is exhausted") {
    MinerConfig impossible{0.99, 0.99};
    CHECK_FALSE(mine_naive_transitivity_counterexample(1, 200, impossible).has_value());
}
