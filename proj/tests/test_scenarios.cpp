#include "analogy/scenarios.hpp"
#include "oracle.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <cmath>
#include <random>

using namespace analogy;
using nlohmann::json;

namespace {

const std::vector<Scenario>& corpus() {
    static const std::vector<Scenario> c = load_corpus();
    return c;
}

const Scenario& named(const std::string& name) {
    for (const auto& s : corpus()) {
        if (s.name == name) return s;
    }
    throw std::runtime_error("no scenario " + name);
}

Scenario solved(const std::string& name) { return resolve(named(name)); }

json minimal_doc() {
    return json::parse(R"({
        "name": "tiny",
        "atoms": ["H", "E", "B"],
        "schema": "type1",
        "roles": {"hypothesis": "H", "evidence": "E", "bridge": "B"},
        "distribution": {"weights": [0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125]}
    })");
}

std::string error_field(const json& doc) {
    try {
        (void)scenario_from_json(doc, "doc.json");
    } catch (const ScenarioError& e) {
        return e.field();
    }
    return "<none>";
}

}  // namespace

TEST_CASE("corpus contents") {
    REQUIRE(corpus().size() == 6);
    std::vector<std::string> names;
    for (const auto& s : corpus()) {
        CHECK_NOTHROW(s.validate());
        names.push_back(s.name);
    }
    CHECK(names == std::vector<std::string>{"euler_cauchy", "euler_polya", "riemann_weil", "taylor_series", "volume",
                                            "volume_star"});
    const auto& rw = named("riemann_weil");
    CHECK(rw.roles.hypothesis.to_string() == "R");
    CHECK(rw.roles.evidence.to_string() == "W");
    CHECK(rw.roles.bridge.to_string() == "G");
    CHECK(rw.schema == SchemaType::Type1);
    CHECK(named("taylor_series").schema == SchemaType::Type2);
    CHECK(named("euler_cauchy").condition_ids[3] == "l");
    CHECK(named("euler_polya").condition_ids[1] == "n");
}

TEST_CASE("every corpus scenario resolves and evaluates") {
    for (const auto& s : corpus()) {
        CAPTURE(s.name);
        auto r = resolve(s);
        REQUIRE(r.distribution.has_value());
        CHECK_NOTHROW((void)evaluate_schema(r));
    }
}

TEST_CASE("riemann_weil schema holds and confirms") {
    auto s = solved("riemann_weil");
    auto r = evaluate_schema(s);
    CHECK(r.schema_holds);
    CHECK(r.analogical_verdict == std::optional<bool>(true));
    CHECK(r.overall.confirms);
    CHECK(r.overall.degree >= 0.01);
    for (const auto& c : r.conditions) CHECK(c.result.margin >= 0.05 - 1e-9);
    // Recompute the degree from raw weights.
    const std::vector<double> w(s.distribution->weights().begin(), s.distribution->weights().end());
    auto R = [](std::size_t i) { return oracle::bit(i, 0); };
    auto W = [](std::size_t i) { return oracle::bit(i, 1); };
    CHECK(r.overall.degree == doctest::Approx(oracle::cond(w, R, W) - oracle::prob(w, R)).epsilon(1e-12));
}

TEST_CASE("killing the bridge with d at equality removes the confirmation") {
    auto s = solved("riemann_weil");
    auto screened = impose_screening_off(*s.distribution, s.roles);
    auto dead = force_marginal(screened, s.roles.bridge, 0.0);
    Scenario t = s;
    t.distribution = dead;
    auto r = evaluate_schema(t);
    CHECK(r.degenerate);
    CHECK_FALSE(r.analogical_verdict.has_value());
    CHECK(std::abs(r.overall.degree) <= 1e-9);
    CHECK(r.conditions[3].result.at_boundary);
}

TEST_CASE("euler contrast") {
    auto cauchy = evaluate_schema(solved("euler_cauchy"));
    CHECK(cauchy.analogical_verdict == std::optional<bool>(true));
    auto polya = evaluate_schema(solved("euler_polya"));
    CHECK_FALSE(polya.analogical_verdict.has_value());
    CHECK(polya.failing_conditions == std::vector<std::string>{"n"});
    CHECK(polya.overall.degree <= 0.01);
}

TEST_CASE("positive residual variant of the polya argument") {
    auto v = resolve(load_scenario(default_corpus_dir() / "variants" / "euler_polya_residual.json"));
    auto r = evaluate_schema(v);
    CHECK_FALSE(r.analogical_verdict.has_value());
    CHECK(r.overall.degree > 0.0);
    CHECK(r.overall.degree <= 0.01);
}

TEST_CASE("entailing bridge variant") {
    auto v = resolve(load_scenario(default_corpus_dir() / "variants" / "riemann_weil_entailing.json"));
    CHECK(probability(*v.distribution, v.roles.bridge && !v.roles.hypothesis) == 0.0);
    auto r = evaluate_schema(v);
    CHECK(r.conditions[2].result.at_boundary);
    CHECK(r.overall.confirms);
}

TEST_CASE("taylor extension keeps the base marginal") {
    const auto& s = named("taylor_series");
    REQUIRE(s.base_space.has_value());
    auto r = resolve(s);
    REQUIRE(s.constraints.has_value());
    auto base = find_model(*s.constraints, s.search);
    REQUIRE(base.success);
    auto marg = marginalize_prefix(*r.distribution, *s.base_space);
    for (std::size_t w = 0; w < 4; ++w) CHECK(marg.weight(w) == doctest::Approx(base.distribution.weight(w)).epsilon(1e-12));
    CHECK(probability(*r.distribution, r.roles.bridge) == doctest::Approx(0.5).epsilon(1e-12));
    auto rep = evaluate_schema(r);
    CHECK(rep.schema_holds);
    CHECK(rep.overall.confirms);
}

TEST_CASE("baseline contrast") {
    const auto& vol = named("volume");
    const auto& star = named("volume_star");
    REQUIRE(vol.baseline.has_value());
    REQUIRE(star.baseline.has_value());
    CHECK(vol.baseline->source_quotient == star.baseline->source_quotient);
    CHECK(symmetry_baseline(vol.baseline->source_quotient, vol.baseline->delta) ==
          symmetry_baseline(star.baseline->source_quotient, star.baseline->delta));
    CHECK(evaluate_schema(resolve(vol)).overall.confirms);
    CHECK_FALSE(evaluate_schema(resolve(star)).overall.confirms);
    CHECK(symmetry_baseline(0.9, 0.05) == doctest::Approx(0.85));
    CHECK(symmetry_baseline(0.95, 0.1) == doctest::Approx(0.85));
    CHECK(symmetry_baseline(0.95, 0.0) == 0.95);
    CHECK(symmetry_baseline(0.05, 0.05) == 0.0);
    CHECK_THROWS_AS((void)symmetry_baseline(0.02, 0.05), std::invalid_argument);
    CHECK_THROWS_AS((void)symmetry_baseline(1.5, 0.1), std::invalid_argument);
    CHECK_THROWS_AS((void)symmetry_baseline(0.5, -0.1), std::invalid_argument);
}

TEST_CASE("euler characteristic of the platonic solids") {
    for (const auto& p : platonic_solids()) {
        CAPTURE(p.name);
        CHECK(euler_characteristic(p.vertices, p.edges, p.faces) == 2);
    }
    CHECK(euler_characteristic(8, 12, 6) == 2);
}

TEST_CASE("schema and theorem stay coherent on random distributions") {
    auto doc = minimal_doc();
    auto s = scenario_from_json(doc, "doc.json");
    std::mt19937 gen(77);
    int holds = 0;
    for (int t = 0; t < 20000; ++t) {
        auto w = oracle::random_simplex(gen, 8);
        s.distribution = JointDistribution::normalized(s.space, w);
        SchemaReport r;
        REQUIRE_NOTHROW(r = evaluate_schema(s));
        if (r.analogical_verdict) {
            ++holds;
            CHECK(r.overall.degree > 0.0);
        }
    }
    CHECK(holds > 100);
}

TEST_CASE("irrelevance lemma under evidence-share perturbation") {
    auto s = solved("riemann_weil");
    for (double share : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        Scenario t = s;
        t.distribution = impose_screening_off(*s.distribution, s.roles, share);
        auto r = evaluate_schema(t);
        CAPTURE(share);
        CHECK(std::abs(r.conditions[3].result.margin) <= 1e-10);
        CHECK(conditional(*t.distribution, s.roles.evidence, !s.roles.bridge) == doctest::Approx(share).epsilon(1e-12));
        CHECK(probability(*t.distribution, s.roles.bridge) ==
              doctest::Approx(probability(*s.distribution, s.roles.bridge)).epsilon(1e-12));
    }
}

TEST_CASE("reports survive a json round trip") {
    for (const auto& s : corpus()) {
        auto r = evaluate_schema(resolve(s));
        CAPTURE(s.name);
        CHECK(schema_report_from_json(to_json(r)) == r);
    }
}

TEST_CASE("resolved scenarios serialize to loadable documents") {
    auto s = solved("riemann_weil");
    auto back = scenario_from_json(scenario_to_json(s), "roundtrip");
    REQUIRE(back.distribution.has_value());
    CHECK(back.name == s.name);
    CHECK(evaluate_schema(back) == evaluate_schema(s));
}

TEST_CASE("resolution is reproducible for a fixed seed") {
    const auto& s = named("euler_cauchy");
    auto a = resolve(s);
    auto b = resolve(s);
    CHECK(std::equal(a.distribution->weights().begin(), a.distribution->weights().end(),
                     b.distribution->weights().begin()));
}

TEST_CASE("scenario errors name the offending field") {
    auto doc = minimal_doc();
    doc["roles"]["bridge"] = "Q";
    CHECK(error_field(doc) == "roles.bridge");

    doc = minimal_doc();
    doc["roles"]["bridge"] = "H";
    CHECK(error_field(doc) != "<none>");

    doc = minimal_doc();
    doc["schema"] = "type3";
    CHECK(error_field(doc) == "schema");

    doc = minimal_doc();
    doc["distribution"]["weights"] = {0.5, 0.5};
    CHECK(error_field(doc) == "distribution.weights");

    doc = minimal_doc();
    doc.erase("atoms");
    CHECK(error_field(doc) == "atoms");

    doc = minimal_doc();
    doc["distribution"] = json::object({{"constraints", json::array({{{"schema", "z"}}})}});
    CHECK(error_field(doc) == "distribution.constraints[0].schema");

    doc = minimal_doc();
    doc["distribution"] = json::object({{"constraints", json::array({{{"id", "x"}, {"relation", "~"}, {"lhs", "H"}, {"rhs", 0.5}}})}});
    CHECK(error_field(doc) == "distribution.constraints[0].relation");

    CHECK_THROWS_AS((void)load_scenario("/nonexistent/file.json"), std::ios_base::failure);
}

TEST_CASE("constraint-specified scenario that cannot be solved") {
    auto doc = minimal_doc();
    doc["distribution"] = json::parse(R"({
        "constraints": [
            {"id": "hi", "relation": ">", "lhs": "H", "rhs": 0.7},
            {"id": "lo", "relation": "<", "lhs": "H", "rhs": 0.3}
        ],
        "max_samples": 20, "refine_steps": 10
    })");
    auto s = scenario_from_json(doc, "doc.json");
    CHECK_THROWS_AS((void)resolve(s), InfeasibleError);
}

TEST_CASE("riemann grid count matches a rational brute force") {
    using boost::multiprecision::cpp_rational;
    const auto& s = named("riemann_weil");
    REQUIRE(s.constraints.has_value());
    const auto pts = grid_enumerate(*s.constraints, 10);

    // Atoms: bit 0 = R, bit 1 = W, bit 2 = G.
    int expected = 0;
    const cpp_rational m(1, 20);
    std::vector<int> c(8, 0);
    std::function<void(int, int)> walk = [&](int k, int left) {
        if (k == 7) {
            c[7] = left;
            auto P = [&](const oracle::Pred& f) {
                cpp_rational t = 0;
                for (std::size_t i = 0; i < 8; ++i) {
                    if (f(i)) t += cpp_rational(c[i], 10);
                }
                return t;
            };
            auto R = [](std::size_t i) { return oracle::bit(i, 0); };
            auto W = [](std::size_t i) { return oracle::bit(i, 1); };
            auto G = [](std::size_t i) { return oracle::bit(i, 2); };
            auto nG = [&](std::size_t i) { return !G(i); };
            auto GW = [&](std::size_t i) { return G(i) && W(i); };
            auto nGW = [&](std::size_t i) { return !G(i) && W(i); };
            auto cond = [&](const oracle::Pred& a, const oracle::Pred& b) -> std::optional<cpp_rational> {
                const auto d = P(b);
                if (d == 0) return std::nullopt;
                return P([&](std::size_t i) { return a(i) && b(i); }) / d;
            };
            for (const auto& x : {P(R), P(W), P(G)}) {
                if (x < m || x > 1 - m) return;
            }
            auto rg = cond(R, G), wg = cond(W, G), wng = cond(W, nG), rgw = cond(R, GW), rngw = cond(R, nGW),
                 rng = cond(R, nG);
            if (!rg || !wg || !wng || !rgw || !rngw || !rng) return;
            if (*rg - P(R) >= m && *wg - *wng >= m && *rgw - *rg >= m && *rngw - *rng >= m) ++expected;
            return;
        }
        for (int v = 0; v <= left; ++v) {
            c[static_cast<std::size_t>(k)] = v;
            walk(k + 1, left - v);
        }
    };
    walk(0, 10);
    CHECK(expected == 217);
    CHECK(pts.size() == static_cast<std::size_t>(expected));
    for (const auto& p : pts) CHECK(satisfies_all(p.to_distribution(s.space), *s.constraints));
}
