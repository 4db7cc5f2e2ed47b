#include "analogy/scenarios.hpp"

#include "analogy/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#ifndef ANALOGY_CORPUS_DIR
#define ANALOGY_CORPUS_DIR "corpus"
#endif

namespace analogy {

using nlohmann::json;

const char* to_string(SchemaType t) { return t == SchemaType::Type1 ? "type1" : "type2"; }

SchemaType schema_type_from_string(const std::string& s) {
    if (s == "type1") return SchemaType::Type1;
    if (s == "type2") return SchemaType::Type2;
    throw std::invalid_argument("schema must be \"type1\" or \"type2\", got \"" + s + "\"");
}

std::array<std::string, 4> default_condition_ids(SchemaType t) {
    if (t == SchemaType::Type1) return {"a", "b", "c", "d"};
    return {"e", "f", "g", "h"};
}

ScenarioError::ScenarioError(std::string file, std::string field, const std::string& message)
    : std::runtime_error(file + ": field '" + field + "': " + message), file_(std::move(file)), field_(std::move(field)) {}

void Scenario::validate() const {
    const std::string origin = name.empty() ? "<scenario>" : name;
    const Proposition* roles_list[] = {&roles.hypothesis, &roles.evidence, &roles.bridge};
    const char* names[] = {"hypothesis", "evidence", "bridge"};
    for (int i = 0; i < 3; ++i) {
        if (!(roles_list[i]->space() == space)) {
            throw ScenarioError(origin, std::string("roles.") + names[i], "formula is not over the scenario space");
        }
        for (int j = 0; j < i; ++j) {
            if (roles_list[i]->equivalent(*roles_list[j])) {
                throw ScenarioError(origin, std::string("roles.") + names[i],
                                    std::string("must be distinct from roles.") + names[j]);
            }
        }
    }
    if (!distribution && !constraints) throw ScenarioError(origin, "distribution", "needs weights or constraints");
    if (distribution && constraints) throw ScenarioError(origin, "distribution", "weights and constraints are exclusive");
    const WorldSpace& dist_space = base_space ? *base_space : space;
    if (distribution && !(distribution->space() == dist_space) && !(distribution->space() == space)) {
        throw ScenarioError(origin, "distribution", "weights are not over the scenario space");
    }
    for (const auto& id : condition_ids) {
        if (id.empty()) throw ScenarioError(origin, "condition_ids", "condition ids must be nonempty");
    }
}

// ------------------------------------------------------------ schema shape

std::string schema_condition_text(int index) {
    switch (index) {
        case 0: return "P(H|B) > P(H)";
        case 1: return "P(E|B) > P(E|!B)";
        case 2: return "P(H|B&E) >= P(H|B)";
        case 3: return "P(H|!B&E) >= P(H|!B)";
        default: throw std::out_of_range("schema condition index must be 0..3");
    }
}

ProbConstraint schema_constraint(const Roles& roles, int index, const std::string& id, double margin, bool reversed) {
    const auto& h = roles.hypothesis;
    const auto& e = roles.evidence;
    const auto& b = roles.bridge;
    ProbConstraint c;
    c.id = id;
    c.margin = margin;
    switch (index) {
        case 0:
            c.lhs = Term::cond(h, b);
            c.rhs = Term::prob(h);
            c.relation = Relation::Gt;
            break;
        case 1:
            c.lhs = Term::cond(e, b);
            c.rhs = Term::cond(e, !b);
            c.relation = Relation::Gt;
            break;
        case 2:
            c.lhs = Term::cond(h, b && e);
            c.rhs = Term::cond(h, b);
            c.relation = Relation::Ge;
            break;
        case 3:
            c.lhs = Term::cond(h, !b && e);
            c.rhs = Term::cond(h, !b);
            c.relation = Relation::Ge;
            break;
        default: throw std::out_of_range("schema condition index must be 0..3");
    }
    if (reversed) c.relation = c.relation == Relation::Gt ? Relation::Le : Relation::Lt;
    return c;
}

// ------------------------------------------------------------ evaluation

SchemaReport evaluate_schema(const Scenario& s, const Tolerances& tol, double extremal_epsilon) {
    if (!s.distribution) throw std::invalid_argument("scenario '" + s.name + "' has no concrete distribution; resolve it first");
    const auto& dist = *s.distribution;
    const auto& r = s.roles;
    const auto rep = check_transitivity(dist, r.evidence, r.bridge, r.hypothesis, tol);

    SchemaReport out;
    out.scenario = s.name;
    out.schema = s.schema;
    const ConditionResult* results[] = {&rep.cond_i, &rep.cond_ii, &rep.cond_iii, &rep.cond_iv};
    for (int i = 0; i < 4; ++i) {
        out.conditions[static_cast<std::size_t>(i)] =
            SchemaCondition{s.condition_ids[static_cast<std::size_t>(i)], schema_constraint(r, i, s.condition_ids[static_cast<std::size_t>(i)], 0.0, false).to_string(), i < 2, *results[i]};
    }
    out.bridge_prior = probability(dist, r.bridge);
    out.overall = confirm(dist, r.evidence, r.hypothesis, tol.strict_margin);

    const std::pair<const char*, const Proposition*> role_list[] = {
        {"hypothesis", &r.hypothesis}, {"evidence", &r.evidence}, {"bridge", &r.bridge}};
    for (const auto& [label, prop] : role_list) {
        if (!is_non_extremal(dist, *prop, extremal_epsilon)) {
            std::ostringstream os;
            os << label << " extremal (P = " << probability(dist, *prop) << ")";
            out.extremality_flags.push_back(os.str());
        }
    }
    out.degenerate = !is_non_extremal(dist, r.bridge, extremal_epsilon);
    if (out.degenerate) out.extremality_flags.emplace_back("analogy channel degenerate");

    out.schema_holds = rep.antecedent_holds;
    for (const auto& c : out.conditions) {
        if (!c.result.applicable || !c.result.holds) out.failing_conditions.push_back(c.id);
    }
    if (out.schema_holds && !out.degenerate) {
        if (!(out.overall.degree > 0.0)) {
            throw std::logic_error("scenario '" + s.name +
                                   "': schema conditions hold but the direct verdict is not positive");
        }
        out.analogical_verdict = true;
    }
    return out;
}

// ------------------------------------------------------------ extensions

JointDistribution marginalize_prefix(const JointDistribution& dist, const WorldSpace& base) {
    const auto& atoms = dist.space().atoms();
    const auto& prefix = base.atoms();
    if (prefix.size() > atoms.size() || !std::equal(prefix.begin(), prefix.end(), atoms.begin())) {
        throw StructuralError("base space is not a prefix of the distribution's space");
    }
    const std::size_t n = base.world_count();
    std::vector<double> w(n, 0.0);
    const auto src = dist.weights();
    for (std::size_t i = 0; i < src.size(); ++i) w[i % n] += src[i];
    return JointDistribution::normalized(base, std::move(w));
}

namespace {

// Margins raised by `slack` so a zero penalty implies exact satisfaction.
ConstraintSet slackened(const ConstraintSet& cs, double slack) {
    std::vector<ProbConstraint> out = cs.constraints();
    for (auto& c : out) {
        if (c.relation == Relation::Eq) {
            c.margin -= std::min(slack, 0.5 * c.margin);
        } else {
            c.margin += slack;
        }
    }
    return ConstraintSet(cs.space(), std::move(out));
}

// Maps free per-world shares t into shares with sum_w p(w) t(w) = prior,
// staying inside [0, 1].
std::vector<double> fix_prior(std::vector<double> t, std::span<const double> p, double prior) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) s += p[i] * t[i];
    if (prior <= 0.0) {
        std::fill(t.begin(), t.end(), 0.0);
    } else if (prior >= 1.0) {
        std::fill(t.begin(), t.end(), 1.0);
    } else if (s <= 0.0) {
        std::fill(t.begin(), t.end(), prior);
    } else if (s > prior) {
        for (double& x : t) x *= prior / s;
    } else if (s < prior) {
        const double k = (1.0 - prior) / (1.0 - s);
        for (double& x : t) x = 1.0 - (1.0 - x) * k;
    }
    for (double& x : t) x = std::clamp(x, 0.0, 1.0);
    return t;
}

std::vector<double> product_extension(std::span<const double> p, const std::vector<double>& t) {
    const std::size_t n = p.size();
    std::vector<double> q(2 * n);
    for (std::size_t w = 0; w < n; ++w) {
        q[w] = p[w] * (1.0 - t[w]);
        q[w + n] = p[w] * t[w];
    }
    return q;
}

JointDistribution conservative_extension(const JointDistribution& dist, const BridgeSpec& spec,
                                         const WorldSpace& ext, const SearchConfig& search) {
    const auto p = dist.weights();
    const std::size_t n = p.size();
    auto build = [&](const std::vector<double>& t) {
        auto q = product_extension(p, fix_prior(t, p, spec.prior));
        return JointDistribution::normalized(ext, std::move(q));
    };
    if (!spec.likelihood_constraints) return build(std::vector<double>(n, spec.prior));

    const ConstraintSet& cs = *spec.likelihood_constraints;
    const ConstraintSet target = slackened(cs, search.search_slack);
    double best = std::numeric_limits<double>::infinity();

    for (std::size_t r = 0; r < search.max_samples; ++r) {
        Rng rng(derive_seed(search.seed, r));
        std::vector<double> t(n);
        for (auto& x : t) x = rng.uniform();
        t = fix_prior(t, p, spec.prior);
        double current = penalty(build(t), target, search.undefined_penalty);
        double step = 0.25;
        for (std::size_t sweep = 0; sweep < search.refine_steps && current > 0.0; ++sweep) {
            bool improved = false;
            for (std::size_t i = 0; i < n && current > 0.0; ++i) {
                for (double sign : {1.0, -1.0}) {
                    auto cand = t;
                    cand[i] = std::clamp(t[i] + sign * step, 0.0, 1.0);
                    if (cand[i] == t[i]) continue;
                    cand = fix_prior(cand, p, spec.prior);
                    const double pen = penalty(build(cand), target, search.undefined_penalty);
                    if (pen < current) {
                        current = pen;
                        t = std::move(cand);
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
        auto q = build(t);
        best = std::min(best, penalty(q, cs, search.undefined_penalty));
        if (penalty(q, cs, search.undefined_penalty) <= search.penalty_tolerance && satisfies_all(q, cs)) return q;
    }
    throw InfeasibleError("conservative extension with '" + spec.new_atom + "' found no model within " +
                              std::to_string(search.max_samples) + " restarts",
                          best);
}

}  // namespace

JointDistribution extend_with_bridge(const JointDistribution& dist, const BridgeSpec& spec, const SearchConfig& search) {
    if (dist.space().contains(spec.new_atom)) {
        throw StructuralError("atom '" + spec.new_atom + "' is already in the space");
    }
    if (!(spec.prior >= 0.0 && spec.prior <= 1.0)) throw std::invalid_argument("bridge prior must lie in [0, 1]");
    const WorldSpace ext = dist.space().extended(spec.new_atom);
    if (spec.likelihood_constraints && !(spec.likelihood_constraints->space() == ext)) {
        throw StructuralError("bridge constraints must be over the extended space");
    }

    if (spec.mode == BridgeMode::Conservative || !spec.likelihood_constraints) {
        return conservative_extension(dist, spec, ext, search);
    }

    SearchConfig cfg = search;
    cfg.pin = MarginalPin{Proposition::atom(ext, spec.new_atom), spec.prior};
    auto found = find_model(*spec.likelihood_constraints, cfg);
    if (!found.success) {
        throw InfeasibleError("revisionary extension with '" + spec.new_atom + "' found no model within " +
                                  std::to_string(search.max_samples) + " restarts",
                              found.penalty);
    }
    return found.distribution;
}

JointDistribution impose_screening_off(const JointDistribution& dist, const Roles& roles) {
    const auto not_b = !roles.bridge;
    const double mass = probability(dist, not_b);
    if (!(mass > 0.0)) return dist;
    return impose_screening_off(dist, roles, conditional(dist, roles.evidence, not_b));
}

JointDistribution impose_screening_off(const JointDistribution& dist, const Roles& roles, double evidence_share) {
    if (!(evidence_share >= 0.0 && evidence_share <= 1.0)) throw std::invalid_argument("evidence share must lie in [0, 1]");
    const auto& ext_b = roles.bridge.extension();
    const auto& ext_h = roles.hypothesis.extension();
    const auto& ext_e = roles.evidence.extension();
    auto w = std::vector<double>(dist.weights().begin(), dist.weights().end());

    // cells indexed by 2*h + e over the !bridge worlds
    std::array<double, 4> cell_mass{};
    std::array<std::size_t, 4> cell_count{};
    auto cell_of = [&](std::size_t world) { return 2 * (ext_h.test(world) ? 1 : 0) + (ext_e.test(world) ? 1 : 0); };
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (ext_b.test(i)) continue;
        cell_mass[static_cast<std::size_t>(cell_of(i))] += w[i];
        ++cell_count[static_cast<std::size_t>(cell_of(i))];
        total += w[i];
    }
    if (!(total > 0.0)) return dist;
    const double p_h = (cell_mass[2] + cell_mass[3]) / total;
    const double p_e = evidence_share;
    std::array<double, 4> target{};
    for (int h = 0; h < 2; ++h) {
        for (int e = 0; e < 2; ++e) {
            target[static_cast<std::size_t>(2 * h + e)] = total * (h ? p_h : 1.0 - p_h) * (e ? p_e : 1.0 - p_e);
        }
    }
    for (std::size_t c = 0; c < 4; ++c) {
        if (target[c] > 0.0 && cell_count[c] == 0) {
            throw StructuralError("screening-off needs worlds in every (hypothesis, evidence) cell outside the bridge");
        }
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (ext_b.test(i)) continue;
        const auto c = static_cast<std::size_t>(cell_of(i));
        if (target[c] == 0.0) {
            w[i] = 0.0;
        } else if (cell_mass[c] > 0.0) {
            w[i] = w[i] / cell_mass[c] * target[c];
        } else {
            w[i] = target[c] / static_cast<double>(cell_count[c]);
        }
    }
    return JointDistribution::normalized(dist.space(), std::move(w));
}

// ------------------------------------------------------------ baseline, Euler

double symmetry_baseline(double source_quotient, double delta) {
    if (!(source_quotient >= 0.0 && source_quotient <= 1.0)) {
        throw std::invalid_argument("source quotient must lie in [0, 1]");
    }
    if (!(delta >= 0.0 && delta <= source_quotient)) throw std::invalid_argument("delta must lie in [0, source quotient]");
    return std::max(source_quotient - delta, 0.0);
}

long long euler_characteristic(long long vertices, long long edges, long long faces) {
    if (vertices < 0 || edges < 0 || faces < 0) throw std::invalid_argument("element counts must be nonnegative");
    return vertices - edges + faces;
}

const std::array<Polyhedron, 5>& platonic_solids() {
    static const std::array<Polyhedron, 5> solids = {{
        {"tetrahedron", 4, 6, 4},
        {"cube", 8, 12, 6},
        {"octahedron", 6, 12, 8},
        {"dodecahedron", 20, 30, 12},
        {"icosahedron", 12, 30, 20},
    }};
    return solids;
}

// ------------------------------------------------------------ resolve

Scenario resolve(const Scenario& s) {
    Scenario out = s;
    std::optional<JointDistribution> base = s.distribution;
    if (!base) {
        auto found = find_model(*s.constraints, s.search);
        if (!found.success) {
            throw InfeasibleError("scenario '" + s.name + "': no distribution satisfies the constraints within " +
                                      std::to_string(s.search.max_samples) + " restarts (best penalty " +
                                      std::to_string(found.penalty) + ")",
                                  found.penalty);
        }
        base = found.distribution;
        out.metadata["solve"] = {{"seed", s.search.seed}, {"restart_index", found.restart_index}};
    }
    if (s.extension && !(base->space() == s.space)) base = extend_with_bridge(*base, *s.extension, s.search);
    out.distribution = std::move(base);
    out.constraints.reset();
    return out;
}

// ------------------------------------------------------------ JSON parsing

namespace {

class Parser {
public:
    explicit Parser(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
        throw ScenarioError(origin_, field, msg);
    }

    const json& require(const json& obj, const std::string& key, const std::string& path) const {
        if (!obj.is_object() || !obj.contains(key)) fail(path + key, "is required");
        return obj.at(key);
    }

    std::string string_at(const json& obj, const std::string& key, const std::string& path) const {
        const auto& v = require(obj, key, path);
        if (!v.is_string()) fail(path + key, "must be a string");
        return v.get<std::string>();
    }

    double number(const json& v, const std::string& field) const {
        if (!v.is_number()) fail(field, "must be a number");
        return v.get<double>();
    }

    Proposition formula(const WorldSpace& space, const json& v, const std::string& field) const {
        if (!v.is_string()) fail(field, "must be a formula string");
        try {
            return Proposition::parse(space, v.get<std::string>());
        } catch (const StructuralError& e) {
            fail(field, e.what());
        }
    }

    Term term(const WorldSpace& space, const json& v, const std::string& field) const {
        if (v.is_number()) return Term::value(v.get<double>());
        if (v.is_string()) return Term::prob(formula(space, v, field));
        if (!v.is_object()) fail(field, "must be a number, a formula or {target, given} / {const}");
        if (v.contains("const")) return Term::value(number(v.at("const"), field + ".const"));
        auto target = formula(space, require(v, "target", field + "."), field + ".target");
        if (v.contains("given")) return Term::cond(std::move(target), formula(space, v.at("given"), field + ".given"));
        return Term::prob(std::move(target));
    }

    Relation relation(const std::string& kind, const std::string& field) const {
        static const std::pair<const char*, Relation> table[] = {
            {">", Relation::Gt},          {">=", Relation::Ge},       {"<", Relation::Lt},
            {"<=", Relation::Le},         {"=", Relation::Eq},        {"gt", Relation::Gt},
            {"ge", Relation::Ge},         {"lt", Relation::Lt},       {"le", Relation::Le},
            {"eq", Relation::Eq},         {"prob_gt", Relation::Gt},  {"prob_lt", Relation::Lt},
            {"cond_gt_cond", Relation::Gt}, {"cond_gt_prob", Relation::Gt}, {"cond_ge_cond", Relation::Ge},
            {"equality", Relation::Eq},
        };
        for (const auto& [name, rel] : table) {
            if (kind == name) return rel;
        }
        fail(field, "unknown relation '" + kind + "'");
    }

    struct ConstraintContext {
        const WorldSpace* space;
        const Roles* roles;  // null when schema conditions are unavailable
        const std::array<std::string, 4>* condition_ids;
        const std::map<std::string, double>* margins;
        double default_margin;
    };

    ProbConstraint constraint(const json& v, const ConstraintContext& ctx, const std::string& field) const {
        if (!v.is_object()) fail(field, "must be an object");
        std::string id = v.contains("id") ? string_at(v, "id", field + ".") : std::string();

        std::optional<double> explicit_margin;
        if (v.contains("margin")) {
            explicit_margin = number(v.at("margin"), field + ".margin");
            if (*explicit_margin < 0.0) fail(field + ".margin", "must be >= 0");
        }
        auto margin_for = [&](const std::string& key, double fallback) {
            if (explicit_margin) return *explicit_margin;
            if (auto it = ctx.margins->find(key); it != ctx.margins->end()) return it->second;
            return fallback;
        };

        if (v.contains("schema")) {
            if (!ctx.roles) fail(field + ".schema", "schema conditions need the roles' space");
            const std::string which = string_at(v, "schema", field + ".");
            const auto& ids = *ctx.condition_ids;
            const auto it = std::find(ids.begin(), ids.end(), which);
            if (it == ids.end()) fail(field + ".schema", "unknown schema condition '" + which + "'");
            const int index = static_cast<int>(it - ids.begin());
            const bool reversed = v.value("reverse", false);
            if (id.empty()) id = reversed ? which + "_reversed" : which;
            return schema_constraint(*ctx.roles, index, id, margin_for(id, margin_for(which, ctx.default_margin)),
                                     reversed);
        }

        ProbConstraint c;
        c.id = id;
        std::string kind;
        if (v.contains("relation")) {
            kind = string_at(v, "relation", field + ".");
        } else {
            kind = string_at(v, "kind", field + ".");
        }
        c.relation = relation(kind, field + (v.contains("relation") ? ".relation" : ".kind"));
        c.lhs = term(*ctx.space, require(v, "lhs", field + "."), field + ".lhs");
        c.rhs = term(*ctx.space, require(v, "rhs", field + "."), field + ".rhs");
        if (v.contains("offset")) c.offset = number(v.at("offset"), field + ".offset");
        c.margin = margin_for(id, 0.0);
        if (c.lhs.is_constant() && c.rhs.is_constant()) fail(field, "compares two constants");
        return c;
    }

    std::vector<ProbConstraint> nonextremal(const json& v, const WorldSpace& space, const std::string& field) const {
        const double margin = v.contains("margin") ? number(v.at("margin"), field + ".margin") : 0.05;
        const auto& list = require(v, "atoms", field + ".");
        if (!list.is_array()) fail(field + ".atoms", "must be an array of formulas");
        std::vector<ProbConstraint> out;
        for (std::size_t i = 0; i < list.size(); ++i) {
            auto p = formula(space, list[i], field + ".atoms[" + std::to_string(i) + "]");
            const std::string name = p.to_string();
            out.push_back(ProbConstraint{"nonextremal_lo(" + name + ")", Relation::Gt, Term::prob(p), Term::value(0.0),
                                         0.0, margin});
            out.push_back(ProbConstraint{"nonextremal_hi(" + name + ")", Relation::Lt, Term::prob(p), Term::value(1.0),
                                         0.0, margin});
        }
        return out;
    }

    std::vector<ProbConstraint> constraint_list(const json& v, const ConstraintContext& ctx,
                                                const std::string& field) const {
        if (!v.is_array()) fail(field, "must be an array");
        std::vector<ProbConstraint> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.push_back(constraint(v[i], ctx, field + "[" + std::to_string(i) + "]"));
        }
        return out;
    }

    std::map<std::string, double> margin_map(const json& dist) const {
        std::map<std::string, double> m;
        if (!dist.contains("margins")) return m;
        const auto& v = dist.at("margins");
        if (!v.is_object()) fail("distribution.margins", "must be an object of id -> margin");
        for (const auto& [k, x] : v.items()) {
            const double val = number(x, "distribution.margins." + k);
            if (val < 0.0) fail("distribution.margins." + k, "must be >= 0");
            m[k] = val;
        }
        return m;
    }

    SearchConfig search(const json& dist) const {
        SearchConfig cfg;
        auto uint_field = [&](const char* key, auto& dst) {
            if (!dist.contains(key)) return;
            const auto& v = dist.at(key);
            if (!v.is_number_integer() || v.get<long long>() < 0) {
                fail(std::string("distribution.") + key, "must be a nonnegative integer");
            }
            dst = static_cast<std::remove_reference_t<decltype(dst)>>(v.get<unsigned long long>());
        };
        uint_field("seed", cfg.seed);
        uint_field("max_samples", cfg.max_samples);
        uint_field("refine_steps", cfg.refine_steps);
        if (dist.contains("penalty_tolerance")) {
            cfg.penalty_tolerance = number(dist.at("penalty_tolerance"), "distribution.penalty_tolerance");
        }
        try {
            cfg.validate();
        } catch (const std::invalid_argument& e) {
            fail("distribution", e.what());
        }
        return cfg;
    }

private:
    std::string origin_;
};

}  // namespace

Scenario scenario_from_json(const json& doc, const std::string& origin) {
    Parser p(origin);
    if (!doc.is_object()) p.fail("<root>", "scenario must be a JSON object");

    const std::string name = p.string_at(doc, "name", "");
    const auto& atoms_json = p.require(doc, "atoms", "");
    if (!atoms_json.is_array() || atoms_json.empty()) p.fail("atoms", "must be a nonempty array of names");
    std::vector<std::string> atoms;
    for (std::size_t i = 0; i < atoms_json.size(); ++i) {
        if (!atoms_json[i].is_string()) p.fail("atoms[" + std::to_string(i) + "]", "must be a string");
        atoms.push_back(atoms_json[i].get<std::string>());
    }

    std::optional<WorldSpace> base_space;
    std::optional<json> ext_json;
    if (doc.contains("extension")) ext_json = doc.at("extension");
    WorldSpace space = [&] {
        try {
            WorldSpace s(atoms);
            if (ext_json) {
                base_space = s;
                return s.extended(p.string_at(*ext_json, "atom", "extension."));
            }
            return s;
        } catch (const StructuralError& e) {
            p.fail(ext_json ? "extension.atom" : "atoms", e.what());
        }
    }();

    SchemaType schema = SchemaType::Type1;
    try {
        schema = schema_type_from_string(p.string_at(doc, "schema", ""));
    } catch (const std::invalid_argument& e) {
        p.fail("schema", e.what());
    }
    auto ids = default_condition_ids(schema);
    if (doc.contains("condition_ids")) {
        const auto& v = doc.at("condition_ids");
        if (!v.is_array() || v.size() != 4) p.fail("condition_ids", "must list exactly four ids");
        for (std::size_t i = 0; i < 4; ++i) {
            if (!v[i].is_string()) p.fail("condition_ids[" + std::to_string(i) + "]", "must be a string");
            ids[i] = v[i].get<std::string>();
        }
    }

    const auto& roles_json = p.require(doc, "roles", "");
    Roles roles{p.formula(space, p.require(roles_json, "hypothesis", "roles."), "roles.hypothesis"),
                p.formula(space, p.require(roles_json, "evidence", "roles."), "roles.evidence"),
                p.formula(space, p.require(roles_json, "bridge", "roles."), "roles.bridge")};

    const auto& dist_json = p.require(doc, "distribution", "");
    if (!dist_json.is_object()) p.fail("distribution", "must be an object");
    const auto margins = p.margin_map(dist_json);
    const double default_margin =
        dist_json.contains("default_margin") ? p.number(dist_json.at("default_margin"), "distribution.default_margin") : 0.05;
    const WorldSpace& dist_space = base_space ? *base_space : space;

    std::optional<JointDistribution> distribution;
    std::optional<ConstraintSet> constraints;
    if (dist_json.contains("weights")) {
        const auto& wj = dist_json.at("weights");
        if (!wj.is_array()) p.fail("distribution.weights", "must be an array of numbers");
        std::vector<double> w;
        for (std::size_t i = 0; i < wj.size(); ++i) w.push_back(p.number(wj[i], "distribution.weights[" + std::to_string(i) + "]"));
        try {
            distribution = JointDistribution(dist_space, std::move(w));
        } catch (const StructuralError& e) {
            p.fail("distribution.weights", e.what());
        }
    } else if (dist_json.contains("constraints")) {
        Parser::ConstraintContext ctx{&dist_space, base_space ? nullptr : &roles, &ids, &margins, default_margin};
        auto list = p.constraint_list(dist_json.at("constraints"), ctx, "distribution.constraints");
        if (dist_json.contains("nonextremal")) {
            auto extra = p.nonextremal(dist_json.at("nonextremal"), dist_space, "distribution.nonextremal");
            list.insert(list.end(), extra.begin(), extra.end());
        }
        try {
            constraints = ConstraintSet(dist_space, std::move(list));
        } catch (const StructuralError& e) {
            p.fail("distribution.constraints", e.what());
        }
    } else {
        p.fail("distribution", "needs either 'weights' or 'constraints'");
    }

    std::optional<BridgeSpec> extension;
    if (ext_json) {
        BridgeSpec spec;
        spec.new_atom = space.atoms().back();
        spec.prior = ext_json->contains("prior") ? p.number(ext_json->at("prior"), "extension.prior") : 0.5;
        if (spec.prior < 0.0 || spec.prior > 1.0) p.fail("extension.prior", "must lie in [0, 1]");
        const std::string mode = ext_json->value("mode", std::string("conservative"));
        if (mode == "conservative") {
            spec.mode = BridgeMode::Conservative;
        } else if (mode == "revisionary") {
            spec.mode = BridgeMode::Revisionary;
        } else {
            p.fail("extension.mode", "must be \"conservative\" or \"revisionary\"");
        }
        if (ext_json->contains("constraints")) {
            const auto ext_margins = [&] {
                std::map<std::string, double> m = margins;
                if (ext_json->contains("margins")) {
                    for (const auto& [k, x] : ext_json->at("margins").items()) m[k] = p.number(x, "extension.margins." + k);
                }
                return m;
            }();
            Parser::ConstraintContext ctx{&space, &roles, &ids, &ext_margins, default_margin};
            auto list = p.constraint_list(ext_json->at("constraints"), ctx, "extension.constraints");
            try {
                spec.likelihood_constraints = ConstraintSet(space, std::move(list));
            } catch (const StructuralError& e) {
                p.fail("extension.constraints", e.what());
            }
        }
        extension = std::move(spec);
    }

    std::optional<BaselineInputs> baseline;
    if (doc.contains("baseline")) {
        const auto& b = doc.at("baseline");
        baseline = BaselineInputs{p.number(p.require(b, "source_quotient", "baseline."), "baseline.source_quotient"),
                                  p.number(p.require(b, "delta", "baseline."), "baseline.delta")};
    }

    Scenario s{
        .name = name,
        .space = space,
        .schema = schema,
        .condition_ids = ids,
        .roles = std::move(roles),
        .margins = margins,
        .notes = doc.value("notes", std::string()),
        .metadata = doc.contains("metadata") ? doc.at("metadata") : json::object(),
        .distribution = std::move(distribution),
        .constraints = std::move(constraints),
        .search = p.search(dist_json),
        .base_space = base_space,
        .extension = std::move(extension),
        .baseline = baseline,
        .source = doc,
    };
    try {
        s.validate();
    } catch (const ScenarioError& e) {
        throw ScenarioError(origin, e.field(), e.what());
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open scenario file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError(path.string(), "<root>", std::string("invalid JSON: ") + e.what());
    }
    return scenario_from_json(doc, path.string());
}

json scenario_to_json(const Scenario& s) {
    if (!s.distribution || !(s.distribution->space() == s.space)) {
        throw std::invalid_argument("scenario '" + s.name + "' must be resolved before serialization");
    }
    json out;
    out["name"] = s.name;
    out["atoms"] = s.space.atoms();
    out["schema"] = to_string(s.schema);
    out["condition_ids"] = s.condition_ids;
    out["roles"] = {{"hypothesis", s.roles.hypothesis.to_string()},
                    {"evidence", s.roles.evidence.to_string()},
                    {"bridge", s.roles.bridge.to_string()}};
    out["distribution"] = {{"weights", std::vector<double>(s.distribution->weights().begin(), s.distribution->weights().end())}};
    if (s.baseline) out["baseline"] = {{"source_quotient", s.baseline->source_quotient}, {"delta", s.baseline->delta}};
    out["notes"] = s.notes;
    out["metadata"] = s.metadata;
    return out;
}

std::filesystem::path default_corpus_dir() {
    if (const char* env = std::getenv("ANALOGY_CORPUS_DIR"); env != nullptr && *env != '\0') return env;
    return ANALOGY_CORPUS_DIR;
}

std::vector<Scenario> load_corpus(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw std::ios_base::failure("corpus directory '" + dir.string() + "' not found");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Scenario> out;
    out.reserve(files.size());
    for (const auto& f : files) out.push_back(load_scenario(f));
    return out;
}

// ------------------------------------------------------------ report JSON

json to_json(const ConditionResult& c) {
    return {{"applicable", c.applicable}, {"holds", c.holds}, {"margin", c.margin}, {"at_boundary", c.at_boundary}};
}

json to_json(const ConfirmationVerdict& v) {
    return {{"confirms", v.confirms}, {"degree", v.degree}, {"margin", v.margin}, {"measures", v.measures}};
}

json to_json(const TransitivityReport& r) {
    return {{"cond_i", to_json(r.cond_i)},
            {"cond_ii", to_json(r.cond_ii)},
            {"cond_iii", to_json(r.cond_iii)},
            {"cond_iv", to_json(r.cond_iv)},
            {"conclusion", to_json(r.conclusion)},
            {"corollary_mode", r.corollary_mode},
            {"antecedent_holds", r.antecedent_holds},
            {"conclusion_relation", r.conclusion_relation},
            {"note", r.note}};
}

json to_json(const SchemaReport& r) {
    json conds = json::array();
    for (const auto& c : r.conditions) {
        conds.push_back({{"id", c.id}, {"relation", c.relation}, {"strict", c.strict}, {"result", to_json(c.result)}});
    }
    json out = {{"scenario", r.scenario},
                {"schema", to_string(r.schema)},
                {"conditions", conds},
                {"bridge_prior", r.bridge_prior},
                {"overall", to_json(r.overall)},
                {"extremality_flags", r.extremality_flags},
                {"degenerate", r.degenerate},
                {"schema_holds", r.schema_holds},
                {"failing_conditions", r.failing_conditions}};
    out["analogical_verdict"] = r.analogical_verdict ? json(*r.analogical_verdict) : json(nullptr);
    return out;
}

namespace {

ConditionResult condition_from_json(const json& j) {
    return ConditionResult{j.at("applicable").get<bool>(), j.at("holds").get<bool>(), j.at("margin").get<double>(),
                           j.at("at_boundary").get<bool>()};
}

}  // namespace

SchemaReport schema_report_from_json(const json& j) {
    SchemaReport r;
    r.scenario = j.at("scenario").get<std::string>();
    r.schema = schema_type_from_string(j.at("schema").get<std::string>());
    const auto& conds = j.at("conditions");
    if (!conds.is_array() || conds.size() != 4) throw std::invalid_argument("report must carry four conditions");
    for (std::size_t i = 0; i < 4; ++i) {
        r.conditions[i] = SchemaCondition{conds[i].at("id").get<std::string>(), conds[i].at("relation").get<std::string>(),
                                          conds[i].at("strict").get<bool>(), condition_from_json(conds[i].at("result"))};
    }
    r.bridge_prior = j.at("bridge_prior").get<double>();
    const auto& o = j.at("overall");
    r.overall.confirms = o.at("confirms").get<bool>();
    r.overall.degree = o.at("degree").get<double>();
    r.overall.margin = o.at("margin").get<double>();
    r.overall.measures = o.at("measures").get<std::map<std::string, double>>();
    r.extremality_flags = j.at("extremality_flags").get<std::vector<std::string>>();
    r.degenerate = j.at("degenerate").get<bool>();
    r.schema_holds = j.at("schema_holds").get<bool>();
    r.failing_conditions = j.at("failing_conditions").get<std::vector<std::string>>();
    if (!j.at("analogical_verdict").is_null()) r.analogical_verdict = j.at("analogical_verdict").get<bool>();
    return r;
}

bool operator==(const ConditionResult& a, const ConditionResult& b) {
    return a.applicable == b.applicable && a.holds == b.holds && a.margin == b.margin && a.at_boundary == b.at_boundary;
}

bool operator==(const ConfirmationVerdict& a, const ConfirmationVerdict& b) {
    return a.confirms == b.confirms && a.degree == b.degree && a.margin == b.margin && a.measures == b.measures;
}

bool operator==(const SchemaCondition& a, const SchemaCondition& b) {
    return a.id == b.id && a.relation == b.relation && a.strict == b.strict && a.result == b.result;
}

bool operator==(const SchemaReport& a, const SchemaReport& b) {
    return a.scenario == b.scenario && a.schema == b.schema && a.conditions == b.conditions &&
           a.bridge_prior == b.bridge_prior && a.overall == b.overall && a.extremality_flags == b.extremality_flags &&
           a.degenerate == b.degenerate && a.schema_holds == b.schema_holds &&
           a.analogical_verdict == b.analogical_verdict && a.failing_conditions == b.failing_conditions;
}

}  // namespace analogy
