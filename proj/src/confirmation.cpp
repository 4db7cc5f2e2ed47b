#include "analogy/confirmation.hpp"

#include "analogy/model_finder.hpp"
#include "analogy/rng.hpp"

#include <cmath>
#include <functional>

namespace analogy {

ConfirmationVerdict confirm(const JointDistribution& dist, const Proposition& evidence, const Proposition& hypothesis,
                            double margin) {
    const double prior = probability(dist, hypothesis);
    const double posterior = conditional(dist, hypothesis, evidence);

    ConfirmationVerdict v;
    v.degree = posterior - prior;
    v.margin = margin;
    v.confirms = v.degree > margin;
    v.measures["difference"] = v.degree;
    if (prior > 0.0 && posterior > 0.0) v.measures["log_ratio"] = std::log(posterior / prior);
    try {
        const double lik_h = conditional(dist, evidence, hypothesis);
        const double lik_not_h = conditional(dist, evidence, !hypothesis);
        if (lik_h > 0.0 && lik_not_h > 0.0) v.measures["log_likelihood_ratio"] = std::log(lik_h / lik_not_h);
    } catch (const UndefinedConditional&) {
        // extremal hypothesis: likelihood ratio undefined
    }
    return v;
}

namespace {

ConditionResult strict_condition(const std::function<double()>& margin_fn, const Tolerances& tol) {
    ConditionResult r;
    try {
        r.margin = margin_fn();
    } catch (const UndefinedConditional&) {
        return r;
    }
    r.applicable = true;
    r.holds = r.margin > tol.strict_margin;
    return r;
}

ConditionResult weak_condition(const std::function<double()>& margin_fn, const Tolerances& tol) {
    ConditionResult r;
    try {
        r.margin = margin_fn();
    } catch (const UndefinedConditional&) {
        return r;
    }
    r.applicable = true;
    r.holds = r.margin >= -tol.weak_tolerance;
    r.at_boundary = std::abs(r.margin) <= tol.weak_tolerance;
    return r;
}

TransitivityReport build_report(const JointDistribution& d, const Proposition& x, const Proposition& y,
                                const Proposition& z, const Tolerances& tol) {
    const Proposition not_y = !y;
    TransitivityReport rep;
    rep.cond_i = strict_condition([&] { return conditional(d, z, y) - probability(d, z); }, tol);
    rep.cond_ii = strict_condition([&] { return conditional(d, x, y) - conditional(d, x, not_y); }, tol);
    rep.cond_iii = weak_condition([&] { return conditional(d, z, x && y) - conditional(d, z, y); }, tol);
    rep.cond_iv = weak_condition([&] { return conditional(d, z, x && not_y) - conditional(d, z, not_y); }, tol);
    try {
        rep.conclusion.margin = conditional(d, z, x) - probability(d, z);
        rep.conclusion.applicable = true;
        rep.conclusion.holds = rep.conclusion.margin > 0.0;
    } catch (const UndefinedConditional&) {
        rep.conclusion = ConditionResult{};
    }
    return rep;
}

bool met(const ConditionResult& c) { return c.applicable && c.holds; }

}  // namespace

TransitivityReport check_transitivity(const JointDistribution& dist, const Proposition& x, const Proposition& y,
                                      const Proposition& z, const Tolerances& tol) {
    auto rep = build_report(dist, x, y, z, tol);
    rep.antecedent_holds = met(rep.cond_i) && met(rep.cond_ii) && met(rep.cond_iii) && met(rep.cond_iv);
    return rep;
}

TransitivityReport check_corollary(const JointDistribution& dist, const Proposition& x, const Proposition& y,
                                   const Proposition& z, const Tolerances& tol) {
    if (!entails(y, z)) throw PreconditionError("corollary check requires y to entail z");
    auto rep = build_report(dist, x, y, z, tol);
    rep.corollary_mode = true;
    rep.antecedent_holds = met(rep.cond_ii) && met(rep.cond_iv);
    return rep;
}

namespace {

const WorldSpace& abc_space() {
    static const WorldSpace space({"A", "B", "C"});
    return space;
}

}  // namespace

std::optional<Counterexample> mine_naive_transitivity_counterexample(std::uint64_t seed, std::uint64_t budget,
                                                                     const MinerConfig& config) {
    const WorldSpace& space = abc_space();
    const auto a = Proposition::atom(space, "A");
    const auto b = Proposition::atom(space, "B");
    const auto c = Proposition::atom(space, "C");

    for (std::uint64_t i = 0; i < budget; ++i) {
        const auto dist = sample_simplex(space, derive_seed(seed, i));
        const auto ab = confirm(dist, a, b, config.confirm_margin);
        if (!ab.confirms) continue;
        const auto bc = confirm(dist, b, c, config.confirm_margin);
        if (!bc.confirms) continue;
        const auto ac = confirm(dist, a, c);
        if (!(ac.degree < -config.disconfirm_margin)) continue;
        return Counterexample{dist, a, b, c, ab, bc, ac, check_transitivity(dist, a, b, c), i};
    }
    return std::nullopt;
}

namespace {

void record(FuzzSummary& s, const TransitivityReport& rep, std::uint64_t index) {
    if (!rep.antecedent_holds) return;
    ++s.filtered;
    if (rep.conclusion.applicable) s.min_conclusion_margin = std::min(s.min_conclusion_margin, rep.conclusion.margin);
    if (!rep.conclusion.holds) {
        ++s.violations;
        if (!s.first_violation) s.first_violation = index;
    }
}

}  // namespace

FuzzSummary fuzz_theorem(std::uint64_t samples, std::uint64_t seed, const Tolerances& tol) {
    const WorldSpace space({"X", "Y", "Z"});
    const auto x = Proposition::atom(space, "X");
    const auto y = Proposition::atom(space, "Y");
    const auto z = Proposition::atom(space, "Z");

    FuzzSummary s;
    s.samples = samples;
    for (std::uint64_t i = 0; i < samples; ++i) {
        const auto dist = sample_simplex(space, derive_seed(seed, i));
        record(s, check_transitivity(dist, x, y, z, tol), i);
    }
    return s;
}

FuzzSummary fuzz_corollary(std::uint64_t samples, std::uint64_t seed, const Tolerances& tol) {
    const WorldSpace space({"X", "U", "V"});
    const auto x = Proposition::atom(space, "X");
    const auto u = Proposition::atom(space, "U");
    const auto v = Proposition::atom(space, "V");
    // (y, z) pairs with y's extension a strict subset of z's.
    const std::pair<Proposition, Proposition> shapes[] = {
        {u && v, v},
        {u, u || v},
        {u && v, u || v},
        {u && v, u},
    };

    FuzzSummary s;
    s.samples = samples;
    for (std::uint64_t i = 0; i < samples; ++i) {
        Rng pick(derive_seed(seed ^ 0xc0ffeeULL, i));
        const auto& [y, z] = shapes[pick.below(std::size(shapes))];
        const auto dist = sample_simplex(space, derive_seed(seed, i));
        record(s, check_corollary(dist, x, y, z, tol), i);
    }
    return s;
}

}  // namespace analogy
