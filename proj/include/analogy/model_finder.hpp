#pragma once

// Feasibility search over the probability simplex for sets of
// (conditional-)probability inequality constraints.

#include "analogy/prob_core.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace analogy {

enum class Relation { Gt, Ge, Lt, Le, Eq };

[[nodiscard]] const char* relation_symbol(Relation r);
[[nodiscard]] bool is_strict(Relation r);

/// One side of a constraint: P(target), P(target | given), or a constant.
struct Term {
    std::optional<Proposition> target;
    std::optional<Proposition> given;
    double constant = 0.0;

    [[nodiscard]] static Term prob(Proposition target) { return Term{std::move(target), std::nullopt, 0.0}; }
    [[nodiscard]] static Term cond(Proposition target, Proposition given) {
        return Term{std::move(target), std::move(given), 0.0};
    }
    [[nodiscard]] static Term value(double c) { return Term{std::nullopt, std::nullopt, c}; }

    [[nodiscard]] bool is_constant() const { return !target.has_value(); }
    [[nodiscard]] std::string to_string() const;
};

/// lhs REL rhs + offset, required to hold with at least `margin` of slack.
///
/// The achieved margin is lhs - (rhs + offset) for Gt/Ge, (rhs + offset) - lhs
/// for Lt/Le and -|lhs - rhs - offset| for Eq (where `margin` is the allowed
/// absolute deviation). Strict relations additionally need a positive achieved
/// margin.
struct ProbConstraint {
    std::string id;
    Relation relation = Relation::Gt;
    Term lhs;
    Term rhs;
    double offset = 0.0;
    double margin = 0.0;

    [[nodiscard]] std::string to_string() const;
};

/// Rounding allowance when judging a double-precision evaluation: margins
/// count as met within this much, and strict relations need an achieved
/// margin above it.
inline constexpr double kEvalTolerance = 1e-12;

struct ConstraintEval {
    bool defined = true;
    double achieved = 0.0;
    bool satisfied = false;
};

[[nodiscard]] ConstraintEval evaluate(const JointDistribution& dist, const ProbConstraint& c);

class ConstraintSet {
public:
    /// Throws StructuralError unless nonempty, single-space and margins >= 0.
    ConstraintSet(WorldSpace space, std::vector<ProbConstraint> constraints);

    [[nodiscard]] const WorldSpace& space() const { return space_; }
    [[nodiscard]] const std::vector<ProbConstraint>& constraints() const { return constraints_; }
    [[nodiscard]] std::size_t size() const { return constraints_.size(); }

    /// Constraints rebound into a superset space, in the same order.
    [[nodiscard]] ConstraintSet rebind(const WorldSpace& space) const;

    /// This set plus `extra` constraints.
    [[nodiscard]] ConstraintSet with(std::vector<ProbConstraint> extra) const;

private:
    WorldSpace space_;
    std::vector<ProbConstraint> constraints_;
};

/// Holds P(event) fixed at value throughout a search.
struct MarginalPin {
    Proposition event;
    double value = 0.5;
};

struct SearchConfig {
    std::uint64_t seed = 1;
    std::size_t max_samples = 100000;
    std::size_t refine_steps = 200;
    double penalty_tolerance = 1e-12;
    double undefined_penalty = 1.0;
    /// Extra slack the search aims for beyond each margin, so that an exact
    /// re-evaluation of the returned point clears the margins.
    double search_slack = 1e-6;
    std::optional<int> grid_resolution;
    std::optional<MarginalPin> pin;

    void validate() const;
};

/// Uniform draw from the simplex: one standard exponential per world from a
/// seeded generator, normalized by the sum.
[[nodiscard]] JointDistribution sample_simplex(const WorldSpace& space, std::uint64_t seed);

/// Sum over constraints of max(0, margin - achieved)^2; an undefined
/// conditional contributes `undefined_penalty`.
[[nodiscard]] double penalty(const JointDistribution& dist, const ConstraintSet& cs, double undefined_penalty = 1.0);

[[nodiscard]] bool satisfies_all(const JointDistribution& dist, const ConstraintSet& cs);

struct FindResult {
    bool success = false;
    /// On failure, the best point found.
    JointDistribution distribution;
    double penalty = 0.0;
    std::vector<ConstraintEval> evaluations;
    std::size_t restarts_used = 0;
    std::uint64_t restart_index = 0;
    /// Best penalty after each restart; non-increasing.
    std::vector<double> best_penalty_trace;
};

/// Random restarts from sample_simplex, each refined by derivative-free
/// coordinate descent with renormalization. Deterministic given the seed.
/// Failure means "not found within budget", never proven infeasibility.
[[nodiscard]] FindResult find_model(const ConstraintSet& cs, const SearchConfig& config);

class GridBudgetError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kGridMaxWorlds = 8;
inline constexpr int kGridMaxResolution = 20;

struct GridPoint {
    int resolution = 0;
    std::vector<int> counts;  ///< weight of world w is counts[w] / resolution

    [[nodiscard]] JointDistribution to_distribution(const WorldSpace& space) const;
};

/// Number of weight vectors grid_enumerate visits: C(resolution + n - 1, n - 1).
[[nodiscard]] std::uint64_t grid_size(std::size_t world_count, int resolution);

/// Every vector with entries k/resolution summing to one that satisfies all
/// constraints, decided in exact rational arithmetic.
[[nodiscard]] std::vector<GridPoint> grid_enumerate(const ConstraintSet& cs, int resolution);

}  // namespace analogy
