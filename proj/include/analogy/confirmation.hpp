#pragma once

// Incremental confirmation verdicts and sufficient conditions for transitive
// confirmation.
//
// With evidence X, bridge Y and hypothesis Z, the transitivity theorem says
// that
//   (i)   P(Z|Y) > P(Z)
//   (ii)  P(X|Y) > P(X|!Y)
//   (iii) P(Z|X&Y)  >= P(Z|Y)
//   (iv)  P(Z|X&!Y) >= P(Z|!Y)
// together guarantee P(Z|X) > P(Z). When Y entails Z, (ii) and (iv) suffice.

#include "analogy/prob_core.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace analogy {

/// Comparison policy for strict and weak conditions.
struct Tolerances {
    /// Strict conditions need margin > strict_margin.
    double strict_margin = 0.0;
    /// Weak conditions need margin >= -weak_tolerance.
    double weak_tolerance = 1e-12;
};

struct ConfirmationVerdict {
    bool confirms = false;
    /// Difference measure P(h|e) - P(h).
    double degree = 0.0;
    /// The margin `confirms` was judged against.
    double margin = 0.0;
    /// "difference" always; "log_ratio" and "log_likelihood_ratio" when finite.
    std::map<std::string, double> measures;
};

/// Throws UndefinedConditional when P(evidence) = 0.
[[nodiscard]] ConfirmationVerdict confirm(const JointDistribution& dist, const Proposition& evidence,
                                          const Proposition& hypothesis, double margin = 0.0);

struct ConditionResult {
    bool applicable = false;
    bool holds = false;
    double margin = 0.0;
    /// Weak condition met with exact equality (the screening-off boundary).
    bool at_boundary = false;
};

inline constexpr const char* kConclusionRelation = "P(Z|X) > P(Z)";
inline constexpr const char* kConclusionNote =
    "conclusion tested as P(Z|X) > P(Z), i.e. X confirms Z";

struct TransitivityReport {
    ConditionResult cond_i;
    ConditionResult cond_ii;
    ConditionResult cond_iii;
    ConditionResult cond_iv;
    ConditionResult conclusion;
    bool corollary_mode = false;
    /// All decision-relevant conditions applicable and holding.
    bool antecedent_holds = false;
    std::string conclusion_relation = kConclusionRelation;
    std::string note = kConclusionNote;

    /// Antecedent holds but the conclusion does not.
    [[nodiscard]] bool violation() const { return antecedent_holds && !conclusion.holds; }
};

[[nodiscard]] TransitivityReport check_transitivity(const JointDistribution& dist, const Proposition& x,
                                                    const Proposition& y, const Proposition& z,
                                                    const Tolerances& tol = {});

class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Limiting case: y entails z, so only (ii) and (iv) are decision-relevant.
/// Throws PreconditionError when y does not entail z.
[[nodiscard]] TransitivityReport check_corollary(const JointDistribution& dist, const Proposition& x,
                                                 const Proposition& y, const Proposition& z,
                                                 const Tolerances& tol = {});

struct Counterexample {
    JointDistribution distribution;
    Proposition x;
    Proposition y;
    Proposition z;
    ConfirmationVerdict x_confirms_y;
    ConfirmationVerdict y_confirms_z;
    ConfirmationVerdict x_confirms_z;
    TransitivityReport report;
    std::uint64_t sample_index = 0;
};

struct MinerConfig {
    /// x must raise y, and y raise z, by more than this.
    double confirm_margin = 0.01;
    /// x must lower z by more than this.
    double disconfirm_margin = 0.001;
};

/// Searches uniformly sampled 3-atom distributions (atoms A, B, C) for
/// A confirming B and B confirming C while A disconfirms C. Sample i uses
/// sub-seed derive_seed(seed, i); the first hit in index order is returned.
/// std::nullopt means the budget ran out.
[[nodiscard]] std::optional<Counterexample> mine_naive_transitivity_counterexample(std::uint64_t seed,
                                                                                   std::uint64_t budget,
                                                                                   const MinerConfig& config = {});

struct FuzzSummary {
    std::uint64_t samples = 0;
    std::uint64_t filtered = 0;
    std::uint64_t violations = 0;
    /// Smallest conclusion margin among filtered cases (1 when none).
    double min_conclusion_margin = 1.0;
    std::optional<std::uint64_t> first_violation;
};

/// Samples 3-atom distributions with x, y, z the three atoms, keeps those
/// whose (i)-(iv) hold under `tol` and counts failures of the conclusion.
[[nodiscard]] FuzzSummary fuzz_theorem(std::uint64_t samples, std::uint64_t seed, const Tolerances& tol);

/// Like fuzz_theorem but with y's extension a strict subset of z's, filtering
/// on (ii) and (iv) only.
[[nodiscard]] FuzzSummary fuzz_corollary(std::uint64_t samples, std::uint64_t seed, const Tolerances& tol);

}  // namespace analogy
