#pragma once

// Analogy schemas, bridge-hypothesis extension, the symmetry-transfer
// baseline and the case-study corpus.

#include "analogy/confirmation.hpp"
#include "analogy/model_finder.hpp"
#include "analogy/prob_core.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace analogy {

/// type1: a result in the source supports a target conjecture (methods to
/// results). type2: an observed similarity supports a hidden common ground
/// (results to methods). Both instantiate the same four-condition shape.
enum class SchemaType { Type1, Type2 };

[[nodiscard]] const char* to_string(SchemaType t);
[[nodiscard]] SchemaType schema_type_from_string(const std::string& s);

/// Default condition labels per schema type.
[[nodiscard]] std::array<std::string, 4> default_condition_ids(SchemaType t);

struct Roles {
    Proposition hypothesis;
    Proposition evidence;
    Proposition bridge;
};

enum class BridgeMode { Conservative, Revisionary };

struct BridgeSpec {
    std::string new_atom;
    double prior = 0.5;
    /// Over the extended space; may be absent (pure product extension).
    std::optional<ConstraintSet> likelihood_constraints;
    BridgeMode mode = BridgeMode::Conservative;
};

struct BaselineInputs {
    double source_quotient = 0.0;
    double delta = 0.0;
};

struct Scenario {
    std::string name;
    WorldSpace space;
    SchemaType schema = SchemaType::Type1;
    std::array<std::string, 4> condition_ids;
    Roles roles;
    std::map<std::string, double> margins;
    std::string notes;
    nlohmann::json metadata = nlohmann::json::object();

    /// Exactly one of distribution / constraints is set once loaded. After
    /// resolve(), distribution is always set.
    std::optional<JointDistribution> distribution;
    std::optional<ConstraintSet> constraints;
    SearchConfig search;

    /// When set, distribution/constraints describe the base space and the
    /// bridge atom is added on resolve(). `space` is always the final space.
    std::optional<WorldSpace> base_space;
    std::optional<BridgeSpec> extension;

    std::optional<BaselineInputs> baseline;

    /// The document this scenario was parsed from (null if built in code).
    nlohmann::json source;

    /// Throws ScenarioError unless the three roles are present and distinct.
    void validate() const;
};

class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string file, std::string field, const std::string& message);
    [[nodiscard]] const std::string& file() const { return file_; }
    [[nodiscard]] const std::string& field() const { return field_; }

private:
    std::string file_;
    std::string field_;
};

/// A constraint-specified scenario (or extension) the model finder could not
/// solve within budget.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, double best_penalty)
        : std::runtime_error(what), best_penalty_(best_penalty) {}
    [[nodiscard]] double best_penalty() const { return best_penalty_; }

private:
    double best_penalty_;
};

/// Schema condition `index` (0..3) with roles substituted:
///   0: P(H|B) > P(H)         1: P(E|B) > P(E|!B)
///   2: P(H|B&E) >= P(H|B)    3: P(H|!B&E) >= P(H|!B)
/// `reversed` negates the relation (strict becomes <=, weak becomes <).
[[nodiscard]] ProbConstraint schema_constraint(const Roles& roles, int index, const std::string& id, double margin,
                                               bool reversed = false);

[[nodiscard]] std::string schema_condition_text(int index);

/// Solves constraint-specified distributions and applies the bridge
/// extension. Throws InfeasibleError when the search fails.
[[nodiscard]] Scenario resolve(const Scenario& s);

struct SchemaCondition {
    std::string id;
    std::string relation;  ///< condition text over the scenario's role formulas
    bool strict = false;
    ConditionResult result;
};

struct SchemaReport {
    std::string scenario;
    SchemaType schema = SchemaType::Type1;
    std::array<SchemaCondition, 4> conditions;
    double bridge_prior = 0.0;
    /// Direct evidence -> hypothesis verdict.
    ConfirmationVerdict overall;
    std::vector<std::string> extremality_flags;
    /// Bridge prior extremal: the analogy carries no uncertainty.
    bool degenerate = false;
    /// All four conditions applicable and holding.
    bool schema_holds = false;
    /// Set only when the schema holds with a non-extremal bridge.
    std::optional<bool> analogical_verdict;
    std::vector<std::string> failing_conditions;
};

/// Requires a concrete distribution (call resolve() first). Throws
/// std::logic_error if the schema verdict ever contradicts the direct
/// Bayesian computation.
[[nodiscard]] SchemaReport evaluate_schema(const Scenario& s, const Tolerances& tol = {},
                                           double extremal_epsilon = kDefaultExtremalEpsilon);

/// Appends spec.new_atom to the space. Conservative mode keeps every old-atom
/// marginal; revisionary mode re-solves the whole extended constraint set.
/// The new atom's marginal equals spec.prior. Throws InfeasibleError.
[[nodiscard]] JointDistribution extend_with_bridge(const JointDistribution& dist, const BridgeSpec& spec,
                                                   const SearchConfig& search = {});

/// Marginal of `dist` over the first `base.atom_count()` atoms.
[[nodiscard]] JointDistribution marginalize_prefix(const JointDistribution& dist, const WorldSpace& base);

/// Rebalances the four (hypothesis, evidence) cells inside !bridge so that
/// hypothesis and evidence are independent given !bridge, keeping P(!bridge),
/// P(H | !bridge), P(E | !bridge) and everything inside bridge.
[[nodiscard]] JointDistribution impose_screening_off(const JointDistribution& dist, const Roles& roles);

/// Same as impose_screening_off, but first moves P(E | !bridge) to
/// `evidence_share`.
[[nodiscard]] JointDistribution impose_screening_off(const JointDistribution& dist, const Roles& roles,
                                                     double evidence_share);

/// The symmetry-transfer target quotient: max(source_quotient - delta, 0).
/// Depends on nothing but its two inputs.
[[nodiscard]] double symmetry_baseline(double source_quotient, double delta);

[[nodiscard]] long long euler_characteristic(long long vertices, long long edges, long long faces);

struct Polyhedron {
    const char* name;
    long long vertices;
    long long edges;
    long long faces;
};

[[nodiscard]] const std::array<Polyhedron, 5>& platonic_solids();

// ---------------------------------------------------------------- file I/O

/// Parses a scenario document; `origin` names the source in errors.
[[nodiscard]] Scenario scenario_from_json(const nlohmann::json& doc, const std::string& origin);
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);

/// A scenario with explicit weights (the resolved distribution).
[[nodiscard]] nlohmann::json scenario_to_json(const Scenario& s);

[[nodiscard]] std::filesystem::path default_corpus_dir();

/// Every *.json directly inside `dir`, sorted by file name.
[[nodiscard]] std::vector<Scenario> load_corpus(const std::filesystem::path& dir = default_corpus_dir());

[[nodiscard]] nlohmann::json to_json(const ConditionResult& c);
[[nodiscard]] nlohmann::json to_json(const ConfirmationVerdict& v);
[[nodiscard]] nlohmann::json to_json(const TransitivityReport& r);
[[nodiscard]] nlohmann::json to_json(const SchemaReport& r);
[[nodiscard]] SchemaReport schema_report_from_json(const nlohmann::json& j);

bool operator==(const ConditionResult& a, const ConditionResult& b);
bool operator==(const ConfirmationVerdict& a, const ConfirmationVerdict& b);
bool operator==(const SchemaCondition& a, const SchemaCondition& b);
bool operator==(const SchemaReport& a, const SchemaReport& b);

}  // namespace analogy
