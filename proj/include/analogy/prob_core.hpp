#pragma once

// Finite probability spaces over propositional atoms.
//
// A WorldSpace fixes an ordered list of atoms; world index bit k is the truth
// value of atom k. Propositions are boolean formulas evaluated eagerly to the
// set of worlds satisfying them. A JointDistribution assigns a weight to every
// world. All types are immutable after construction.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace analogy {

inline constexpr std::size_t kMaxAtoms = 20;
inline constexpr double kNormalizationTolerance = 1e-12;
inline constexpr double kDefaultExtremalEpsilon = 1e-9;

/// Raised when objects from different spaces are mixed, or a space/formula is
/// malformed.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when conditioning on an event of probability zero.
class UndefinedConditional : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class WorldSpace {
public:
    explicit WorldSpace(std::vector<std::string> atoms);

    [[nodiscard]] std::size_t atom_count() const { return atoms_->size(); }
    [[nodiscard]] std::size_t world_count() const { return std::size_t{1} << atoms_->size(); }
    [[nodiscard]] const std::vector<std::string>& atoms() const { return *atoms_; }
    [[nodiscard]] const std::string& atom(std::size_t k) const { return atoms_->at(k); }

    /// Index of the named atom; throws StructuralError if absent.
    [[nodiscard]] std::size_t index_of(std::string_view name) const;
    [[nodiscard]] bool contains(std::string_view name) const;

    /// Truth of atom k in world w.
    [[nodiscard]] static bool holds(std::size_t world, std::size_t k) { return ((world >> k) & 1U) != 0; }

    /// A new space with `name` appended as the last atom.
    [[nodiscard]] WorldSpace extended(std::string name) const;

    friend bool operator==(const WorldSpace& a, const WorldSpace& b);

private:
    std::shared_ptr<const std::vector<std::string>> atoms_;
};

/// Dense set of world indices.
class WorldSet {
public:
    WorldSet() = default;
    explicit WorldSet(std::size_t world_count, bool value = false);

    [[nodiscard]] std::size_t size() const { return size_; }
    [[nodiscard]] bool test(std::size_t w) const { return ((blocks_[w >> 6] >> (w & 63U)) & 1U) != 0; }
    void set(std::size_t w) { blocks_[w >> 6] |= (std::uint64_t{1} << (w & 63U)); }

    [[nodiscard]] WorldSet complement() const;
    [[nodiscard]] WorldSet intersect(const WorldSet& other) const;
    [[nodiscard]] WorldSet unite(const WorldSet& other) const;
    [[nodiscard]] bool subset_of(const WorldSet& other) const;
    [[nodiscard]] std::size_t count() const;
    [[nodiscard]] std::vector<std::size_t> indices() const;

    friend bool operator==(const WorldSet&, const WorldSet&) = default;

private:
    void clear_tail();

    std::size_t size_ = 0;
    std::vector<std::uint64_t> blocks_;
};

class Proposition {
public:
    enum class Op { Atom, True, False, Not, And, Or };

    [[nodiscard]] static Proposition atom(const WorldSpace& space, std::string_view name);
    [[nodiscard]] static Proposition tautology(const WorldSpace& space);
    [[nodiscard]] static Proposition contradiction(const WorldSpace& space);

    /// Parses "!", "&", "|" and parentheses over atom names; "&" binds tighter
    /// than "|". Also accepts "true" / "false".
    [[nodiscard]] static Proposition parse(const WorldSpace& space, std::string_view text);

    /// The proposition with the given extension; printed as a DNF of worlds.
    [[nodiscard]] static Proposition from_worlds(const WorldSpace& space, const WorldSet& worlds);

    [[nodiscard]] const WorldSpace& space() const { return space_; }
    [[nodiscard]] const WorldSet& extension() const { return extension_; }
    [[nodiscard]] Op op() const { return node_->op; }

    /// Canonical text that parse() accepts.
    [[nodiscard]] std::string to_string() const;

    /// The same formula evaluated over a space that contains all of its atoms.
    [[nodiscard]] Proposition rebind(const WorldSpace& space) const;

    friend Proposition operator!(const Proposition& a);
    friend Proposition operator&&(const Proposition& a, const Proposition& b);
    friend Proposition operator||(const Proposition& a, const Proposition& b);

    /// Same space and same extension.
    [[nodiscard]] bool equivalent(const Proposition& other) const;

private:
    struct Node {
        Op op;
        std::string name;
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };

    Proposition(WorldSpace space, std::shared_ptr<const Node> node, WorldSet extension);

    static WorldSet evaluate(const WorldSpace& space, const Node& node);
    static void print(const Node& node, int parent_prec, std::string& out);

    WorldSpace space_;
    std::shared_ptr<const Node> node_;
    WorldSet extension_;

    friend class FormulaParser;
};

class JointDistribution {
public:
    /// Validates nonnegativity and normalization (within 1e-12).
    JointDistribution(WorldSpace space, std::vector<double> weights);

    /// Scales nonnegative raw weights to sum to one. Throws if the total is zero.
    [[nodiscard]] static JointDistribution normalized(WorldSpace space, std::vector<double> raw);
    [[nodiscard]] static JointDistribution uniform(WorldSpace space);
    /// All mass on one world.
    [[nodiscard]] static JointDistribution point_mass(WorldSpace space, std::size_t world);

    [[nodiscard]] const WorldSpace& space() const { return space_; }
    [[nodiscard]] std::span<const double> weights() const { return weights_; }
    [[nodiscard]] double weight(std::size_t w) const { return weights_.at(w); }

private:
    WorldSpace space_;
    std::vector<double> weights_;
};

[[nodiscard]] double probability(const JointDistribution& dist, const Proposition& a);

/// P(a | given). Throws UndefinedConditional when P(given) is zero.
[[nodiscard]] double conditional(const JointDistribution& dist, const Proposition& a, const Proposition& given);

/// Extension of a is a subset of extension of b.
[[nodiscard]] bool entails(const Proposition& a, const Proposition& b);

[[nodiscard]] bool is_non_extremal(const JointDistribution& dist, const Proposition& a,
                                   double epsilon = kDefaultExtremalEpsilon);

/// Rescales in place so the mass of `event` is `value` and the complement
/// holds 1 - value, keeping relative weights within each side. A side with no
/// mass that must receive some is filled uniformly.
void rescale_to_marginal(std::vector<double>& weights, const WorldSet& event, double value);

/// Distribution with P(event) = value and P(. | event), P(. | !event)
/// unchanged wherever defined.
[[nodiscard]] JointDistribution force_marginal(const JointDistribution& dist, const Proposition& event, double value);

}  // namespace analogy
