#include "analogy/prob_core.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

namespace analogy {

// ---------------------------------------------------------------- WorldSpace

namespace {

bool valid_atom_name(std::string_view name) {
    if (name.empty() || name == "true" || name == "false") return false;
    if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '*' || c == '\'';
    });
}

}  // namespace

WorldSpace::WorldSpace(std::vector<std::string> atoms) {
    if (atoms.size() > kMaxAtoms) {
        throw StructuralError("world space has " + std::to_string(atoms.size()) + " atoms; at most " +
                              std::to_string(kMaxAtoms) + " are supported");
    }
    std::set<std::string> seen;
    for (const auto& a : atoms) {
        if (!valid_atom_name(a)) throw StructuralError("invalid atom name '" + a + "'");
        if (!seen.insert(a).second) throw StructuralError("duplicate atom name '" + a + "'");
    }
    atoms_ = std::make_shared<const std::vector<std::string>>(std::move(atoms));
}

std::size_t WorldSpace::index_of(std::string_view name) const {
    const auto& v = *atoms_;
    auto it = std::find(v.begin(), v.end(), name);
    if (it == v.end()) throw StructuralError("unknown atom '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - v.begin());
}

bool WorldSpace::contains(std::string_view name) const {
    return std::find(atoms_->begin(), atoms_->end(), name) != atoms_->end();
}

WorldSpace WorldSpace::extended(std::string name) const {
    auto atoms = *atoms_;
    atoms.push_back(std::move(name));
    return WorldSpace(std::move(atoms));
}

bool operator==(const WorldSpace& a, const WorldSpace& b) {
    return a.atoms_ == b.atoms_ || *a.atoms_ == *b.atoms_;
}

// ------------------------------------------------------------------ WorldSet

WorldSet::WorldSet(std::size_t world_count, bool value)
    : size_(world_count), blocks_((world_count + 63) / 64, value ? ~std::uint64_t{0} : 0) {
    clear_tail();
}

void WorldSet::clear_tail() {
    if (size_ % 64 != 0 && !blocks_.empty()) blocks_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
}

WorldSet WorldSet::complement() const {
    WorldSet out = *this;
    for (auto& b : out.blocks_) b = ~b;
    out.clear_tail();
    return out;
}

WorldSet WorldSet::intersect(const WorldSet& other) const {
    if (size_ != other.size_) throw StructuralError("world sets over different spaces");
    WorldSet out = *this;
    for (std::size_t i = 0; i < blocks_.size(); ++i) out.blocks_[i] &= other.blocks_[i];
    return out;
}

WorldSet WorldSet::unite(const WorldSet& other) const {
    if (size_ != other.size_) throw StructuralError("world sets over different spaces");
    WorldSet out = *this;
    for (std::size_t i = 0; i < blocks_.size(); ++i) out.blocks_[i] |= other.blocks_[i];
    return out;
}

bool WorldSet::subset_of(const WorldSet& other) const {
    if (size_ != other.size_) throw StructuralError("world sets over different spaces");
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        if ((blocks_[i] & ~other.blocks_[i]) != 0) return false;
    }
    return true;
}

std::size_t WorldSet::count() const {
    std::size_t n = 0;
    for (auto b : blocks_) n += static_cast<std::size_t>(std::popcount(b));
    return n;
}

std::vector<std::size_t> WorldSet::indices() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for (std::size_t w = 0; w < size_; ++w) {
        if (test(w)) out.push_back(w);
    }
    return out;
}

// --------------------------------------------------------------- Proposition

Proposition::Proposition(WorldSpace space, std::shared_ptr<const Node> node, WorldSet extension)
    : space_(std::move(space)), node_(std::move(node)), extension_(std::move(extension)) {}

WorldSet Proposition::evaluate(const WorldSpace& space, const Node& node) {
    const std::size_t n = space.world_count();
    switch (node.op) {
        case Op::True: return WorldSet(n, true);
        case Op::False: return WorldSet(n, false);
        case Op::Atom: {
            const std::size_t k = space.index_of(node.name);
            WorldSet s(n);
            for (std::size_t w = 0; w < n; ++w) {
                if (WorldSpace::holds(w, k)) s.set(w);
            }
            return s;
        }
        case Op::Not: return evaluate(space, *node.lhs).complement();
        case Op::And: return evaluate(space, *node.lhs).intersect(evaluate(space, *node.rhs));
        case Op::Or: return evaluate(space, *node.lhs).unite(evaluate(space, *node.rhs));
    }
    throw StructuralError("corrupt formula node");
}

Proposition Proposition::atom(const WorldSpace& space, std::string_view name) {
    auto node = std::make_shared<const Node>(Node{Op::Atom, std::string(name), nullptr, nullptr});
    auto ext = evaluate(space, *node);
    return Proposition(space, std::move(node), std::move(ext));
}

Proposition Proposition::tautology(const WorldSpace& space) {
    auto node = std::make_shared<const Node>(Node{Op::True, {}, nullptr, nullptr});
    return Proposition(space, node, WorldSet(space.world_count(), true));
}

Proposition Proposition::contradiction(const WorldSpace& space) {
    auto node = std::make_shared<const Node>(Node{Op::False, {}, nullptr, nullptr});
    return Proposition(space, node, WorldSet(space.world_count(), false));
}

Proposition Proposition::from_worlds(const WorldSpace& space, const WorldSet& worlds) {
    if (worlds.size() != space.world_count()) throw StructuralError("world set does not match space");
    Proposition result = contradiction(space);
    bool first = true;
    for (std::size_t w : worlds.indices()) {
        Proposition cell = tautology(space);
        for (std::size_t k = 0; k < space.atom_count(); ++k) {
            auto a = atom(space, space.atom(k));
            Proposition lit = WorldSpace::holds(w, k) ? a : !a;
            cell = (k == 0) ? lit : (cell && lit);
        }
        result = first ? cell : (result || cell);
        first = false;
    }
    return result;
}

Proposition operator!(const Proposition& a) {
    auto node = std::make_shared<const Proposition::Node>(
        Proposition::Node{Proposition::Op::Not, {}, a.node_, nullptr});
    return Proposition(a.space_, std::move(node), a.extension_.complement());
}

Proposition operator&&(const Proposition& a, const Proposition& b) {
    if (!(a.space_ == b.space_)) throw StructuralError("conjunction of propositions over different spaces");
    auto node = std::make_shared<const Proposition::Node>(
        Proposition::Node{Proposition::Op::And, {}, a.node_, b.node_});
    return Proposition(a.space_, std::move(node), a.extension_.intersect(b.extension_));
}

Proposition operator||(const Proposition& a, const Proposition& b) {
    if (!(a.space_ == b.space_)) throw StructuralError("disjunction of propositions over different spaces");
    auto node = std::make_shared<const Proposition::Node>(
        Proposition::Node{Proposition::Op::Or, {}, a.node_, b.node_});
    return Proposition(a.space_, std::move(node), a.extension_.unite(b.extension_));
}

bool Proposition::equivalent(const Proposition& other) const {
    return space_ == other.space_ && extension_ == other.extension_;
}

Proposition Proposition::rebind(const WorldSpace& space) const {
    auto ext = evaluate(space, *node_);
    return Proposition(space, node_, std::move(ext));
}

// Precedence: Or = 1, And = 2, Not/atom = 3.
void Proposition::print(const Node& node, int parent_prec, std::string& out) {
    switch (node.op) {
        case Op::Atom: out += node.name; return;
        case Op::True: out += "true"; return;
        case Op::False: out += "false"; return;
        case Op::Not:
            out += '!';
            print(*node.lhs, 3, out);
            return;
        case Op::And:
        case Op::Or: {
            const int prec = node.op == Op::And ? 2 : 1;
            const bool paren = prec < parent_prec;
            if (paren) out += '(';
            print(*node.lhs, prec, out);
            out += node.op == Op::And ? " & " : " | ";
            // Right operand gets prec + 1 so a left-associative reparse is exact.
            print(*node.rhs, prec + 1, out);
            if (paren) out += ')';
            return;
        }
    }
}

std::string Proposition::to_string() const {
    std::string out;
    print(*node_, 0, out);
    return out;
}

// Recursive-descent parser:
//   expr := term ('|' term)*
//   term := factor ('&' factor)*
//   factor := '!' factor | '(' expr ')' | ident
class FormulaParser {
public:
    FormulaParser(const WorldSpace& space, std::string_view text) : space_(space), text_(text) {}

    Proposition run() {
        Proposition p = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw StructuralError("formula '" + std::string(text_) + "' at column " + std::to_string(pos_ + 1) +
                              ": " + what);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Proposition expr() {
        Proposition lhs = term();
        while (accept('|')) lhs = lhs || term();
        return lhs;
    }

    Proposition term() {
        Proposition lhs = factor();
        while (accept('&')) lhs = lhs && factor();
        return lhs;
    }

    Proposition factor() {
        if (accept('!')) return !factor();
        if (accept('(')) {
            Proposition inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '*' || c == '\'') {
                ++pos_;
            } else {
                break;
            }
        }
        if (start == pos_) fail(pos_ < text_.size() ? "unexpected '" + std::string(1, text_[pos_]) + "'"
                                                    : "unexpected end of formula");
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "true") return Proposition::tautology(space_);
        if (name == "false") return Proposition::contradiction(space_);
        if (!space_.contains(name)) fail("unknown atom '" + std::string(name) + "'");
        return Proposition::atom(space_, name);
    }

    const WorldSpace& space_;
    std::string_view text_;
    std::size_t pos_ = 0;
};

Proposition Proposition::parse(const WorldSpace& space, std::string_view text) {
    return FormulaParser(space, text).run();
}

// --------------------------------------------------------- JointDistribution

JointDistribution::JointDistribution(WorldSpace space, std::vector<double> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
    if (weights_.size() != space_.world_count()) {
        throw StructuralError("distribution has " + std::to_string(weights_.size()) + " weights but the space has " +
                              std::to_string(space_.world_count()) + " worlds");
    }
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw StructuralError("distribution weights must be finite and >= 0");
        total += w;
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
        throw StructuralError("distribution weights sum to " + std::to_string(total) + ", not 1");
    }
}

JointDistribution JointDistribution::normalized(WorldSpace space, std::vector<double> raw) {
    double total = 0.0;
    for (double w : raw) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw StructuralError("raw weights must be finite and >= 0");
        total += w;
    }
    if (!(total > 0.0)) throw StructuralError("raw weights sum to zero");
    for (double& w : raw) w /= total;
    return JointDistribution(std::move(space), std::move(raw));
}

JointDistribution JointDistribution::uniform(WorldSpace space) {
    const std::size_t n = space.world_count();
    return JointDistribution(std::move(space), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

JointDistribution JointDistribution::point_mass(WorldSpace space, std::size_t world) {
    std::vector<double> w(space.world_count(), 0.0);
    w.at(world) = 1.0;
    return JointDistribution(std::move(space), std::move(w));
}

// ----------------------------------------------------------------- Queries

namespace {

void require_same_space(const JointDistribution& dist, const Proposition& a) {
    if (!(dist.space() == a.space())) throw StructuralError("proposition and distribution are over different spaces");
}

double mass(const JointDistribution& dist, const WorldSet& set) {
    const auto w = dist.weights();
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (set.test(i)) total += w[i];
    }
    return total;
}

}  // namespace

double probability(const JointDistribution& dist, const Proposition& a) {
    require_same_space(dist, a);
    return std::clamp(mass(dist, a.extension()), 0.0, 1.0);
}

double conditional(const JointDistribution& dist, const Proposition& a, const Proposition& given) {
    require_same_space(dist, a);
    require_same_space(dist, given);
    const double denom = mass(dist, given.extension());
    if (!(denom > 0.0)) {
        throw UndefinedConditional("P(" + a.to_string() + " | " + given.to_string() + ") conditions on an event of probability 0");
    }
    const double num = mass(dist, a.extension().intersect(given.extension()));
    return std::clamp(num / denom, 0.0, 1.0);
}

bool entails(const Proposition& a, const Proposition& b) {
    if (!(a.space() == b.space())) throw StructuralError("entailment between propositions over different spaces");
    return a.extension().subset_of(b.extension());
}

bool is_non_extremal(const JointDistribution& dist, const Proposition& a, double epsilon) {
    const double p = probability(dist, a);
    return p > epsilon && p < 1.0 - epsilon;
}

}  // namespace analogy

namespace analogy {

void rescale_to_marginal(std::vector<double>& weights, const WorldSet& event, double value) {
    if (weights.size() != event.size()) throw StructuralError("weights and event are over different spaces");
    if (!(value >= 0.0 && value <= 1.0)) throw std::invalid_argument("marginal must lie in [0, 1]");
    double inside = 0.0;
    double outside = 0.0;
    std::size_t n_inside = 0;
    for (std::size_t w = 0; w < weights.size(); ++w) {
        if (event.test(w)) {
            inside += weights[w];
            ++n_inside;
        } else {
            outside += weights[w];
        }
    }
    const std::size_t n_outside = weights.size() - n_inside;
    if ((value > 0.0 && n_inside == 0) || (value < 1.0 && n_outside == 0)) {
        throw StructuralError("cannot place the requested mass on an empty side of the event");
    }
    for (std::size_t w = 0; w < weights.size(); ++w) {
        const bool in = event.test(w);
        const double side_mass = in ? inside : outside;
        const double target = in ? value : 1.0 - value;
        const std::size_t side_count = in ? n_inside : n_outside;
        if (target == 0.0) {
            weights[w] = 0.0;
        } else if (side_mass > 0.0) {
            weights[w] = weights[w] / side_mass * target;
        } else {
            weights[w] = target / static_cast<double>(side_count);
        }
    }
}

JointDistribution force_marginal(const JointDistribution& dist, const Proposition& event, double value) {
    if (!(dist.space() == event.space())) throw StructuralError("event and distribution are over different spaces");
    std::vector<double> w(dist.weights().begin(), dist.weights().end());
    rescale_to_marginal(w, event.extension(), value);
    return JointDistribution::normalized(dist.space(), std::move(w));
}

}  // namespace analogy
