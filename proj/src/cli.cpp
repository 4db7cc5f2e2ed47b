#include "analogy/cli.hpp"

#include "analogy/confirmation.hpp"
#include "analogy/model_finder.hpp"
#include "analogy/scenarios.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace analogy::cli {

using nlohmann::json;

namespace {

// Shortest round-trip text for a double.
std::string num(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string fixed(double x, int digits = 6) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << x;
    return os.str();
}

class CommandError : public std::runtime_error {
public:
    CommandError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] int code() const { return code_; }

private:
    int code_;
};

json distribution_json(const JointDistribution& d) {
    return {{"atoms", d.space().atoms()},
            {"weights", std::vector<double>(d.weights().begin(), d.weights().end())}};
}

json base_report(const std::string& command, const std::vector<std::string>& args) {
    return {{"version", kReportVersion}, {"command", command}, {"args", args}};
}

void emit_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

std::string mark(const ConditionResult& c) {
    if (!c.applicable) return "n/a ";
    return c.holds ? "ok  " : "FAIL";
}

std::string margin_text(const ConditionResult& c) { return c.applicable ? fixed(c.margin) : "undefined"; }

void print_schema_report(std::ostream& out, const SchemaReport& r) {
    out << "scenario " << r.scenario << " (" << to_string(r.schema) << ")\n";
    for (const auto& c : r.conditions) {
        out << "  " << std::left << std::setw(4) << (c.id + ")") << std::setw(30) << c.relation << ' ' << mark(c.result)
            << "  margin " << margin_text(c.result);
        if (c.result.at_boundary) out << "  (equality)";
        out << '\n';
    }
    out << "  bridge prior " << fixed(r.bridge_prior) << '\n';
    out << "  direct verdict: " << (r.overall.confirms ? "confirms" : "does not confirm") << ", degree "
        << fixed(r.overall.degree, 9) << '\n';
    out << "  analogical verdict: ";
    if (r.analogical_verdict) {
        out << "confirmation by analogy\n";
    } else if (r.degenerate) {
        out << "withheld (analogy channel degenerate)\n";
    } else {
        out << "withheld (failing:";
        for (const auto& id : r.failing_conditions) out << ' ' << id;
        out << ")\n";
    }
    for (const auto& f : r.extremality_flags) out << "  flag: " << f << '\n';
}

Scenario load_or_throw(const std::string& path) {
    if (!std::filesystem::exists(path)) throw CommandError(kIo, "scenario file '" + path + "' does not exist");
    try {
        return load_scenario(path);
    } catch (const std::ios_base::failure& e) {
        throw CommandError(kIo, e.what());
    }
}

Scenario resolve_or_throw(const Scenario& s) {
    try {
        return resolve(s);
    } catch (const InfeasibleError& e) {
        throw CommandError(kInfeasible, e.what());
    }
}

struct EvalOptions {
    double margin = 0.0;
    double weak_tolerance = 1e-12;
    double extremal_epsilon = kDefaultExtremalEpsilon;

    [[nodiscard]] Tolerances tolerances() const { return Tolerances{margin, weak_tolerance}; }
    [[nodiscard]] json to_json() const {
        return {{"margin", margin}, {"weak_tolerance", weak_tolerance}, {"extremal_epsilon", extremal_epsilon}};
    }
};

void apply_seed(Scenario& s, std::optional<std::uint64_t> seed) {
    if (seed) s.search.seed = *seed;
}

// ------------------------------------------------------------------ check

struct CheckArgs {
    std::string file;
    bool json_out = false;
    std::optional<std::uint64_t> seed;
    EvalOptions eval;
    bool timings = false;
};

int cmd_check(const CheckArgs& a, const std::vector<std::string>& args, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    Scenario s = load_or_throw(a.file);
    apply_seed(s, a.seed);
    const Scenario solved = resolve_or_throw(s);
    SchemaReport report;
    try {
        report = evaluate_schema(solved, a.eval.tolerances(), a.eval.extremal_epsilon);
    } catch (const UndefinedConditional& e) {
        throw CommandError(kValidation, std::string("evidence has probability zero: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (a.json_out) {
        json j = base_report("check", args);
        j["config"] = {{"seed", solved.search.seed}, {"evaluation", a.eval.to_json()}};
        j["scenario"] = solved.name;
        j["distribution"] = distribution_json(*solved.distribution);
        j["report"] = to_json(report);
        if (solved.baseline) {
            j["baseline"] = {{"source_quotient", solved.baseline->source_quotient},
                             {"delta", solved.baseline->delta},
                             {"target_quotient", symmetry_baseline(solved.baseline->source_quotient, solved.baseline->delta)}};
        }
        if (a.timings) j["timings"] = {{"total_seconds", secs}};
        emit_json(out, j);
    } else {
        print_schema_report(out, report);
        if (solved.baseline) {
            out << "  symmetry baseline target quotient "
                << fixed(symmetry_baseline(solved.baseline->source_quotient, solved.baseline->delta)) << '\n';
        }
        if (a.timings) out << "  elapsed " << fixed(secs, 3) << " s\n";
    }
    return kOk;
}

// ------------------------------------------------------------ find-model

struct FindArgs {
    std::string file;
    bool json_out = false;
    std::optional<std::uint64_t> seed;
    std::optional<int> grid;
};

int cmd_find_model(const FindArgs& a, const std::vector<std::string>& args, std::ostream& out) {
    Scenario s = load_or_throw(a.file);
    apply_seed(s, a.seed);
    if (!s.constraints) throw CommandError(kValidation, "scenario '" + s.name + "' gives weights, not constraints");

    const auto found = find_model(*s.constraints, s.search);
    std::optional<std::size_t> grid_hits;
    if (a.grid) {
        try {
            grid_hits = grid_enumerate(*s.constraints, *a.grid).size();
        } catch (const GridBudgetError& e) {
            throw CommandError(kValidation, e.what());
        }
    }

    if (a.json_out) {
        json j = base_report("find-model", args);
        j["config"] = {{"seed", s.search.seed},
                       {"max_samples", s.search.max_samples},
                       {"refine_steps", s.search.refine_steps},
                       {"penalty_tolerance", s.search.penalty_tolerance}};
        j["scenario"] = s.name;
        j["success"] = found.success;
        j["penalty"] = found.penalty;
        j["restart_index"] = found.restart_index;
        j["distribution"] = distribution_json(found.distribution);
        json cons = json::array();
        for (std::size_t i = 0; i < s.constraints->size(); ++i) {
            const auto& c = s.constraints->constraints()[i];
            const auto& e = found.evaluations[i];
            cons.push_back({{"id", c.id},
                            {"constraint", c.to_string()},
                            {"defined", e.defined},
                            {"achieved", e.achieved},
                            {"required", c.margin},
                            {"satisfied", e.satisfied}});
        }
        j["constraints"] = cons;
        if (grid_hits) j["grid"] = {{"resolution", *a.grid}, {"satisfying_points", *grid_hits}};
        emit_json(out, j);
    } else {
        out << "scenario " << s.name << ": " << (found.success ? "model found" : "no model found within budget")
            << " (restart " << found.restart_index << ", penalty " << num(found.penalty) << ")\n";
        for (std::size_t w = 0; w < found.distribution.weights().size(); ++w) {
            out << "  world " << std::setw(3) << w << "  " << fixed(found.distribution.weight(w), 9) << '\n';
        }
        for (std::size_t i = 0; i < s.constraints->size(); ++i) {
            const auto& c = s.constraints->constraints()[i];
            const auto& e = found.evaluations[i];
            out << "  " << (e.satisfied ? "ok   " : "FAIL ") << std::left << std::setw(22) << c.id << ' '
                << (e.defined ? fixed(e.achieved) : std::string("undefined")) << '\n';
        }
        if (grid_hits) out << "  grid resolution " << *a.grid << ": " << *grid_hits << " satisfying points\n";
    }
    return found.success ? kOk : kInfeasible;
}

// --------------------------------------------------------- fuzz-theorem

struct FuzzArgs {
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
    double margin = 1e-6;
    double weak_tolerance = 0.0;
    bool corollary = false;
    bool json_out = false;
};

int cmd_fuzz(const FuzzArgs& a, const std::vector<std::string>& args, std::ostream& out) {
    if (a.samples < 1) throw CommandError(kValidation, "--samples must be >= 1");
    const Tolerances tol{a.margin, a.weak_tolerance};
    const auto s = a.corollary ? fuzz_corollary(a.samples, a.seed, tol) : fuzz_theorem(a.samples, a.seed, tol);
    if (a.json_out) {
        json j = base_report("fuzz-theorem", args);
        j["config"] = {{"samples", a.samples},
                       {"seed", a.seed},
                       {"margin", a.margin},
                       {"weak_tolerance", a.weak_tolerance},
                       {"mode", a.corollary ? "corollary" : "theorem"}};
        j["filtered"] = s.filtered;
        j["violations"] = s.violations;
        j["min_conclusion_margin"] = s.min_conclusion_margin;
        j["conclusion_relation"] = kConclusionRelation;
        j["first_violation"] = s.first_violation ? json(*s.first_violation) : json(nullptr);
        emit_json(out, j);
    } else {
        out << (a.corollary ? "corollary" : "theorem") << " fuzz: samples " << s.samples << ", antecedent satisfied "
            << s.filtered << ", violations " << s.violations << '\n';
        out << "  smallest conclusion margin " << num(s.min_conclusion_margin) << '\n';
    }
    return kOk;
}

// -------------------------------------------------------- counterexample

struct CounterArgs {
    std::uint64_t seed = 1;
    std::uint64_t budget = 100000;
    MinerConfig miner;
    bool json_out = false;
    std::string output;
};

std::vector<std::string> failing_theorem_conditions(const TransitivityReport& r) {
    std::vector<std::string> out;
    const std::pair<const char*, const ConditionResult*> list[] = {
        {"i", &r.cond_i}, {"ii", &r.cond_ii}, {"iii", &r.cond_iii}, {"iv", &r.cond_iv}};
    for (const auto& [name, c] : list) {
        if (!c->applicable || !c->holds) out.emplace_back(name);
    }
    return out;
}

int cmd_counterexample(const CounterArgs& a, const std::vector<std::string>& args, std::ostream& out) {
    if (a.budget < 1) throw CommandError(kValidation, "--budget must be >= 1");
    const auto found = mine_naive_transitivity_counterexample(a.seed, a.budget, a.miner);
    json j = base_report("counterexample", args);
    j["config"] = {{"seed", a.seed},
                   {"budget", a.budget},
                   {"confirm_margin", a.miner.confirm_margin},
                   {"disconfirm_margin", a.miner.disconfirm_margin}};
    if (!found) {
        if (a.json_out) {
            j["found"] = false;
            emit_json(out, j);
        }
        throw CommandError(kNotFound, "no counterexample within a budget of " + std::to_string(a.budget) +
                                          " samples; try a larger --budget");
    }
    const auto& c = *found;
    const auto failing = failing_theorem_conditions(c.report);

    if (!a.output.empty()) {
        Scenario s{
            .name = "counterexample_seed" + std::to_string(a.seed),
            .space = c.distribution.space(),
            .schema = SchemaType::Type1,
            .condition_ids = {"i", "ii", "iii", "iv"},
            .roles = Roles{c.z, c.x, c.y},
            .margins = {},
            .notes = "A confirms B and B confirms C, yet A disconfirms C. Mined by the counterexample command.",
            .metadata = {{"seed", a.seed}, {"sample_index", c.sample_index}},
            .distribution = c.distribution,
            .constraints = std::nullopt,
            .search = {},
            .base_space = std::nullopt,
            .extension = std::nullopt,
            .baseline = std::nullopt,
            .source = nullptr,
        };
        std::ofstream f(a.output);
        if (!f) throw CommandError(kIo, "cannot write '" + a.output + "'");
        f << scenario_to_json(s).dump(2) << '\n';
        if (!f) throw CommandError(kIo, "failed writing '" + a.output + "'");
    }

    if (a.json_out) {
        j["found"] = true;
        j["sample_index"] = c.sample_index;
        j["distribution"] = distribution_json(c.distribution);
        j["a_confirms_b"] = to_json(c.x_confirms_y);
        j["b_confirms_c"] = to_json(c.y_confirms_z);
        j["a_confirms_c"] = to_json(c.x_confirms_z);
        j["transitivity"] = to_json(c.report);
        j["failing_conditions"] = failing;
        emit_json(out, j);
    } else {
        out << "counterexample at sample " << c.sample_index << " (seed " << a.seed << ")\n";
        for (std::size_t w = 0; w < c.distribution.weights().size(); ++w) {
            out << "  world A=" << (w & 1U) << " B=" << ((w >> 1) & 1U) << " C=" << ((w >> 2) & 1U) << "  "
                << fixed(c.distribution.weight(w), 9) << '\n';
        }
        out << "  P(B|A) - P(B) = " << fixed(c.x_confirms_y.degree, 9) << "  (A confirms B)\n";
        out << "  P(C|B) - P(C) = " << fixed(c.y_confirms_z.degree, 9) << "  (B confirms C)\n";
        out << "  P(C|A) - P(C) = " << fixed(c.x_confirms_z.degree, 9) << "  (A disconfirms C)\n";
        out << "  transitivity conditions failing:";
        for (const auto& f : failing) out << " (" << f << ")";
        out << '\n';
    }
    return kOk;
}

// ------------------------------------------------------------------ sweep

struct SweepArgs {
    std::string file;
    std::string param;
    std::string range;
    std::string output;
    std::optional<std::uint64_t> seed;
    EvalOptions eval;
};

std::vector<double> parse_range(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        double v = 0.0;
        auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (res.ec != std::errc() || res.ptr != item.data() + item.size()) {
            throw CommandError(kValidation, "bad --range '" + text + "': expected lo:hi:step");
        }
        parts.push_back(v);
    }
    if (parts.size() != 3) throw CommandError(kValidation, "bad --range '" + text + "': expected lo:hi:step");
    const double lo = parts[0];
    const double hi = parts[1];
    const double step = parts[2];
    if (!(step > 0.0)) throw CommandError(kValidation, "--range step must be > 0");
    if (hi < lo) throw CommandError(kValidation, "--range needs lo <= hi");
    std::vector<double> values;
    for (std::size_t i = 0;; ++i) {
        const double v = lo + static_cast<double>(i) * step;
        if (v > hi + 1e-9 * std::max(1.0, std::abs(hi))) break;
        values.push_back(std::min(v, hi));
    }
    return values;
}

struct SweepRow {
    double value = 0.0;
    std::string status;
    std::optional<SchemaReport> report;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
    const auto values = parse_range(a.range);
    Scenario s = load_or_throw(a.file);
    apply_seed(s, a.seed);

    const bool prior_sweep = a.param == "bridge.prior" || a.param == "bridge.prior_free";
    const bool margin_sweep = a.param.rfind("margins.", 0) == 0 && a.param.size() > 8;
    const bool ext_prior_sweep = a.param == "extension.prior";
    if (!prior_sweep && !margin_sweep && !ext_prior_sweep) {
        throw CommandError(kValidation, "unknown --param '" + a.param +
                                            "'; expected bridge.prior, bridge.prior_free, extension.prior or margins.<id>");
    }
    if (margin_sweep && !s.margins.count(a.param.substr(8)) && !s.constraints && !s.extension) {
        throw CommandError(kValidation, "scenario '" + s.name + "' has no constraint margins to sweep");
    }
    if (ext_prior_sweep && !s.extension) throw CommandError(kValidation, "scenario '" + s.name + "' has no extension");

    std::optional<JointDistribution> base;
    if (prior_sweep) {
        const Scenario solved = resolve_or_throw(s);
        base = *solved.distribution;
        if (a.param == "bridge.prior") base = impose_screening_off(*base, solved.roles);
    }

    std::vector<SweepRow> rows;
    for (double v : values) {
        SweepRow row{v, "ok", std::nullopt};
        try {
            Scenario point = s;
            if (prior_sweep) {
                point.distribution = force_marginal(*base, s.roles.bridge, v);
                point.constraints.reset();
                point.extension.reset();
                point.base_space.reset();
            } else {
                json doc = s.source;
                if (margin_sweep) {
                    const std::string id = a.param.substr(8);
                    if (doc.contains("extension") && doc["extension"].contains("constraints")) {
                        doc["extension"]["margins"][id] = v;
                    }
                    doc["distribution"]["margins"][id] = v;
                } else {
                    doc["extension"]["prior"] = v;
                }
                point = scenario_from_json(doc, a.file);
                apply_seed(point, a.seed);
                point = resolve(point);
            }
            row.report = evaluate_schema(point, a.eval.tolerances(), a.eval.extremal_epsilon);
            if (row.report->degenerate) row.status = "degenerate";
        } catch (const InfeasibleError&) {
            row.status = "infeasible";
        } catch (const UndefinedConditional&) {
            row.status = "undefined";
        } catch (const ScenarioError& e) {
            throw CommandError(kValidation, e.what());
        }
        rows.push_back(std::move(row));
    }

    std::ostringstream csv;
    csv << "# analogy-sweep v" << kReportVersion << " scenario=" << s.name << " param=" << a.param
        << " range=" << a.range << " seed=" << s.search.seed << " margin=" << num(a.eval.margin) << '\n';
    csv << "value,status";
    for (const auto& id : s.condition_ids) csv << ",cond_" << id;
    csv << ",bridge_prior,degree,confirms\n";
    for (const auto& r : rows) {
        csv << num(r.value) << ',' << r.status;
        if (r.report) {
            for (const auto& c : r.report->conditions) csv << ',' << (c.result.applicable ? num(c.result.margin) : "");
            csv << ',' << num(r.report->bridge_prior) << ',' << num(r.report->overall.degree) << ','
                << (r.report->overall.confirms ? 1 : 0);
        } else {
            csv << ",,,,,,,";
        }
        csv << '\n';
    }

    if (a.output.empty() || a.output == "-") {
        out << csv.str();
    } else {
        std::ofstream f(a.output);
        if (!f) throw CommandError(kIo, "cannot write '" + a.output + "'");
        f << csv.str();
        if (!f) throw CommandError(kIo, "failed writing '" + a.output + "'");
        out << "wrote " << rows.size() << " rows to " << a.output << '\n';
    }
    return kOk;
}

// ----------------------------------------------------------------- corpus

struct CorpusArgs {
    std::string dir;
    bool json_out = false;
    std::optional<std::uint64_t> seed;
    EvalOptions eval;
};

int cmd_corpus(const CorpusArgs& a, const std::vector<std::string>& args, std::ostream& out) {
    std::vector<Scenario> corpus;
    try {
        corpus = load_corpus(a.dir.empty() ? default_corpus_dir() : std::filesystem::path(a.dir));
    } catch (const std::ios_base::failure& e) {
        throw CommandError(kIo, e.what());
    }
    json reports = json::array();
    for (auto& s : corpus) {
        apply_seed(s, a.seed);
        const Scenario solved = resolve_or_throw(s);
        const auto r = evaluate_schema(solved, a.eval.tolerances(), a.eval.extremal_epsilon);
        if (a.json_out) {
            json entry = {{"scenario", solved.name},
                          {"distribution", distribution_json(*solved.distribution)},
                          {"report", to_json(r)}};
            if (solved.baseline) {
                entry["baseline_target_quotient"] =
                    symmetry_baseline(solved.baseline->source_quotient, solved.baseline->delta);
            }
            reports.push_back(entry);
        } else {
            print_schema_report(out, r);
            out << '\n';
        }
    }
    if (a.json_out) {
        json j = base_report("corpus", args);
        j["config"] = {{"seed_override", a.seed ? json(*a.seed) : json(nullptr)}, {"evaluation", a.eval.to_json()}};
        j["scenarios"] = reports;
        emit_json(out, j);
    }
    return kOk;
}

void add_eval_options(CLI::App* cmd, EvalOptions& eval) {
    cmd->add_option("--margin", eval.margin, "Strict-condition margin for evaluation")->capture_default_str();
    cmd->add_option("--weak-tolerance", eval.weak_tolerance, "Tolerance for weak (>=) conditions")->capture_default_str();
    cmd->add_option("--epsilon", eval.extremal_epsilon, "Extremality threshold")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian confirmation-by-analogy workbench", "analogy"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    CheckArgs check;
    auto* c_check = app.add_subcommand("check", "Evaluate a scenario's analogy schema");
    c_check->add_option("file", check.file, "Scenario JSON file")->required();
    c_check->add_flag("--json", check.json_out, "Emit a JSON report");
    c_check->add_option("--seed", check.seed, "Override the scenario's search seed");
    c_check->add_flag("--timings", check.timings, "Include wall-clock timings");
    add_eval_options(c_check, check.eval);

    FindArgs find;
    auto* c_find = app.add_subcommand("find-model", "Solve a constraint-specified scenario");
    c_find->add_option("file", find.file, "Scenario JSON file")->required();
    c_find->add_flag("--json", find.json_out, "Emit a JSON report");
    c_find->add_option("--seed", find.seed, "Override the scenario's search seed");
    c_find->add_option("--grid", find.grid, "Also count satisfying grid points at this resolution");

    FuzzArgs fuzz;
    auto* c_fuzz = app.add_subcommand("fuzz-theorem", "Fuzz the transitivity theorem on random 3-atom distributions");
    c_fuzz->add_option("--samples", fuzz.samples, "Number of sampled distributions")->capture_default_str();
    c_fuzz->add_option("--seed", fuzz.seed, "Seed")->capture_default_str();
    c_fuzz->add_option("--margin", fuzz.margin, "Strict margin for (i) and (ii)")->capture_default_str();
    c_fuzz->add_option("--weak-tolerance", fuzz.weak_tolerance, "Tolerance for (iii) and (iv)")->capture_default_str();
    c_fuzz->add_flag("--corollary", fuzz.corollary, "Fuzz the limiting case where Y entails Z");
    c_fuzz->add_flag("--json", fuzz.json_out, "Emit a JSON report");

    SweepArgs sweep;
    auto* c_sweep = app.add_subcommand("sweep", "Sweep a scenario parameter and write CSV");
    c_sweep->add_option("file", sweep.file, "Scenario JSON file")->required();
    c_sweep->add_option("--param", sweep.param, "bridge.prior | bridge.prior_free | extension.prior | margins.<id>")
        ->required();
    c_sweep->add_option("--range", sweep.range, "lo:hi:step")->required();
    c_sweep->add_option("--output", sweep.output, "CSV output path ('-' for stdout)");
    c_sweep->add_option("--seed", sweep.seed, "Override the scenario's search seed");
    add_eval_options(c_sweep, sweep.eval);

    CounterArgs counter;
    auto* c_counter = app.add_subcommand("counterexample", "Mine a counterexample to naive transitivity");
    c_counter->add_option("--seed", counter.seed, "Seed")->capture_default_str();
    c_counter->add_option("--budget", counter.budget, "Number of sampled distributions")->capture_default_str();
    c_counter->add_option("--confirm-margin", counter.miner.confirm_margin, "Required confirmation degree")
        ->capture_default_str();
    c_counter->add_option("--disconfirm-margin", counter.miner.disconfirm_margin, "Required disconfirmation degree")
        ->capture_default_str();
    c_counter->add_flag("--json", counter.json_out, "Emit a JSON report");
    c_counter->add_option("--output", counter.output, "Also write the counterexample as a scenario file");

    CorpusArgs corpus;
    auto* c_corpus = app.add_subcommand("corpus", "Evaluate every scenario in the corpus");
    c_corpus->add_option("--dir", corpus.dir, "Corpus directory");
    c_corpus->add_flag("--json", corpus.json_out, "Emit a JSON report");
    c_corpus->add_option("--seed", corpus.seed, "Override every scenario's search seed");
    add_eval_options(c_corpus, corpus.eval);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (c_check->parsed()) return cmd_check(check, args, out);
        if (c_find->parsed()) return cmd_find_model(find, args, out);
        if (c_fuzz->parsed()) return cmd_fuzz(fuzz, args, out);
        if (c_sweep->parsed()) return cmd_sweep(sweep, out);
        if (c_counter->parsed()) return cmd_counterexample(counter, args, out);
        if (c_corpus->parsed()) return cmd_corpus(corpus, args, out);
    } catch (const CommandError& e) {
        err << "error: " << e.what() << '\n';
        return e.code();
    } catch (const ScenarioError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const StructuralError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }
    return kUsage;
}

}  // namespace analogy::cli
