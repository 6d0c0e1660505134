#include "mtpdb/cli.hpp"

#include "mtpdb/engine.hpp"
#include "mtpdb/errors.hpp"
#include "mtpdb/exact_dp.hpp"
#include "mtpdb/greedy.hpp"
#include "mtpdb/io.hpp"
#include "mtpdb/oracle.hpp"
#include "mtpdb/suites.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>


using namespace mtpdb;
using Json = nlohmann::ordered_json;


namespace {

constexpr std::pair<Mode, const char *> kModes[] = {
    {Mode::Analyze, "analyze"}, {Mode::Eval, "eval"},       {Mode::Interval, "interval"}, {Mode::Exact, "exact"},
    {Mode::Greedy, "greedy"},   {Mode::Oracle, "oracle"},   {Mode::Demo3dm, "demo3dm"},   {Mode::Verify, "verify"},
};

const char *const kBuiltin3dm = "X a1 a2 a3\nY b1 b2 b3\nZ c1 c2 c3\n"
                                "E a1,b1,c1\nE a2,b2,c2\nE a3,b3,c3\nE a1,b2,c3\nE a2,b1,c1\nk 3\n";

class Stopwatch
{
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();

    public:
    double lap()
    {
        const auto now = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(now - start_).count();
        start_ = now;
        return ms;
    }
};

struct BudgetInfo
{
    std::string relation;
    std::optional<std::size_t> derived;
    std::size_t used = 0;
    bool infeasible = false;
};

struct ResultInfo
{
    std::string kind;
    Prob value;
    std::optional<Prob> lower, upper;
    /// Greedy upper bound before clamping to 1.
    std::optional<double> upper_unclamped;
    std::optional<std::vector<std::string>> witness;
    std::optional<bool> guarantee;
};

/// Everything one run reports.
struct Report
{
    Mode mode = Mode::Eval;
    std::string query;
    std::optional<double> lambda;
    std::optional<std::string> mtp_relation;
    std::optional<double> mtp_mean;
    std::optional<BudgetInfo> budget;
    std::optional<ResultInfo> result;
    /// Mode-specific section (analysis, 3DM report, suites) under this key.
    std::string extra_key;
    Json extra;
    std::string extra_text;
    std::vector<std::string> notices;
    double load_ms = 0.0, compute_ms = 0.0;
};

Json prob_json(const Prob &p)
{
    return p.p;
}

Json to_json(const Report &r, bool timings)
{
    Json j;
    j["mode"] = to_string(r.mode);
    j["query"] = r.query.empty() ? Json() : Json(r.query);
    j["lambda"] = r.lambda ? Json(*r.lambda) : Json();
    if (r.mtp_relation) j["mtp"] = {{"relation", *r.mtp_relation}, {"mean", r.mtp_mean ? Json(*r.mtp_mean) : Json()}};
    else j["mtp"] = nullptr;
    if (r.budget) {
        j["budget"] = {{"relation", r.budget->relation},
                       {"derived", r.budget->derived ? Json(*r.budget->derived) : Json()},
                       {"used", r.budget->used},
                       {"infeasible", r.budget->infeasible}};
    } else {
        j["budget"] = nullptr;
    }
    if (r.result) {
        const ResultInfo &x = *r.result;
        Json res;
        res["kind"] = x.kind;
        res["value"] = prob_json(x.value);
        res["log10_complement"] = x.value.log10_complement();
        res["lower"] = x.lower ? prob_json(*x.lower) : Json();
        res["upper"] = x.upper ? prob_json(*x.upper) : Json();
        if (x.upper_unclamped) res["upper_unclamped"] = *x.upper_unclamped;
        if (x.upper) res["upper_log10_complement"] = x.upper->log10_complement();
        if (x.guarantee) res["guarantee"] = *x.guarantee;
        res["witness"] = x.witness ? Json(*x.witness) : Json();
        j["result"] = std::move(res);
    } else {
        j["result"] = nullptr;
    }
    if (not r.extra_key.empty()) j[r.extra_key] = r.extra;
    j["notices"] = r.notices;
    if (timings) j["timings_ms"] = {{"load", r.load_ms}, {"compute", r.compute_ms}};
    return j;
}

std::string format_prob(const Prob &p)
{
    char buf[96];
    if (std::isinf(p.log_q)) return "1";
    if (p.p >= 0.5 and p.log_q < -30.0)
        std::snprintf(buf, sizeof buf, "1 - 10^%.4f", p.log10_complement());
    else
        std::snprintf(buf, sizeof buf, "%.12g", p.p);
    return buf;
}

std::string format_number(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string to_text(const Report &r, bool timings)
{
    std::string s = std::string("mode: ") + to_string(r.mode) + "\n";
    auto line = [&](const std::string &key, const std::string &value) { s += key + ": " + value + "\n"; };
    if (not r.query.empty()) line("query", r.query);
    if (r.lambda) line("lambda", format_number(*r.lambda));
    if (r.mtp_relation)
        line("mtp", *r.mtp_relation + (r.mtp_mean ? " < " + format_number(*r.mtp_mean) : std::string()));
    if (r.budget) {
        std::string b = std::to_string(r.budget->used) + " on " + r.budget->relation;
        if (r.budget->derived) b += " (derived " + std::to_string(*r.budget->derived) + ")";
        if (r.budget->infeasible) b += " (existing tuples already violate the bound)";
        line("budget", b);
    }
    if (r.result) {
        const ResultInfo &x = *r.result;
        line("kind", x.kind);
        line("value", format_prob(x.value));
        if (x.lower and x.upper) line("interval", "[" + format_prob(*x.lower) + ", " + format_prob(*x.upper) + "]");
        if (x.upper_unclamped) line("upper before clamping", format_number(*x.upper_unclamped));
        if (x.guarantee) line("guarantee", *x.guarantee ? "yes" : "no (query has self-joins)");
        if (x.witness) {
            std::string w;
            for (auto &a : *x.witness) w += (w.empty() ? "" : " ") + a;
            line("witness", w.empty() ? "(none)" : w);
        }
    }
    s += r.extra_text;
    if (timings) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "load %.3f ms, compute %.3f ms", r.load_ms, r.compute_ms);
        line("time", buf);
    }
    return s;
}

std::size_t world_bits(std::uint64_t cap_worlds)
{
    if (cap_worlds == 0) return 0;
    return static_cast<std::size_t>(std::bit_width(cap_worlds) - 1);
}

std::string trimmed(std::string s)
{
    while (not s.empty() and (s.back() == '\n' or s.back() == '\r' or s.back() == ' ')) s.pop_back();
    return s;
}

std::vector<std::string> witness_names(const Database &db, const std::optional<CompletionChoice> &w)
{
    std::vector<std::string> out;
    if (w)
        for (auto &a : w->added) out.push_back(db.atom_name(a));
    return out;
}

ResultInfo result_from(const Database &db, const BoundResult &b)
{
    ResultInfo r;
    r.kind = to_string(b.kind);
    r.value = b.value;
    if (b.interval) {
        r.lower = b.interval->lower;
        r.upper = b.interval->upper;
    }
    if (b.witness) r.witness = witness_names(db, b.witness);
    return r;
}

/// State shared by the database-backed modes.
class Session
{
    const RunConfig &config_;
    Report &report_;
    std::optional<Database> db_;
    std::optional<UCQ> query_;
    ConstraintFile constraints_;

    public:
    Session(const RunConfig &config, Report &report) : config_(config), report_(report) { }

    void load(bool needs_db)
    {
        std::string text = config_.query;
        if (not config_.query_file.empty()) {
            if (not text.empty()) throw InvalidArgument("give either --query or --query-file, not both");
            text = trimmed(read_file(config_.query_file));
        }
        if (text.empty()) throw InvalidArgument("a query is required for this mode");
        if (config_.db_dir.empty()) {
            if (needs_db) throw InvalidArgument("--db is required for this mode");
            query_ = parse_ucq(text);
        } else {
            db_ = load_database(config_.db_dir);
            constraints_ = load_constraints(config_.db_dir);
            query_ = parse_ucq(text, db_->schema());
        }
        report_.query = to_string(*query_);
        report_.lambda = config_.lambda ? config_.lambda : constraints_.lambda;
    }

    const UCQ &query() const { return *query_; }
    const Database &db() const { return *db_; }
    bool has_db() const { return db_.has_value(); }

    OpenPDB open_pdb() const
    {
        if (not report_.lambda) throw InvalidArgument("lambda is required: pass --lambda or add lambda= to constraints.txt");
        return OpenPDB(*db_, *report_.lambda);
    }

    /// Constraints from the flags, else from constraints.txt.
    std::vector<MTPConstraint> constraints() const
    {
        if (config_.mtp_relation) {
            if (config_.mtp_mean) return {{*config_.mtp_relation, *config_.mtp_mean}};
            return {};
        }
        return constraints_.mtp;
    }

    Budget budget(const OpenPDB &g)
    {
        const auto cs = constraints();
        std::string relation;
        if (config_.mtp_relation) relation = *config_.mtp_relation;
        else if (not cs.empty()) relation = cs.front().relation;
        else throw InvalidArgument("a constrained relation is required: pass --mtp or add mtp lines to constraints.txt");
        db_->schema().require_predicate(relation);

        BudgetInfo info{relation, std::nullopt, 0, false};
        Budget used{relation, 0, false};
        if (not cs.empty()) {
            used = budget_from_mtp(g, cs);
            info.derived = used.max_added;
            info.infeasible = used.infeasible;
            report_.mtp_mean = cs.front().mean_bound;
            for (auto &c : cs) report_.mtp_mean = std::min(*report_.mtp_mean, c.mean_bound);
        } else if (not config_.budget_override) {
            throw InvalidArgument("--mtp " + relation + " needs a mean bound unless --budget is given");
        }
        report_.mtp_relation = relation;
        if (config_.budget_override) used = {relation, *config_.budget_override, false};
        info.used = used.max_added;
        report_.budget = info;
        return used;
    }

    GroundOptions ground_options() const
    {
        GroundOptions o;
        o.max_uncertain = std::min<std::size_t>(world_bits(config_.cap_worlds), 62);
        return o;
    }
};

void run_analyze(const RunConfig &config, Report &report)
{
    Session s(config, report);
    s.load(false);
    const QueryProfile profile = analyze(s.query());
    report.extra_key = "analysis";
    Json hier = Json::array();
    for (bool h : profile.hierarchical_per_cq) hier.push_back(h);
    report.extra = {{"hierarchical", hier},
                    {"inversion_free", profile.inversion_free},
                    {"self_join_free", profile.self_join_free},
                    {"safe", profile.safe}};
    std::string text = "hierarchical:";
    for (bool h : profile.hierarchical_per_cq) text += h ? " yes" : " no";
    text += std::string("\ninversion-free: ") + (profile.inversion_free ? "yes" : "no");
    text += std::string("\nself-join-free: ") + (profile.self_join_free ? "yes" : "no");
    text += std::string("\nsafe: ") + (profile.safe ? "yes" : "no") + "\n";
    if (s.has_db()) {
        const auto n = ground_size(s.query(), s.db().schema().domain_size());
        report.extra["ground_conjuncts"] = n;
        text += "ground conjuncts: " + std::to_string(n) + "\n";
    }
    report.extra_text = text;
}

void run_eval(const RunConfig &config, Report &report, Stopwatch &clock)
{
    Session s(config, report);
    s.load(true);
    report.load_ms = clock.lap();
    ResultInfo r;
    r.kind = to_string(BoundKind::Closed);
    try {
        r.value = prob_lifted_detailed(s.query(), ProbabilityView(s.db())).value;
    } catch (const UnsafeQuery &) {
        report.notices.push_back("query is unsafe; evaluated by world enumeration");
        r.value = Prob::from(prob_ground(s.query(), s.db(), s.ground_options()));
    }
    report.result = r;
}

void run_interval(const RunConfig &config, Report &report, Stopwatch &clock)
{
    Session s(config, report);
    s.load(true);
    const OpenPDB g = s.open_pdb();
    report.load_ms = clock.lap();
    try {
        report.result = result_from(s.db(), interval_unconstrained(g, s.query()));
    } catch (const UnsafeQuery &) {
        report.notices.push_back("query is unsafe; evaluated by world enumeration");
        ProbabilityView full(g.pdb);
        full.complete_all(g.lambda);
        ResultInfo r;
        r.kind = to_string(BoundKind::OpenUpper);
        r.lower = Prob::from(prob_ground(s.query(), ProbabilityView(g.pdb), s.ground_options()));
        r.upper = Prob::from(prob_ground(s.query(), full, s.ground_options()));
        r.value = *r.upper;
        report.result = r;
    }
}

void add_greedy(const Session &s, const OpenPDB &g, const Budget &budget, const RunConfig &config, Report &report)
{
    GreedyOptions options;
    options.allow_self_joins = config.force;
    if (has_self_join(s.query()) and not config.force)
        throw InvalidArgument("greedy needs a self-join-free query; pass --force to run without the guarantee");
    const GreedyTrace t = greedy_trace(g, budget, s.query(), options);
    ResultInfo r;
    r.kind = to_string(BoundKind::MtpGreedy);
    r.value = t.p_greedy;
    r.lower = t.p_greedy;
    r.upper = t.upper_clamped;
    r.upper_unclamped = t.upper;
    r.guarantee = t.guarantee;
    std::vector<AtomId> picked;
    for (auto &p : t.picks) picked.push_back(p.atom);
    std::sort(picked.begin(), picked.end(), [](AtomId a, AtomId b) {
        return std::pair(a.pred, a.index) < std::pair(b.pred, b.index);
    });
    r.witness = witness_names(g.pdb, CompletionChoice{picked});
    report.result = r;
}

void run_budgeted(const RunConfig &config, Report &report, Stopwatch &clock)
{
    Session s(config, report);
    s.load(true);
    const OpenPDB g = s.open_pdb();
    const Budget budget = s.budget(g);
    report.load_ms = clock.lap();

    switch (config.mode) {
        case Mode::Exact:
            try {
                report.result = result_from(g.pdb, mtp_upper_exact(g, budget, s.query()));
            } catch (const NotInversionFree &) {
                report.notices.push_back("query is not inversion-free; reporting the greedy bound instead");
                add_greedy(s, g, budget, config, report);
            }
            break;
        case Mode::Greedy: add_greedy(s, g, budget, config, report); break;
        case Mode::Oracle: {
            BruteforceOptions options;
            options.max_subsets = config.cap_subsets;
            options.ground = s.ground_options();
            const BruteforceReport b = mtp_bruteforce(g, budget, s.query(), options);
            if (b.used_ground) report.notices.push_back("query is unsafe; completions evaluated by world enumeration");
            report.result = result_from(g.pdb, b.bound);
            report.extra_key = "search";
            report.extra = {{"subsets", b.subsets}};
            report.extra_text = "subsets evaluated: " + std::to_string(b.subsets) + "\n";
            break;
        }
        default: break;
    }
}

int run_demo3dm(const RunConfig &config, Report &report, Stopwatch &clock)
{
    const ThreeDMInstance inst =
        config.instance_file.empty() ? parse_3dm(kBuiltin3dm) : load_3dm(config.instance_file);
    const double w = config.lambda.value_or(0.8);
    report.lambda = w;
    report.query = kM0Query;
    report.load_ms = clock.lap();
    BruteforceOptions options;
    options.max_subsets = config.cap_subsets;
    const MaxMatchReport m = verify_maxmatch(inst, w, options);

    report.extra_key = "report";
    report.extra = {{"edges", inst.edges.size()},
                    {"k", inst.k},
                    {"max_matching", m.max_matching},
                    {"budget", m.budget},
                    {"matching_exists", m.matching_exists},
                    {"p_max", m.p_max},
                    {"optimum", m.optimum},
                    {"maximizers", m.maximizers},
                    {"maximizers_are_matchings", m.maximizers_are_matchings},
                    {"fresh_x_value", m.fresh_x_value},
                    {"reused_x_value", m.reused_x_value},
                    {"passed", m.passed},
                    {"detail", m.detail}};
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "edges: %zu, k: %zu, maximum matching: %zu, budget: %zu\n"
                  "P_max: %.12g\noptimum: %.12g (%zu maximizers, all matchings: %s)\n"
                  "fresh x: %.12g, reused x: %.12g\n",
                  inst.edges.size(), inst.k, m.max_matching, m.budget, m.p_max, m.optimum, m.maximizers,
                  m.maximizers_are_matchings ? "yes" : "no", m.fresh_x_value, m.reused_x_value);
    report.extra_text = std::string(buf) + "verdict: " + (m.passed ? "pass" : "FAIL") +
                        (m.detail.empty() ? "" : " (" + m.detail + ")") + "\n";
    return m.passed ? kExitOk : kExitCheckFailed;
}

int run_verify(const RunConfig &config, Report &report, Stopwatch &clock)
{
    report.load_ms = clock.lap();
    const auto reports = property_suites({.seed = config.seed, .trials = config.trials, .parallel = true});
    report.extra_key = "suites";
    report.extra = Json::array();
    bool ok = true;
    for (auto &r : reports) {
        ok = ok and r.ok();
        report.extra.push_back({{"name", r.name},
                                {"trials", r.trials},
                                {"passed", r.passed},
                                {"failed", r.failed},
                                {"skipped", r.skipped},
                                {"max_error", r.max_error},
                                {"counterexamples", r.counterexamples}});
    }
    report.extra_text = format_reports(reports);
    return ok ? kExitOk : kExitCheckFailed;
}

}


std::optional<Mode> mtpdb::parse_mode(std::string_view name)
{
    for (auto &[mode, text] : kModes)
        if (name == text) return mode;
    return std::nullopt;
}

const char *mtpdb::to_string(Mode mode)
{
    for (auto &[m, text] : kModes)
        if (m == mode) return text;
    return "?";
}

int mtpdb::run(const RunConfig &config, std::ostream &out, std::ostream &err)
{
    Report report;
    report.mode = config.mode;
    Stopwatch clock;
    int code = kExitOk;
    try {
        if (config.lambda and not(*config.lambda >= 0.0 and *config.lambda <= 1.0))
            throw InvalidArgument("lambda must be in [0, 1]");
        if (config.mtp_mean and not(*config.mtp_mean > 0.0 and *config.mtp_mean <= 1.0))
            throw InvalidArgument("mean bound must be in (0, 1]");
        switch (config.mode) {
            case Mode::Analyze: run_analyze(config, report); break;
            case Mode::Eval: run_eval(config, report, clock); break;
            case Mode::Interval: run_interval(config, report, clock); break;
            case Mode::Exact:
            case Mode::Greedy:
            case Mode::Oracle: run_budgeted(config, report, clock); break;
            case Mode::Demo3dm: code = run_demo3dm(config, report, clock); break;
            case Mode::Verify: code = run_verify(config, report, clock); break;
        }
        report.compute_ms = clock.lap();
    } catch (const UnsafeQuery &e) {
        err << "error: unsafe query: " << e.what() << '\n';
        return kExitUnsafe;
    } catch (const NotInversionFree &e) {
        err << "error: " << e.what() << '\n';
        return kExitUnsafe;
    } catch (const ResourceLimit &e) {
        err << "error: resource limit: " << e.what() << '\n';
        return kExitResource;
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }

    for (auto &n : report.notices) err << "notice: " << n << '\n';
    if (config.output == OutputFormat::Json) out << to_json(report, config.timings).dump(2) << '\n';
    else out << to_text(report, config.timings);
    return code;
}
