#include "mtpdb/suites.hpp"

#include "mtpdb/engine.hpp"
#include "mtpdb/errors.hpp"
#include "mtpdb/exact_dp.hpp"
#include "mtpdb/generators.hpp"
#include "mtpdb/greedy.hpp"
#include "mtpdb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>


using namespace mtpdb;


namespace {

constexpr int kMaxAttempts = 500;

struct Outcome
{
    enum class Status { Pass, Fail, Skip } status = Status::Skip;
    double error = 0.0;
    std::string description;

    static Outcome pass(double error = 0.0) { return {Status::Pass, error, {}}; }
    static Outcome fail(double error, std::string description) { return {Status::Fail, error, std::move(description)}; }
    static Outcome skip(std::string why = {}) { return {Status::Skip, 0.0, std::move(why)}; }
};

/// Accumulates named checks within one trial.
class Checks
{
    std::ostringstream failures_;
    double error_ = 0.0;
    bool ok_ = true;

    public:
    void expect(bool condition, const std::string &what)
    {
        if (not condition) {
            ok_ = false;
            failures_ << what << "; ";
        }
    }

    /// |a - b| <= tol
    void close(double a, double b, double tol, const std::string &what)
    {
        const double e = std::abs(a - b);
        error_ = std::max(error_, e);
        if (not(e <= tol)) {
            ok_ = false;
            failures_ << what << " (" << format(a) << " vs " << format(b) << "); ";
        }
    }

    /// a <= b + tol
    void at_most(double a, double b, double tol, const std::string &what)
    {
        error_ = std::max(error_, a - b);
        if (not(a <= b + tol)) {
            ok_ = false;
            failures_ << what << " (" << format(a) << " > " << format(b) << "); ";
        }
    }

    Outcome outcome(const std::string &instance) const
    {
        if (ok_) return Outcome::pass(error_);
        return Outcome::fail(error_, failures_.str() + "instance: " + instance);
    }

    static std::string format(double x)
    {
        std::ostringstream s;
        s.precision(17);
        s << x;
        return s.str();
    }
};

std::string describe(const Database &db, const UCQ &q, double lambda = -1.0)
{
    const Schema &schema = db.schema();
    std::ostringstream s;
    s << "query " << to_string(q) << " | domain";
    for (auto &c : schema.domain()) s << ' ' << c;
    if (lambda >= 0.0) s << " | lambda " << lambda;
    s << " | tuples";
    for (int pred = 0; pred < static_cast<int>(schema.num_predicates()); ++pred) {
        std::vector<std::pair<std::uint64_t, double>> rows(db.relation(pred).begin(), db.relation(pred).end());
        std::sort(rows.begin(), rows.end());
        for (auto &[index, p] : rows) s << ' ' << db.atom_name({pred, index}) << ':' << p;
    }
    return s.str();
}

std::string describe(const OpenPDB &g, const UCQ &q, const Budget &b)
{
    return describe(g.pdb, q, g.lambda) + " | budget " + std::to_string(b.max_added) + " on " + b.relation;
}

template<typename Trial>
SuiteReport run_suite(const char *name, std::uint64_t id, const SuiteOptions &options, Trial &&trial)
{
    SuiteReport report;
    report.name = name;
    report.trials = options.trials;
    std::vector<Outcome> outcomes(options.trials);

    auto one = [&](std::size_t i) {
        Rng rng = Rng::for_trial(options.seed, id, i);
        try {
            outcomes[i] = trial(rng);
        } catch (const std::exception &e) {
            outcomes[i] = Outcome::fail(0.0, std::string("exception: ") + e.what());
        }
    };
    const auto n = static_cast<std::int64_t>(options.trials);
    if (options.parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
    } else {
        for (std::int64_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
    }

    std::vector<std::string> failures;
    for (auto &o : outcomes) {
        switch (o.status) {
            case Outcome::Status::Pass: ++report.passed; break;
            case Outcome::Status::Fail:
                ++report.failed;
                failures.push_back(o.description);
                break;
            case Outcome::Status::Skip: ++report.skipped; break;
        }
        if (o.status != Outcome::Status::Skip) report.max_error = std::max(report.max_error, o.error);
    }
    std::stable_sort(failures.begin(), failures.end(), [](auto &a, auto &b) { return a.size() < b.size(); });
    if (failures.size() > 3) failures.resize(3);
    report.counterexamples = std::move(failures);
    return report;
}

/// Draw a query until `accept` holds.
template<typename Accept>
std::optional<UCQ> draw_query(Rng &rng, const Schema &schema, const QueryShape &shape, Accept &&accept)
{
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        UCQ q = random_ucq(rng, schema, shape);
        if (accept(q)) return q;
    }
    return std::nullopt;
}

bool compiles(const UCQ &q, const Schema &schema)
{
    try {
        compile_lifted(q, schema);
        return true;
    } catch (const UnsafeQuery &) {
        return false;
    }
}

/// Open pdb and budget for the optimization suites: constrained relation R with at most `max_open` open tuples and a
/// budget of at most `max_budget`, derived from a mean bound.
struct BudgetedInstance
{
    OpenPDB g;
    Budget budget;
    std::vector<AtomId> open;
};

BudgetedInstance budgeted_instance(Rng &rng, const Schema &schema, std::size_t max_open, std::size_t max_budget)
{
    OpenPDB g = random_open_pdb(rng, schema, "R", max_open);
    auto open = open_tuples(g, "R");
    const auto b = static_cast<std::size_t>(rng.uniform(0, static_cast<int>(std::min(max_budget, open.size()))));
    const Budget budget = budget_from_mtp(g, constraint_for_budget(g, "R", b));
    return {std::move(g), budget, std::move(open)};
}

double reevaluate(const OpenPDB &g, const UCQ &q, const BoundResult &r)
{
    return prob_lifted(q, completion_view(g, *r.witness));
}

enum SuiteId : std::uint64_t {
    kLiftedVsGround = 1,
    kMonotonicity,
    kInclusionExclusion,
    kQueryAnalysis,
    kExactVsBruteforce,
    kBudgetBounds,
    kSubmodularity,
    kGreedyGuarantee,
    kVertexAttainment,
    kThreeDM,
};

}


/*======================================================================================================================
 * Engine suites
 *====================================================================================================================*/

SuiteReport mtpdb::suite_lifted_vs_ground(const SuiteOptions &options)
{
    return run_suite("lifted_vs_ground", kLiftedVsGround, options, [](Rng &rng) {
        const Schema schema = random_schema(rng);
        auto q = draw_query(rng, schema, {}, [&](const UCQ &q) { return compiles(q, schema); });
        if (not q) return Outcome::skip();
        const Database db = random_database(rng, schema, 12);
        const ProbabilityView view(db);
        const LiftedResult lifted = prob_lifted_detailed(*q, view);
        const double ground = prob_ground(*q, view, {.parallel = false});

        Checks c;
        c.close(lifted.value.p, ground, 1e-9, "lifted differs from ground");
        c.at_most(lifted.clamp, 0.0, 1e-12, "clamp magnitude");
        c.expect(lifted.value.p >= 0.0 and lifted.value.p <= 1.0, "result outside [0, 1]");
        return c.outcome(describe(db, *q));
    });
}

SuiteReport mtpdb::suite_monotonicity(const SuiteOptions &options)
{
    return run_suite("monotonicity", kMonotonicity, options, [](Rng &rng) {
        const Schema schema = random_schema(rng);
        auto q = draw_query(rng, schema, {}, [&](const UCQ &q) { return compiles(q, schema); });
        if (not q) return Outcome::skip();
        const Database db = random_database(rng, schema, 64);
        const int pred = rng.uniform(0, static_cast<int>(schema.num_predicates()) - 1);
        const AtomId atom{pred, rng.next() % schema.herbrand_size(pred)};
        const double p = db.prob(atom);
        const double raised = p + (1.0 - p) * rng.real();

        ProbabilityView before(db), after(db);
        after.set(atom, raised);
        Checks c;
        c.at_most(prob_lifted(*q, before), prob_lifted(*q, after), 1e-12, "raising " + db.atom_name(atom) + " lowered");
        return c.outcome(describe(db, *q));
    });
}

SuiteReport mtpdb::suite_inclusion_exclusion(const SuiteOptions &options)
{
    return run_suite("inclusion_exclusion", kInclusionExclusion, options, [](Rng &rng) {
        const Schema schema = random_schema(rng);
        auto q = draw_query(rng, schema, {}, [&](const UCQ &q) { return compiles(q, schema); });
        if (not q) return Outcome::skip();
        const Database db = random_database(rng, schema, 64);
        EngineOptions forced;
        forced.disable_independent_conjunction = true;
        const ProbabilityView view(db);
        Checks c;
        c.close(prob_lifted(*q, view), prob_lifted(*q, view, forced), 1e-9, "forced inclusion-exclusion differs");
        return c.outcome(describe(db, *q));
    });
}

SuiteReport mtpdb::suite_query_analysis(const SuiteOptions &options)
{
    return run_suite("query_analysis", kQueryAnalysis, options, [](Rng &rng) {
        const Schema schema = random_schema(rng);
        const UCQ q = random_ucq(rng, schema);
        Checks c;
        c.expect(parse_ucq(to_string(q), schema) == q, "print/parse round trip");
        const QueryProfile profile = analyze(q);
        if (profile.inversion_free)
            for (bool h : profile.hierarchical_per_cq) c.expect(h, "inversion-free query with non-hierarchical CQ");
        c.expect(profile.safe == compiles(q, schema), "safety differs between synthetic and actual schema");
        std::uint64_t expected = 0;
        for (auto &cq : q.disjuncts)
            expected += static_cast<std::uint64_t>(std::pow(schema.domain_size(), cq.variables().size()));
        c.expect(ground(q, schema).size() == expected, "ground size formula");
        Database empty(schema);
        return c.outcome(describe(empty, q));
    });
}


/*======================================================================================================================
 * Optimization suites
 *====================================================================================================================*/

SuiteReport mtpdb::suite_exact_vs_bruteforce(const SuiteOptions &options)
{
    return run_suite("exact_vs_bruteforce", kExactVsBruteforce, options, [](Rng &rng) {
        const Schema schema = random_schema(rng);
        auto q = draw_query(rng, schema, {.must_mention = "R"}, [](const UCQ &q) { return is_inversion_free(q); });
        if (not q) return Outcome::skip();
        const auto inst = budgeted_instance(rng, schema, 12, 4);

        const BoundResult exact = mtp_upper_exact(inst.g, inst.budget, *q);
        const BoundResult brute = mtp_upper_bruteforce(inst.g, inst.budget, *q, {.parallel = false});
        Checks c;
        c.close(exact.value.p, brute.value.p, 1e-9, "exact differs from brute force");
        c.close(reevaluate(inst.g, *q, exact), exact.value.p, 1e-12, "exact witness re-evaluation");
        c.close(reevaluate(inst.g, *q, brute), brute.value.p, 1e-12, "brute-force witness re-evaluation");
        c.expect(exact.witness->added.size() <= inst.budget.max_added, "exact witness exceeds budget");
        return c.outcome(describe(inst.g, *q, inst.budget));
    });
}

SuiteReport mtpdb::suite_budget_bounds(const SuiteOptions &options)
{
    return run_suite("budget_bounds", kBudgetBounds, options, [](Rng &rng) {
        const Schema schema = random_schema(rng);
        auto q = draw_query(rng, schema, {.must_mention = "R"}, [](const UCQ &q) { return is_inversion_free(q); });
        if (not q) return Outcome::skip();
        const auto inst = budgeted_instance(rng, schema, 12, 4);
        const BoundResult interval = interval_unconstrained(inst.g, *q);
        const BudgetCurve curve = build_a_table(inst.g, "R", inst.open.size(), *q);

        Checks c;
        const double lower = interval.interval->lower.p, upper = interval.interval->upper.p;
        c.close(curve.at(0).value.p, lower, 1e-12, "zero budget differs from closed world");
        c.close(curve.at(inst.open.size()).value.p, upper, 1e-9, "full budget differs from full completion");
        for (std::size_t b = 1; b <= inst.open.size(); ++b)
            c.at_most(curve.at(b - 1).value.p, curve.at(b).value.p, 1e-12, "bound decreases with budget");
        const double bounded = mtp_upper_exact(inst.g, inst.budget, *q).value.p;
        c.at_most(lower, bounded, 1e-12, "budgeted bound below closed world");
        c.at_most(bounded, upper, 1e-12, "budgeted bound above full completion");
        return c.outcome(describe(inst.g, *q, inst.budget));
    });
}

SuiteReport mtpdb::suite_submodularity(const SuiteOptions &options)
{
    return run_suite("submodularity", kSubmodularity, options, [](Rng &rng) {
        const Schema schema = random_schema(rng);
        QueryShape shape{.self_join_free = true, .must_mention = "R"};
        auto q = draw_query(rng, schema, shape, [&](const UCQ &q) { return compiles(q, schema); });
        if (not q) return Outcome::skip();
        auto inst = budgeted_instance(rng, schema, 12, 4);
        for (int attempt = 0; inst.open.empty() and attempt < kMaxAttempts; ++attempt)
            inst = budgeted_instance(rng, schema, 12, 4);
        if (inst.open.empty()) return Outcome::skip();
        const SetQueryFunction f(inst.g, *q);

        /* x outside Y, X within Y */
        std::vector<AtomId> rest = inst.open;
        rng.shuffle(rest);
        const AtomId x = rest.back();
        rest.pop_back();
        std::vector<AtomId> big, small;
        for (auto &t : rest)
            if (rng.chance(0.5)) {
                big.push_back(t);
                if (rng.chance(0.5)) small.push_back(t);
            }
        auto with = [](std::vector<AtomId> s, AtomId t) {
            s.push_back(t);
            return s;
        };
        const double s_small = f(small), s_big = f(big);
        const double gain_small = f(with(small, x)) - s_small;
        const double gain_big = f(with(big, x)) - s_big;

        Checks c;
        c.at_most(gain_big, gain_small, 1e-12, "diminishing returns violated");
        c.at_most(s_small, s_big, 1e-12, "set function not monotone");
        c.close(f.marginal_gain(small, x), gain_small, 1e-12, "conditioned gain differs from re-evaluation");
        return c.outcome(describe(inst.g, *q, inst.budget));
    });
}

SuiteReport mtpdb::suite_greedy_guarantee(const SuiteOptions &options)
{
    return run_suite("greedy_guarantee", kGreedyGuarantee, options, [](Rng &rng) {
        const Schema schema = random_schema(rng);
        QueryShape shape{.self_join_free = true, .must_mention = "R"};
        auto q = draw_query(rng, schema, shape, [&](const UCQ &q) { return compiles(q, schema); });
        if (not q) return Outcome::skip();
        const auto inst = budgeted_instance(rng, schema, 12, 4);

        const GreedyTrace lazy = greedy_trace(inst.g, inst.budget, *q);
        const GreedyTrace scan = greedy_trace(inst.g, inst.budget, *q, {.strategy = GreedyStrategy::SerialScan});
        const double opt = mtp_upper_bruteforce(inst.g, inst.budget, *q, {.parallel = false}).value.p;
        const double closed = lazy.p_closed.p, greedy = lazy.p_greedy.p;

        Checks c;
        c.at_most(greedy, opt, 1e-9, "greedy above optimum");
        c.at_most(opt, lazy.upper, 1e-9, "optimum above greedy upper bound");
        c.at_most((1.0 - 1.0 / std::numbers::e) * (opt - closed), greedy - closed, 1e-9, "approximation ratio");
        c.close(scan.p_greedy.p, greedy, 1e-12, "lazy and scan greedy differ");
        for (std::size_t i = 1; i < lazy.picks.size(); ++i)
            c.at_most(lazy.picks[i].gain, lazy.picks[i - 1].gain, 1e-12, "gains increase along picks");
        c.expect(lazy.picks.size() <= inst.budget.max_added, "greedy exceeds budget");
        return c.outcome(describe(inst.g, *q, inst.budget));
    });
}

namespace {

/// Best value of the multilinear extension over grid points (coordinates j * lambda / 10, j = 0..10) whose sum of
/// steps is at most `max_steps`.
struct GridSearch
{
    const std::vector<double> &corners; ///< value at each truth assignment of the open tuples (bit i = tuple i)
    int k;
    double lambda;
    int max_steps;

    double best = -1.0;
    int best_interior = 0;
    /// Second pass: fewest interior coordinates among points within tolerance of `best`.
    bool second_pass = false;

    void run()
    {
        std::vector<std::vector<double>> tables(k + 1);
        tables[0] = corners;
        recurse(0, 0, 0, tables);
        second_pass = true;
        best_interior = k + 1;
        recurse(0, 0, 0, tables);
    }

    void recurse(int d, int steps, int interior, std::vector<std::vector<double>> &tables)
    {
        if (d == k) {
            const double v = tables[k][0];
            if (not second_pass) best = std::max(best, v);
            else if (v >= best - 1e-12) best_interior = std::min(best_interior, interior);
            return;
        }
        /* Fold coordinate d: T'[s] = (1 - x) T[2s] + x T[2s + 1], with bit d the lowest remaining bit. */
        const auto &t = tables[d];
        auto &next = tables[d + 1];
        next.resize(t.size() / 2);
        for (int j = 0; j <= 10 and steps + j <= max_steps; ++j) {
            const double x = lambda * j / 10.0;
            for (std::size_t s = 0; s != next.size(); ++s) next[s] = (1.0 - x) * t[2 * s] + x * t[2 * s + 1];
            recurse(d + 1, steps + j, interior + (j > 0 and j < 10), tables);
        }
    }
};

}

SuiteReport mtpdb::suite_vertex_attainment(const SuiteOptions &options)
{
    return run_suite("vertex_attainment", kVertexAttainment, options, [](Rng &rng) {
        const Schema schema = random_schema(rng);
        QueryShape shape{.self_join_free = true, .must_mention = "R"};
        auto q = draw_query(rng, schema, shape, [&](const UCQ &q) { return compiles(q, schema); });
        if (not q) return Outcome::skip();
        const OpenPDB g = random_open_pdb(rng, schema, "R", 6);
        const auto open = open_tuples(g, "R");
        const int k = static_cast<int>(open.size());
        const auto b = static_cast<std::size_t>(rng.uniform(0, k));
        const MTPConstraint constraint = constraint_for_budget(g, "R", b, 0.05 + 0.9 * rng.real());
        const Budget budget = budget_from_mtp(g, constraint);

        /* Largest number of lambda/10 steps satisfying the same strict mean bound. */
        const int r = schema.require_predicate("R");
        double mass = 0.0;
        for (auto &[index, p] : g.pdb.relation(r)) mass += p;
        const double n = static_cast<double>(schema.herbrand_size(r));
        int max_steps = 0;
        while (max_steps < 10 * k and (mass + (max_steps + 1) * g.lambda / 10.0) / n < constraint.mean_bound - 1e-9)
            ++max_steps;

        const LiftedPlan plan = compile_lifted(*q, schema);
        std::vector<double> corners(std::size_t(1) << k);
        for (std::size_t s = 0; s != corners.size(); ++s) {
            ProbabilityView v(g.pdb);
            for (int i = 0; i < k; ++i) v.set(open[i], (s >> i & 1) ? 1.0 : 0.0);
            corners[s] = plan.evaluate(v).p;
        }

        /* Best {0, lambda} completion within the budget, and the largest single-tuple gain at the empty set. */
        double vertex = -1.0, slack = 0.0;
        for (std::size_t s = 0; s != corners.size(); ++s) {
            if (static_cast<std::size_t>(std::popcount(s)) > budget.max_added) continue;
            double v = 0.0;
            for (std::size_t t = 0; t != corners.size(); ++t) {
                if ((t & ~s) != 0) continue;
                const int on = std::popcount(t), size = std::popcount(s);
                v += std::pow(g.lambda, on) * std::pow(1.0 - g.lambda, size - on) * corners[t];
            }
            vertex = std::max(vertex, v);
        }
        for (int i = 0; i < k; ++i) slack = std::max(slack, g.lambda * (corners[std::size_t(1) << i] - corners[0]));

        GridSearch grid{corners, k, g.lambda, max_steps};
        grid.run();

        Checks c;
        c.expect(static_cast<std::size_t>(max_steps / 10) == budget.max_added, "grid feasibility differs from budget");
        c.at_most(grid.best, vertex + slack, 1e-12, "fractional completion beats vertex by more than slack");
        c.at_most(vertex, grid.best, 1e-12, "vertex not on grid");
        c.expect(grid.best_interior <= 1, "best grid point has " + std::to_string(grid.best_interior) +
                                              " interior coordinates");
        return c.outcome(describe(g, *q, budget));
    });
}

SuiteReport mtpdb::suite_three_dm(const SuiteOptions &options)
{
    return run_suite("three_dm", kThreeDM, options, [](Rng &rng) {
        const ThreeDMInstance inst = random_3dm(rng);
        const MaxMatchReport r = verify_maxmatch(inst, 0.8, {.parallel = false});
        if (r.passed) return Outcome::pass();
        std::ostringstream s;
        s << r.detail << "instance: k=" << inst.k << " edges";
        for (auto &e : inst.edges) s << " (" << e[0] << ',' << e[1] << ',' << e[2] << ')';
        return Outcome::fail(0.0, s.str());
    });
}


/*======================================================================================================================
 * All suites
 *====================================================================================================================*/

std::vector<SuiteReport> mtpdb::property_suites(const SuiteOptions &options)
{
    if (options.trials == 0) return {};
    using Suite = SuiteReport (*)(const SuiteOptions &);
    const Suite suites[] = {
        suite_lifted_vs_ground, suite_monotonicity,    suite_inclusion_exclusion, suite_query_analysis,
        suite_exact_vs_bruteforce, suite_budget_bounds, suite_submodularity,      suite_greedy_guarantee,
        suite_vertex_attainment, suite_three_dm,
    };
    std::vector<SuiteReport> out;
    for (Suite s : suites) out.push_back(s(options));
    return out;
}

std::string mtpdb::format_reports(const std::vector<SuiteReport> &reports)
{
    std::ostringstream s;
    for (auto &r : reports) {
        s << (r.ok() ? "PASS " : "FAIL ") << r.name << ": " << r.passed << "/" << r.trials << " passed, " << r.failed
          << " failed, " << r.skipped << " skipped, max error " << Checks::format(r.max_error) << '\n';
        for (auto &c : r.counterexamples) s << "  counterexample: " << c << '\n';
    }
    return s.str();
}
