#include "mtpdb/greedy.hpp"

#include "mtpdb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>


using namespace mtpdb;


namespace {

/// Gains at or below this are rounding noise.
constexpr double kMinGain = 1e-15;

ProbabilityView view_with(const OpenPDB &g, const std::vector<AtomId> &x)
{
    ProbabilityView v(g.pdb);
    for (auto &a : x) v.set(a, g.lambda);
    return v;
}

}


/*======================================================================================================================
 * Set query probability
 *====================================================================================================================*/

SetQueryFunction::SetQueryFunction(const OpenPDB &g, const UCQ &q, const EngineOptions &options)
    : g_(&g)
    , plan_(compile_lifted(q, g.pdb.schema(), options))
{ }

Prob SetQueryFunction::value(const std::vector<AtomId> &x) const
{
    return plan_.evaluate(view_with(*g_, x));
}

double SetQueryFunction::normalized(const std::vector<AtomId> &x) const
{
    return value(x).p - value({}).p;
}

double SetQueryFunction::marginal_gain(const std::vector<AtomId> &x, AtomId t) const
{
    ProbabilityView v = view_with(*g_, x);
    const double base = plan_.evaluate(v).p;
    v.set(t, 1.0);
    return g_->lambda * (plan_.evaluate(v).p - base);
}

double mtpdb::set_query_prob(const OpenPDB &g, const UCQ &q, const std::vector<AtomId> &x)
{
    return SetQueryFunction(g, q)(x);
}

double mtpdb::normalized_set_query_prob(const OpenPDB &g, const UCQ &q, const std::vector<AtomId> &x)
{
    return SetQueryFunction(g, q).normalized(x);
}


/*======================================================================================================================
 * Greedy
 *====================================================================================================================*/

namespace {

struct Candidate
{
    double gain;
    std::size_t index; ///< position in the canonical open-tuple list
    std::size_t round; ///< round in which `gain` was computed

    /// Priority order: larger gain first, then smaller index.
    bool operator<(const Candidate &o) const { return gain != o.gain ? gain < o.gain : index > o.index; }
};

class Greedy
{
    const OpenPDB &g_;
    const SetQueryFunction &f_;
    std::vector<AtomId> candidates_;
    std::size_t budget_;
    GreedyTrace &trace_;

    std::vector<AtomId> chosen_;
    ProbabilityView current_;
    double current_value_ = 0.0;

    public:
    Greedy(const OpenPDB &g, const SetQueryFunction &f, std::vector<AtomId> candidates, std::size_t budget,
           GreedyTrace &trace)
        : g_(g), f_(f), candidates_(std::move(candidates)), budget_(budget), trace_(trace), current_(g.pdb)
    {
        current_value_ = f_.plan().evaluate(current_).p;
    }

    void run(GreedyStrategy strategy)
    {
        if (strategy == GreedyStrategy::Lazy) lazy();
        else scan(strategy == GreedyStrategy::ParallelScan);
    }

    private:
    double gain(std::size_t i, ProbabilityView &scratch) const
    {
        scratch.set(candidates_[i], 1.0);
        const double with = f_.plan().evaluate(scratch).p;
        scratch.unset(candidates_[i]);
        return g_.lambda * (with - current_value_);
    }

    void pick(std::size_t i, double gain)
    {
        chosen_.push_back(candidates_[i]);
        current_.set(candidates_[i], g_.lambda);
        current_value_ = f_.plan().evaluate(current_).p;
        trace_.picks.push_back({candidates_[i], gain});
    }

    void lazy()
    {
        std::priority_queue<Candidate> queue;
        {
            std::vector<double> gains(candidates_.size());
            scan_gains(gains, std::vector<bool>(candidates_.size(), false), true);
            for (std::size_t i = 0; i != candidates_.size(); ++i) queue.push({gains[i], i, 0});
        }
        ProbabilityView scratch = current_;
        for (std::size_t round = 0; round != budget_ and not queue.empty(); ++round) {
            scratch = current_;
            for (;;) {
                Candidate top = queue.top();
                queue.pop();
                if (top.round == round) {
                    if (top.gain <= kMinGain) return;
                    pick(top.index, top.gain);
                    break;
                }
                top.gain = gain(top.index, scratch);
                top.round = round;
                ++trace_.gain_evaluations;
                queue.push(top);
            }
        }
    }

    void scan_gains(std::vector<double> &gains, const std::vector<bool> &taken, bool parallel)
    {
        const auto n = static_cast<std::int64_t>(candidates_.size());
        if (parallel) {
#pragma omp parallel
            {
                ProbabilityView scratch = current_;
#pragma omp for schedule(dynamic, 8)
                for (std::int64_t i = 0; i < n; ++i)
                    if (not taken[i]) gains[i] = gain(static_cast<std::size_t>(i), scratch);
            }
        } else {
            ProbabilityView scratch = current_;
            for (std::int64_t i = 0; i < n; ++i)
                if (not taken[i]) gains[i] = gain(static_cast<std::size_t>(i), scratch);
        }
        for (std::int64_t i = 0; i < n; ++i) trace_.gain_evaluations += not taken[i];
    }

    void scan(bool parallel)
    {
        std::vector<bool> taken(candidates_.size(), false);
        std::vector<double> gains(candidates_.size(), 0.0);
        for (std::size_t round = 0; round != budget_; ++round) {
            scan_gains(gains, taken, parallel);
            std::size_t best = candidates_.size();
            for (std::size_t i = 0; i != candidates_.size(); ++i)
                if (not taken[i] and (best == candidates_.size() or gains[i] > gains[best])) best = i;
            if (best == candidates_.size() or gains[best] <= kMinGain) return;
            taken[best] = true;
            pick(best, gains[best]);
        }
    }
};

}

GreedyTrace mtpdb::greedy_trace(const OpenPDB &g, const Budget &budget, const UCQ &q, const GreedyOptions &options)
{
    const bool self_join = has_self_join(q);
    if (self_join and not options.allow_self_joins)
        throw InvalidArgument("query has self-joins; submodularity is not established (use --force to run anyway)");

    const SetQueryFunction f(g, q, options.engine);
    const auto open = open_tuples(g, budget.relation);

    /* Open tuples the plan never reads have zero gain. */
    const auto leaves = f.plan().leaves();
    std::vector<AtomId> candidates;
    std::set_intersection(open.begin(), open.end(), leaves.begin(), leaves.end(), std::back_inserter(candidates));

    GreedyTrace trace;
    trace.guarantee = not self_join;
    trace.p_closed = f.value({});
    Greedy(g, f, std::move(candidates), budget.max_added, trace).run(options.strategy);

    std::vector<AtomId> chosen;
    for (auto &p : trace.picks) chosen.push_back(p.atom);
    trace.p_greedy = f.value(chosen);

    constexpr double e = std::numbers::e;
    trace.lower = trace.p_greedy.p;
    trace.upper = (e * trace.p_greedy.p - trace.p_closed.p) / (e - 1.0);
    /* 1 - upper = (e (1 - p_greedy) - (1 - p_closed)) / (e - 1) */
    const double q_upper = (e * trace.p_greedy.complement() - trace.p_closed.complement()) / (e - 1.0);
    if (trace.upper >= 1.0 or q_upper <= 0.0) trace.upper_clamped = Prob::one();
    else trace.upper_clamped = {trace.upper, std::log(q_upper)};
    return trace;
}

BoundResult mtpdb::greedy_upper(const OpenPDB &g, const Budget &budget, const UCQ &q, const GreedyOptions &options)
{
    const GreedyTrace trace = greedy_trace(g, budget, q, options);
    BoundResult r;
    r.kind = BoundKind::MtpGreedy;
    r.value = trace.p_greedy;
    r.interval = Interval{trace.p_greedy, trace.upper_clamped};
    CompletionChoice choice;
    for (auto &p : trace.picks) choice.added.push_back(p.atom);
    std::sort(choice.added.begin(), choice.added.end());
    r.witness = std::move(choice);
    return r;
}

BoundResult mtpdb::greedy_upper(const OpenPDB &g, const MTPConstraint &c, const UCQ &q, MtpDenominator denominator,
                                const GreedyOptions &options)
{
    return greedy_upper(g, budget_from_mtp(g, c, denominator), q, options);
}
