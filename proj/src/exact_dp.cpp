#include "mtpdb/exact_dp.hpp"

#include "mtpdb/errors.hpp"

#include <algorithm>
#include <stdexcept>


using namespace mtpdb;


namespace {

using Op = LiftedPlan::Op;

/// True if `a` is preferable to `b`.
bool better(const BudgetEntry &a, const BudgetEntry &b)
{
    if (int c = compare(a.value, b.value); c != 0) return c > 0;
    if (a.witness.size() != b.witness.size()) return a.witness.size() < b.witness.size();
    return a.witness < b.witness;
}

std::vector<std::uint32_t> merge(const std::vector<std::uint32_t> &a, const std::vector<std::uint32_t> &b)
{
    std::vector<std::uint32_t> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    if (std::adjacent_find(out.begin(), out.end()) != out.end())
        throw std::logic_error("budget curves over overlapping tuples");
    return out;
}

template<typename Combine>
BudgetCurve convolve(const BudgetCurve &x, const BudgetCurve &y, std::size_t budget, Combine &&combine)
{
    const std::size_t lx = x.length() - 1, ly = y.length() - 1;
    const std::size_t top = std::min(budget, lx + ly);
    std::vector<BudgetEntry> out;
    out.reserve(top + 1);
    for (std::size_t b = 0; b <= top; ++b) {
        BudgetEntry best;
        bool have = false;
        const std::size_t k_min = b > lx ? b - lx : 0;
        const std::size_t k_max = std::min(b, ly);
        for (std::size_t k = k_min; k <= k_max; ++k) {
            const BudgetEntry &ex = x.at(b - k), &ey = y.at(k);
            BudgetEntry candidate{combine(ex.value, ey.value), {}};
            if (have and compare(candidate.value, best.value) < 0) continue;
            candidate.witness = merge(ex.witness, ey.witness);
            if (not have or better(candidate, best)) {
                best = std::move(candidate);
                have = true;
            }
        }
        /* Monotone in b: a larger budget never has to be spent. */
        if (b > 0 and better(out.back(), best)) best = out.back();
        out.push_back(std::move(best));
    }
    return BudgetCurve(std::move(out));
}

/// Evaluates a lifted plan with budget curves.
class CurveEvaluator
{
    const OpenPDB &g_;
    const LiftedPlan &plan_;
    const std::vector<AtomId> &open_;
    int relation_;
    std::size_t budget_;

    public:
    CurveEvaluator(const OpenPDB &g, const LiftedPlan &plan, const std::vector<AtomId> &open, int relation,
                   std::size_t budget)
        : g_(g), plan_(plan), open_(open), relation_(relation), budget_(budget)
    { }

    BudgetCurve run() const
    {
        const auto &nodes = plan_.nodes();
        const ProbabilityView closed(g_.pdb);
        const std::vector<Prob> fixed = plan_.evaluate_all(closed);

        /* Nodes without open leaves of the relation keep their closed-world value. */
        std::vector<bool> open_below(nodes.size(), false);
        for (std::size_t i = 0; i != nodes.size(); ++i) {
            const auto &n = nodes[i];
            if (n.op == Op::Leaf) open_below[i] = is_open(n.atom);
            for (auto c : n.children) open_below[i] = open_below[i] or open_below[c];
        }

        std::vector<BudgetCurve> curve(nodes.size());
        for (std::size_t i = 0; i != nodes.size(); ++i) {
            const auto &n = nodes[i];
            if (not open_below[i]) {
                curve[i] = BudgetCurve::constant(fixed[i]);
                continue;
            }
            switch (n.op) {
                case Op::Leaf: {
                    const auto it = std::lower_bound(open_.begin(), open_.end(), n.atom);
                    const auto index = static_cast<std::uint32_t>(it - open_.begin());
                    std::vector<BudgetEntry> e{{Prob::zero(), {}}};
                    if (budget_ > 0) e.push_back({Prob::from(g_.lambda), {index}});
                    curve[i] = BudgetCurve(std::move(e));
                    break;
                }
                case Op::Or: {
                    BudgetCurve acc = BudgetCurve::constant(Prob::zero());
                    for (auto c : n.children) acc = dp_eliminate(acc, curve[c], budget_);
                    curve[i] = std::move(acc);
                    break;
                }
                case Op::And: {
                    BudgetCurve acc = BudgetCurve::constant(Prob::one());
                    for (auto c : n.children) acc = dp_conjoin(acc, curve[c], budget_);
                    curve[i] = std::move(acc);
                    break;
                }
                case Op::Sum:
                    throw NotInversionFree("inclusion-exclusion over open tuples of " +
                                           g_.pdb.schema().predicate_name(relation_));
                case Op::False:
                case Op::True: break;
            }
        }
        return curve.back();
    }

    private:
    bool is_open(const AtomId &a) const { return a.pred == relation_ and not g_.pdb.contains(a); }
};

}


BudgetCurve mtpdb::dp_eliminate(const BudgetCurve &d_prev, const BudgetCurve &a, std::size_t budget)
{
    return convolve(d_prev, a, budget, [](const Prob &x, const Prob &y) { return disjoin(x, y); });
}

BudgetCurve mtpdb::dp_conjoin(const BudgetCurve &x, const BudgetCurve &y, std::size_t budget)
{
    return convolve(x, y, budget, [](const Prob &a, const Prob &b) { return conjoin(a, b); });
}

BudgetCurve mtpdb::build_a_table(const OpenPDB &g, const std::string &relation, std::size_t budget, const UCQ &q,
                                 const EngineOptions &options)
{
    const int pred = g.pdb.schema().require_predicate(relation);
    const auto open = open_tuples(g, relation);
    const LiftedPlan plan = compile_lifted(q, g.pdb.schema(), options);
    BudgetCurve curve = CurveEvaluator(g, plan, open, pred, std::min(budget, open.size())).run();

    /* Spell out the saturated tail so that every budget 0..budget has an entry. */
    std::vector<BudgetEntry> entries;
    for (std::size_t b = 0; b <= budget; ++b) entries.push_back(curve.at(b));
    return BudgetCurve(std::move(entries));
}

BoundResult mtpdb::mtp_upper_exact(const OpenPDB &g, const Budget &budget, const UCQ &q,
                                   const EngineOptions &options)
{
    const int pred = g.pdb.schema().require_predicate(budget.relation);
    const auto open = open_tuples(g, budget.relation);
    const std::size_t b = std::min(budget.max_added, open.size());
    const LiftedPlan plan = compile_lifted(q, g.pdb.schema(), options);
    const BudgetCurve curve = CurveEvaluator(g, plan, open, pred, b).run();
    const BudgetEntry &best = curve.at(b);

    BoundResult r;
    r.kind = BoundKind::MtpExact;
    r.value = best.value;
    clamp(r.value);
    CompletionChoice choice;
    for (auto i : best.witness) choice.added.push_back(open[i]);
    r.witness = std::move(choice);
    return r;
}

BoundResult mtpdb::mtp_upper_exact(const OpenPDB &g, const MTPConstraint &c, const UCQ &q,
                                   MtpDenominator denominator, const EngineOptions &options)
{
    return mtp_upper_exact(g, budget_from_mtp(g, c, denominator), q, options);
}
