#include "mtpdb/engine.hpp"

#include "mtpdb/errors.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>


using namespace mtpdb;
using namespace mtpdb::nf;


namespace mtpdb {

/// Records the lifted rules applied to one query as plan nodes, sharing identical sub-queries.
class PlanBuilder
{
    using Node = LiftedPlan::Node;
    using Op = LiftedPlan::Op;

    const Schema &schema_;
    const EngineOptions &options_;
    std::vector<Node> nodes_;
    std::unordered_map<std::string, std::int32_t> memo_;
    std::unordered_set<std::string> active_;
    std::int32_t false_ = -1, true_ = -1;

    public:
    PlanBuilder(const Schema &schema, const EngineOptions &options) : schema_(schema), options_(options) { }

    LiftedPlan build(const DNF &q)
    {
        const std::int32_t root = dnf(q);
        /* The root must be the last node; append an alias when sharing put it earlier. */
        if (root != static_cast<std::int32_t>(nodes_.size()) - 1) {
            Node alias{Op::Or, {}, {root}, {}};
            nodes_.push_back(std::move(alias));
        }
        LiftedPlan plan;
        plan.nodes_ = std::move(nodes_);
        return plan;
    }

    private:
    std::int32_t add(Node node)
    {
        if (nodes_.size() >= options_.max_plan_nodes)
            throw ResourceLimit("lifted plan exceeds " + std::to_string(options_.max_plan_nodes) + " nodes");
        nodes_.push_back(std::move(node));
        return static_cast<std::int32_t>(nodes_.size()) - 1;
    }

    std::int32_t constant(bool value)
    {
        std::int32_t &slot = value ? true_ : false_;
        if (slot < 0) slot = add({value ? Op::True : Op::False, {}, {}, {}});
        return slot;
    }

    bool is_false(std::int32_t id) const { return nodes_[id].op == Op::False; }
    bool is_true(std::int32_t id) const { return nodes_[id].op == Op::True; }

    /// Independent disjunction or conjunction with constant folding.
    std::int32_t combine(Op op, std::vector<std::int32_t> children)
    {
        const bool is_or = op == Op::Or;
        std::vector<std::int32_t> kept;
        for (auto c : children) {
            if (is_or ? is_true(c) : is_false(c)) return c;
            if (is_or ? is_false(c) : is_true(c)) continue;
            kept.push_back(c);
        }
        if (kept.empty()) return constant(not is_or);
        if (kept.size() == 1) return kept.front();
        return add({op, {}, std::move(kept), {}});
    }

    /// Guards against rewriting cycles; a sub-query that recurs while being evaluated cannot be lifted.
    struct Active
    {
        PlanBuilder &b;
        std::string key;
        Active(PlanBuilder &b, std::string k) : b(b), key(std::move(k))
        {
            if (not b.active_.insert(key).second) throw UnsafeQuery("lifted rewriting cycles on a sub-query");
        }
        ~Active() { b.active_.erase(key); }
    };

    std::int32_t dnf(const DNF &q)
    {
        if (q.is_false()) return constant(false);
        if (q.is_true()) return constant(true);
        std::string k = "D" + key(q);
        if (auto it = memo_.find(k); it != memo_.end()) return it->second;
        Active guard(*this, k);

        std::int32_t id;
        if (q.cqs.size() == 1 and q.cqs[0].atoms.size() == 1 and q.cqs[0].is_ground()) {
            /* A single ground atom. */
            auto &a = q.cqs[0].atoms[0];
            id = add({Op::Leaf, make_atom_id(schema_, a.pred, a.args), {}, {}});
        } else if (auto groups = independent_disjuncts(q); groups.size() > 1) {
            /* Independent disjunction. */
            std::vector<std::int32_t> children;
            for (auto &g : groups) children.push_back(dnf(g));
            id = combine(Op::Or, std::move(children));
        } else {
            /* Rewrite into a conjunction of clauses with connected CQs. */
            CNF clauses = to_cnf(q, options_.max_cnf_clauses);
            if (clauses.size() == 1 and clauses[0] == q) id = separator(q);
            else id = cnf(std::move(clauses));
        }
        memo_.emplace(std::move(k), id);
        return id;
    }

    std::vector<DNF> independent_disjuncts(const DNF &q)
    {
        const int n = static_cast<int>(q.cqs.size());
        auto groups = connected_groups(n, [&](int i, int j) { return dependent(q.cqs[i], q.cqs[j]); });
        std::vector<DNF> out;
        if (groups.size() == 1) return out;
        for (auto &g : groups) {
            DNF d;
            for (int i : g) d.cqs.push_back(q.cqs[i]);
            out.push_back(std::move(d));
        }
        return out;
    }

    /// A separator variable splits the query into independent branches, one per domain constant.
    std::int32_t separator(const DNF &q)
    {
        auto plan = find_separator(q);
        if (not plan) throw UnsafeQuery("no lifted rule applies to " + to_string(q, schema_));
        std::vector<std::int32_t> children;
        for (int c = 0; c < static_cast<int>(schema_.domain_size()); ++c) children.push_back(dnf(substitute(q, *plan, c)));
        return combine(Op::Or, std::move(children));
    }

    std::int32_t cnf(CNF clauses)
    {
        CNF kept;
        for (auto &c : clauses) {
            if (c.is_false()) return constant(false);
            if (not c.is_true()) kept.push_back(std::move(c));
        }
        if (kept.empty()) return constant(true);
        if (kept.size() == 1) return dnf(kept[0]);

        std::string k = "C" + key(kept);
        if (auto it = memo_.find(k); it != memo_.end()) return it->second;
        Active guard(*this, k);

        const int m = static_cast<int>(kept.size());
        std::vector<std::vector<int>> groups;
        if (not options_.disable_independent_conjunction)
            groups = connected_groups(m, [&](int i, int j) { return dependent(kept[i], kept[j]); });

        std::int32_t id;
        if (groups.size() > 1) {
            /* Independent conjunction. */
            std::vector<std::int32_t> children;
            for (auto &g : groups) {
                CNF part;
                for (int i : g) part.push_back(kept[i]);
                children.push_back(cnf(std::move(part)));
            }
            id = combine(Op::And, std::move(children));
        } else {
            id = inclusion_exclusion(kept);
        }
        memo_.emplace(std::move(k), id);
        return id;
    }

    /// Inclusion-exclusion: P(Q_1 and ... and Q_m) = sum over non-empty s of (-1)^(|s|+1) P(OR_{i in s} Q_i).  Terms whose
    /// disjunctions coincide are merged and cancelling terms dropped.
    std::int32_t inclusion_exclusion(const CNF &clauses)
    {
        if (not options_.allow_inclusion_exclusion)
            throw NotInversionFree("inclusion-exclusion needed for " + to_string(disjoin_all(clauses), schema_));
        const int m = static_cast<int>(clauses.size());
        if (m > options_.max_ie_clauses)
            throw ResourceLimit("inclusion-exclusion over " + std::to_string(m) + " clauses exceeds cap " +
                                std::to_string(options_.max_ie_clauses));

        std::map<std::string, std::pair<long, DNF>> terms;
        std::vector<const DNF *> chosen;
        for (std::uint32_t s = 1; s < (std::uint32_t(1) << m); ++s) {
            chosen.clear();
            for (int i = 0; i < m; ++i)
                if (s >> i & 1) chosen.push_back(&clauses[i]);
            DNF d = disjoin(chosen);
            const long sign = chosen.size() % 2 ? 1 : -1;
            auto [it, inserted] = terms.try_emplace(key(d), 0L, DNF{});
            if (inserted) it->second.second = std::move(d);
            it->second.first += sign;
        }

        Node node{Op::Sum, {}, {}, {}};
        for (auto &[k, term] : terms) {
            if (term.first == 0) continue;
            node.children.push_back(dnf(term.second));
            node.coefficients.push_back(static_cast<double>(term.first));
        }
        return add(std::move(node));
    }

    static DNF disjoin_all(const CNF &clauses)
    {
        DNF out;
        for (auto &c : clauses) out.cqs.insert(out.cqs.end(), c.cqs.begin(), c.cqs.end());
        return out;
    }
};

}


/*======================================================================================================================
 * LiftedPlan
 *====================================================================================================================*/

std::vector<Prob> LiftedPlan::evaluate_all(const ProbabilityView &view, double *clamp_out) const
{
    std::vector<Prob> value(nodes_.size());
    double moved = 0.0;
    std::vector<std::pair<double, Prob>> terms;
    for (std::size_t i = 0; i != nodes_.size(); ++i) {
        const Node &n = nodes_[i];
        switch (n.op) {
            case Op::False: value[i] = Prob::zero(); break;
            case Op::True: value[i] = Prob::one(); break;
            case Op::Leaf: value[i] = Prob::from(view(n.atom)); break;
            case Op::Or: {
                Prob acc = Prob::zero();
                for (auto c : n.children) acc = disjoin(acc, value[c]);
                value[i] = acc;
                break;
            }
            case Op::And: {
                Prob acc = Prob::one();
                for (auto c : n.children) acc = conjoin(acc, value[c]);
                value[i] = acc;
                break;
            }
            case Op::Sum: {
                terms.clear();
                for (std::size_t j = 0; j != n.children.size(); ++j)
                    terms.emplace_back(n.coefficients[j], value[n.children[j]]);
                value[i] = signed_sum(terms);
                moved = std::max(moved, clamp(value[i]));
                break;
            }
        }
    }
    if (not value.empty()) moved = std::max(moved, clamp(value.back()));
    if (clamp_out) *clamp_out = moved;
    return value;
}

Prob LiftedPlan::evaluate(const ProbabilityView &view, double *clamp_out) const
{
    return evaluate_all(view, clamp_out).back();
}

std::vector<AtomId> LiftedPlan::leaves() const
{
    std::vector<AtomId> out;
    for (auto &n : nodes_)
        if (n.op == Op::Leaf) out.push_back(n.atom);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}


/*======================================================================================================================
 * Entry points
 *====================================================================================================================*/

LiftedPlan mtpdb::compile_lifted(const nf::DNF &q, const Schema &schema, const EngineOptions &options)
{
    return PlanBuilder(schema, options).build(q);
}

LiftedPlan mtpdb::compile_lifted(const UCQ &q, const Schema &schema, const EngineOptions &options)
{
    return compile_lifted(nf::compile(q, schema), schema, options);
}

LiftedResult mtpdb::prob_lifted_detailed(const UCQ &q, const ProbabilityView &view, const EngineOptions &options)
{
    const LiftedPlan plan = compile_lifted(q, view.schema(), options);
    LiftedResult r;
    r.value = plan.evaluate(view, &r.clamp);
    r.plan_nodes = plan.size();
    return r;
}

double mtpdb::prob_lifted(const UCQ &q, const ProbabilityView &view, const EngineOptions &options)
{
    return prob_lifted_detailed(q, view, options).value.p;
}

double mtpdb::prob_lifted(const UCQ &q, const Database &db, const EngineOptions &options)
{
    return prob_lifted(q, ProbabilityView(db), options);
}

double mtpdb::prob_conditioned(const UCQ &q, const ProbabilityView &view,
                               const std::vector<std::pair<AtomId, bool>> &fixed, const EngineOptions &options)
{
    ProbabilityView v = view;
    for (auto &[atom, truth] : fixed) v.set(atom, truth ? 1.0 : 0.0);
    return prob_lifted(q, v, options);
}

double mtpdb::prob_conditioned(const UCQ &q, const Database &db, const std::vector<std::pair<AtomId, bool>> &fixed,
                               const EngineOptions &options)
{
    return prob_conditioned(q, ProbabilityView(db), fixed, options);
}


/*======================================================================================================================
 * Schema-free analyses
 *====================================================================================================================*/

bool mtpdb::is_safe(const UCQ &q)
{
    const Schema schema = synthetic_schema(q);
    try {
        compile_lifted(q, schema);
        return true;
    } catch (const UnsafeQuery &) {
        return false;
    }
}

bool mtpdb::is_inversion_free(const UCQ &q)
{
    for (auto &cq : q.disjuncts)
        if (not is_hierarchical(cq)) return false;
    const Schema schema = synthetic_schema(q);
    EngineOptions options;
    options.allow_inclusion_exclusion = false;
    try {
        compile_lifted(q, schema, options);
        return true;
    } catch (const UnsafeQuery &) {
        return false;
    } catch (const NotInversionFree &) {
        return false;
    }
}
