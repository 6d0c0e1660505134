#include "mtpdb/open_world.hpp"

#include "mtpdb/errors.hpp"

#include <algorithm>
#include <unordered_set>


using namespace mtpdb;


namespace {

constexpr double kStrictSlack = 1e-9;

}


OpenPDB::OpenPDB(Database pdb, double lambda) : pdb(std::move(pdb)), lambda(lambda)
{
    if (not(lambda >= 0.0 and lambda <= 1.0)) throw InvalidArgument("lambda must lie in [0, 1]");
}

const char *mtpdb::to_string(BoundKind kind)
{
    switch (kind) {
        case BoundKind::Closed: return "closed";
        case BoundKind::OpenUpper: return "open_upper";
        case BoundKind::MtpExact: return "mtp_exact";
        case BoundKind::MtpGreedy: return "mtp_greedy";
        case BoundKind::MtpOracle: return "mtp_oracle";
    }
    return "unknown";
}

std::vector<AtomId> mtpdb::open_tuples(const OpenPDB &g, const std::string &relation, std::uint64_t max_atoms)
{
    const Schema &schema = g.pdb.schema();
    const int pred = schema.require_predicate(relation);
    const std::uint64_t n = schema.herbrand_size(pred);
    if (n > max_atoms)
        throw ResourceLimit("relation " + relation + " has " + std::to_string(n) + " ground atoms, cap is " +
                            std::to_string(max_atoms));
    const auto &rel = g.pdb.relation(pred);
    std::vector<AtomId> out;
    out.reserve(n - std::min<std::uint64_t>(n, rel.size()));
    for (std::uint64_t i = 0; i != n; ++i)
        if (not rel.contains(i)) out.push_back({pred, i});
    return out;
}

BoundResult mtpdb::interval_unconstrained(const OpenPDB &g, const UCQ &q, const EngineOptions &options)
{
    const LiftedPlan plan = compile_lifted(q, g.pdb.schema(), options);
    ProbabilityView closed(g.pdb);
    ProbabilityView full(g.pdb);
    full.complete_all(g.lambda);

    BoundResult r;
    r.kind = BoundKind::OpenUpper;
    r.interval = Interval{plan.evaluate(closed), plan.evaluate(full)};
    r.value = r.interval->upper;
    return r;
}

Budget mtpdb::budget_from_mtp(const OpenPDB &g, const MTPConstraint &c, MtpDenominator denominator)
{
    const Schema &schema = g.pdb.schema();
    const int pred = schema.require_predicate(c.relation);
    if (not(c.mean_bound > 0.0 and c.mean_bound <= 1.0))
        throw InvalidArgument("mean bound for " + c.relation + " must lie in (0, 1]");

    const auto &rel = g.pdb.relation(pred);
    const std::uint64_t herbrand = schema.herbrand_size(pred);
    const std::uint64_t open = herbrand - std::min<std::uint64_t>(herbrand, rel.size());
    double mass = 0.0;
    std::uint64_t support = 0;
    for (auto &[index, p] : rel) {
        mass += p;
        support += p > 0.0;
    }

    const double bound = c.mean_bound - kStrictSlack;
    auto feasible = [&](std::uint64_t b) {
        const double total = mass + static_cast<double>(b) * g.lambda;
        const double n = denominator == MtpDenominator::Herbrand ? static_cast<double>(herbrand)
                                                                 : static_cast<double>(support + (g.lambda > 0 ? b : 0));
        if (n == 0.0) return true;
        return total / n < bound;
    };

    Budget budget{c.relation, 0, false};
    if (not feasible(0)) {
        budget.infeasible = true;
        return budget;
    }
    if (g.lambda == 0.0) return budget;

    if (denominator == MtpDenominator::Herbrand) {
        /* Largest b with mass + b * lambda < bound * N, then walk to the exact boundary. */
        const double room = bound * static_cast<double>(herbrand) - mass;
        std::uint64_t b = static_cast<std::uint64_t>(std::max(0.0, std::floor(room / g.lambda)));
        b = std::min(b, open);
        while (b > 0 and not feasible(b)) --b;
        while (b < open and feasible(b + 1)) ++b;
        budget.max_added = b;
    } else {
        std::uint64_t b = 0;
        while (b < open and feasible(b + 1)) ++b;
        budget.max_added = b;
    }
    return budget;
}

Budget mtpdb::budget_from_mtp(const OpenPDB &g, const std::vector<MTPConstraint> &constraints,
                              MtpDenominator denominator)
{
    if (constraints.empty()) throw InvalidArgument("no MTP constraint given");
    Budget out = budget_from_mtp(g, constraints.front(), denominator);
    for (std::size_t i = 1; i != constraints.size(); ++i) {
        if (constraints[i].relation != out.relation)
            throw InvalidArgument("MTP constraints on several relations (" + out.relation + ", " +
                                  constraints[i].relation + ") are not supported in one run");
        Budget b = budget_from_mtp(g, constraints[i], denominator);
        out.max_added = std::min(out.max_added, b.max_added);
        out.infeasible = out.infeasible or b.infeasible;
    }
    return out;
}

namespace {

void check_choice(const OpenPDB &g, const CompletionChoice &choice)
{
    std::unordered_set<AtomId, AtomIdHash> seen;
    for (auto &a : choice.added) {
        if (a.pred < 0 or a.pred >= static_cast<int>(g.pdb.schema().num_predicates()) or
            a.index >= g.pdb.schema().herbrand_size(a.pred))
            throw InvalidArgument("completion atom outside the Herbrand base");
        if (g.pdb.contains(a)) throw InvalidArgument("completion atom " + g.pdb.atom_name(a) + " already present");
        if (not seen.insert(a).second) throw InvalidArgument("completion atom " + g.pdb.atom_name(a) + " repeated");
    }
}

}

Database mtpdb::apply_completion(const OpenPDB &g, const CompletionChoice &choice)
{
    check_choice(g, choice);
    Database out = g.pdb;
    for (auto &a : choice.added) out.set(a, g.lambda);
    return out;
}

ProbabilityView mtpdb::completion_view(const OpenPDB &g, const CompletionChoice &choice)
{
    check_choice(g, choice);
    ProbabilityView v(g.pdb);
    for (auto &a : choice.added) v.set(a, g.lambda);
    return v;
}
