#include "mtpdb/oracle.hpp"

#include "mtpdb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>


using namespace mtpdb;


/*======================================================================================================================
 * Brute force
 *====================================================================================================================*/

std::uint64_t mtpdb::count_subsets(std::size_t n, std::size_t k)
{
    std::uint64_t total = 0, c = 1; // c = C(n, j)
    for (std::size_t j = 0; j <= std::min(n, k); ++j) {
        if (total > UINT64_MAX - c) return UINT64_MAX;
        total += c;
        /* C(n, j+1) = C(n, j) (n - j) / (j + 1), exact in this order. */
        const unsigned __int128 next = static_cast<unsigned __int128>(c) * (n - j) / (j + 1);
        if (next > UINT64_MAX) return UINT64_MAX;
        c = static_cast<std::uint64_t>(next);
    }
    return total;
}

namespace {

/// All subsets of {0..n-1} with at most k elements, by size then lexicographically.
std::vector<std::vector<std::uint32_t>> enumerate_subsets(std::size_t n, std::size_t k)
{
    std::vector<std::vector<std::uint32_t>> out;
    for (std::size_t size = 0; size <= std::min(n, k); ++size) {
        std::vector<std::uint32_t> s(size);
        for (std::size_t i = 0; i != size; ++i) s[i] = static_cast<std::uint32_t>(i);
        for (;;) {
            out.push_back(s);
            std::size_t i = size;
            while (i > 0 and s[i - 1] == n - size + i - 1) --i;
            if (i == 0) break;
            ++s[i - 1];
            for (std::size_t j = i; j != size; ++j) s[j] = s[j - 1] + 1;
        }
    }
    return out;
}

/// Exact order used to locate the maximum before the tolerant tie scan.
bool strictly_greater(const Prob &a, const Prob &b)
{
    return a.p != b.p ? a.p > b.p : a.log_q < b.log_q;
}

}

BruteforceReport mtpdb::mtp_bruteforce(const OpenPDB &g, const Budget &budget, const UCQ &q,
                                       const BruteforceOptions &options)
{
    const Schema &schema = g.pdb.schema();
    validate(q, schema);
    const auto open = open_tuples(g, budget.relation);

    BruteforceReport report;
    std::optional<LiftedPlan> plan;
    try {
        plan = compile_lifted(q, schema, options.engine);
    } catch (const UnsafeQuery &) {
        report.used_ground = true;
    }

    /* Open tuples outside the lineage never change the value. */
    std::vector<AtomId> read;
    if (plan) {
        read = plan->leaves();
    } else {
        for (auto &conjunct : ground(q, schema, options.ground.max_conjuncts))
            for (auto &a : conjunct) read.push_back(make_atom_id(schema, a.predicate, a.args));
        std::sort(read.begin(), read.end());
        read.erase(std::unique(read.begin(), read.end()), read.end());
    }
    std::vector<AtomId> relevant;
    std::set_intersection(open.begin(), open.end(), read.begin(), read.end(), std::back_inserter(relevant));

    const std::size_t k = std::min(budget.max_added, relevant.size());
    report.subsets = count_subsets(relevant.size(), k);
    if (report.subsets > options.max_subsets)
        throw ResourceLimit("brute force needs " + std::to_string(report.subsets) + " subsets, cap is " +
                            std::to_string(options.max_subsets));
    const auto subsets = enumerate_subsets(relevant.size(), k);

    std::vector<Prob> values(subsets.size());
    auto evaluate = [&](std::size_t i) {
        ProbabilityView v(g.pdb);
        for (auto j : subsets[i]) v.set(relevant[j], g.lambda);
        if (plan) {
            values[i] = plan->evaluate(v);
        } else {
            values[i] = Prob::from(prob_ground(q, v, {options.ground.max_uncertain, options.ground.max_conjuncts, false}));
        }
    };
    const auto n = static_cast<std::int64_t>(subsets.size());
    if (options.parallel) {
        /* Exceptions must not escape the parallel region; the first one is rethrown afterwards. */
        std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 16)
        for (std::int64_t i = 0; i < n; ++i) {
            try {
                evaluate(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical
                if (not error) error = std::current_exception();
            }
        }
        if (error) std::rethrow_exception(error);
    } else {
        for (std::int64_t i = 0; i < n; ++i) evaluate(static_cast<std::size_t>(i));
    }

    std::size_t top = 0;
    for (std::size_t i = 1; i != values.size(); ++i)
        if (strictly_greater(values[i], values[top])) top = i;
    std::size_t first = values.size();
    for (std::size_t i = 0; i != values.size(); ++i) {
        if (compare(values[i], values[top]) != 0) continue;
        if (first == values.size()) first = i;
        if (not options.collect_maximizers) break;
        std::vector<AtomId> m;
        for (auto j : subsets[i]) m.push_back(relevant[j]);
        report.maximizers.push_back(std::move(m));
    }

    report.bound.kind = BoundKind::MtpOracle;
    report.bound.value = values[first];
    clamp(report.bound.value);
    CompletionChoice choice;
    for (auto j : subsets[first]) choice.added.push_back(relevant[j]);
    report.bound.witness = std::move(choice);
    return report;
}

BoundResult mtpdb::mtp_upper_bruteforce(const OpenPDB &g, const Budget &budget, const UCQ &q,
                                        const BruteforceOptions &options)
{
    return mtp_bruteforce(g, budget, q, options).bound;
}

BoundResult mtpdb::mtp_upper_bruteforce(const OpenPDB &g, const MTPConstraint &c, const UCQ &q,
                                        MtpDenominator denominator, const BruteforceOptions &options)
{
    return mtp_upper_bruteforce(g, budget_from_mtp(g, c, denominator), q, options);
}


/*======================================================================================================================
 * 3-dimensional matching
 *====================================================================================================================*/

const char *const mtpdb::kM0Query =
    "R(x,y,z), U(x) | R(x,y,z), V(y) | R(x,y,z), W(z) | U(x), V(y) | U(x), W(z) | V(y), W(z)";

void ThreeDMInstance::validate() const
{
    if (x_nodes.empty() or y_nodes.empty() or z_nodes.empty())
        throw InvalidArgument("3DM instance needs non-empty X, Y, and Z");
    std::set<std::string> names;
    for (auto *side : {&x_nodes, &y_nodes, &z_nodes})
        for (auto &n : *side)
            if (not names.insert(n).second) throw InvalidArgument("3DM node " + n + " appears twice");
    std::set<std::array<int, 3>> seen;
    for (auto &e : edges) {
        if (e[0] < 0 or e[0] >= static_cast<int>(x_nodes.size()) or e[1] < 0 or
            e[1] >= static_cast<int>(y_nodes.size()) or e[2] < 0 or e[2] >= static_cast<int>(z_nodes.size()))
            throw InvalidArgument("3DM edge outside X x Y x Z");
        if (not seen.insert(e).second) throw InvalidArgument("3DM edge repeated");
    }
    if (k > edges.size()) throw InvalidArgument("3DM k exceeds the number of edges");
}

namespace {

struct M0Layout
{
    Schema schema;
    int r, u, v, w;
    std::vector<int> x, y, z; ///< constant ids per side
};

M0Layout m0_layout(const ThreeDMInstance &inst)
{
    std::vector<std::string> domain;
    for (auto *side : {&inst.x_nodes, &inst.y_nodes, &inst.z_nodes}) domain.insert(domain.end(), side->begin(), side->end());
    M0Layout l;
    l.schema = Schema({{"R", 3}, {"U", 1}, {"V", 1}, {"W", 1}}, domain);
    l.r = 0, l.u = 1, l.v = 2, l.w = 3;
    int id = 0;
    for (std::size_t i = 0; i != inst.x_nodes.size(); ++i) l.x.push_back(id++);
    for (std::size_t i = 0; i != inst.y_nodes.size(); ++i) l.y.push_back(id++);
    for (std::size_t i = 0; i != inst.z_nodes.size(); ++i) l.z.push_back(id++);
    return l;
}

/// U, V, W at `w` on their sides and 0 elsewhere; R explicitly 0 except on `open_r`.
Database m0_database(const M0Layout &l, double w, const std::set<std::array<int, 3>> &open_r)
{
    Database db(l.schema);
    const int d = static_cast<int>(l.schema.domain_size());
    const std::set<int> xs(l.x.begin(), l.x.end()), ys(l.y.begin(), l.y.end()), zs(l.z.begin(), l.z.end());
    for (int c = 0; c < d; ++c) {
        const int arg[1] = {c};
        db.set(db.atom_id(l.u, arg), xs.contains(c) ? w : 0.0);
        db.set(db.atom_id(l.v, arg), ys.contains(c) ? w : 0.0);
        db.set(db.atom_id(l.w, arg), zs.contains(c) ? w : 0.0);
    }
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                if (not open_r.contains({a, b, c})) {
                    const int args[3] = {a, b, c};
                    db.set(db.atom_id(l.r, args), 0.0);
                }
    return db;
}

std::array<int, 3> edge_constants(const M0Layout &l, const std::array<int, 3> &e)
{
    return {l.x[e[0]], l.y[e[1]], l.z[e[2]]};
}

/// M0 on a database whose R holds exactly `triples` (constant ids) at `w`.
double m0_with_triples(const M0Layout &l, double w, const std::vector<std::array<int, 3>> &triples, const UCQ &m0)
{
    Database db = m0_database(l, w, {});
    for (auto &t : triples) db.set(db.atom_id(l.r, t), w);
    return prob_lifted(m0, db);
}

}

M0Instance mtpdb::build_m0_instance(const ThreeDMInstance &inst, double w)
{
    inst.validate();
    if (not(w > 0.0 and w < 1.0)) throw InvalidArgument("M0 weight must lie in (0, 1)");
    const M0Layout l = m0_layout(inst);
    std::set<std::array<int, 3>> open;
    for (auto &e : inst.edges) open.insert(edge_constants(l, e));

    Database db = m0_database(l, w, open);
    const double n = static_cast<double>(l.schema.herbrand_size(l.r));
    /* Existing R mass is 0; the bound sits halfway between k and k + 1 additions. */
    const double mean = (static_cast<double>(inst.k) + 0.5) * w / n;
    UCQ query = parse_ucq(kM0Query, l.schema);
    return {OpenPDB(std::move(db), w), MTPConstraint{"R", mean}, std::move(query)};
}

bool mtpdb::is_matching(const std::vector<std::array<int, 3>> &edges)
{
    for (int side = 0; side < 3; ++side) {
        std::set<int> used;
        for (auto &e : edges)
            if (not used.insert(e[side]).second) return false;
    }
    return true;
}

std::size_t mtpdb::maximum_matching_size(const ThreeDMInstance &inst)
{
    std::size_t best = 0;
    std::vector<bool> ux(inst.x_nodes.size()), uy(inst.y_nodes.size()), uz(inst.z_nodes.size());
    std::function<void(std::size_t, std::size_t)> search = [&](std::size_t i, std::size_t size) {
        best = std::max(best, size);
        if (size + (inst.edges.size() - i) <= best) return;
        for (std::size_t j = i; j != inst.edges.size(); ++j) {
            auto &e = inst.edges[j];
            if (ux[e[0]] or uy[e[1]] or uz[e[2]]) continue;
            ux[e[0]] = uy[e[1]] = uz[e[2]] = true;
            search(j + 1, size + 1);
            ux[e[0]] = uy[e[1]] = uz[e[2]] = false;
        }
    };
    search(0, 0);
    return best;
}

MaxMatchReport mtpdb::verify_maxmatch(const ThreeDMInstance &inst, double w, const BruteforceOptions &options)
{
    inst.validate();
    const std::size_t smallest = std::min({inst.x_nodes.size(), inst.y_nodes.size(), inst.z_nodes.size()});
    if (inst.k > smallest) throw InvalidArgument("k exceeds the smallest node set");
    if (smallest < 2) throw InvalidArgument("verification needs at least two nodes per side");

    MaxMatchReport r;
    std::ostringstream detail;
    const M0Layout l = m0_layout(inst);
    const M0Instance m0 = build_m0_instance(inst, w);
    const Budget budget = budget_from_mtp(m0.g, m0.constraint);
    r.budget = budget.max_added;
    r.max_matching = maximum_matching_size(inst);
    r.matching_exists = r.max_matching >= inst.k;

    std::vector<std::array<int, 3>> diagonal;
    for (std::size_t i = 0; i != inst.k; ++i) diagonal.push_back({l.x[i], l.y[i], l.z[i]});
    r.p_max = m0_with_triples(l, w, diagonal, m0.query);

    BruteforceOptions bf = options;
    bf.collect_maximizers = true;
    const BruteforceReport report = mtp_bruteforce(m0.g, budget, m0.query, bf);
    r.optimum = report.bound.value.p;
    r.maximizers = report.maximizers.size();

    r.maximizers_are_matchings = true;
    for (auto &m : report.maximizers) {
        std::vector<std::array<int, 3>> triples;
        for (auto &a : m) {
            auto args = m0.g.pdb.atom_args(a);
            triples.push_back({args[0], args[1], args[2]});
        }
        if (triples.size() != inst.k or not is_matching(triples)) r.maximizers_are_matchings = false;
    }

    /* Two completions that differ in one triple: x1 is fresh, x2 already occurs in P0. */
    const int x1 = l.x[0], x2 = l.x[1], y = l.y[0], z = l.z[0];
    const std::array<int, 3> p0 = {x2, l.y[1], l.z[1]};
    r.fresh_x_value = m0_with_triples(l, w, {p0, {x1, y, z}}, m0.query);
    r.reused_x_value = m0_with_triples(l, w, {p0, {x2, y, z}}, m0.query);

    bool ok = true;
    if (r.budget != inst.k) {
        ok = false;
        detail << "budget " << r.budget << " differs from k " << inst.k << "; ";
    }
    if (r.matching_exists) {
        if (std::abs(r.optimum - r.p_max) > 1e-9) {
            ok = false;
            detail << "optimum " << r.optimum << " differs from P_max " << r.p_max << "; ";
        }
        if (not r.maximizers_are_matchings) {
            ok = false;
            detail << "an optimal completion is not a matching; ";
        }
    } else {
        if (not(r.optimum < r.p_max - 1e-12)) {
            ok = false;
            detail << "optimum " << r.optimum << " not below P_max " << r.p_max << "; ";
        }
        if (r.maximizers_are_matchings and inst.k > 0) {
            ok = false;
            detail << "optimal completion is a size-k matching although none exists; ";
        }
    }
    if (not(r.fresh_x_value > r.reused_x_value)) {
        ok = false;
        detail << "fresh-x completion " << r.fresh_x_value << " does not beat reused-x " << r.reused_x_value << "; ";
    }
    r.passed = ok;
    r.detail = detail.str();
    return r;
}
