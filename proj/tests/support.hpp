#pragma once

/* Reference computations used as test oracles.  They enumerate possible worlds and search for query matches by naive
 * backtracking, sharing no code with the engine beyond the data structures. */

#include "mtpdb/database.hpp"
#include "mtpdb/open_world.hpp"
#include "mtpdb/query.hpp"

#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

namespace test {

using namespace mtpdb;

/// Truth of `q` in the world where exactly the atoms accepted by `holds` are true.
inline bool satisfied(const UCQ &q, const Schema &schema, const std::function<bool(AtomId)> &holds)
{
    for (auto &cq : q.disjuncts) {
        const auto vars = cq.variables();
        std::map<std::string, int> value;
        std::function<bool(std::size_t)> assign = [&](std::size_t i) -> bool {
            if (i == vars.size()) {
                for (auto &atom : cq.atoms) {
                    std::vector<int> args;
                    for (auto &t : atom.args)
                        args.push_back(t.is_variable() ? value.at(t.name) : *schema.constant_id(t.name));
                    if (not holds(make_atom_id(schema, schema.require_predicate(atom.predicate), args))) return false;
                }
                return true;
            }
            for (int c = 0; c < static_cast<int>(schema.domain_size()); ++c) {
                value[vars[i]] = c;
                if (assign(i + 1)) return true;
            }
            return false;
        };
        if (assign(0)) return true;
    }
    return false;
}

/// Sum over all worlds of the uncertain atoms (0 < p < 1) of the query's predicates.
inline double world_probability(const UCQ &q, const ProbabilityView &view)
{
    const Schema &schema = view.schema();
    std::vector<AtomId> uncertain;
    std::vector<double> probs;
    std::map<std::string, bool> seen;
    for (auto &cq : q.disjuncts)
        for (auto &atom : cq.atoms) {
            if (seen[atom.predicate]) continue;
            seen[atom.predicate] = true;
            const int pred = schema.require_predicate(atom.predicate);
            for (std::uint64_t i = 0; i != schema.herbrand_size(pred); ++i) {
                const double p = view({pred, i});
                if (p > 0.0 and p < 1.0) {
                    uncertain.push_back({pred, i});
                    probs.push_back(p);
                }
            }
        }
    if (uncertain.size() > 22) throw std::runtime_error("too many uncertain atoms for the test oracle");

    double total = 0.0;
    for (std::uint64_t world = 0; world != (std::uint64_t(1) << uncertain.size()); ++world) {
        double weight = 1.0;
        for (std::size_t i = 0; i != uncertain.size(); ++i) weight *= (world >> i & 1) ? probs[i] : 1.0 - probs[i];
        if (weight == 0.0) continue;
        auto holds = [&](AtomId a) {
            for (std::size_t i = 0; i != uncertain.size(); ++i)
                if (uncertain[i] == a) return (world >> i & 1) == 1;
            return view(a) == 1.0;
        };
        if (satisfied(q, schema, holds)) total += weight;
    }
    return total;
}

inline double world_probability(const UCQ &q, const Database &db)
{
    return world_probability(q, ProbabilityView(db));
}

/// Best probability over completions adding at most `budget` absent atoms of `relation` at lambda.
inline double best_completion(const OpenPDB &g, const std::string &relation, std::size_t budget, const UCQ &q)
{
    const Schema &schema = g.pdb.schema();
    const int pred = schema.require_predicate(relation);
    std::vector<AtomId> absent;
    for (std::uint64_t i = 0; i != schema.herbrand_size(pred); ++i)
        if (not g.pdb.contains({pred, i})) absent.push_back({pred, i});
    if (absent.size() > 16) throw std::runtime_error("too many open atoms for the test oracle");

    double best = 0.0;
    for (std::uint64_t set = 0; set != (std::uint64_t(1) << absent.size()); ++set) {
        if (static_cast<std::size_t>(__builtin_popcountll(set)) > budget) continue;
        ProbabilityView view(g.pdb);
        for (std::size_t i = 0; i != absent.size(); ++i)
            if (set >> i & 1) view.set(absent[i], g.lambda);
        best = std::max(best, world_probability(q, view));
    }
    return best;
}

/// Database over `domain` with the listed tuples, e.g. {{"S", {"a"}, 0.5}}.
struct Row
{
    std::string predicate;
    std::vector<std::string> args;
    double p;
};

inline Database make_db(std::vector<std::pair<std::string, int>> predicates, std::vector<std::string> domain,
                        const std::vector<Row> &rows)
{
    Database db(Schema(std::move(predicates), std::move(domain)));
    for (auto &r : rows) db.set(db.atom_id(r.predicate, r.args), r.p);
    return db;
}

inline Database scientists()
{
    return make_db({{"S", 1}, {"CoA", 2}}, {"Einstein", "Erdos", "VonNeumann", "Shakespeare"},
                   {{"S", {"Einstein"}, 0.8},
                    {"S", {"Erdos"}, 0.8},
                    {"S", {"VonNeumann"}, 0.9},
                    {"S", {"Shakespeare"}, 0.2},
                    {"CoA", {"Einstein", "Erdos"}, 0.8},
                    {"CoA", {"Erdos", "VonNeumann"}, 0.9},
                    {"CoA", {"VonNeumann", "Einstein"}, 0.5}});
}

}
