#pragma once

/*======================================================================================================================
 * Seeded random instances for property tests.
 *
 * Sampling uses only raw `std::mt19937_64` output (no standard distributions), so a seed produces the same instances
 * with every standard library.
 *====================================================================================================================*/

#include "mtpdb/database.hpp"
#include "mtpdb/open_world.hpp"
#include "mtpdb/oracle.hpp"
#include "mtpdb/query.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace mtpdb {

class Rng
{
    std::mt19937_64 engine_;

    public:
    explicit Rng(std::uint64_t seed) : engine_(seed) { }
    /// Independent stream for one trial of one suite.
    static Rng for_trial(std::uint64_t seed, std::uint64_t suite, std::uint64_t trial);

    std::uint64_t next() { return engine_(); }
    /// Uniform integer in [lo, hi].
    int uniform(int lo, int hi);
    /// Uniform real in [0, 1).
    double real();
    bool chance(double p) { return real() < p; }

    template<typename T>
    const T &pick(const std::vector<T> &items)
    {
        return items[static_cast<std::size_t>(uniform(0, static_cast<int>(items.size()) - 1))];
    }

    template<typename T>
    void shuffle(std::vector<T> &items)
    {
        for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[uniform(0, static_cast<int>(i) - 1)]);
    }
};

struct SchemaShape
{
    int min_domain = 2;
    int max_domain = 4;
    int min_predicates = 2;
    int max_predicates = 4;
    int max_arity = 3;
};

/// Predicates R, S, T, U (R always present) with arities 1..max_arity; constants C0, C1, ...
Schema random_schema(Rng &rng, const SchemaShape &shape = {});

struct QueryShape
{
    int max_disjuncts = 3;
    int max_atoms = 3;
    int max_variables = 3;
    double constant_chance = 0.15;
    bool self_join_free = false;
    /// Name of a predicate the query must mention, or empty.
    std::string must_mention;
};

UCQ random_ucq(Rng &rng, const Schema &schema, const QueryShape &shape = {});

/// A probability from {0, 0.1, ..., 0.9, 1}.
double random_probability(Rng &rng);

/// Every ground atom is absent with probability `absent_chance`, else stored with a random probability.  Once
/// `max_uncertain` atoms have 0 < p < 1, further stored atoms get 0 or 1.
Database random_database(Rng &rng, const Schema &schema, std::size_t max_uncertain, double absent_chance = 0.4);

/// A lambda from {0.2, 0.5, 0.8}.
double random_lambda(Rng &rng);

/// Random open database whose relation `relation` has at most `max_open` absent atoms (the rest explicitly pinned).
/// Other relations are fully stored so that only `relation` is open.
OpenPDB random_open_pdb(Rng &rng, const Schema &schema, const std::string &relation, std::size_t max_open,
                        std::size_t max_uncertain = 64);

/// Mean bound placing the budget at `b` additions plus a fraction `frac` in [0, 1) of a further one.
MTPConstraint constraint_for_budget(const OpenPDB &g, const std::string &relation, std::size_t b, double frac = 0.5);

/// |X| = |Y| = |Z| = `side` with `min_edges`..`max_edges` distinct random hyperedges and k in 1..min(side, |edges|).
ThreeDMInstance random_3dm(Rng &rng, int side = 3, int min_edges = 3, int max_edges = 9);

}
