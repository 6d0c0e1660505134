#pragma once

/*======================================================================================================================
 * Integer normal form of UCQs.
 *
 * Terms are encoded as `Sym`: non-negative values are constant ids of a `Schema`, negative values are variables
 * (`-(v+1)` for variable index `v`).  Variables are scoped per conjunctive query; two CQs never share variables even
 * if their indices coincide.
 *
 * A normalized CQ is a core (no redundant atoms), with variables renamed canonically and atoms sorted.  A minimized
 * DNF holds normalized CQs, none of which implies another, in sorted order.  Two minimized DNFs that are equal up to
 * variable renaming produce the same `key()` whenever the canonical renaming search was exhaustive (always the case
 * for CQs with few symmetric variables).
 *====================================================================================================================*/

#include "mtpdb/query.hpp"
#include "mtpdb/schema.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mtpdb::nf {

using Sym = std::int32_t;

inline bool is_var(Sym s) { return s < 0; }
inline int var_index(Sym s) { return -s - 1; }
inline Sym var_sym(int v) { return -v - 1; }

struct Atom
{
    int pred;
    std::vector<Sym> args;

    bool is_ground() const;
    bool has_var(int v) const;

    auto operator<=>(const Atom &) const = default;
    bool operator==(const Atom &) const = default;
};

struct CQ
{
    std::vector<Atom> atoms;
    int num_vars = 0;

    bool is_ground() const { return num_vars == 0; }
    bool is_true() const { return atoms.empty(); }

    auto operator<=>(const CQ &) const = default;
    bool operator==(const CQ &) const = default;
};

/// Disjunction of CQs.  No CQs means false; a CQ without atoms means true.
struct DNF
{
    std::vector<CQ> cqs;

    bool is_false() const { return cqs.empty(); }
    bool is_true() const { return cqs.size() == 1 and cqs.front().is_true(); }

    bool operator==(const DNF &) const = default;
};

/// Conjunction of DNF clauses.
using CNF = std::vector<DNF>;

/*----- construction ------------------------------------------------------------------------------------------------*/

/// Translate a validated UCQ into normal form; the result is minimized.
DNF compile(const UCQ &q, const Schema &schema);

/// Build a schema holding the predicates and constants of `q`, plus one fresh constant that no atom mentions.  Used by
/// schema-free analyses: every constant outside the query behaves like the fresh one.
Schema synthetic_schema(const UCQ &q);

/*----- logical operations ------------------------------------------------------------------------------------------*/

/// Core, canonical variable renaming, sorted atoms.
CQ normalize(CQ cq);

/// Normalize CQs, drop CQs implied by others, sort, deduplicate.
DNF minimize(DNF q);

/// `a` logically implies `b` (a homomorphism maps `b` into `a`).
bool implies(const CQ &a, const CQ &b);
/// Every CQ of `a` implies some CQ of `b`.
bool implies(const DNF &a, const DNF &b);

/// Most general unifier existence, with the variables of `a` and `b` standardized apart.
bool unifiable(const Atom &a, const Atom &b);

/// Some atom of `a` unifies with some atom of `b`.
bool dependent(const CQ &a, const CQ &b);
bool dependent(const DNF &a, const DNF &b);

/// Connected components of a CQ (atoms linked by shared variables).  Ground atoms are singleton components.  Each
/// component is normalized.
std::vector<CQ> components(const CQ &cq);

/// Partition item indices `0..n-1` into connected groups of the `linked` relation; groups and their members come out
/// in increasing order.
template<typename Linked>
std::vector<std::vector<int>> connected_groups(int n, Linked &&linked);

/// Rewrite a DNF into a conjunction of DNF clauses whose CQs are all connected.  Clauses implied by other clauses are
/// dropped.  Throws `ResourceLimit` beyond `max_clauses`.
CNF to_cnf(const DNF &q, std::size_t max_clauses = 4096);

/// Disjunction of all clauses in `clauses` (then minimized).
DNF disjoin(const std::vector<const DNF *> &clauses);

bool mentions(const CQ &q, int pred);
bool mentions(const DNF &q, int pred);
bool mentions(const CNF &q, int pred);

/*----- separator variables -----------------------------------------------------------------------------------------*/

/// A separator: one root variable per non-ground CQ, occupying a common argument position in every atom of each
/// predicate.  Ground CQs are attached to the single branch whose constant they carry at those positions.
struct SeparatorPlan
{
    std::vector<int> variable;          ///< per CQ; -1 for ground CQs
    std::vector<int> attached_constant; ///< per CQ; constant id for ground CQs, -1 otherwise
};

/// Search separators in canonical order and return the first.  Requires every non-ground CQ to be connected.
std::optional<SeparatorPlan> find_separator(const DNF &q);

/// Branch `c` of a separator: every non-ground CQ with its separator variable replaced by `c`, plus the ground CQs
/// attached to `c`.  The result is minimized.
DNF substitute(const DNF &q, const SeparatorPlan &plan, int constant);

/*----- keys --------------------------------------------------------------------------------------------------------*/

std::string key(const CQ &q);
std::string key(const DNF &q);
std::string key(const CNF &q);

std::string to_string(const DNF &q, const Schema &schema);


/*======================================================================================================================
 * Implementation of templates
 *====================================================================================================================*/

template<typename Linked>
std::vector<std::vector<int>> connected_groups(int n, Linked &&linked)
{
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (find(i) != find(j) and linked(i, j))
                parent[std::max(find(i), find(j))] = std::min(find(i), find(j));

    std::vector<std::vector<int>> groups;
    std::vector<int> group_of(n, -1);
    for (int i = 0; i < n; ++i) {
        int root = find(i);
        if (group_of[root] < 0) {
            group_of[root] = static_cast<int>(groups.size());
            groups.emplace_back();
        }
        groups[group_of[root]].push_back(i);
    }
    return groups;
}

}
