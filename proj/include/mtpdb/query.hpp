#pragma once

#include "mtpdb/schema.hpp"

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mtpdb {

struct Term
{
    enum class Kind : std::uint8_t { Variable, Constant };

    Kind kind = Kind::Variable;
    std::string name;

    static Term variable(std::string name) { return {Kind::Variable, std::move(name)}; }
    static Term constant(std::string name) { return {Kind::Constant, std::move(name)}; }

    bool is_variable() const { return kind == Kind::Variable; }
    bool is_constant() const { return kind == Kind::Constant; }

    auto operator<=>(const Term &) const = default;
    bool operator==(const Term &) const = default;
};

struct Atom
{
    std::string predicate;
    std::vector<Term> args;

    bool is_ground() const;

    auto operator<=>(const Atom &) const = default;
    bool operator==(const Atom &) const = default;
};

/// A conjunction of atoms; all variables are existentially quantified and scoped to this conjunct.
struct ConjunctiveQuery
{
    std::vector<Atom> atoms;

    /// Variables in order of first occurrence.
    std::vector<std::string> variables() const;

    auto operator<=>(const ConjunctiveQuery &) const = default;
    bool operator==(const ConjunctiveQuery &) const = default;
};

/// A Boolean union of conjunctive queries.
struct UCQ
{
    std::vector<ConjunctiveQuery> disjuncts;

    /// Sort atoms by (predicate, args) inside every disjunct, sort disjuncts, and drop duplicates of both.
    void canonicalize();

    bool operator==(const UCQ &) const = default;
};

/// Syntactic profile used to route evaluation.
struct QueryProfile
{
    std::vector<bool> hierarchical_per_cq;
    bool inversion_free = false;
    bool self_join_free = false;
    bool safe = false;
};

/*----- parsing and printing ----------------------------------------------------------------------------------------*/

/// Parse `ucq := cq {"|" cq}`, `cq := atom {"," atom}`, `atom := PRED "(" term {"," term} ")"`.  Variables match
/// `[a-z][A-Za-z0-9_]*`, constants match `[A-Z][A-Za-z0-9_]*` or are double-quoted strings.  The result is validated
/// against `schema` (predicates, arities, and domain membership of constants) and canonicalized.
UCQ parse_ucq(std::string_view text, const Schema &schema);

/// Parse without a schema; only the grammar is checked.  Used for schema-free analyses.
UCQ parse_ucq(std::string_view text);

std::string to_string(const Term &term);
std::string to_string(const Atom &atom);
std::string to_string(const ConjunctiveQuery &cq);
std::string to_string(const UCQ &ucq);

/// Throws `SchemaError` unless every atom names a known predicate with matching arity and every constant is in the
/// domain.
void validate(const UCQ &q, const Schema &schema);

/*----- grounding ---------------------------------------------------------------------------------------------------*/

/// A ground atom as (predicate id, constant ids).
struct GroundAtom
{
    int predicate;
    std::vector<int> args;

    auto operator<=>(const GroundAtom &) const = default;
    bool operator==(const GroundAtom &) const = default;
};

/// Disjunction of conjunct sets; every conjunct holds sorted, duplicate-free ground atoms.
using GroundDNF = std::vector<std::vector<GroundAtom>>;

constexpr std::uint64_t kDefaultMaxConjuncts = 1'000'000;

/// Number of conjuncts `ground` produces: the sum over disjuncts of |domain|^#vars.
std::uint64_t ground_size(const UCQ &q, std::size_t domain_size);

/// One conjunct per disjunct and substitution of its variables by domain constants.  Throws `ResourceLimit` when
/// `ground_size` exceeds `max_conjuncts`.
GroundDNF ground(const UCQ &q, const Schema &schema, std::uint64_t max_conjuncts = kDefaultMaxConjuncts);

/*----- syntactic analyses ------------------------------------------------------------------------------------------*/

/// For all variable pairs x, y: at(x) and at(y) are nested or disjoint.
bool is_hierarchical(const ConjunctiveQuery &cq);

/// Every disjunct is hierarchical and the whole query decomposes by independent splits and common separator variables
/// alone, never needing inclusion-exclusion.
bool is_inversion_free(const UCQ &q);

/// True iff some predicate occurs more than once anywhere in `q`.
bool has_self_join(const UCQ &q);

/// True iff lifted inference never reaches its failure step on `q`.
bool is_safe(const UCQ &q);

QueryProfile analyze(const UCQ &q);

}
