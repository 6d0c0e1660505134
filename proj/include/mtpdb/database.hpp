#pragma once

#include "mtpdb/schema.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace mtpdb {

/// A ground atom identified by predicate id and its position in the Herbrand base of that predicate.  The position
/// packs the argument constant ids in base |domain|, first argument most significant, so that index order is
/// lexicographic domain order.
struct AtomId
{
    int pred = 0;
    std::uint64_t index = 0;

    auto operator<=>(const AtomId &) const = default;
    bool operator==(const AtomId &) const = default;
};

struct AtomIdHash
{
    std::size_t operator()(const AtomId &a) const
    {
        return std::hash<std::uint64_t>{}(a.index * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint64_t>(a.pred));
    }
};

/// Position of `pred(args)` in the Herbrand base of `pred` over the domain of `schema`.
AtomId make_atom_id(const Schema &schema, int pred, std::span<const int> args);

/// Tuple-independent probabilistic database.  Every stored tuple has a probability in [0, 1]; atoms that are not
/// stored are absent and have probability 0.  A tuple stored with probability 0 is present, which matters under
/// open-world semantics.
class Database
{
    Schema schema_;
    std::vector<std::unordered_map<std::uint64_t, double>> relations_;

    public:
    explicit Database(Schema schema);

    const Schema &schema() const { return schema_; }

    AtomId atom_id(int pred, std::span<const int> args) const;
    /// Throws `SchemaError` for unknown predicates, constants, or arity mismatches.
    AtomId atom_id(std::string_view pred, const std::vector<std::string> &args) const;
    std::vector<int> atom_args(AtomId atom) const;
    /// Prints as `PRED(c1,c2)`.
    std::string atom_name(AtomId atom) const;

    /// Insert or overwrite.  Throws `InvalidArgument` unless 0 <= p <= 1.
    void set(AtomId atom, double p);

    bool contains(AtomId atom) const;
    std::optional<double> find(AtomId atom) const;
    /// Probability, 0 when absent.
    double prob(AtomId atom) const;

    const std::unordered_map<std::uint64_t, double> &relation(int pred) const { return relations_.at(pred); }
    std::size_t size() const;
};

/// Read-only probability assignment over a database: stored tuples, then per-predicate completion values for absent
/// atoms, then explicit overrides (highest precedence).  The database must outlive the view.
class ProbabilityView
{
    const Database *db_;
    std::vector<double> absent_;
    std::unordered_map<AtomId, double, AtomIdHash> overrides_;

    public:
    explicit ProbabilityView(const Database &db);

    const Database &database() const { return *db_; }
    const Schema &schema() const { return db_->schema(); }

    /// Absent atoms of `pred` read as `p`.
    void complete(int pred, double p);
    void complete_all(double p);
    void set(AtomId atom, double p);
    void unset(AtomId atom) { overrides_.erase(atom); }

    double operator()(AtomId atom) const;
};

}
