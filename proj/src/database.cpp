#include "mtpdb/database.hpp"

#include "mtpdb/errors.hpp"

#include <cmath>


using namespace mtpdb;


namespace {

void check_probability(double p)
{
    if (not(p >= 0.0 and p <= 1.0)) throw InvalidArgument("probability " + std::to_string(p) + " outside [0, 1]");
}

}


AtomId mtpdb::make_atom_id(const Schema &schema, int pred, std::span<const int> args)
{
    const std::uint64_t d = schema.domain_size();
    std::uint64_t index = 0;
    for (int c : args) index = index * d + static_cast<std::uint64_t>(c);
    return {pred, index};
}


Database::Database(Schema schema) : schema_(std::move(schema)), relations_(schema_.num_predicates())
{
    if (schema_.domain_size() == 0) throw SchemaError("domain must not be empty");
    for (int pred = 0; pred < static_cast<int>(schema_.num_predicates()); ++pred) schema_.herbrand_size(pred);
}

AtomId Database::atom_id(int pred, std::span<const int> args) const
{
    return make_atom_id(schema_, pred, args);
}

AtomId Database::atom_id(std::string_view pred, const std::vector<std::string> &args) const
{
    const int id = schema_.require_predicate(pred);
    if (static_cast<int>(args.size()) != schema_.arity(id))
        throw SchemaError("arity mismatch: " + std::string(pred) + " has arity " + std::to_string(schema_.arity(id)) +
                          " but got " + std::to_string(args.size()) + " values");
    std::vector<int> ids;
    for (auto &a : args) {
        auto c = schema_.constant_id(a);
        if (not c) throw SchemaError("constant " + a + " is not in the domain");
        ids.push_back(*c);
    }
    return atom_id(id, ids);
}

std::vector<int> Database::atom_args(AtomId atom) const
{
    const std::uint64_t d = schema_.domain_size();
    std::vector<int> args(schema_.arity(atom.pred));
    for (auto it = args.rbegin(); it != args.rend(); ++it) {
        *it = static_cast<int>(atom.index % d);
        atom.index /= d;
    }
    return args;
}

std::string Database::atom_name(AtomId atom) const
{
    std::string out = schema_.predicate_name(atom.pred) + "(";
    auto args = atom_args(atom);
    for (std::size_t i = 0; i != args.size(); ++i) {
        if (i) out += ",";
        out += schema_.constant_name(args[i]);
    }
    return out + ")";
}

void Database::set(AtomId atom, double p)
{
    check_probability(p);
    relations_.at(atom.pred)[atom.index] = p;
}

bool Database::contains(AtomId atom) const
{
    return relations_.at(atom.pred).contains(atom.index);
}

std::optional<double> Database::find(AtomId atom) const
{
    auto &rel = relations_.at(atom.pred);
    auto it = rel.find(atom.index);
    if (it == rel.end()) return std::nullopt;
    return it->second;
}

double Database::prob(AtomId atom) const
{
    return find(atom).value_or(0.0);
}

std::size_t Database::size() const
{
    std::size_t n = 0;
    for (auto &r : relations_) n += r.size();
    return n;
}


ProbabilityView::ProbabilityView(const Database &db) : db_(&db), absent_(db.schema().num_predicates(), 0.0) { }

void ProbabilityView::complete(int pred, double p)
{
    check_probability(p);
    absent_.at(pred) = p;
}

void ProbabilityView::complete_all(double p)
{
    check_probability(p);
    for (auto &a : absent_) a = p;
}

void ProbabilityView::set(AtomId atom, double p)
{
    check_probability(p);
    overrides_[atom] = p;
}

double ProbabilityView::operator()(AtomId atom) const
{
    if (not overrides_.empty()) {
        auto it = overrides_.find(atom);
        if (it != overrides_.end()) return it->second;
    }
    if (auto p = db_->find(atom)) return *p;
    return absent_[atom.pred];
}
