#include "mtpdb/schema.hpp"

#include "mtpdb/errors.hpp"

#include <limits>


using namespace mtpdb;


Schema::Schema(std::vector<std::pair<std::string, int>> predicates, std::vector<std::string> domain)
{
    for (auto &[name, arity] : predicates) add_predicate(std::move(name), arity);
    set_domain(std::move(domain));
}

int Schema::add_predicate(std::string name, int arity)
{
    if (name.empty()) throw SchemaError("empty predicate name");
    if (arity < 1) throw SchemaError("predicate " + name + " must have arity >= 1");
    if (predicate_ids_.contains(name)) throw SchemaError("duplicate predicate " + name);
    const int id = static_cast<int>(predicates_.size());
    predicate_ids_.emplace(name, id);
    predicates_.push_back({std::move(name), arity});
    return id;
}

void Schema::set_domain(std::vector<std::string> constants)
{
    if (constants.empty()) throw SchemaError("domain must not be empty");
    std::unordered_map<std::string, int> ids;
    for (std::size_t i = 0; i != constants.size(); ++i) {
        if (constants[i].empty()) throw SchemaError("empty constant name in domain");
        if (not ids.emplace(constants[i], static_cast<int>(i)).second)
            throw SchemaError("duplicate constant " + constants[i] + " in domain");
    }
    domain_ = std::move(constants);
    constant_ids_ = std::move(ids);
}

std::optional<int> Schema::predicate_id(std::string_view name) const
{
    auto it = predicate_ids_.find(std::string(name));
    if (it == predicate_ids_.end()) return std::nullopt;
    return it->second;
}

int Schema::require_predicate(std::string_view name) const
{
    if (auto id = predicate_id(name)) return *id;
    throw SchemaError("unknown predicate " + std::string(name));
}

std::optional<int> Schema::constant_id(std::string_view name) const
{
    auto it = constant_ids_.find(std::string(name));
    if (it == constant_ids_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t Schema::herbrand_size(int predicate) const
{
    std::uint64_t n = 1;
    for (int i = 0; i < arity(predicate); ++i) {
        if (n > std::numeric_limits<std::uint64_t>::max() / domain_.size())
            throw SchemaError("Herbrand base of " + predicate_name(predicate) + " overflows 64 bits");
        n *= domain_.size();
    }
    return n;
}
