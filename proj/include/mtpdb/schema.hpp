#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mtpdb {

/// Predicates with their arities plus the ordered, explicit domain of constants.
///
/// Predicate ids and constant ids are dense indices in insertion order.  The domain order is significant: it fixes
/// the canonical order of ground atoms, the elimination order of the budgeted program and all tie-breaking.
class Schema
{
    struct Predicate
    {
        std::string name;
        int arity;
    };

    std::vector<Predicate> predicates_;
    std::unordered_map<std::string, int> predicate_ids_;
    std::vector<std::string> domain_;
    std::unordered_map<std::string, int> constant_ids_;

    public:
    Schema() = default;
    Schema(std::vector<std::pair<std::string, int>> predicates, std::vector<std::string> domain);

    int add_predicate(std::string name, int arity);
    void set_domain(std::vector<std::string> constants);

    std::size_t num_predicates() const { return predicates_.size(); }
    std::optional<int> predicate_id(std::string_view name) const;
    /// Like `predicate_id` but throws `SchemaError` for unknown names.
    int require_predicate(std::string_view name) const;
    const std::string & predicate_name(int id) const { return predicates_.at(id).name; }
    int arity(int id) const { return predicates_.at(id).arity; }

    std::size_t domain_size() const { return domain_.size(); }
    const std::vector<std::string> & domain() const { return domain_; }
    std::optional<int> constant_id(std::string_view name) const;
    const std::string & constant_name(int id) const { return domain_.at(id); }

    /// |domain|^arity, the number of ground atoms of the predicate.
    std::uint64_t herbrand_size(int predicate) const;
};

}
