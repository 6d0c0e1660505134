#include "mtpdb/residence.hpp"

#include "mtpdb/errors.hpp"
#include "mtpdb/exact_dp.hpp"

#include <cstdio>


using namespace mtpdb;


OpenPDB mtpdb::residence_database(const ResidenceConfig &config)
{
    std::vector<std::string> persons;
    for (std::size_t i = 0; i != config.persons; ++i) persons.push_back("P" + std::to_string(i));
    Schema schema({{"LiLA", 1}, {"S", 1}, {"LiSpr", 1}}, std::move(persons));
    Database db(schema);

    auto fill = [&](const char *relation, std::size_t first, std::size_t count) {
        if (first + count > config.persons) throw InvalidArgument("person range exceeds the domain");
        const int pred = schema.require_predicate(relation);
        for (std::size_t i = first; i != first + count; ++i) db.set({pred, i}, config.tuple_prob);
    };
    fill("LiLA", config.lila_first, config.lila_count);
    fill("S", config.s_first, config.s_count);
    fill("LiSpr", config.lispr_first, config.lispr_count);
    return OpenPDB(std::move(db), config.lambda);
}

MTPConstraint mtpdb::residence_constraint(const ResidenceConfig &config)
{
    if (config.constrained == "LiLA") return {"LiLA", config.lila_mean};
    if (config.constrained == "S") return {"S", config.s_mean};
    if (config.constrained == "LiSpr") return {"LiSpr", config.lispr_mean};
    throw InvalidArgument("unknown relation " + config.constrained);
}

std::vector<ResidenceRow> mtpdb::run_residence_table(const ResidenceConfig &config)
{
    const OpenPDB g = residence_database(config);
    const MTPConstraint c = residence_constraint(config);
    const Budget budget = budget_from_mtp(g, c);

    std::vector<ResidenceRow> rows;
    for (const char *text : {"LiLA(x), S(x)", "LiSpr(x), S(x)"}) {
        const UCQ q = parse_ucq(text, g.pdb.schema());
        const BoundResult interval = interval_unconstrained(g, q);
        const BoundResult constrained = mtp_upper_exact(g, budget, q);
        rows.push_back({text, interval.interval->lower, interval.interval->upper, constrained.value, budget});
    }
    return rows;
}

std::string mtpdb::format_residence_table(const std::vector<ResidenceRow> &rows)
{
    std::string out = "query            closed     open                        constrained                 budget\n";
    char line[256];
    for (auto &r : rows) {
        std::snprintf(line, sizeof line, "%-16s %-10.6g 1 - 10^%-19.4f 1 - 10^%-19.4f %zu on %s\n", r.query.c_str(),
                      r.closed.p + 0.0, r.open.log10_complement(), r.constrained.log10_complement(), r.budget.max_added,
                      r.budget.relation.c_str());
        out += line;
    }
    return out;
}
