#include "mtpdb/errors.hpp"
#include "mtpdb/exact_dp.hpp"
#include "mtpdb/oracle.hpp"

#include "support.hpp"

#include <doctest.h>


using namespace mtpdb;
using doctest::Approx;


namespace {

BudgetCurve curve(std::vector<double> values)
{
    std::vector<BudgetEntry> entries;
    for (double v : values) entries.push_back({Prob::from(v), {}});
    return BudgetCurve(std::move(entries));
}

OpenPDB empty_unary(std::vector<std::string> domain, double lambda)
{
    return OpenPDB(test::make_db({{"R", 1}}, std::move(domain), {}), lambda);
}

}


TEST_CASE("eliminating one constant")
{
    const BudgetCurve zero = curve({0.0});
    const BudgetCurve a = curve({0.1, 0.5, 0.6});
    /* Base case: D(0) = 0 gives back A. */
    const BudgetCurve d1 = dp_eliminate(zero, a, 2);
    for (std::size_t b = 0; b <= 2; ++b) CHECK(d1.at(b).value.p == Approx(a.at(b).value.p));

    /* A vacuous constant leaves D unchanged. */
    const BudgetCurve same = dp_eliminate(a, zero, 2);
    for (std::size_t b = 0; b <= 2; ++b) CHECK(same.at(b).value.p == Approx(a.at(b).value.p));

    /* Budget split: with b = 2, either both units on one side or one each. */
    const BudgetCurve d2 = dp_eliminate(a, a, 2);
    const double one_each = 1.0 - 0.5 * 0.5;
    const double both_left = 1.0 - 0.4 * 0.9;
    CHECK(d2.at(2).value.p == Approx(std::max(one_each, both_left)));
    CHECK(d2.at(0).value.p == Approx(1.0 - 0.9 * 0.9));
}

TEST_CASE("conjoining curves")
{
    const BudgetCurve x = curve({0.2, 0.6});
    const BudgetCurve y = curve({0.5, 0.9});
    const BudgetCurve c = dp_conjoin(x, y, 2);
    CHECK(c.at(0).value.p == Approx(0.1));
    CHECK(c.at(1).value.p == Approx(std::max(0.6 * 0.5, 0.2 * 0.9)));
    CHECK(c.at(2).value.p == Approx(0.54));
}

TEST_CASE("one pick among symmetric constants")
{
    const OpenPDB g = empty_unary({"a", "b"}, 0.5);
    const UCQ q = parse_ucq("R(x)", g.pdb.schema());
    const BoundResult r = mtp_upper_exact(g, Budget{"R", 1, false}, q);
    CHECK(r.kind == BoundKind::MtpExact);
    CHECK(r.value.p == Approx(0.5));
    REQUIRE(r.witness);
    REQUIRE(r.witness->added.size() == 1);
    CHECK(r.witness->added[0] == g.pdb.atom_id("R", {"a"}));
}

TEST_CASE("zero and unlimited budgets")
{
    const OpenPDB g(test::scientists(), 0.3);
    const UCQ q1 = parse_ucq("S(x), CoA(x,y)", g.pdb.schema());
    const BoundResult none = mtp_upper_exact(g, Budget{"CoA", 0, false}, q1);
    CHECK(std::abs(none.value.p - 0.94456) <= 1e-12);
    CHECK(none.witness->added.empty());

    const BoundResult all = mtp_upper_exact(g, Budget{"CoA", 13, false}, q1);
    ProbabilityView full(g.pdb);
    full.complete(g.pdb.schema().require_predicate("CoA"), 0.3);
    CHECK(std::abs(all.value.p - test::world_probability(q1, full)) <= 1e-12);
}

TEST_CASE("budgeted optimum against world enumeration")
{
    const OpenPDB g(test::scientists(), 0.3);
    for (const char *text : {"S(x), CoA(x,y)", "CoA(x,y), S(y)", "CoA(Einstein,y) | S(Shakespeare)"}) {
        const UCQ q = parse_ucq(text, g.pdb.schema());
        for (std::size_t b = 0; b <= 3; ++b) {
            CAPTURE(text);
            CAPTURE(b);
            const BoundResult r = mtp_upper_exact(g, Budget{"CoA", b, false}, q);
            CHECK(std::abs(r.value.p - test::best_completion(g, "CoA", b, q)) <= 1e-12);
            CHECK(r.witness->added.size() <= b);
            CHECK(std::abs(test::world_probability(q, completion_view(g, *r.witness)) - r.value.p) <= 1e-12);
        }
    }
}

TEST_CASE("budget curves")
{
    const OpenPDB g(test::scientists(), 0.3);
    const UCQ q1 = parse_ucq("S(x), CoA(x,y)", g.pdb.schema());
    const BudgetCurve a = build_a_table(g, "CoA", 4, q1);
    for (std::size_t b = 1; b <= 4; ++b) CHECK(a.at(b).value.p >= a.at(b - 1).value.p);

    /* No open tuple of CoA is read by this query: the budget is useless. */
    const UCQ fixed = parse_ucq("CoA(Einstein,Erdos), S(Einstein)", g.pdb.schema());
    const BudgetCurve flat = build_a_table(g, "CoA", 4, fixed);
    for (std::size_t b = 0; b <= 4; ++b) CHECK(flat.at(b).value.p == Approx(0.64));

    /* One open tuple read: the first unit lifts it to lambda. */
    const UCQ single = parse_ucq("CoA(Shakespeare,Erdos)", g.pdb.schema());
    const BudgetCurve one = build_a_table(g, "CoA", 2, single);
    CHECK(one.at(0).value.p == 0.0);
    CHECK(one.at(1).value.p == Approx(0.3));
    CHECK(one.at(2).value.p == Approx(0.3));
}

TEST_CASE("queries needing inclusion-exclusion over the budgeted relation")
{
    const M0Instance m0 = build_m0_instance({{"x1"}, {"y1"}, {"z1"}, {{0, 0, 0}}, 1});
    CHECK_THROWS_AS(mtp_upper_exact(m0.g, m0.constraint, m0.query), NotInversionFree);
}
