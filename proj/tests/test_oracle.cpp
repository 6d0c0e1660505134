#include "mtpdb/errors.hpp"
#include "mtpdb/exact_dp.hpp"
#include "mtpdb/io.hpp"
#include "mtpdb/oracle.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>


using namespace mtpdb;
using doctest::Approx;


TEST_CASE("subset counts")
{
    CHECK(count_subsets(5, 0) == 1);
    CHECK(count_subsets(5, 2) == 1 + 5 + 10);
    CHECK(count_subsets(4, 9) == 16);
    CHECK(count_subsets(200, 100) == UINT64_MAX);
}

TEST_CASE("brute force on an empty unary relation")
{
    const OpenPDB g(test::make_db({{"R", 1}}, {"a", "b"}, {}), 0.5);
    const UCQ q = parse_ucq("R(x)", g.pdb.schema());
    const BoundResult zero = mtp_upper_bruteforce(g, Budget{"R", 0, false}, q);
    CHECK(zero.value.p == 0.0);
    CHECK(zero.witness->added.empty());

    const BoundResult two = mtp_upper_bruteforce(g, Budget{"R", 2, false}, q);
    CHECK(two.kind == BoundKind::MtpOracle);
    CHECK(two.value.p == Approx(0.75));
    CHECK(two.witness->added == std::vector<AtomId>{g.pdb.atom_id("R", {"a"}), g.pdb.atom_id("R", {"b"})});
}

TEST_CASE("brute force agrees with the exact program and world enumeration")
{
    const OpenPDB g(test::scientists(), 0.3);
    const UCQ q1 = parse_ucq("S(x), CoA(x,y)", g.pdb.schema());
    for (std::size_t b = 0; b <= 3; ++b) {
        const Budget budget{"CoA", b, false};
        const BoundResult brute = mtp_upper_bruteforce(g, budget, q1);
        CHECK(std::abs(brute.value.p - mtp_upper_exact(g, budget, q1).value.p) <= 1e-12);
        CHECK(std::abs(brute.value.p - test::best_completion(g, "CoA", b, q1)) <= 1e-12);
        BruteforceOptions serial;
        serial.parallel = false;
        const BoundResult s = mtp_upper_bruteforce(g, budget, q1, serial);
        CHECK(s.value.p == brute.value.p);
        CHECK(s.witness->added == brute.witness->added);
    }
}

TEST_CASE("unsafe queries are searched with world enumeration")
{
    const OpenPDB g(test::scientists(), 0.3);
    const UCQ h0 = parse_ucq("S(x), CoA(x,y), S(y)", g.pdb.schema());
    const BruteforceReport r = mtp_bruteforce(g, Budget{"CoA", 2, false}, h0);
    CHECK(r.used_ground);
    CHECK(std::abs(r.bound.value.p - test::best_completion(g, "CoA", 2, h0)) <= 1e-12);
}

TEST_CASE("subset cap")
{
    const OpenPDB g(test::scientists(), 0.3);
    const UCQ q1 = parse_ucq("S(x), CoA(x,y)", g.pdb.schema());
    BruteforceOptions small;
    small.max_subsets = 10;
    CHECK_THROWS_AS(mtp_upper_bruteforce(g, Budget{"CoA", 3, false}, q1, small), ResourceLimit);
}

TEST_CASE("a single hyperedge")
{
    const ThreeDMInstance inst{{"x1"}, {"y1"}, {"z1"}, {{0, 0, 0}}, 1};
    const M0Instance m0 = build_m0_instance(inst);
    CHECK(budget_from_mtp(m0.g, m0.constraint).max_added == 1);

    /* Query false iff at most one of U, V, W holds and R fails or none of U, V, W holds. */
    double by_hand = 0.0;
    for (int world = 0; world < 16; ++world) {
        const bool r = world & 1, u = world & 2, v = world & 4, w = world & 8;
        const int uvw = u + v + w;
        const bool holds = uvw >= 2 or (r and uvw >= 1);
        double weight = 1.0;
        for (int i = 0; i < 4; ++i) weight *= (world >> i & 1) ? 0.8 : 0.2;
        if (holds) by_hand += weight;
    }
    CHECK(by_hand == Approx(0.9728).epsilon(1e-12));

    const BruteforceReport r = mtp_bruteforce(m0.g, budget_from_mtp(m0.g, m0.constraint), m0.query);
    CHECK(std::abs(r.bound.value.p - 0.9728) <= 1e-9);
    REQUIRE(r.bound.witness->added.size() == 1);
    CHECK(m0.g.pdb.atom_name(r.bound.witness->added[0]) == "R(x1,y1,z1)");
    CHECK(std::abs(test::world_probability(m0.query, completion_view(m0.g, *r.bound.witness)) - 0.9728) <= 1e-12);
}

TEST_CASE("zero budget leaves the closed world")
{
    const ThreeDMInstance inst{{"x1", "x2"}, {"y1", "y2"}, {"z1", "z2"}, {{0, 0, 0}, {1, 1, 1}}, 0};
    const M0Instance m0 = build_m0_instance(inst);
    const BoundResult r = mtp_upper_bruteforce(m0.g, m0.constraint, m0.query);
    CHECK(r.witness->added.empty());
    CHECK(std::abs(r.value.p - test::world_probability(m0.query, m0.g.pdb)) <= 1e-12);
}

TEST_CASE("two disjoint hyperedges are both picked")
{
    const ThreeDMInstance inst{{"x1", "x2"}, {"y1", "y2"}, {"z1", "z2"}, {{0, 0, 0}, {1, 1, 1}}, 2};
    const M0Instance m0 = build_m0_instance(inst);
    const Budget budget = budget_from_mtp(m0.g, m0.constraint);
    CHECK(budget.max_added == 2);
    const BoundResult both = mtp_upper_bruteforce(m0.g, budget, m0.query);
    CHECK(both.witness->added.size() == 2);
    const BoundResult single = mtp_upper_bruteforce(m0.g, Budget{budget.relation, 1, false}, m0.query);
    CHECK(both.value.p > single.value.p);
}

TEST_CASE("maximum matchings")
{
    const ThreeDMInstance perfect = parse_3dm("X a b\nY c d\nZ e f\nE a,c,e\nE b,d,f\nE a,d,f\nk 2\n");
    CHECK(maximum_matching_size(perfect) == 2);
    CHECK(is_matching({{0, 0, 0}, {1, 1, 1}}));
    CHECK_FALSE(is_matching({{0, 0, 0}, {1, 0, 1}}));
}

TEST_CASE("optimal completions are matchings when one of size k exists")
{
    const ThreeDMInstance inst = parse_3dm("X a1 a2 a3\nY b1 b2 b3\nZ c1 c2 c3\n"
                                           "E a1,b1,c1\nE a2,b2,c2\nE a3,b3,c3\nE a1,b2,c3\nE a2,b1,c1\nk 3\n");
    const MaxMatchReport r = verify_maxmatch(inst);
    CHECK(r.matching_exists);
    CHECK(r.maximizers_are_matchings);
    CHECK(std::abs(r.optimum - r.p_max) <= 1e-12);
    CHECK(r.fresh_x_value > r.reused_x_value);
    CHECK(r.passed);
}

TEST_CASE("the optimum drops without a matching of size k")
{
    const ThreeDMInstance inst = parse_3dm("X a1 a2\nY b1 b2\nZ c1 c2\nE a1,b1,c1\nE a1,b2,c2\nE a1,b1,c2\nk 2\n");
    const MaxMatchReport r = verify_maxmatch(inst);
    CHECK(r.max_matching == 1);
    CHECK_FALSE(r.matching_exists);
    CHECK(r.optimum < r.p_max - 1e-12);
    CHECK(r.passed);
}

TEST_CASE("invalid 3DM instances")
{
    CHECK_THROWS_AS(parse_3dm("X a\nY a\nZ c\nE a,a,c\nk 1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_3dm("X a\nY b\nZ c\nE a,b,d\nk 1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_3dm("X a\nY b\nZ c\nE a,b,c\nk 2\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_3dm("X a\nY b\nZ c\nE a,b,c\n"), InvalidArgument);
}
