#include "mtpdb/errors.hpp"
#include "mtpdb/greedy.hpp"
#include "mtpdb/oracle.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>


using namespace mtpdb;
using doctest::Approx;


TEST_CASE("set query probability at the extremes")
{
    const OpenPDB g(test::scientists(), 0.3);
    const UCQ q1 = parse_ucq("S(x), CoA(x,y)", g.pdb.schema());
    const auto open = open_tuples(g, "CoA");
    CHECK(std::abs(set_query_prob(g, q1, {}) - 0.94456) <= 1e-12);
    CHECK(normalized_set_query_prob(g, q1, {}) == 0.0);

    ProbabilityView full(g.pdb);
    full.complete(g.pdb.schema().require_predicate("CoA"), 0.3);
    CHECK(std::abs(set_query_prob(g, q1, open) - test::world_probability(q1, full)) <= 1e-12);

    /* lambda = 0 makes S constant */
    const OpenPDB closed(test::scientists(), 0.0);
    CHECK(set_query_prob(closed, q1, open) == set_query_prob(closed, q1, {}));
}

TEST_CASE("single-tuple gains against world enumeration")
{
    const OpenPDB g(test::scientists(), 0.3);
    const UCQ q1 = parse_ucq("S(x), CoA(x,y)", g.pdb.schema());
    const SetQueryFunction f(g, q1);
    const double closed = test::world_probability(q1, g.pdb);
    for (AtomId t : open_tuples(g, "CoA")) {
        ProbabilityView v(g.pdb);
        v.set(t, 0.3);
        const double expected = test::world_probability(q1, v) - closed;
        CHECK(std::abs(normalized_set_query_prob(g, q1, {t}) - expected) <= 1e-12);
        CHECK(std::abs(f.marginal_gain({}, t) - expected) <= 1e-12);
    }
}

TEST_CASE("zero budget collapses the interval")
{
    const OpenPDB g(test::scientists(), 0.3);
    const UCQ q1 = parse_ucq("S(x), CoA(x,y)", g.pdb.schema());
    const GreedyTrace t = greedy_trace(g, Budget{"CoA", 0, false}, q1);
    CHECK(t.picks.empty());
    CHECK(t.p_greedy.p == t.p_closed.p);
    CHECK(t.upper == Approx(t.p_greedy.p).epsilon(1e-14));
}

TEST_CASE("one pick on an empty unary relation")
{
    const OpenPDB g(test::make_db({{"R", 1}}, {"a", "b"}, {}), 0.5);
    const UCQ q = parse_ucq("R(x)", g.pdb.schema());
    const BoundResult r = greedy_upper(g, Budget{"R", 1, false}, q);
    CHECK(r.kind == BoundKind::MtpGreedy);
    CHECK(r.value.p == Approx(0.5));
    REQUIRE(r.interval);
    const double e = std::numbers::e;
    CHECK(r.interval->upper.p == Approx(e * 0.5 / (e - 1.0)).epsilon(1e-12));
    CHECK(r.interval->upper.p == Approx(0.7909).epsilon(1e-4));
    CHECK(r.witness->added == std::vector<AtomId>{g.pdb.atom_id("R", {"a"})});
    /* true optimum */
    CHECK(mtp_upper_bruteforce(g, Budget{"R", 1, false}, q).value.p == Approx(0.5));
}

TEST_CASE("the upper bound may exceed one and is then clamped")
{
    const OpenPDB g(test::scientists(), 0.3);
    const UCQ q1 = parse_ucq("S(x), CoA(x,y)", g.pdb.schema());
    const GreedyTrace t = greedy_trace(g, Budget{"CoA", 5, false}, q1);
    CHECK(t.upper > 1.0);
    CHECK(t.upper_clamped.p == 1.0);
    CHECK(t.lower == t.p_greedy.p);
}

TEST_CASE("strategies agree and gains do not increase")
{
    const OpenPDB g(test::scientists(), 0.3);
    const UCQ q = parse_ucq("S(x), CoA(x,y)", g.pdb.schema());
    const Budget budget{"CoA", 4, false};
    const GreedyTrace lazy = greedy_trace(g, budget, q);
    for (GreedyStrategy s : {GreedyStrategy::ParallelScan, GreedyStrategy::SerialScan}) {
        GreedyOptions o;
        o.strategy = s;
        const GreedyTrace other = greedy_trace(g, budget, q, o);
        REQUIRE(other.picks.size() == lazy.picks.size());
        for (std::size_t i = 0; i != lazy.picks.size(); ++i) CHECK(other.picks[i].atom == lazy.picks[i].atom);
        CHECK(other.p_greedy.p == lazy.p_greedy.p);
    }
    for (std::size_t i = 1; i < lazy.picks.size(); ++i) CHECK(lazy.picks[i].gain <= lazy.picks[i - 1].gain + 1e-12);
    CHECK(lazy.gain_evaluations > 0);
}

TEST_CASE("greedy stays within its interval of the optimum")
{
    const OpenPDB g(test::scientists(), 0.3);
    const UCQ q1 = parse_ucq("S(x), CoA(x,y)", g.pdb.schema());
    for (std::size_t b = 0; b <= 3; ++b) {
        const GreedyTrace t = greedy_trace(g, Budget{"CoA", b, false}, q1);
        const double opt = test::best_completion(g, "CoA", b, q1);
        CHECK(t.p_greedy.p <= opt + 1e-12);
        CHECK(opt <= t.upper + 1e-12);
        CHECK(t.p_greedy.p - t.p_closed.p >= (1.0 - 1.0 / std::numbers::e) * (opt - t.p_closed.p) - 1e-12);
    }
}

TEST_CASE("self-joins need an explicit opt-in")
{
    const OpenPDB g(test::scientists(), 0.3);
    const UCQ q = parse_ucq("CoA(x,y), S(x) | CoA(Erdos,Shakespeare)", g.pdb.schema());
    CHECK_THROWS_AS(greedy_trace(g, Budget{"CoA", 1, false}, q), InvalidArgument);
    GreedyOptions o;
    o.allow_self_joins = true;
    const GreedyTrace t = greedy_trace(g, Budget{"CoA", 1, false}, q, o);
    CHECK_FALSE(t.guarantee);
}

TEST_CASE("unsafe queries are rejected")
{
    const OpenPDB g(test::scientists(), 0.3);
    const UCQ h0 = parse_ucq("S(x), CoA(x,y), S(y)", g.pdb.schema());
    GreedyOptions o;
    o.allow_self_joins = true;
    CHECK_THROWS_AS(greedy_trace(g, Budget{"CoA", 1, false}, h0, o), UnsafeQuery);
}
