#include "mtpdb/errors.hpp"
#include "mtpdb/normal_form.hpp"
#include "mtpdb/oracle.hpp"
#include "mtpdb/query.hpp"

#include <doctest.h>


using namespace mtpdb;


TEST_CASE("parse atoms, constants, and disjuncts")
{
    const UCQ q = parse_ucq("S(x), CoA(x, y) | S(Einstein)");
    REQUIRE(q.disjuncts.size() == 2);
    CHECK(to_string(q) == "CoA(x,y), S(x) | S(Einstein)");

    const UCQ quoted = parse_ucq(R"(R("van der Waals", x))");
    CHECK(quoted.disjuncts[0].atoms[0].args[0] == Term::constant("van der Waals"));
    CHECK(to_string(quoted) == R"(R("van der Waals",x))");
    CHECK(parse_ucq(to_string(quoted)) == quoted);
}

TEST_CASE("parse errors carry offsets")
{
    CHECK_THROWS_AS(parse_ucq("S(x"), ParseError);
    CHECK_THROWS_AS(parse_ucq(""), ParseError);
    CHECK_THROWS_AS(parse_ucq("S(x) |"), ParseError);
    CHECK_THROWS_AS(parse_ucq("S()"), ParseError);
    CHECK_THROWS_AS(parse_ucq(R"(S(""))"), ParseError);
    try {
        parse_ucq("S(x), 3");
        FAIL("expected a parse error");
    } catch (const ParseError &e) {
        CHECK(e.position() == 6);
    }
}

TEST_CASE("validation against a schema")
{
    const Schema schema({{"S", 1}, {"CoA", 2}}, {"Einstein", "Erdos"});
    CHECK_NOTHROW(parse_ucq("S(x), CoA(x,Erdos)", schema));
    CHECK_THROWS_AS(parse_ucq("T(x)", schema), SchemaError);
    CHECK_THROWS_AS(parse_ucq("S(x,y)", schema), SchemaError);
    CHECK_THROWS_AS(parse_ucq("S(Bohr)", schema), SchemaError);
}

TEST_CASE("canonical form removes duplicates")
{
    CHECK(parse_ucq("S(x), S(x) | S(x)") == parse_ucq("S(x)"));
    CHECK(parse_ucq("T(y) | S(x)") == parse_ucq("S(x) | T(y)"));
}

TEST_CASE("hierarchy and inversions")
{
    CHECK(is_hierarchical(parse_ucq("S(x), CoA(x,y)").disjuncts[0]));
    CHECK_FALSE(is_hierarchical(parse_ucq("S(x), CoA(x,y), T(y)").disjuncts[0]));

    CHECK(is_inversion_free(parse_ucq("S(x), CoA(x,y)")));
    CHECK(is_inversion_free(parse_ucq("R(x,y), S(x) | T(u), R(u,v)")));
    // Hierarchical disjuncts whose separators are inverted relative to each other.
    const UCQ inverted = parse_ucq("R(x), S(x,y) | S(u,v), T(v)");
    CHECK_FALSE(is_inversion_free(inverted));
    CHECK_FALSE(is_safe(inverted));

    CHECK_FALSE(is_safe(parse_ucq("S(x), CoA(x,y), S(y)")));
    CHECK_FALSE(is_safe(parse_ucq("R(x), S(x,y), T(y)")));
}

TEST_CASE("the 3DM query is safe but has an inversion")
{
    const UCQ m0 = parse_ucq(kM0Query);
    const QueryProfile profile = analyze(m0);
    CHECK(profile.safe);
    CHECK_FALSE(profile.inversion_free);
    CHECK(profile.self_join_free == false);
}

TEST_CASE("grounding")
{
    const Schema schema({{"S", 1}, {"CoA", 2}}, {"A", "B", "C"});
    const UCQ q = parse_ucq("S(x), CoA(x,y) | S(A)", schema);
    CHECK(ground_size(q, 3) == 10);
    const GroundDNF g = ground(q, schema);
    CHECK(g.size() == 10);
    CHECK(ground(parse_ucq("S(A)", schema), schema).size() == 1);
    CHECK_THROWS_AS(ground(q, schema, 5), ResourceLimit);
}

TEST_CASE("minimization drops subsumed disjuncts")
{
    const Schema schema({{"S", 1}, {"CoA", 2}}, {"A", "B"});
    // S(x), CoA(x,y) implies S(z); the union is S(z).
    const nf::DNF q = nf::compile(parse_ucq("S(x), CoA(x,y) | S(z)", schema), schema);
    CHECK(q == nf::compile(parse_ucq("S(z)", schema), schema));
}
