#include "mtpdb/generators.hpp"
#include "mtpdb/suites.hpp"
#include "mtpdb/residence.hpp"

#include <doctest.h>


using namespace mtpdb;


TEST_CASE("trial streams are reproducible and distinct")
{
    Rng a = Rng::for_trial(7, 3, 11), b = Rng::for_trial(7, 3, 11), c = Rng::for_trial(7, 3, 12);
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
    Rng r(5);
    for (int i = 0; i < 1000; ++i) {
        const int v = r.uniform(-2, 3);
        CHECK((v >= -2 and v <= 3));
        const double u = r.real();
        CHECK((u >= 0.0 and u < 1.0));
    }
}

TEST_CASE("generated instances respect their shapes")
{
    for (std::uint64_t t = 0; t < 50; ++t) {
        Rng rng = Rng::for_trial(1, 99, t);
        const Schema schema = random_schema(rng);
        CHECK(schema.domain_size() >= 2);
        CHECK(schema.domain_size() <= 4);
        CHECK(schema.predicate_id("R"));
        const OpenPDB g = random_open_pdb(rng, schema, "R", 5);
        CHECK(open_tuples(g, "R").size() <= 5);
        for (int p = 0; p < static_cast<int>(schema.num_predicates()); ++p)
            if (schema.predicate_name(p) != "R") CHECK(open_tuples(g, schema.predicate_name(p)).empty());
        const std::size_t b = open_tuples(g, "R").size() / 2;
        CHECK(budget_from_mtp(g, constraint_for_budget(g, "R", b)).max_added == b);

        const UCQ q = random_ucq(rng, schema, {.self_join_free = true, .must_mention = "R"});
        CHECK_FALSE(has_self_join(q));
    }
}

TEST_CASE("suite reports are byte-identical across runs and schedules")
{
    SuiteOptions parallel{.seed = 42, .trials = 12, .parallel = true};
    SuiteOptions serial{.seed = 42, .trials = 12, .parallel = false};
    const std::string first = format_reports(property_suites(parallel));
    CHECK(first == format_reports(property_suites(parallel)));
    CHECK(first == format_reports(property_suites(serial)));
    CHECK(first.find("FAIL") == std::string::npos);
}

TEST_CASE("no trials, no report")
{
    CHECK(property_suites({.seed = 1, .trials = 0}).empty());
    CHECK(format_reports({}).empty());
}

TEST_CASE("different seeds draw different instances")
{
    const auto a = suite_three_dm({.seed = 1, .trials = 5});
    const auto b = suite_three_dm({.seed = 2, .trials = 5});
    CHECK(a.ok());
    CHECK(b.ok());
}

TEST_CASE("residence table: closed world, open world, and mean-bounded upper bounds")
{
    const auto rows = run_residence_table();
    REQUIRE(rows.size() == 2);
    for (auto &r : rows) {
        CAPTURE(r.query);
        CHECK(r.closed.p == 0.0);
        CHECK(r.budget.max_added == 8);
        CHECK(r.constrained.p > 0.0);
        CHECK(r.open.log10_complement() < -100.0);
        CHECK(r.constrained.log10_complement() - r.open.log10_complement() >= 10.0);
    }
    /* 8 scientists added next to Los Angeles residents at 0.9: 1 - (1 - 0.8 * 0.9)^8 */
    CHECK(rows[0].constrained.log10_complement() == doctest::Approx(8 * std::log10(0.28)).epsilon(1e-12));
}
