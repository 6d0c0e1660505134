/* One line per acceptance criterion; exit status 1 if any fails. */

#include "mtpdb/engine.hpp"
#include "mtpdb/io.hpp"
#include "mtpdb/oracle.hpp"
#include "mtpdb/suites.hpp"
#include "mtpdb/residence.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>


using namespace mtpdb;


namespace {

struct Verdict
{
    bool pass;
    std::string detail;
};

std::string fmt(const char *format, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

Verdict from_suite(const SuiteReport &r)
{
    std::string detail = fmt("%zu/%zu passed, %zu failed, %zu skipped, max error %.3g", r.passed, r.trials, r.failed,
                             r.skipped, r.max_error);
    if (not r.counterexamples.empty()) detail += "; first counterexample: " + r.counterexamples.front();
    return {r.ok(), detail};
}

}


int main(int argc, char **argv)
{
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
    const std::filesystem::path data = argc > 2 ? argv[2] : MTPDB_DATA_DIR;

    std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"lifted/ground equivalence on 500 safe UCQs in under 60 s",
         [&] {
             const auto start = std::chrono::steady_clock::now();
             const SuiteReport r = suite_lifted_vs_ground({.seed = seed, .trials = 500});
             const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
             Verdict v = from_suite(r);
             v.pass = v.pass and r.max_error <= 1e-9 and s < 60.0;
             v.detail += fmt(", %.2f s", s);
             return v;
         }},
        {"scientist database golden values",
         [&] {
             const Database db = load_database(data / "scientists");
             const double einstein = prob_lifted(parse_ucq("S(Einstein)", db.schema()), db);
             const UCQ q1 = parse_ucq("S(x), CoA(x,y)", db.schema());
             const double lifted = prob_lifted(q1, db), ground = prob_ground(q1, db);
             const bool pass = einstein == 0.8 and std::abs(lifted - 0.94456) <= 1e-9 and
                               std::abs(ground - 0.94456) <= 1e-9;
             return Verdict{pass, fmt("S(Einstein) = %.17g, Q1 lifted = %.17g, ground = %.17g", einstein, lifted,
                                      ground)};
         }},
        {"exact budgeted bound equals brute force on 500 inversion-free instances",
         [&] { return from_suite(suite_exact_vs_bruteforce({.seed = seed, .trials = 500})); }},
        {"submodularity on 1000 random quadruples",
         [&] { return from_suite(suite_submodularity({.seed = seed, .trials = 1000})); }},
        {"greedy interval and (1 - 1/e) guarantee on 300 instances",
         [&] { return from_suite(suite_greedy_guarantee({.seed = seed, .trials = 300})); }},
        {"3DM demonstration on 50 instances and the single-triple value",
         [&] {
             Verdict v = from_suite(suite_three_dm({.seed = seed, .trials = 50}));
             const M0Instance m0 = build_m0_instance({{"x"}, {"y"}, {"z"}, {{0, 0, 0}}, 1});
             const double single = mtp_upper_bruteforce(m0.g, m0.constraint, m0.query).value.p;
             v.pass = v.pass and std::abs(single - 0.9728) <= 1e-9;
             v.detail += fmt("; single triple %.17g", single);
             return v;
         }},
        {"residence table: CW = 0 < COW < OW, OW complement < 1e-100, gap >= 10 orders",
         [&] {
             const auto rows = run_residence_table();
             bool pass = not rows.empty();
             std::string detail;
             for (auto &r : rows) {
                 const double ow = r.open.log10_complement(), cow = r.constrained.log10_complement();
                 pass = pass and r.closed.p == 0.0 and r.constrained.p > 0.0 and
                        r.constrained.log_q > r.open.log_q and ow < -100.0 and cow - ow >= 10.0;
                 detail += fmt("%s%s: CW %g, OW 1-10^%.2f, COW 1-10^%.2f (B=%zu)", detail.empty() ? "" : "; ",
                               r.query.c_str(), r.closed.p + 0.0, ow, cow, r.budget.max_added);
             }
             return Verdict{pass, detail};
         }},
        {"vertex attainment on 100 instances with at most 6 open tuples",
         [&] { return from_suite(suite_vertex_attainment({.seed = seed, .trials = 100})); }},
    };

    int failed = 0;
    for (std::size_t i = 0; i != criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception &e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += not v.pass;
        std::printf("%s [%zu] %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), v.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
