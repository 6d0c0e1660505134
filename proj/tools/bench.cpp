/* Serial reference kernels against their OpenMP counterparts on fixed workloads. */

#include "mtpdb/engine.hpp"
#include "mtpdb/greedy.hpp"
#include "mtpdb/oracle.hpp"
#include "mtpdb/suites.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>


using namespace mtpdb;


namespace {

double seconds(const std::function<double()> &f, double &result)
{
    const auto start = std::chrono::steady_clock::now();
    result = f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void compare(const char *name, const std::function<double(bool)> &kernel)
{
    double serial = 0.0, parallel = 0.0;
    const double ts = seconds([&] { return kernel(false); }, serial);
    const double tp = seconds([&] { return kernel(true); }, parallel);
    std::printf("%-22s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   results %s\n", name, ts, tp, ts / tp,
                serial == parallel ? "identical" : "DIFFER");
}

Database chain_db(int n)
{
    std::vector<std::string> domain;
    for (int i = 0; i < n; ++i) domain.push_back("c" + std::to_string(i));
    Database db(Schema({{"S", 1}, {"R", 2}}, domain));
    for (int i = 0; i < n; ++i) {
        db.set(db.atom_id("S", {domain[i]}), 0.1 + 0.8 * ((i * 7) % 10) / 10.0);
        db.set(db.atom_id("R", {domain[i], domain[(i + 1) % n]}), 0.5);
    }
    return db;
}

}


int main()
{
    std::printf("threads: %d\n", omp_get_max_threads());

    const Database db = chain_db(11);
    const UCQ h0 = parse_ucq("S(x), R(x,y), S(y)", db.schema());
    compare("world enumeration", [&](bool parallel) {
        GroundOptions o;
        o.parallel = parallel;
        return prob_ground(h0, db, o);
    });

    std::vector<std::string> domain;
    for (int i = 0; i < 6; ++i) domain.push_back("c" + std::to_string(i));
    Database base(Schema({{"S", 1}, {"R", 2}}, domain));
    for (int i = 0; i < 6; ++i) base.set(base.atom_id("S", {domain[i]}), 0.2 + 0.1 * i);
    const OpenPDB g(base, 0.4);
    const UCQ q = parse_ucq("S(x), R(x,y)", base.schema());
    compare("brute force", [&](bool parallel) {
        BruteforceOptions o;
        o.parallel = parallel;
        o.max_subsets = 1'000'000;
        return mtp_upper_bruteforce(g, Budget{"R", 4, false}, q, o).value.p;
    });

    compare("greedy scan", [&](bool parallel) {
        GreedyOptions o;
        o.strategy = parallel ? GreedyStrategy::ParallelScan : GreedyStrategy::SerialScan;
        return greedy_trace(g, Budget{"R", 12, false}, q, o).p_greedy.p;
    });

    compare("property suites", [&](bool parallel) {
        const auto reports = property_suites({.seed = 1, .trials = 100, .parallel = parallel});
        double passed = 0;
        for (auto &r : reports) passed += static_cast<double>(r.passed);
        return passed;
    });
}
