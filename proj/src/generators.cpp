#include "mtpdb/generators.hpp"

#include "mtpdb/errors.hpp"

#include <algorithm>
#include <set>


using namespace mtpdb;


Rng Rng::for_trial(std::uint64_t seed, std::uint64_t suite, std::uint64_t trial)
{
    /* splitmix64 over the three inputs */
    auto mix = [](std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    };
    return Rng(mix(mix(mix(seed) ^ suite) ^ trial));
}

int Rng::uniform(int lo, int hi)
{
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next() % span);
}

double Rng::real()
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}


Schema mtpdb::random_schema(Rng &rng, const SchemaShape &shape)
{
    static const char *const names[] = {"R", "S", "T", "U"};
    const int n = rng.uniform(shape.min_predicates, std::min(shape.max_predicates, 4));
    std::vector<std::pair<std::string, int>> predicates;
    for (int i = 0; i < n; ++i) predicates.emplace_back(names[i], rng.uniform(1, shape.max_arity));
    std::vector<std::string> domain;
    const int d = rng.uniform(shape.min_domain, shape.max_domain);
    for (int i = 0; i < d; ++i) domain.push_back("C" + std::to_string(i));
    return Schema(std::move(predicates), std::move(domain));
}

UCQ mtpdb::random_ucq(Rng &rng, const Schema &schema, const QueryShape &shape)
{
    static const char *const variables[] = {"x", "y", "z", "u", "v"};
    for (;;) {
        std::vector<int> unused;
        for (int p = 0; p < static_cast<int>(schema.num_predicates()); ++p) unused.push_back(p);
        rng.shuffle(unused);

        UCQ q;
        const int disjuncts = rng.uniform(1, shape.max_disjuncts);
        for (int d = 0; d < disjuncts; ++d) {
            ConjunctiveQuery cq;
            const int atoms = rng.uniform(1, shape.max_atoms);
            const int vars = rng.uniform(1, std::min(shape.max_variables, 5));
            for (int a = 0; a < atoms; ++a) {
                int pred;
                if (shape.self_join_free) {
                    if (unused.empty()) break;
                    pred = unused.back();
                    unused.pop_back();
                } else {
                    pred = rng.uniform(0, static_cast<int>(schema.num_predicates()) - 1);
                }
                Atom atom{schema.predicate_name(pred), {}};
                for (int i = 0; i < schema.arity(pred); ++i) {
                    if (rng.chance(shape.constant_chance)) atom.args.push_back(Term::constant(rng.pick(schema.domain())));
                    else atom.args.push_back(Term::variable(variables[rng.uniform(0, vars - 1)]));
                }
                cq.atoms.push_back(std::move(atom));
            }
            if (not cq.atoms.empty()) q.disjuncts.push_back(std::move(cq));
        }
        if (q.disjuncts.empty()) continue;
        if (not shape.must_mention.empty()) {
            bool found = false;
            for (auto &cq : q.disjuncts)
                for (auto &a : cq.atoms) found = found or a.predicate == shape.must_mention;
            if (not found) continue;
        }
        q.canonicalize();
        return q;
    }
}

double mtpdb::random_probability(Rng &rng)
{
    return rng.uniform(0, 10) / 10.0;
}

Database mtpdb::random_database(Rng &rng, const Schema &schema, std::size_t max_uncertain, double absent_chance)
{
    Database db(schema);
    std::size_t uncertain = 0;
    for (int pred = 0; pred < static_cast<int>(schema.num_predicates()); ++pred) {
        const std::uint64_t n = schema.herbrand_size(pred);
        for (std::uint64_t i = 0; i != n; ++i) {
            if (rng.chance(absent_chance)) continue;
            double p = random_probability(rng);
            if (p > 0.0 and p < 1.0) {
                if (uncertain == max_uncertain) p = rng.chance(0.5) ? 1.0 : 0.0;
                else ++uncertain;
            }
            db.set({pred, i}, p);
        }
    }
    return db;
}

double mtpdb::random_lambda(Rng &rng)
{
    static const std::vector<double> lambdas = {0.2, 0.5, 0.8};
    return rng.pick(lambdas);
}

OpenPDB mtpdb::random_open_pdb(Rng &rng, const Schema &schema, const std::string &relation, std::size_t max_open,
                               std::size_t max_uncertain)
{
    const int r = schema.require_predicate(relation);
    Database db(schema);
    std::size_t uncertain = 0;
    std::vector<std::uint64_t> absent;
    for (int pred = 0; pred < static_cast<int>(schema.num_predicates()); ++pred) {
        const std::uint64_t n = schema.herbrand_size(pred);
        for (std::uint64_t i = 0; i != n; ++i) {
            if (pred == r and rng.chance(0.6)) {
                absent.push_back(i);
                continue;
            }
            double p = rng.chance(0.4) ? 0.0 : random_probability(rng);
            if (p > 0.0 and p < 1.0) {
                if (uncertain == max_uncertain) p = 0.0;
                else ++uncertain;
            }
            db.set({pred, i}, p);
        }
    }
    /* Pin a random selection of the surplus absent atoms to 0. */
    rng.shuffle(absent);
    for (std::size_t i = max_open; i < absent.size(); ++i) db.set({r, absent[i]}, 0.0);
    return OpenPDB(std::move(db), random_lambda(rng));
}

MTPConstraint mtpdb::constraint_for_budget(const OpenPDB &g, const std::string &relation, std::size_t b, double frac)
{
    const Schema &schema = g.pdb.schema();
    const int r = schema.require_predicate(relation);
    double mass = 0.0;
    for (auto &[index, p] : g.pdb.relation(r)) mass += p;
    const double n = static_cast<double>(schema.herbrand_size(r));
    const double mean = (mass + (static_cast<double>(b) + frac) * g.lambda) / n;
    return {relation, std::clamp(mean, 1e-6, 1.0)};
}

ThreeDMInstance mtpdb::random_3dm(Rng &rng, int side, int min_edges, int max_edges)
{
    ThreeDMInstance inst;
    for (int i = 0; i < side; ++i) {
        inst.x_nodes.push_back("X" + std::to_string(i));
        inst.y_nodes.push_back("Y" + std::to_string(i));
        inst.z_nodes.push_back("Z" + std::to_string(i));
    }
    std::set<std::array<int, 3>> edges;
    const int m = rng.uniform(min_edges, std::min(max_edges, side * side * side));
    while (static_cast<int>(edges.size()) < m)
        edges.insert({rng.uniform(0, side - 1), rng.uniform(0, side - 1), rng.uniform(0, side - 1)});
    inst.edges.assign(edges.begin(), edges.end());
    inst.k = static_cast<std::size_t>(rng.uniform(1, std::min(side, m)));
    return inst;
}
