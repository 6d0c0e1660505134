#include "mtpdb/engine.hpp"

#include "mtpdb/errors.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>


using namespace mtpdb;


namespace {

/// Worlds per chunk of the enumeration; chunk sums are added in index order.
constexpr int kChunkBits = 12;

}


double mtpdb::prob_ground(const UCQ &q, const ProbabilityView &view, const GroundOptions &options)
{
    const Schema &schema = view.schema();
    const GroundDNF lineage = ground(q, schema, options.max_conjuncts);

    /* Fold certain atoms in; keep conjuncts over uncertain atoms as bit masks. */
    std::unordered_map<AtomId, int, AtomIdHash> bit_of;
    std::vector<double> probs;
    std::vector<std::uint64_t> masks;
    for (auto &conjunct : lineage) {
        std::vector<std::pair<AtomId, double>> uncertain;
        bool possible = true;
        for (auto &g : conjunct) {
            const AtomId id = make_atom_id(schema, g.predicate, g.args);
            const double p = view(id);
            if (p == 0.0) {
                possible = false;
                break;
            }
            if (p != 1.0) uncertain.emplace_back(id, p);
        }
        if (not possible) continue;
        if (uncertain.empty()) return 1.0;
        std::vector<int> bits;
        for (auto &[id, p] : uncertain) {
            auto [it, inserted] = bit_of.try_emplace(id, static_cast<int>(probs.size()));
            if (inserted) probs.push_back(p);
            bits.push_back(it->second);
        }
        if (probs.size() > options.max_uncertain or probs.size() > 62)
            throw ResourceLimit("query lineage has more than " + std::to_string(options.max_uncertain) +
                                " uncertain tuples");
        std::uint64_t m = 0;
        for (int b : bits) m |= std::uint64_t(1) << b;
        masks.push_back(m);
    }
    if (masks.empty()) return 0.0;

    /* Keep only minimal masks. */
    std::sort(masks.begin(), masks.end(), [](auto a, auto b) {
        const int pa = std::popcount(a), pb = std::popcount(b);
        return pa != pb ? pa < pb : a < b;
    });
    masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
    std::vector<std::uint64_t> minimal;
    for (auto m : masks)
        if (std::none_of(minimal.begin(), minimal.end(), [&](auto k) { return (k & m) == k; })) minimal.push_back(m);

    /* World weight = low-half weight * high-half weight. */
    const int n = static_cast<int>(probs.size());
    const int lo_bits = n / 2, hi_bits = n - lo_bits;
    auto half_weights = [&](int offset, int bits) {
        std::vector<double> w(std::size_t(1) << bits);
        for (std::size_t s = 0; s != w.size(); ++s) {
            double x = 1.0;
            for (int b = 0; b < bits; ++b) x *= (s >> b & 1) ? probs[offset + b] : 1.0 - probs[offset + b];
            w[s] = x;
        }
        return w;
    };
    const auto w_lo = half_weights(0, lo_bits);
    const auto w_hi = half_weights(lo_bits, hi_bits);
    const std::uint64_t lo_mask = (std::uint64_t(1) << lo_bits) - 1;

    const std::uint64_t worlds = std::uint64_t(1) << n;
    const std::uint64_t chunk = std::min<std::uint64_t>(worlds, std::uint64_t(1) << kChunkBits);
    const std::int64_t chunks = static_cast<std::int64_t>(worlds / chunk);
    std::vector<double> sums(chunks, 0.0);

    auto run_chunk = [&](std::int64_t c) {
        double s = 0.0;
        const std::uint64_t begin = static_cast<std::uint64_t>(c) * chunk;
        for (std::uint64_t w = begin; w != begin + chunk; ++w) {
            for (auto m : minimal)
                if ((w & m) == m) {
                    s += w_lo[w & lo_mask] * w_hi[w >> lo_bits];
                    break;
                }
        }
        sums[c] = s;
    };

    if (options.parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        for (std::int64_t c = 0; c < chunks; ++c) run_chunk(c);
    }

    double total = 0.0;
    for (double s : sums) total += s;
    return std::clamp(total, 0.0, 1.0);
}

double mtpdb::prob_ground(const UCQ &q, const Database &db, const GroundOptions &options)
{
    return prob_ground(q, ProbabilityView(db), options);
}
