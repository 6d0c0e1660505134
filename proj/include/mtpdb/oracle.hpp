#pragma once

#include "mtpdb/engine.hpp"
#include "mtpdb/open_world.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mtpdb {

/*======================================================================================================================
 * Brute-force MTP optimizer
 *====================================================================================================================*/

struct BruteforceOptions
{
    std::uint64_t max_subsets = 200'000;
    bool parallel = true;
    /// Also return every maximizing completion, not only the first.
    bool collect_maximizers = false;
    GroundOptions ground;
    EngineOptions engine;
};

struct BruteforceReport
{
    BoundResult bound;
    std::vector<std::vector<AtomId>> maximizers;
    std::uint64_t subsets = 0;
    /// The query is unsafe and completions were evaluated by world enumeration.
    bool used_ground = false;
};

/// sum_{j <= k} C(n, j), saturating at UINT64_MAX.
std::uint64_t count_subsets(std::size_t n, std::size_t k);

/// Evaluates every completion of at most `budget.max_added` open tuples, in order of size and then lexicographic
/// canonical order, and returns the first maximizer.  Only open tuples the query reads are enumerated.  Throws
/// `ResourceLimit` above `max_subsets`.
BruteforceReport mtp_bruteforce(const OpenPDB &g, const Budget &budget, const UCQ &q,
                                const BruteforceOptions &options = {});
BoundResult mtp_upper_bruteforce(const OpenPDB &g, const Budget &budget, const UCQ &q,
                                 const BruteforceOptions &options = {});
BoundResult mtp_upper_bruteforce(const OpenPDB &g, const MTPConstraint &c, const UCQ &q,
                                 MtpDenominator denominator = MtpDenominator::Herbrand,
                                 const BruteforceOptions &options = {});


/*======================================================================================================================
 * 3-dimensional matching and the query M0
 *====================================================================================================================*/

struct ThreeDMInstance
{
    std::vector<std::string> x_nodes, y_nodes, z_nodes;
    /// Hyperedges as indices into x_nodes, y_nodes, z_nodes.
    std::vector<std::array<int, 3>> edges;
    std::size_t k = 0;

    /// Throws `InvalidArgument` on empty or overlapping node sets, out-of-range or repeated edges, or k > |edges|.
    void validate() const;
};

/// M0 = R(x,y,z),U(x) | R(x,y,z),V(y) | R(x,y,z),W(z) | U(x),V(y) | U(x),W(z) | V(y),W(z).
extern const char *const kM0Query;

struct M0Instance
{
    OpenPDB g;
    MTPConstraint constraint;
    UCQ query;
};

/// U, V, W hold `w` on their node sets and explicit 0 elsewhere; R is open exactly on the hyperedges and explicitly 0
/// elsewhere; lambda = w; the MTP bound lies halfway between the means after k and k + 1 additions, so the budget is k.
M0Instance build_m0_instance(const ThreeDMInstance &inst, double w = 0.8);

/// Largest set of pairwise disjoint hyperedges, by exhaustive search.
std::size_t maximum_matching_size(const ThreeDMInstance &inst);

/// True if the edges are pairwise disjoint in every coordinate.
bool is_matching(const std::vector<std::array<int, 3>> &edges);

struct MaxMatchReport
{
    std::size_t max_matching = 0;
    std::size_t budget = 0;
    bool matching_exists = false;
    /// M0 with k pairwise disjoint triples added.
    double p_max = 0.0;
    double optimum = 0.0;
    std::size_t maximizers = 0;
    bool maximizers_are_matchings = false;
    /// Completions that differ in one triple: a fresh x value against a reused one.
    double fresh_x_value = 0.0;
    double reused_x_value = 0.0;
    bool passed = false;
    std::string detail;
};

/// Checks that the optimal completions of the M0 instance are exactly the size-k matchings when one exists, that the
/// optimum drops strictly below P_max otherwise, and that a completion with a fresh x value beats the one reusing an x
/// value.  Requires k <= min(|X|, |Y|, |Z|) and at least two nodes per side.
MaxMatchReport verify_maxmatch(const ThreeDMInstance &inst, double w = 0.8, const BruteforceOptions &options = {});

}
