#pragma once

/*======================================================================================================================
 * Synthetic residence/occupation database contrasting closed-world, open-world, and mean-constrained upper bounds.
 *
 * Persons P0..P(n-1) each have a known probability in at most one of the unary relations LiLA (lives in Los Angeles),
 * S (scientist), and LiSpr (lives in Springfield), so every query joining two of them is false in the closed world.
 *====================================================================================================================*/

#include "mtpdb/open_world.hpp"

#include <string>
#include <vector>

namespace mtpdb {

struct ResidenceConfig
{
    std::size_t persons = 500;
    double lambda = 0.8;
    /// Probability of every listed tuple.
    double tuple_prob = 0.9;
    /// Persons [first, first + count) listed in each relation; ranges are disjoint.
    std::size_t lila_first = 0, lila_count = 200;
    std::size_t s_first = 200, s_count = 20;
    std::size_t lispr_first = 220, lispr_count = 10;
    /// Mean tuple probability bounds per relation.
    double lila_mean = 0.5, s_mean = 0.05, lispr_mean = 0.005;
    /// The relation whose bound is enforced; the others stay closed during the constrained run.
    std::string constrained = "S";
};

struct ResidenceRow
{
    std::string query;
    Prob closed;
    Prob open;
    Prob constrained;
    Budget budget;
};

OpenPDB residence_database(const ResidenceConfig &config = {});

/// The constraint on `config.constrained` with its configured mean.
MTPConstraint residence_constraint(const ResidenceConfig &config = {});

/// Rows for `LiLA(x), S(x)` and `LiSpr(x), S(x)`.
std::vector<ResidenceRow> run_residence_table(const ResidenceConfig &config = {});

/// Fixed-format table with log10 complements.
std::string format_residence_table(const std::vector<ResidenceRow> &rows);

}
