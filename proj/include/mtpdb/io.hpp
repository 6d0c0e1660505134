#pragma once

/*======================================================================================================================
 * Input files.
 *
 * A database directory holds `schema.txt` (lines `PRED/arity`), `domain.txt` (one constant per line), one `PRED.csv`
 * per predicate with rows `c1,...,ck,p` (a missing file means an empty relation), and optionally `constraints.txt`
 * (`lambda=<float>` once, `mtp <PRED> <mean>` any number of times).  Blank lines and lines starting with `#` are
 * ignored everywhere.  CSV fields may be double-quoted, with `""` for a literal quote.
 *====================================================================================================================*/

#include "mtpdb/database.hpp"
#include "mtpdb/open_world.hpp"
#include "mtpdb/oracle.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mtpdb {

struct ConstraintFile
{
    std::optional<double> lambda;
    std::vector<MTPConstraint> mtp;
};

Schema load_schema(const std::filesystem::path &dir);
Database load_database(const std::filesystem::path &dir);
/// Empty result when the directory has no `constraints.txt`.
ConstraintFile load_constraints(const std::filesystem::path &dir);

ConstraintFile parse_constraints(const std::string &text);
/// Lines `X a b c`, `Y ...`, `Z ...`, `E x,y,z` (one per edge), `k <int>`.
ThreeDMInstance parse_3dm(const std::string &text);
ThreeDMInstance load_3dm(const std::filesystem::path &file);

std::string read_file(const std::filesystem::path &file);

}
