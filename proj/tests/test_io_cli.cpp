#include "mtpdb/cli.hpp"
#include "mtpdb/errors.hpp"
#include "mtpdb/io.hpp"
#include "mtpdb/oracle.hpp"

#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>


using namespace mtpdb;
namespace fs = std::filesystem;
using Json = nlohmann::json;


namespace {

const fs::path kScientists = fs::path(MTPDB_DATA_DIR) / "scientists";

/// Scratch database directory removed on destruction.
struct TempDir
{
    fs::path path;

    explicit TempDir(const std::string &name) : path(fs::temp_directory_path() / ("mtpdb-test-" + name))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    void write(const std::string &file, const std::string &text) const { std::ofstream(path / file) << text; }
};

struct Outcome
{
    int code;
    std::string out, err;
};

Outcome run_cli(RunConfig config)
{
    std::ostringstream out, err;
    const int code = run(config, out, err);
    return {code, out.str(), err.str()};
}

RunConfig scientists_config(Mode mode, const std::string &query = "S(x), CoA(x,y)")
{
    RunConfig c;
    c.mode = mode;
    c.db_dir = kScientists.string();
    c.query = query;
    c.output = OutputFormat::Json;
    c.timings = false;
    return c;
}

}


TEST_CASE("loading the sample database")
{
    const Database db = load_database(kScientists);
    const Database expected = test::scientists();
    CHECK(db.schema().domain() == expected.schema().domain());
    CHECK(db.size() == 7);
    for (int pred = 0; pred < 2; ++pred)
        for (auto &[index, p] : expected.relation(pred)) CHECK(db.prob({pred, index}) == p);

    const ConstraintFile c = load_constraints(kScientists);
    CHECK(c.lambda == 0.3);
    REQUIRE(c.mtp.size() == 1);
    CHECK(c.mtp[0].relation == "CoA");
    CHECK(c.mtp[0].mean_bound == 0.25);
}

TEST_CASE("csv quoting and comments")
{
    TempDir dir("quoting");
    dir.write("schema.txt", "# predicates\nR/2\n");
    dir.write("domain.txt", "a\nb, c\n");
    dir.write("R.csv", "# header comment\n\"b, c\",a,0.25\n\n a , a , 1\n");
    const Database db = load_database(dir.path);
    CHECK(db.prob(db.atom_id("R", {"b, c", "a"})) == 0.25);
    CHECK(db.prob(db.atom_id("R", {"a", "a"})) == 1.0);
}

TEST_CASE("malformed database files")
{
    TempDir dir("malformed");
    dir.write("schema.txt", "R/1\n");
    dir.write("domain.txt", "a\nb\n");
    dir.write("R.csv", "a,0.5\na,0.6\n");
    CHECK_THROWS_AS(load_database(dir.path), InvalidArgument);
    dir.write("R.csv", "c,0.5\n");
    CHECK_THROWS_AS(load_database(dir.path), InvalidArgument);
    dir.write("R.csv", "a,1.5\n");
    CHECK_THROWS_AS(load_database(dir.path), InvalidArgument);
    dir.write("R.csv", "a,b,0.5\n");
    CHECK_THROWS_AS(load_database(dir.path), InvalidArgument);
    dir.write("R.csv", "a,x\n");
    CHECK_THROWS_AS(load_database(dir.path), InvalidArgument);
    dir.write("schema.txt", "R\n");
    CHECK_THROWS_AS(load_database(dir.path), InvalidArgument);
    CHECK_THROWS_AS(load_database(dir.path / "missing"), InvalidArgument);
}

TEST_CASE("constraint files")
{
    const ConstraintFile c = parse_constraints("lambda = 0.5\n# note\nmtp R 0.1\nmtp R 0.2\n");
    CHECK(c.lambda == 0.5);
    CHECK(c.mtp.size() == 2);
    CHECK_THROWS_AS(parse_constraints("lambda=0.5\nlambda=0.4\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_constraints("lambda=2\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_constraints("mtp R\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_constraints("mtp R 0\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_constraints("budget 3\n"), InvalidArgument);
}

TEST_CASE("eval on the sample database")
{
    const Outcome o = run_cli(scientists_config(Mode::Eval));
    REQUIRE(o.code == kExitOk);
    const Json j = Json::parse(o.out);
    CHECK(j["mode"] == "eval");
    CHECK(j["query"] == "CoA(x,y), S(x)");
    CHECK(std::abs(j["result"]["value"].get<double>() - 0.94456) <= 1e-9);
    CHECK_FALSE(j.contains("timings_ms"));
}

TEST_CASE("json output is reproducible")
{
    for (Mode m : {Mode::Analyze, Mode::Eval, Mode::Interval, Mode::Exact, Mode::Greedy, Mode::Oracle}) {
        CAPTURE(to_string(m));
        const Outcome a = run_cli(scientists_config(m)), b = run_cli(scientists_config(m));
        CHECK(a.code == kExitOk);
        CHECK(a.out == b.out);
    }
    RunConfig verify;
    verify.mode = Mode::Verify;
    verify.trials = 3;
    verify.output = OutputFormat::Json;
    verify.timings = false;
    CHECK(run_cli(verify).out == run_cli(verify).out);
}

TEST_CASE("zero budget override reproduces eval")
{
    RunConfig exact = scientists_config(Mode::Exact);
    exact.mtp_relation = "CoA";
    exact.budget_override = 0;
    const Json e = Json::parse(run_cli(exact).out);
    const Json v = Json::parse(run_cli(scientists_config(Mode::Eval)).out);
    CHECK(e["result"]["value"] == v["result"]["value"]);
    CHECK(e["budget"]["used"] == 0);
    CHECK(e["budget"]["derived"].is_null());
    CHECK(e["result"]["witness"].empty());
}

TEST_CASE("the derived budget is always reported")
{
    RunConfig exact = scientists_config(Mode::Exact);
    exact.budget_override = 2;
    const Json j = Json::parse(run_cli(exact).out);
    CHECK(j["budget"]["derived"] == 5);
    CHECK(j["budget"]["used"] == 2);
    CHECK(j["mtp"]["relation"] == "CoA");
}

TEST_CASE("oracle lies in the greedy interval and matches exact")
{
    const Json greedy = Json::parse(run_cli(scientists_config(Mode::Greedy)).out);
    const Json oracle = Json::parse(run_cli(scientists_config(Mode::Oracle)).out);
    const Json exact = Json::parse(run_cli(scientists_config(Mode::Exact)).out);
    const double opt = oracle["result"]["value"];
    CHECK(greedy["result"]["lower"].get<double>() <= opt + 1e-12);
    CHECK(opt <= greedy["result"]["upper"].get<double>() + 1e-12);
    CHECK(std::abs(exact["result"]["value"].get<double>() - opt) <= 1e-9);
}

TEST_CASE("fallbacks and exit codes")
{
    const std::string h0 = "S(x), CoA(x,y), S(y)";
    const Outcome eval = run_cli(scientists_config(Mode::Eval, h0));
    CHECK(eval.code == kExitOk);
    CHECK(eval.err.find("notice") != std::string::npos);

    CHECK(run_cli(scientists_config(Mode::Exact, h0)).code == kExitUnsafe);
    CHECK(run_cli(scientists_config(Mode::Eval, "S(x")).code == kExitInput);
    CHECK(run_cli(scientists_config(Mode::Eval, "S(Bohr)")).code == kExitInput);

    RunConfig capped = scientists_config(Mode::Oracle);
    capped.cap_subsets = 5;
    CHECK(run_cli(capped).code == kExitResource);

    RunConfig worlds = scientists_config(Mode::Eval, h0);
    worlds.cap_worlds = 4;
    CHECK(run_cli(worlds).code == kExitResource);

    RunConfig no_mean = scientists_config(Mode::Exact);
    no_mean.mtp_relation = "CoA";
    CHECK(run_cli(no_mean).code == kExitInput);

    RunConfig self_join = scientists_config(Mode::Greedy, "CoA(x,y), S(x) | CoA(Erdos,Shakespeare)");
    CHECK(run_cli(self_join).code == kExitInput);
    self_join.force = true;
    const Outcome forced = run_cli(self_join);
    CHECK(forced.code == kExitOk);
    CHECK(Json::parse(forced.out)["result"]["guarantee"] == false);
}

TEST_CASE("inversions route exact to greedy")
{
    TempDir dir("inversion");
    dir.write("schema.txt", "R/3\nU/1\nV/1\nW/1\n");
    dir.write("domain.txt", "x1\ny1\nz1\n");
    dir.write("U.csv", "x1,0.8\n");
    dir.write("V.csv", "y1,0.8\n");
    dir.write("W.csv", "z1,0.8\n");
    dir.write("constraints.txt", "lambda=0.8\nmtp R 0.05\n");
    RunConfig c;
    c.mode = Mode::Exact;
    c.db_dir = dir.path.string();
    c.query = kM0Query;
    c.output = OutputFormat::Json;
    c.timings = false;
    c.force = true;
    const Outcome o = run_cli(c);
    CHECK(o.code == kExitOk);
    const Json j = Json::parse(o.out);
    CHECK(j["budget"]["used"] == 1);
    CHECK(j["result"]["kind"] == "mtp_greedy");
    CHECK(j["notices"].size() == 1);
}

TEST_CASE("3DM demonstration")
{
    RunConfig c;
    c.mode = Mode::Demo3dm;
    c.instance_file = (fs::path(MTPDB_DATA_DIR) / "3dm" / "no_matching.txt").string();
    c.output = OutputFormat::Json;
    c.timings = false;
    const Outcome o = run_cli(c);
    CHECK(o.code == kExitOk);
    const Json j = Json::parse(o.out);
    CHECK(j["report"]["matching_exists"] == false);
    CHECK(j["report"]["passed"] == true);
}

TEST_CASE("text output")
{
    RunConfig c = scientists_config(Mode::Eval);
    c.output = OutputFormat::Text;
    const Outcome o = run_cli(c);
    CHECK(o.out == "mode: eval\nquery: CoA(x,y), S(x)\nlambda: 0.3\nkind: closed\nvalue: 0.94456\n");
}

TEST_CASE("mode names")
{
    for (const char *name : {"analyze", "eval", "interval", "exact", "greedy", "oracle", "demo3dm", "verify"})
        CHECK(to_string(*parse_mode(name)) == std::string(name));
    CHECK_FALSE(parse_mode("solve"));
}
