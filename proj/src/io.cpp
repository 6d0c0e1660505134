#include "mtpdb/io.hpp"

#include "mtpdb/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>


using namespace mtpdb;
namespace fs = std::filesystem;


namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

/// Non-blank, non-comment lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string_view>> content_lines(std::string_view text)
{
    std::vector<std::pair<std::size_t, std::string_view>> out;
    std::size_t number = 0;
    while (not text.empty()) {
        const auto end = text.find('\n');
        const std::string_view line = trim(text.substr(0, end));
        ++number;
        if (not line.empty() and line.front() != '#') out.emplace_back(number, line);
        if (end == std::string_view::npos) break;
        text.remove_prefix(end + 1);
    }
    return out;
}

[[noreturn]] void fail(const std::string &where, std::size_t line, const std::string &what)
{
    throw InvalidArgument(where + ":" + std::to_string(line) + ": " + what);
}

template<typename T>
std::optional<T> parse_number(std::string_view s)
{
    s = trim(s);
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() or ptr != s.data() + s.size() or s.empty()) return std::nullopt;
    return value;
}

std::vector<std::string> split_csv(std::string_view line, const std::string &where, std::size_t number)
{
    std::vector<std::string> fields;
    std::string field;
    std::size_t i = 0;
    for (;;) {
        field.clear();
        while (i < line.size() and (line[i] == ' ' or line[i] == '\t')) ++i;
        if (i < line.size() and line[i] == '"') {
            ++i;
            for (;;) {
                if (i == line.size()) fail(where, number, "unterminated quoted field");
                if (line[i] == '"') {
                    if (i + 1 < line.size() and line[i + 1] == '"') {
                        field += '"';
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                field += line[i++];
            }
            while (i < line.size() and (line[i] == ' ' or line[i] == '\t')) ++i;
            if (i < line.size() and line[i] != ',') fail(where, number, "text after quoted field");
        } else {
            const auto end = std::min(line.find(',', i), line.size());
            field = trim(line.substr(i, end - i));
            i = end;
        }
        fields.push_back(field);
        if (i >= line.size()) break;
        ++i; // comma
    }
    return fields;
}

}


std::string mtpdb::read_file(const fs::path &file)
{
    std::ifstream in(file, std::ios::binary);
    if (not in) throw InvalidArgument("cannot read " + file.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Schema mtpdb::load_schema(const fs::path &dir)
{
    const std::string where = (dir / "schema.txt").string();
    const std::string schema_text = read_file(dir / "schema.txt");
    std::vector<std::pair<std::string, int>> predicates;
    for (auto [number, line] : content_lines(schema_text)) {
        const auto slash = line.find('/');
        if (slash == std::string_view::npos) fail(where, number, "expected PRED/arity");
        const auto arity = parse_number<int>(line.substr(slash + 1));
        if (not arity or *arity < 1) fail(where, number, "bad arity");
        predicates.emplace_back(std::string(trim(line.substr(0, slash))), *arity);
    }

    const std::string domain_text = read_file(dir / "domain.txt");
    std::vector<std::string> domain;
    for (auto [number, line] : content_lines(domain_text)) domain.emplace_back(line);

    try {
        return Schema(std::move(predicates), std::move(domain));
    } catch (const Error &e) {
        throw InvalidArgument(dir.string() + ": " + e.what());
    }
}

Database mtpdb::load_database(const fs::path &dir)
{
    const Schema schema = load_schema(dir);
    Database db(schema);
    std::vector<std::uint64_t> args;
    for (int pred = 0; pred < static_cast<int>(schema.num_predicates()); ++pred) {
        const fs::path file = dir / (schema.predicate_name(pred) + ".csv");
        if (not fs::exists(file)) continue;
        const std::string where = file.string();
        const std::string text = read_file(file);
        for (auto [number, line] : content_lines(text)) {
            const auto fields = split_csv(line, where, number);
            const auto arity = static_cast<std::size_t>(schema.arity(pred));
            if (fields.size() != arity + 1)
                fail(where, number, "expected " + std::to_string(arity) + " constants and a probability");
            std::vector<int> constants;
            for (std::size_t i = 0; i != arity; ++i) {
                const auto id = schema.constant_id(fields[i]);
                if (not id) fail(where, number, "constant '" + fields[i] + "' is not in the domain");
                constants.push_back(*id);
            }
            const auto p = parse_number<double>(fields.back());
            if (not p or not(*p >= 0.0 and *p <= 1.0)) fail(where, number, "probability must be a number in [0, 1]");
            const AtomId atom = make_atom_id(schema, pred, constants);
            if (db.contains(atom)) fail(where, number, "duplicate tuple " + db.atom_name(atom));
            db.set(atom, *p);
        }
    }
    return db;
}

ConstraintFile mtpdb::parse_constraints(const std::string &text)
{
    ConstraintFile out;
    for (auto [number, line] : content_lines(text)) {
        if (line.starts_with("lambda")) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos or trim(line.substr(0, eq)) != "lambda")
                fail("constraints", number, "expected lambda=<float>");
            if (out.lambda) fail("constraints", number, "lambda given twice");
            const auto v = parse_number<double>(line.substr(eq + 1));
            if (not v or not(*v >= 0.0 and *v <= 1.0)) fail("constraints", number, "lambda must be in [0, 1]");
            out.lambda = *v;
        } else if (line.starts_with("mtp ")) {
            std::istringstream s{std::string(line.substr(4))};
            std::string relation, mean, rest;
            s >> relation >> mean;
            if (relation.empty() or mean.empty() or (s >> rest)) fail("constraints", number, "expected mtp <PRED> <mean>");
            const auto v = parse_number<double>(mean);
            if (not v or not(*v > 0.0 and *v <= 1.0)) fail("constraints", number, "mean bound must be in (0, 1]");
            out.mtp.push_back({relation, *v});
        } else {
            fail("constraints", number, "unrecognized line");
        }
    }
    return out;
}

ConstraintFile mtpdb::load_constraints(const fs::path &dir)
{
    const fs::path file = dir / "constraints.txt";
    if (not fs::exists(file)) return {};
    return parse_constraints(read_file(file));
}

ThreeDMInstance mtpdb::parse_3dm(const std::string &text)
{
    ThreeDMInstance inst;
    std::unordered_map<std::string, int> x, y, z;
    std::vector<std::pair<std::size_t, std::string>> edge_lines;
    bool have_k = false;
    for (auto [number, line] : content_lines(text)) {
        std::istringstream s{std::string(line)};
        std::string tag;
        s >> tag;
        auto nodes = [&](std::vector<std::string> &names, std::unordered_map<std::string, int> &ids) {
            std::string name;
            while (s >> name) {
                if (not ids.emplace(name, static_cast<int>(names.size())).second)
                    fail("3dm", number, "repeated node " + name);
                names.push_back(name);
            }
        };
        if (tag == "X") nodes(inst.x_nodes, x);
        else if (tag == "Y") nodes(inst.y_nodes, y);
        else if (tag == "Z") nodes(inst.z_nodes, z);
        else if (tag == "E") {
            std::string rest;
            std::getline(s, rest);
            edge_lines.emplace_back(number, rest);
        } else if (tag == "k") {
            std::string value, extra;
            s >> value;
            const auto k = parse_number<long long>(value);
            if (not k or *k < 0 or (s >> extra)) fail("3dm", number, "expected k <int>");
            if (have_k) fail("3dm", number, "k given twice");
            inst.k = static_cast<std::size_t>(*k);
            have_k = true;
        } else {
            fail("3dm", number, "unrecognized line");
        }
    }
    if (not have_k) throw InvalidArgument("3dm: missing k");
    for (auto &[number, rest] : edge_lines) {
        const auto fields = split_csv(rest, "3dm", number);
        if (fields.size() != 3) fail("3dm", number, "expected E x,y,z");
        const std::unordered_map<std::string, int> *maps[] = {&x, &y, &z};
        std::array<int, 3> edge{};
        for (int i = 0; i < 3; ++i) {
            const auto it = maps[i]->find(fields[i]);
            if (it == maps[i]->end()) fail("3dm", number, "unknown node " + fields[i]);
            edge[i] = it->second;
        }
        inst.edges.push_back(edge);
    }
    inst.validate();
    return inst;
}

ThreeDMInstance mtpdb::load_3dm(const fs::path &file)
{
    return parse_3dm(read_file(file));
}
