#include "mtpdb/query.hpp"

#include "mtpdb/errors.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <unordered_map>


using namespace mtpdb;


namespace {

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) or c == '_'; }

/// Recursive-descent parser over the query grammar.
class Parser
{
    std::string_view text_;
    std::size_t pos_ = 0;

    public:
    explicit Parser(std::string_view text) : text_(text) { }

    UCQ parse()
    {
        UCQ q;
        q.disjuncts.push_back(conjunctive_query());
        while (accept('|')) q.disjuncts.push_back(conjunctive_query());
        skip_ws();
        if (pos_ != text_.size()) error("unexpected '" + std::string(1, text_[pos_]) + "'");
        q.canonicalize();
        return q;
    }

    private:
    [[noreturn]] void error(const std::string &message) const { throw ParseError(message, pos_); }

    void skip_ws()
    {
        while (pos_ < text_.size() and std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < text_.size() and text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (not accept(c)) {
            if (pos_ == text_.size()) error(std::string("expected '") + c + "' but reached end of input");
            error(std::string("expected '") + c + "'");
        }
    }

    std::string identifier()
    {
        skip_ws();
        const std::size_t begin = pos_;
        if (pos_ == text_.size() or not std::isalpha(static_cast<unsigned char>(text_[pos_])))
            error("expected identifier");
        while (pos_ < text_.size() and is_ident_char(text_[pos_])) ++pos_;
        return std::string(text_.substr(begin, pos_ - begin));
    }

    ConjunctiveQuery conjunctive_query()
    {
        ConjunctiveQuery cq;
        cq.atoms.push_back(atom());
        while (accept(',')) cq.atoms.push_back(atom());
        return cq;
    }

    Atom atom()
    {
        Atom a;
        a.predicate = identifier();
        expect('(');
        a.args.push_back(term());
        while (accept(',')) a.args.push_back(term());
        expect(')');
        return a;
    }

    Term term()
    {
        skip_ws();
        if (pos_ == text_.size()) error("expected term but reached end of input");
        const char c = text_[pos_];
        if (c == '"') return Term::constant(quoted());
        if (std::islower(static_cast<unsigned char>(c))) return Term::variable(identifier());
        if (std::isupper(static_cast<unsigned char>(c))) return Term::constant(identifier());
        error("expected variable or constant");
    }

    std::string quoted()
    {
        const std::size_t begin = pos_++;
        std::string out;
        while (pos_ < text_.size() and text_[pos_] != '"') {
            if (text_[pos_] == '\\' and pos_ + 1 < text_.size()) ++pos_;
            out += text_[pos_++];
        }
        if (pos_ == text_.size()) {
            pos_ = begin;
            error("unterminated string");
        }
        ++pos_;
        if (out.empty()) {
            pos_ = begin;
            error("empty constant");
        }
        return out;
    }
};

bool is_bare_constant(const std::string &name)
{
    if (name.empty() or not std::isupper(static_cast<unsigned char>(name[0]))) return false;
    return std::all_of(name.begin(), name.end(), is_ident_char);
}

}


/*======================================================================================================================
 * AST helpers
 *====================================================================================================================*/

bool Atom::is_ground() const
{
    return std::all_of(args.begin(), args.end(), [](const Term &t) { return t.is_constant(); });
}

std::vector<std::string> ConjunctiveQuery::variables() const
{
    std::vector<std::string> vars;
    for (auto &a : atoms)
        for (auto &t : a.args)
            if (t.is_variable() and std::find(vars.begin(), vars.end(), t.name) == vars.end())
                vars.push_back(t.name);
    return vars;
}

void UCQ::canonicalize()
{
    for (auto &cq : disjuncts) {
        std::sort(cq.atoms.begin(), cq.atoms.end());
        cq.atoms.erase(std::unique(cq.atoms.begin(), cq.atoms.end()), cq.atoms.end());
    }
    std::sort(disjuncts.begin(), disjuncts.end());
    disjuncts.erase(std::unique(disjuncts.begin(), disjuncts.end()), disjuncts.end());
}


/*======================================================================================================================
 * Parsing and printing
 *====================================================================================================================*/

UCQ mtpdb::parse_ucq(std::string_view text)
{
    return Parser(text).parse();
}

UCQ mtpdb::parse_ucq(std::string_view text, const Schema &schema)
{
    UCQ q = parse_ucq(text);
    validate(q, schema);
    return q;
}

void mtpdb::validate(const UCQ &q, const Schema &schema)
{
    if (q.disjuncts.empty()) throw SchemaError("query has no disjuncts");
    for (auto &cq : q.disjuncts) {
        if (cq.atoms.empty()) throw SchemaError("conjunctive query has no atoms");
        for (auto &a : cq.atoms) {
            const int id = schema.require_predicate(a.predicate);
            if (schema.arity(id) != static_cast<int>(a.args.size()))
                throw SchemaError("arity mismatch: " + a.predicate + " has arity " +
                                  std::to_string(schema.arity(id)) + " but is used with " +
                                  std::to_string(a.args.size()) + " arguments");
            for (auto &t : a.args) {
                if (t.name.empty()) throw SchemaError("empty term name");
                if (t.is_constant() and not schema.constant_id(t.name))
                    throw SchemaError("constant " + t.name + " is not in the domain");
            }
        }
    }
}

std::string mtpdb::to_string(const Term &term)
{
    if (term.is_variable() or is_bare_constant(term.name)) return term.name;
    std::string out = "\"";
    for (char c : term.name) {
        if (c == '"' or c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

std::string mtpdb::to_string(const Atom &atom)
{
    std::string out = atom.predicate + "(";
    for (std::size_t i = 0; i != atom.args.size(); ++i) {
        if (i) out += ",";
        out += to_string(atom.args[i]);
    }
    return out + ")";
}

std::string mtpdb::to_string(const ConjunctiveQuery &cq)
{
    std::string out;
    for (std::size_t i = 0; i != cq.atoms.size(); ++i) {
        if (i) out += ", ";
        out += to_string(cq.atoms[i]);
    }
    return out;
}

std::string mtpdb::to_string(const UCQ &ucq)
{
    std::string out;
    for (std::size_t i = 0; i != ucq.disjuncts.size(); ++i) {
        if (i) out += " | ";
        out += to_string(ucq.disjuncts[i]);
    }
    return out;
}


/*======================================================================================================================
 * Grounding
 *====================================================================================================================*/

std::uint64_t mtpdb::ground_size(const UCQ &q, std::size_t domain_size)
{
    std::uint64_t total = 0;
    for (auto &cq : q.disjuncts) {
        std::uint64_t n = 1;
        for (std::size_t i = 0, k = cq.variables().size(); i != k; ++i) {
            if (n > UINT64_MAX / std::max<std::size_t>(domain_size, 1)) return UINT64_MAX;
            n *= domain_size;
        }
        if (total > UINT64_MAX - n) return UINT64_MAX;
        total += n;
    }
    return total;
}

GroundDNF mtpdb::ground(const UCQ &q, const Schema &schema, std::uint64_t max_conjuncts)
{
    validate(q, schema);
    const std::size_t d = schema.domain_size();
    const std::uint64_t size = ground_size(q, d);
    if (size > max_conjuncts)
        throw ResourceLimit("grounding produces " + std::to_string(size) + " conjuncts, cap is " +
                            std::to_string(max_conjuncts));

    GroundDNF out;
    out.reserve(size);
    for (auto &cq : q.disjuncts) {
        const auto vars = cq.variables();
        std::unordered_map<std::string, std::size_t> slot;
        for (std::size_t i = 0; i != vars.size(); ++i) slot.emplace(vars[i], i);

        std::vector<int> assignment(vars.size(), 0);
        for (;;) {
            std::vector<GroundAtom> conjunct;
            conjunct.reserve(cq.atoms.size());
            for (auto &a : cq.atoms) {
                GroundAtom g{*schema.predicate_id(a.predicate), {}};
                for (auto &t : a.args)
                    g.args.push_back(t.is_variable() ? assignment[slot.at(t.name)] : *schema.constant_id(t.name));
                conjunct.push_back(std::move(g));
            }
            std::sort(conjunct.begin(), conjunct.end());
            conjunct.erase(std::unique(conjunct.begin(), conjunct.end()), conjunct.end());
            out.push_back(std::move(conjunct));

            /* odometer over domain^vars */
            std::size_t i = 0;
            for (; i != assignment.size(); ++i) {
                if (++assignment[i] < static_cast<int>(d)) break;
                assignment[i] = 0;
            }
            if (i == assignment.size()) break;
        }
    }
    return out;
}


/*======================================================================================================================
 * Syntactic analyses
 *====================================================================================================================*/

bool mtpdb::is_hierarchical(const ConjunctiveQuery &cq)
{
    std::map<std::string, std::set<std::size_t>> at;
    for (std::size_t i = 0; i != cq.atoms.size(); ++i)
        for (auto &t : cq.atoms[i].args)
            if (t.is_variable()) at[t.name].insert(i);

    for (auto x = at.begin(); x != at.end(); ++x)
        for (auto y = std::next(x); y != at.end(); ++y) {
            const auto &ax = x->second, &ay = y->second;
            const bool x_in_y = std::includes(ay.begin(), ay.end(), ax.begin(), ax.end());
            const bool y_in_x = std::includes(ax.begin(), ax.end(), ay.begin(), ay.end());
            const bool disjoint = std::none_of(ax.begin(), ax.end(), [&](std::size_t i) { return ay.contains(i); });
            if (not(x_in_y or y_in_x or disjoint)) return false;
        }
    return true;
}

bool mtpdb::has_self_join(const UCQ &q)
{
    std::set<std::string> seen;
    for (auto &cq : q.disjuncts)
        for (auto &a : cq.atoms)
            if (not seen.insert(a.predicate).second) return true;
    return false;
}

QueryProfile mtpdb::analyze(const UCQ &q)
{
    QueryProfile profile;
    for (auto &cq : q.disjuncts) profile.hierarchical_per_cq.push_back(is_hierarchical(cq));
    profile.inversion_free = is_inversion_free(q);
    profile.self_join_free = not has_self_join(q);
    profile.safe = is_safe(q);
    return profile;
}
