#include "mtpdb/normal_form.hpp"

#include "mtpdb/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <climits>
#include <functional>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>


using namespace mtpdb;
using namespace mtpdb::nf;


namespace {

constexpr Sym kUnset = INT32_MIN;

/// Number of permutations tried by the canonical renaming before falling back to signature order.
constexpr long kMaxRenamings = 720;

int max_var_count(const std::vector<nf::Atom> &atoms)
{
    int n = 0;
    for (auto &a : atoms)
        for (Sym s : a.args)
            if (is_var(s)) n = std::max(n, var_index(s) + 1);
    return n;
}

/// Search a homomorphism mapping the variables of `src` to terms of `dst` such that every atom of `src` becomes an
/// atom of `dst`.  Constants map to themselves.
bool homomorphism(const std::vector<nf::Atom> &src, int src_vars, const std::vector<nf::Atom> &dst)
{
    /* Candidates per source atom; most constrained atoms go first. */
    const std::size_t n = src.size();
    std::vector<std::vector<const nf::Atom *>> candidates(n);
    for (std::size_t i = 0; i != n; ++i) {
        for (auto &d : dst) {
            if (d.pred != src[i].pred or d.args.size() != src[i].args.size()) continue;
            bool ok = true;
            for (std::size_t p = 0; p != d.args.size() and ok; ++p)
                if (not is_var(src[i].args[p]) and src[i].args[p] != d.args[p]) ok = false;
            if (ok) candidates[i].push_back(&d);
        }
        if (candidates[i].empty()) return false;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto l, auto r) {
        return candidates[l].size() < candidates[r].size();
    });

    std::vector<Sym> mapping(src_vars, kUnset);
    std::vector<int> trail;
    std::function<bool(std::size_t)> search = [&](std::size_t depth) -> bool {
        if (depth == n) return true;
        const nf::Atom &a = src[order[depth]];
        for (const nf::Atom *d : candidates[order[depth]]) {
            const std::size_t mark = trail.size();
            bool ok = true;
            for (std::size_t p = 0; p != a.args.size() and ok; ++p) {
                Sym s = a.args[p];
                if (not is_var(s)) continue;
                Sym &m = mapping[var_index(s)];
                if (m == kUnset) {
                    m = d->args[p];
                    trail.push_back(var_index(s));
                } else if (m != d->args[p]) {
                    ok = false;
                }
            }
            if (ok and search(depth + 1)) return true;
            while (trail.size() > mark) {
                mapping[trail.back()] = kUnset;
                trail.pop_back();
            }
        }
        return false;
    };
    return search(0);
}

/// Rename variables densely in order of first occurrence.
void compact_variables(CQ &cq)
{
    std::unordered_map<int, int> rename;
    for (auto &a : cq.atoms)
        for (Sym &s : a.args)
            if (is_var(s)) {
                auto [it, inserted] = rename.try_emplace(var_index(s), static_cast<int>(rename.size()));
                s = var_sym(it->second);
            }
    cq.num_vars = static_cast<int>(rename.size());
}

std::vector<nf::Atom> renamed_sorted(const std::vector<nf::Atom> &atoms, const std::vector<int> &new_index)
{
    std::vector<nf::Atom> out = atoms;
    for (auto &a : out)
        for (Sym &s : a.args)
            if (is_var(s)) s = var_sym(new_index[var_index(s)]);
    std::sort(out.begin(), out.end());
    return out;
}

/// Rename variables to the lexicographically smallest sorted atom list, exploring permutations only among variables
/// with identical occurrence signatures.
void canonical_rename(CQ &cq)
{
    const int n = cq.num_vars;
    if (n == 0) {
        std::sort(cq.atoms.begin(), cq.atoms.end());
        return;
    }

    /* Occurrence signature: sorted (pred, arity, position, number of constants in the atom). */
    std::vector<std::vector<std::array<int, 4>>> signature(n);
    for (auto &a : cq.atoms) {
        int constants = 0;
        for (Sym s : a.args) constants += not is_var(s);
        for (std::size_t p = 0; p != a.args.size(); ++p)
            if (is_var(a.args[p]))
                signature[var_index(a.args[p])].push_back(
                    {a.pred, static_cast<int>(a.args.size()), static_cast<int>(p), constants});
    }
    for (auto &s : signature) std::sort(s.begin(), s.end());

    std::vector<int> by_signature(n);
    std::iota(by_signature.begin(), by_signature.end(), 0);
    std::stable_sort(by_signature.begin(), by_signature.end(),
                     [&](int l, int r) { return signature[l] < signature[r]; });

    /* Tie classes as [begin, end) ranges of `by_signature`. */
    std::vector<std::pair<int, int>> classes;
    long renamings = 1;
    for (int i = 0; i < n;) {
        int j = i + 1;
        while (j < n and signature[by_signature[j]] == signature[by_signature[i]]) ++j;
        classes.emplace_back(i, j);
        for (int k = 2; k <= j - i and renamings <= kMaxRenamings; ++k) renamings *= k;
        i = j;
    }

    std::vector<int> new_index(n);
    auto evaluate = [&](const std::vector<int> &order) {
        for (int rank = 0; rank < n; ++rank) new_index[order[rank]] = rank;
        return renamed_sorted(cq.atoms, new_index);
    };

    if (renamings > kMaxRenamings) {
        cq.atoms = evaluate(by_signature);
        return;
    }

    std::vector<int> order = by_signature;
    for (auto [b, e] : classes) std::sort(order.begin() + b, order.begin() + e);
    std::vector<nf::Atom> best = evaluate(order);
    for (;;) {
        /* Advance the mixed-radix permutation counter over tie classes. */
        std::size_t c = 0;
        for (; c != classes.size(); ++c) {
            auto [b, e] = classes[c];
            if (std::next_permutation(order.begin() + b, order.begin() + e)) break;
        }
        if (c == classes.size()) break;
        auto candidate = evaluate(order);
        if (candidate < best) best = std::move(candidate);
    }
    cq.atoms = std::move(best);
}

void append_int(std::string &out, long value)
{
    char buf[24];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    out.append(buf, end);
}

}


/*======================================================================================================================
 * Atom
 *====================================================================================================================*/

bool nf::Atom::is_ground() const
{
    return std::none_of(args.begin(), args.end(), is_var);
}

bool nf::Atom::has_var(int v) const
{
    return std::find(args.begin(), args.end(), var_sym(v)) != args.end();
}


/*======================================================================================================================
 * Construction
 *====================================================================================================================*/

DNF nf::compile(const UCQ &q, const Schema &schema)
{
    validate(q, schema);
    DNF out;
    for (auto &cq : q.disjuncts) {
        CQ n;
        std::unordered_map<std::string, int> vars;
        for (auto &a : cq.atoms) {
            nf::Atom atom{schema.require_predicate(a.predicate), {}};
            for (auto &t : a.args) {
                if (t.is_variable()) {
                    auto [it, inserted] = vars.try_emplace(t.name, static_cast<int>(vars.size()));
                    atom.args.push_back(var_sym(it->second));
                } else {
                    atom.args.push_back(*schema.constant_id(t.name));
                }
            }
            n.atoms.push_back(std::move(atom));
        }
        n.num_vars = static_cast<int>(vars.size());
        out.cqs.push_back(std::move(n));
    }
    return minimize(std::move(out));
}

Schema nf::synthetic_schema(const UCQ &q)
{
    Schema schema;
    std::vector<std::string> constants;
    std::unordered_set<std::string> seen;
    for (auto &cq : q.disjuncts)
        for (auto &a : cq.atoms) {
            if (auto id = schema.predicate_id(a.predicate)) {
                if (schema.arity(*id) != static_cast<int>(a.args.size()))
                    throw SchemaError("predicate " + a.predicate + " used with different arities");
            } else {
                schema.add_predicate(a.predicate, static_cast<int>(a.args.size()));
            }
            for (auto &t : a.args)
                if (t.is_constant() and seen.insert(t.name).second) constants.push_back(t.name);
        }
    /* Not a valid constant in the query grammar, so it can never clash. */
    constants.push_back("#fresh");
    schema.set_domain(std::move(constants));
    return schema;
}


/*======================================================================================================================
 * Logical operations
 *====================================================================================================================*/

CQ nf::normalize(CQ cq)
{
    std::sort(cq.atoms.begin(), cq.atoms.end());
    cq.atoms.erase(std::unique(cq.atoms.begin(), cq.atoms.end()), cq.atoms.end());
    cq.num_vars = max_var_count(cq.atoms);

    /* Core: drop an atom whenever the full query still maps into the rest. */
    for (bool changed = true; changed and cq.atoms.size() > 1;) {
        changed = false;
        for (std::size_t i = 0; i != cq.atoms.size(); ++i) {
            std::vector<nf::Atom> rest;
            rest.reserve(cq.atoms.size() - 1);
            for (std::size_t j = 0; j != cq.atoms.size(); ++j)
                if (j != i) rest.push_back(cq.atoms[j]);
            if (homomorphism(cq.atoms, cq.num_vars, rest)) {
                cq.atoms = std::move(rest);
                changed = true;
                break;
            }
        }
    }

    compact_variables(cq);
    canonical_rename(cq);
    return cq;
}

DNF nf::minimize(DNF q)
{
    for (auto &cq : q.cqs) {
        if (cq.is_true()) return DNF{{CQ{}}};
        cq = normalize(std::move(cq));
    }
    std::sort(q.cqs.begin(), q.cqs.end());
    q.cqs.erase(std::unique(q.cqs.begin(), q.cqs.end()), q.cqs.end());

    const std::size_t n = q.cqs.size();
    std::vector<bool> removed(n, false);
    for (std::size_t i = 0; i != n; ++i)
        for (std::size_t j = 0; j != n; ++j)
            if (i != j and not removed[j] and implies(q.cqs[i], q.cqs[j])) {
                removed[i] = true;
                break;
            }
    DNF out;
    for (std::size_t i = 0; i != n; ++i)
        if (not removed[i]) out.cqs.push_back(std::move(q.cqs[i]));
    return out;
}

bool nf::implies(const CQ &a, const CQ &b)
{
    if (b.is_true()) return true;
    if (a.is_true()) return false;
    return homomorphism(b.atoms, b.num_vars, a.atoms);
}

bool nf::implies(const DNF &a, const DNF &b)
{
    return std::all_of(a.cqs.begin(), a.cqs.end(), [&](const CQ &x) {
        return std::any_of(b.cqs.begin(), b.cqs.end(), [&](const CQ &y) { return implies(x, y); });
    });
}

bool nf::unifiable(const nf::Atom &a, const nf::Atom &b)
{
    if (a.pred != b.pred or a.args.size() != b.args.size()) return false;

    /* Union-find over the variables of both atoms; b's variables are offset by a's count. */
    int na = 0, nb = 0;
    for (Sym s : a.args) if (is_var(s)) na = std::max(na, var_index(s) + 1);
    for (Sym s : b.args) if (is_var(s)) nb = std::max(nb, var_index(s) + 1);
    std::vector<int> parent(na + nb);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<Sym> bound(na + nb, kUnset);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto bind = [&](int node, Sym c) {
        int r = find(node);
        if (bound[r] == kUnset) { bound[r] = c; return true; }
        return bound[r] == c;
    };

    for (std::size_t p = 0; p != a.args.size(); ++p) {
        Sym s = a.args[p], t = b.args[p];
        if (not is_var(s) and not is_var(t)) {
            if (s != t) return false;
        } else if (is_var(s) and not is_var(t)) {
            if (not bind(var_index(s), t)) return false;
        } else if (not is_var(s) and is_var(t)) {
            if (not bind(na + var_index(t), s)) return false;
        } else {
            int x = find(var_index(s)), y = find(na + var_index(t));
            if (x == y) continue;
            if (bound[x] != kUnset and bound[y] != kUnset and bound[x] != bound[y]) return false;
            parent[y] = x;
            if (bound[x] == kUnset) bound[x] = bound[y];
        }
    }
    return true;
}

bool nf::dependent(const CQ &a, const CQ &b)
{
    for (auto &x : a.atoms)
        for (auto &y : b.atoms)
            if (unifiable(x, y)) return true;
    return false;
}

bool nf::dependent(const DNF &a, const DNF &b)
{
    for (auto &x : a.cqs)
        for (auto &y : b.cqs)
            if (dependent(x, y)) return true;
    return false;
}

std::vector<CQ> nf::components(const CQ &cq)
{
    const int n = static_cast<int>(cq.atoms.size());
    auto groups = connected_groups(n, [&](int i, int j) {
        for (Sym s : cq.atoms[i].args)
            if (is_var(s) and cq.atoms[j].has_var(var_index(s))) return true;
        return false;
    });
    std::vector<CQ> out;
    out.reserve(groups.size());
    for (auto &g : groups) {
        CQ c;
        for (int i : g) c.atoms.push_back(cq.atoms[i]);
        out.push_back(normalize(std::move(c)));
    }
    return out;
}

CNF nf::to_cnf(const DNF &q, std::size_t max_clauses)
{
    if (q.is_false()) return CNF{DNF{}};
    if (q.is_true()) return CNF{};

    CNF clauses{DNF{}};
    for (auto &cq : q.cqs) {
        auto parts = components(cq);
        CNF next;
        std::unordered_set<std::string> seen;
        for (auto &clause : clauses)
            for (auto &part : parts) {
                DNF c = clause;
                c.cqs.push_back(part);
                c = minimize(std::move(c));
                if (seen.insert(key(c)).second) next.push_back(std::move(c));
            }
        if (next.size() > max_clauses)
            throw ResourceLimit("CNF rewriting exceeds " + std::to_string(max_clauses) + " clauses");

        /* Absorption: a clause implied by another clause is redundant. */
        std::vector<bool> removed(next.size(), false);
        for (std::size_t i = 0; i != next.size(); ++i)
            for (std::size_t j = 0; j != next.size(); ++j)
                if (i != j and not removed[j] and implies(next[j], next[i])) {
                    removed[i] = true;
                    break;
                }
        clauses.clear();
        for (std::size_t i = 0; i != next.size(); ++i)
            if (not removed[i]) clauses.push_back(std::move(next[i]));
    }
    std::sort(clauses.begin(), clauses.end(), [](const DNF &l, const DNF &r) { return l.cqs < r.cqs; });
    return clauses;
}

DNF nf::disjoin(const std::vector<const DNF *> &clauses)
{
    DNF out;
    for (auto *c : clauses) out.cqs.insert(out.cqs.end(), c->cqs.begin(), c->cqs.end());
    return minimize(std::move(out));
}

bool nf::mentions(const CQ &q, int pred)
{
    return std::any_of(q.atoms.begin(), q.atoms.end(), [&](const nf::Atom &a) { return a.pred == pred; });
}

bool nf::mentions(const DNF &q, int pred)
{
    return std::any_of(q.cqs.begin(), q.cqs.end(), [&](const CQ &c) { return mentions(c, pred); });
}

bool nf::mentions(const CNF &q, int pred)
{
    return std::any_of(q.begin(), q.end(), [&](const DNF &c) { return mentions(c, pred); });
}


/*======================================================================================================================
 * Separator variables
 *====================================================================================================================*/

std::optional<SeparatorPlan> nf::find_separator(const DNF &q)
{
    const std::size_t n = q.cqs.size();
    std::vector<std::vector<int>> roots(n);
    bool any_variables = false;
    for (std::size_t i = 0; i != n; ++i) {
        const CQ &cq = q.cqs[i];
        if (cq.is_ground()) continue;
        any_variables = true;
        /* Root variables in order of first occurrence in the canonical atom list. */
        for (auto &a : cq.atoms)
            for (Sym s : a.args) {
                if (not is_var(s)) continue;
                int v = var_index(s);
                if (std::find(roots[i].begin(), roots[i].end(), v) != roots[i].end()) continue;
                if (std::all_of(cq.atoms.begin(), cq.atoms.end(), [&](const nf::Atom &b) { return b.has_var(v); }))
                    roots[i].push_back(v);
            }
        if (roots[i].empty()) return std::nullopt;
    }
    if (not any_variables) return std::nullopt;

    SeparatorPlan plan{std::vector<int>(n, -1), std::vector<int>(n, -1)};
    using Allowed = std::map<int, std::uint64_t>;

    auto attach_ground = [&](const Allowed &allowed) {
        for (std::size_t i = 0; i != n; ++i) {
            if (not q.cqs[i].is_ground()) continue;
            int c = -1;
            for (auto &a : q.cqs[i].atoms) {
                auto it = allowed.find(a.pred);
                if (it == allowed.end()) return false;
                for (std::size_t p = 0; p != a.args.size(); ++p) {
                    if (not(it->second >> p & 1)) continue;
                    if (c < 0) c = a.args[p];
                    else if (c != a.args[p]) return false;
                }
            }
            plan.attached_constant[i] = c;
        }
        return true;
    };

    std::function<bool(std::size_t, const Allowed &)> search = [&](std::size_t i, const Allowed &allowed) -> bool {
        while (i != n and q.cqs[i].is_ground()) ++i;
        if (i == n) return attach_ground(allowed);
        for (int v : roots[i]) {
            Allowed next = allowed;
            bool ok = true;
            for (auto &a : q.cqs[i].atoms) {
                std::uint64_t mask = 0;
                for (std::size_t p = 0; p != a.args.size(); ++p)
                    if (a.args[p] == var_sym(v)) mask |= std::uint64_t(1) << p;
                auto [it, inserted] = next.try_emplace(a.pred, ~std::uint64_t(0));
                it->second &= mask;
                if (it->second == 0) { ok = false; break; }
            }
            if (not ok) continue;
            plan.variable[i] = v;
            if (search(i + 1, next)) return true;
        }
        plan.variable[i] = -1;
        return false;
    };

    if (search(0, Allowed{})) return plan;
    return std::nullopt;
}

DNF nf::substitute(const DNF &q, const SeparatorPlan &plan, int constant)
{
    DNF out;
    for (std::size_t i = 0; i != q.cqs.size(); ++i) {
        if (plan.variable[i] >= 0) {
            CQ c = q.cqs[i];
            const Sym v = var_sym(plan.variable[i]);
            for (auto &a : c.atoms)
                for (Sym &s : a.args)
                    if (s == v) s = constant;
            out.cqs.push_back(std::move(c));
        } else if (plan.attached_constant[i] == constant) {
            out.cqs.push_back(q.cqs[i]);
        }
    }
    return minimize(std::move(out));
}


/*======================================================================================================================
 * Keys and printing
 *====================================================================================================================*/

std::string nf::key(const CQ &q)
{
    std::string out;
    for (auto &a : q.atoms) {
        if (not out.empty()) out += '&';
        append_int(out, a.pred);
        out += '(';
        for (std::size_t p = 0; p != a.args.size(); ++p) {
            if (p) out += ',';
            append_int(out, a.args[p]);
        }
        out += ')';
    }
    return out;
}

std::string nf::key(const DNF &q)
{
    if (q.is_false()) return "F";
    std::string out;
    for (auto &c : q.cqs) {
        if (not out.empty()) out += '|';
        out += key(c);
    }
    return out.empty() ? "T" : out;
}

std::string nf::key(const CNF &q)
{
    std::string out;
    for (auto &c : q) {
        out += '[';
        out += key(c);
        out += ']';
    }
    return out;
}

std::string nf::to_string(const DNF &q, const Schema &schema)
{
    if (q.is_false()) return "false";
    if (q.is_true()) return "true";
    std::string out;
    for (auto &c : q.cqs) {
        if (not out.empty()) out += " | ";
        for (std::size_t i = 0; i != c.atoms.size(); ++i) {
            if (i) out += ", ";
            auto &a = c.atoms[i];
            out += schema.predicate_name(a.pred);
            out += '(';
            for (std::size_t p = 0; p != a.args.size(); ++p) {
                if (p) out += ',';
                if (is_var(a.args[p])) out += "v" + std::to_string(var_index(a.args[p]));
                else out += schema.constant_name(a.args[p]);
            }
            out += ')';
        }
    }
    return out;
}
