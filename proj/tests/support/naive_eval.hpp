#pragma once

// Independent naive-evaluation oracle: repeatedly applies every rule against
// the full current store until nothing changes, deriving bindings by
// recursive backtracking. Shares only the data model with the engine, not
// its join or stratification code.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "dq/ast.hpp"
#include "dq/value.hpp"

namespace dq::testing {

using Bindings = std::map<std::string, Value>;

inline bool oracle_cmp(CmpOp op, const Value& l, const Value& r) {
    if (l.is_null() || r.is_null()) return false;
    if (op == CmpOp::Eq) return l == r;
    if (op == CmpOp::Ne) return !(l == r);
    int c = 0;
    if (l.kind() == Kind::Num && r.kind() == Kind::Num)
        c = l.number().compare(r.number());
    else if (l.kind() == Kind::Time && r.kind() == Kind::Time)
        c = l.minutes() == r.minutes() ? 0 : (l.minutes() < r.minutes() ? -1 : 1);
    else
        return false;
    if (op == CmpOp::Lt) return c < 0;
    if (op == CmpOp::Le) return c <= 0;
    if (op == CmpOp::Gt) return c > 0;
    return c >= 0;
}

inline bool oracle_builtin_holds(const BuiltinAtom& b, const Bindings& env) {
    auto value_of = [&](const Term& t) -> const Value* {
        if (t.is_const()) return &t.value;
        auto it = env.find(t.var);
        return it == env.end() ? nullptr : &it->second;
    };
    // Constant equalities may bind; the caller handles that case.
    for (size_t i = 0; i < b.ops.size(); ++i) {
        const Value* l = value_of(b.terms[i]);
        const Value* r = value_of(b.terms[i + 1]);
        if (!l || !r) return false;
        if (!oracle_cmp(b.ops[i], *l, *r)) return false;
    }
    return true;
}

inline void oracle_rule_matches(const Rule& rule, size_t at,
                                const std::map<std::string, std::set<Tuple>>& store,
                                Bindings env, std::vector<Bindings>& out) {
    if (at == rule.body.size()) {
        out.push_back(std::move(env));
        return;
    }
    const Atom& atom = rule.body[at];
    if (const auto* b = as_builtin(atom)) {
        if (b->is_const_equality()) {
            const std::string& v = b->const_eq_var().var;
            auto it = env.find(v);
            if (it == env.end()) {
                Bindings next = env;
                next[v] = b->const_eq_value();
                oracle_rule_matches(rule, at + 1, store, std::move(next), out);
                return;
            }
            if (!it->second.is_null() && it->second == b->const_eq_value())
                oracle_rule_matches(rule, at + 1, store, std::move(env), out);
            return;
        }
        if (oracle_builtin_holds(*b, env))
            oracle_rule_matches(rule, at + 1, store, std::move(env), out);
        return;
    }
    const auto& rel = std::get<RelAtom>(atom);
    auto it = store.find(rel.pred);
    if (it == store.end()) return;
    for (const Tuple& t : it->second) {
        Bindings next = env;
        bool ok = true;
        for (size_t i = 0; i < rel.args.size() && ok; ++i) {
            const Term& arg = rel.args[i];
            const Value& v = t[i];
            if (arg.is_const()) {
                ok = !arg.value.is_null() && !v.is_null() && arg.value == v;
            } else {
                auto b = next.find(arg.var);
                if (b == next.end())
                    next[arg.var] = v;
                else
                    ok = !b->second.is_null() && !v.is_null() && b->second == v;
            }
        }
        if (ok) oracle_rule_matches(rule, at + 1, store, std::move(next), out);
    }
}

/// Full naive fixpoint: returns predicate -> tuples for every predicate
/// (edb facts included).
inline std::map<std::string, std::set<Tuple>> naive_evaluate(const Program& prog,
                                                             const Instance& edb) {
    std::map<std::string, std::set<Tuple>> store;
    for (const auto& [name, rel] : edb.relations())
        store[name].insert(rel.tuples().begin(), rel.tuples().end());
    for (const auto& r : prog.rules) store.try_emplace(r.head.pred);

    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& rule : prog.rules) {
            std::vector<Bindings> matches;
            oracle_rule_matches(rule, 0, store, {}, matches);
            for (const auto& env : matches) {
                Tuple t;
                for (const auto& arg : rule.head.args) {
                    if (arg.is_const()) {
                        t.push_back(arg.value);
                    } else {
                        t.push_back(env.at(arg.var));
                    }
                }
                if (store[rule.head.pred].insert(std::move(t)).second) changed = true;
            }
        }
    }
    return store;
}

}  // namespace dq::testing
