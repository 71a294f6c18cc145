#include "dq/eval.hpp"

#include <algorithm>
#include <map>

namespace dq {

bool comparison_satisfied(CmpOp op, const Value& l, const Value& r) {
    if (l.is_null() || r.is_null()) return false;
    switch (op) {
        case CmpOp::Eq: return l == r;
        case CmpOp::Ne: return !(l == r);
        default: break;
    }
    int c;
    if (l.kind() == Kind::Num && r.kind() == Kind::Num)
        c = l.number().compare(r.number());
    else if (l.kind() == Kind::Time && r.kind() == Kind::Time)
        c = l.minutes() < r.minutes() ? -1 : (l.minutes() > r.minutes() ? 1 : 0);
    else
        return false;
    switch (op) {
        case CmpOp::Lt: return c < 0;
        case CmpOp::Le: return c <= 0;
        case CmpOp::Gt: return c > 0;
        case CmpOp::Ge: return c >= 0;
        default: return false;
    }
}

namespace {

using Env = std::map<std::string, Value>;

std::optional<Value> term_value(const Term& t, const Env& env) {
    if (t.is_const()) return t.value;
    auto it = env.find(t.var);
    if (it == env.end()) return std::nullopt;
    return it->second;
}

class Evaluator {
public:
    Evaluator(const Program& p, const Instance& edb, ExternalHook* hook)
        : prog_(normalize_program(p)), store_(edb), hook_(hook) {}

    Instance run() {
        if (!prog_.externals.empty() && !hook_)
            throw Error(ErrorCode::ResolverFailure,
                        "program references external predicates but no resolver was supplied: " +
                            *prog_.externals.begin());
        prepare_relations();
        // Dependency order makes one pass per stratum enough: every body
        // predicate is complete when a rule fires, so no tuple is re-derived
        // and no external call is re-issued.
        for (const auto& pred : topo_order())
            for (const auto& rule : prog_.rules)
                if (rule.head.pred == pred) apply_rule(rule);
        return store_;
    }

private:
    void prepare_relations() {
        std::map<std::string, size_t> arities;
        auto note = [&](const RelAtom& a) {
            if (!a.is_external()) arities.try_emplace(a.pred, a.args.size());
        };
        for (const auto& r : prog_.rules) {
            note(r.head);
            for (const auto& a : r.body)
                if (const auto* rel = as_rel(a)) note(*rel);
        }
        for (const auto& [pred, arity] : arities) {
            if (store_.has_relation(pred)) continue;
            RelationSignature sig;
            sig.name = pred;
            for (size_t i = 0; i < arity; ++i)
                sig.attributes.push_back({"c" + std::to_string(i + 1), AttrKind::Str});
            store_.add_relation(std::move(sig));
        }
    }

    std::vector<std::string> topo_order() const {
        auto idb = prog_.idb();
        std::map<std::string, std::set<std::string>> deps;
        for (const auto& r : prog_.rules) {
            deps.try_emplace(r.head.pred);
            for (const auto& a : r.body) {
                const auto* rel = as_rel(a);
                if (rel && idb.count(rel->pred) && rel->pred != r.head.pred)
                    deps[r.head.pred].insert(rel->pred);
                if (rel && rel->pred == r.head.pred)
                    throw Error(ErrorCode::RecursionDetected, rel->pred + " -> " + rel->pred);
            }
        }
        std::vector<std::string> order;
        std::set<std::string> done;
        while (done.size() < deps.size()) {
            bool progress = false;
            for (const auto& [pred, needs] : deps) {  // map order keeps this deterministic
                if (done.count(pred)) continue;
                bool ready = std::all_of(needs.begin(), needs.end(), [&](const std::string& n) {
                    return done.count(n) > 0;
                });
                if (ready) {
                    order.push_back(pred);
                    done.insert(pred);
                    progress = true;
                }
            }
            if (!progress) throw Error(ErrorCode::RecursionDetected, "cycle among intensional predicates");
        }
        return order;
    }

    bool apply_rule(const Rule& rule) {
        std::vector<Env> envs = {Env{}};
        for (const auto& atom : rule.body) {
            if (envs.empty()) break;
            if (const auto* rel = as_rel(atom)) {
                envs = rel->is_external() ? join_external(rule, *rel, std::move(envs))
                                          : join_relation(*rel, std::move(envs));
            } else {
                envs = apply_builtin(rule, *as_builtin(atom), std::move(envs));
            }
        }
        bool grew = false;
        Relation& target = store_.relation(rule.head.pred);
        for (const auto& env : envs) {
            Tuple t;
            t.reserve(rule.head.args.size());
            for (const auto& term : rule.head.args) {
                auto v = term_value(term, env);
                if (!v)
                    throw Error(ErrorCode::SafetyViolation,
                                "unbound head variable " + term.var + " in '" + to_string(rule) + "'");
                t.push_back(*v);
            }
            if (!target.contains(t)) {
                target.insert(std::move(t));
                grew = true;
            }
        }
        return grew;
    }

    std::vector<Env> join_relation(const RelAtom& atom, std::vector<Env> envs) {
        const Relation& rel = store_.relation(atom.pred);
        std::vector<Env> out;
        for (const auto& env : envs) {
            for (const auto& tuple : rel) {
                Env next = env;
                if (match_tuple(atom.args, tuple, next)) out.push_back(std::move(next));
            }
        }
        return out;
    }

    static bool match_tuple(const std::vector<Term>& args, const Tuple& tuple, Env& env) {
        for (size_t i = 0; i < args.size(); ++i) {
            const Term& t = args[i];
            if (t.is_const()) {
                if (!t.value.unifies_with(tuple[i])) return false;
                continue;
            }
            auto it = env.find(t.var);
            if (it == env.end())
                env.emplace(t.var, tuple[i]);  // binding a Null is allowed; it just never joins
            else if (!it->second.unifies_with(tuple[i]))
                return false;
        }
        return true;
    }

    std::vector<Env> apply_builtin(const Rule& rule, const BuiltinAtom& b, std::vector<Env> envs) {
        if (b.is_const_equality()) {
            const std::string& var = b.const_eq_var().var;
            const Value& val = b.const_eq_value();
            std::vector<Env> out;
            for (auto& env : envs) {
                auto it = env.find(var);
                if (it == env.end()) {
                    Env next = std::move(env);
                    next.emplace(var, val);
                    out.push_back(std::move(next));
                } else if (it->second.unifies_with(val)) {
                    out.push_back(std::move(env));
                }
            }
            return out;
        }
        std::vector<Env> out;
        for (auto& env : envs) {
            bool ok = true;
            for (size_t i = 0; ok && i < b.ops.size(); ++i) {
                auto l = term_value(b.terms[i], env);
                auto r = term_value(b.terms[i + 1], env);
                if (!l || !r)
                    throw Error(ErrorCode::UnboundBuiltin,
                                "variable " + (!l ? b.terms[i].var : b.terms[i + 1].var) +
                                    " unbound when evaluating built-in in '" + to_string(rule) + "'");
                ok = comparison_satisfied(b.ops[i], *l, *r);
            }
            if (ok) out.push_back(std::move(env));
        }
        return out;
    }

    std::vector<Env> join_external(const Rule& rule, const RelAtom& atom, std::vector<Env> envs) {
        std::string binding = hook_->binding(atom.pred);
        if (binding.size() != atom.args.size())
            throw Error(ErrorCode::SchemaMismatch,
                        atom.pred + ": binding pattern length " + std::to_string(binding.size()) +
                            " does not match atom arity " + std::to_string(atom.args.size()));
        std::vector<size_t> in_pos, out_pos;
        for (size_t i = 0; i < binding.size(); ++i)
            (binding[i] == 'b' ? in_pos : out_pos).push_back(i);

        // Distinct ground inputs first, in lexicographic order, then the
        // per-environment extension off the collected answers.
        std::set<Tuple> inputs;
        std::vector<std::optional<Tuple>> env_inputs(envs.size());
        for (size_t e = 0; e < envs.size(); ++e) {
            Tuple in;
            in.reserve(in_pos.size());
            bool usable = true;
            for (size_t p : in_pos) {
                auto v = term_value(atom.args[p], envs[e]);
                if (!v)
                    throw Error(ErrorCode::BindingViolation,
                                atom.pred + ": input position " + std::to_string(p + 1) +
                                    " not ground at call time in '" + to_string(rule) + "'");
                if (v->is_null()) {
                    usable = false;  // a null never identifies an input
                    break;
                }
                in.push_back(*v);
            }
            if (usable) {
                env_inputs[e] = in;
                inputs.insert(std::move(in));
            }
        }
        std::map<Tuple, std::vector<Tuple>> answers;
        for (const auto& in : inputs) answers.emplace(in, hook_->call(atom.pred, in));

        std::vector<Env> out;
        for (size_t e = 0; e < envs.size(); ++e) {
            if (!env_inputs[e]) continue;
            for (const auto& row : answers.at(*env_inputs[e])) {
                Env next = envs[e];
                bool ok = true;
                for (size_t k = 0; k < out_pos.size() && ok; ++k) {
                    const Term& t = atom.args[out_pos[k]];
                    if (t.is_const()) {
                        ok = t.value.unifies_with(row[k]);
                        continue;
                    }
                    auto it = next.find(t.var);
                    if (it == next.end())
                        next.emplace(t.var, row[k]);
                    else
                        ok = it->second.unifies_with(row[k]);
                }
                if (ok) out.push_back(std::move(next));
            }
        }
        return out;
    }

    Program prog_;
    Instance store_;
    ExternalHook* hook_;
};

}  // namespace

Instance evaluate(const Program& p, const Instance& edb) {
    if (!p.externals.empty())
        throw Error(ErrorCode::ResolverFailure,
                    "evaluate() does not handle external predicates; use the external-source "
                    "evaluator (" + *p.externals.begin() + ")");
    return Evaluator(p, edb, nullptr).run();
}

Instance evaluate_with_hook(const Program& p, const Instance& edb, ExternalHook* hook) {
    return Evaluator(p, edb, hook).run();
}

}  // namespace dq
