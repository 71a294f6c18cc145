#pragma once

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dq/value.hpp"

namespace dq {

struct Term {
    enum class Tag { Var, Const };
    Tag tag = Tag::Var;
    std::string var;  // Tag::Var
    Value value;      // Tag::Const

    static Term make_var(std::string name) {
        Term t;
        t.tag = Tag::Var;
        t.var = std::move(name);
        return t;
    }
    static Term make_const(Value v) {
        Term t;
        t.tag = Tag::Const;
        t.value = std::move(v);
        return t;
    }
    bool is_var() const { return tag == Tag::Var; }
    bool is_const() const { return tag == Tag::Const; }
    bool operator==(const Term&) const = default;
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

const char* cmp_op_text(CmpOp op);
bool is_ordering(CmpOp op);

/// R(t1, ..., tn). External predicates are named with a leading '#'.
struct RelAtom {
    std::string pred;
    std::vector<Term> args;

    bool is_external() const { return !pred.empty() && pred[0] == '#'; }
    bool operator==(const RelAtom&) const = default;
};

/// Comparison built-in. The common two-term form has one op; the chained
/// range form "c1 <= t <= c2" carries three terms and two ordering ops and
/// counts as a single body atom.
struct BuiltinAtom {
    std::vector<Term> terms;  // ops.size() + 1 terms
    std::vector<CmpOp> ops;

    static BuiltinAtom make(Term l, CmpOp op, Term r) {
        BuiltinAtom b;
        b.terms = {std::move(l), std::move(r)};
        b.ops = {op};
        return b;
    }
    bool is_chain() const { return ops.size() == 2; }

    /// x = c or c = x with exactly one variable: binds the variable.
    bool is_const_equality() const;
    const Term& const_eq_var() const;
    const Value& const_eq_value() const;

    bool operator==(const BuiltinAtom&) const = default;
};

using Atom = std::variant<RelAtom, BuiltinAtom>;

inline const RelAtom* as_rel(const Atom& a) { return std::get_if<RelAtom>(&a); }
inline const BuiltinAtom* as_builtin(const Atom& a) { return std::get_if<BuiltinAtom>(&a); }

struct Rule {
    RelAtom head;
    std::vector<Atom> body;  // empty body = fact

    bool operator==(const Rule&) const = default;
};

/// Non-recursive Datalog program. `edb` lists the extensional predicates;
/// `externals` the '#'-prefixed ones appearing in rule bodies.
struct Program {
    std::vector<Rule> rules;
    std::set<std::string> edb;
    std::set<std::string> externals;

    std::set<std::string> idb() const;
    std::vector<const Rule*> rules_for(const std::string& pred) const;
};

/// A program plus its distinguished answer predicate.
struct Query {
    std::string answer;
    Program program;
};

std::set<std::string> atom_vars(const Atom& a);
std::set<std::string> rel_atom_vars(const RelAtom& a);
std::set<std::string> rule_vars(const Rule& r);

std::string to_string(const Term& t);
std::string to_string(const RelAtom& a);
std::string to_string(const BuiltinAtom& b);
std::string to_string(const Atom& a);
std::string to_string(const Rule& r);
std::string to_string(const Program& p);

/// Hoists constant-binding equality atoms (x = c) to the front of each body,
/// preserving their relative order. Evaluation and adornment both assume
/// this normal form.
Rule normalize_rule(const Rule& r);
Program normalize_program(const Program& p);

}  // namespace dq
