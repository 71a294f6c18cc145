#include "dq/ast.hpp"

namespace dq {

const char* cmp_op_text(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

bool is_ordering(CmpOp op) {
    return op == CmpOp::Lt || op == CmpOp::Le || op == CmpOp::Gt || op == CmpOp::Ge;
}

bool BuiltinAtom::is_const_equality() const {
    if (is_chain() || ops[0] != CmpOp::Eq) return false;
    return terms[0].is_var() != terms[1].is_var();
}

const Term& BuiltinAtom::const_eq_var() const {
    return terms[0].is_var() ? terms[0] : terms[1];
}

const Value& BuiltinAtom::const_eq_value() const {
    return terms[0].is_var() ? terms[1].value : terms[0].value;
}

std::set<std::string> Program::idb() const {
    std::set<std::string> out;
    for (const auto& r : rules) out.insert(r.head.pred);
    return out;
}

std::vector<const Rule*> Program::rules_for(const std::string& pred) const {
    std::vector<const Rule*> out;
    for (const auto& r : rules)
        if (r.head.pred == pred) out.push_back(&r);
    return out;
}

std::set<std::string> rel_atom_vars(const RelAtom& a) {
    std::set<std::string> out;
    for (const auto& t : a.args)
        if (t.is_var()) out.insert(t.var);
    return out;
}

std::set<std::string> atom_vars(const Atom& a) {
    if (const auto* rel = as_rel(a)) return rel_atom_vars(*rel);
    std::set<std::string> out;
    for (const auto& t : as_builtin(a)->terms)
        if (t.is_var()) out.insert(t.var);
    return out;
}

std::set<std::string> rule_vars(const Rule& r) {
    std::set<std::string> out = rel_atom_vars(r.head);
    for (const auto& a : r.body) {
        auto vs = atom_vars(a);
        out.insert(vs.begin(), vs.end());
    }
    return out;
}

std::string to_string(const Term& t) {
    if (t.is_var()) return t.var;
    switch (t.value.kind()) {
        case Kind::Str: {
            std::string out = "\"";
            for (char c : t.value.text()) {
                if (c == '"' || c == '\\') out += '\\';
                out += c;
            }
            return out + "\"";
        }
        case Kind::Null: return "\"\"";
        default: return t.value.to_display();
    }
}

std::string to_string(const RelAtom& a) {
    std::string out = a.pred + "(";
    for (size_t i = 0; i < a.args.size(); ++i) {
        if (i > 0) out += ", ";
        out += to_string(a.args[i]);
    }
    return out + ")";
}

std::string to_string(const BuiltinAtom& b) {
    std::string out = to_string(b.terms[0]);
    for (size_t i = 0; i < b.ops.size(); ++i)
        out += " " + std::string(cmp_op_text(b.ops[i])) + " " + to_string(b.terms[i + 1]);
    return out;
}

std::string to_string(const Atom& a) {
    if (const auto* rel = as_rel(a)) return to_string(*rel);
    return to_string(*as_builtin(a));
}

std::string to_string(const Rule& r) {
    std::string out = to_string(r.head);
    if (!r.body.empty()) {
        out += " :- ";
        for (size_t i = 0; i < r.body.size(); ++i) {
            if (i > 0) out += ", ";
            out += to_string(r.body[i]);
        }
    }
    return out + ".";
}

std::string to_string(const Program& p) {
    std::string out;
    for (const auto& r : p.rules) out += to_string(r) + "\n";
    return out;
}

Rule normalize_rule(const Rule& r) {
    Rule out;
    out.head = r.head;
    for (const auto& a : r.body) {
        const auto* b = as_builtin(a);
        if (b && b->is_const_equality()) out.body.push_back(a);
    }
    for (const auto& a : r.body) {
        const auto* b = as_builtin(a);
        if (!(b && b->is_const_equality())) out.body.push_back(a);
    }
    return out;
}

Program normalize_program(const Program& p) {
    Program out = p;
    out.rules.clear();
    for (const auto& r : p.rules) out.rules.push_back(normalize_rule(r));
    return out;
}

}  // namespace dq
