#pragma once

// Deterministic random generators for the property suites. Everything is
// seeded; a failing case reproduces from its seed alone.

#include <random>
#include <string>
#include <vector>

#include "dq/context.hpp"
#include "dq/lci.hpp"
#include "dq/parser.hpp"
#include "dq/value.hpp"

namespace dq::testing {

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(uint64_t seed) : gen(seed) {}
    size_t below(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(gen); }
    bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(gen) < p; }
    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[below(v.size())];
    }
};

struct RandomProgram {
    Program program;
    Query query;
    Instance edb;
};

/// Non-recursive program over ≤4 constants, ≤4 predicates and ≤5 rules, no
/// externals. Bodies are safe by construction and built-ins appear only
/// after their variables are bound.
inline RandomProgram random_program(uint64_t seed) {
    Rng rng(seed);
    std::vector<Value> constants;
    for (int i = 1; i <= 4; ++i) constants.push_back(Value::num(i));
    std::vector<std::string> vars = {"x", "y", "z", "w"};

    RandomProgram out;
    // Extensional layer: one or two relations with random small extents.
    size_t n_edb = 1 + rng.below(2);
    std::vector<std::pair<std::string, size_t>> edb_preds;
    for (size_t i = 0; i < n_edb; ++i) {
        std::string name = "e" + std::to_string(i + 1);
        size_t arity = 1 + rng.below(2);
        edb_preds.emplace_back(name, arity);
        RelationSignature sig;
        sig.name = name;
        for (size_t a = 0; a < arity; ++a)
            sig.attributes.push_back({"c" + std::to_string(a + 1), AttrKind::Str});
        Relation& rel = out.edb.add_relation(sig);
        size_t rows = rng.below(7);
        for (size_t r = 0; r < rows; ++r) {
            Tuple t;
            for (size_t a = 0; a < arity; ++a) t.push_back(rng.pick(constants));
            rel.insert(std::move(t));
        }
        out.program.edb.insert(name);
    }

    // Intensional layer: later predicates may use earlier ones, which keeps
    // the dependency graph acyclic.
    std::vector<std::pair<std::string, size_t>> defined;
    size_t budget = 4;  // rules left for intensional predicates (query adds one)
    size_t n_idb = 1 + rng.below(2);
    for (size_t k = 0; k < n_idb && budget > 0; ++k) {
        std::string name = "p" + std::to_string(k + 1);
        size_t arity = 1 + rng.below(2);
        size_t n_rules = 1 + (budget > 1 ? rng.below(2) : 0);
        for (size_t r = 0; r < n_rules && budget > 0; ++r, --budget) {
            Rule rule;
            rule.head.pred = name;
            std::vector<std::string> bound;
            size_t n_atoms = 1 + rng.below(2);
            for (size_t a = 0; a < n_atoms; ++a) {
                bool use_defined = !defined.empty() && rng.chance(0.4);
                auto [pred, p_arity] =
                    use_defined ? rng.pick(defined) : rng.pick(edb_preds);
                RelAtom atom;
                atom.pred = pred;
                for (size_t i = 0; i < p_arity; ++i) {
                    if (rng.chance(0.15)) {
                        atom.args.push_back(Term::make_const(rng.pick(constants)));
                    } else {
                        const std::string& v = rng.pick(vars);
                        atom.args.push_back(Term::make_var(v));
                        bound.push_back(v);
                    }
                }
                rule.body.push_back(atom);
            }
            if (bound.empty()) {
                // Ground the rule through a constant equality.
                rule.body.push_back(
                    BuiltinAtom::make(Term::make_var("x"), CmpOp::Eq,
                                      Term::make_const(rng.pick(constants))));
                bound.push_back("x");
            }
            if (rng.chance(0.35)) {
                CmpOp ops[] = {CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge, CmpOp::Ne};
                rule.body.push_back(BuiltinAtom::make(Term::make_var(rng.pick(bound)),
                                                      ops[rng.below(5)],
                                                      Term::make_const(rng.pick(constants))));
            }
            for (size_t i = 0; i < arity; ++i)
                rule.head.args.push_back(Term::make_var(rng.pick(bound)));
            out.program.rules.push_back(std::move(rule));
        }
        defined.emplace_back(name, arity);
    }

    // The query selects over the last defined predicate.
    auto [qpred, q_arity] = defined.back();
    Rule qrule;
    qrule.head.pred = "q";
    RelAtom atom;
    atom.pred = qpred;
    std::vector<std::string> bound;
    for (size_t i = 0; i < q_arity; ++i) {
        const std::string& v = vars[i];
        atom.args.push_back(Term::make_var(v));
        bound.push_back(v);
    }
    qrule.body.push_back(atom);
    if (rng.chance(0.6))
        qrule.body.push_back(BuiltinAtom::make(Term::make_var(rng.pick(bound)), CmpOp::Eq,
                                               Term::make_const(rng.pick(constants))));
    for (const auto& v : bound) qrule.head.args.push_back(Term::make_var(v));
    out.program.rules.push_back(std::move(qrule));

    check_program(out.program);
    out.query.answer = "q";
    out.query.program = out.program;
    return out;
}

/// Random contents for the ward system's contextual relations (used by the
/// rewrite-equivalence and monotonicity properties).
inline Instance random_ward_context(uint64_t seed) {
    Rng rng(seed);
    std::vector<Value> patients = {Value::str("Tom Waits"), Value::str("Lou Reed")};
    std::vector<Value> nurses = {Value::str("Susan"), Value::str("Cathy"), Value::str("Joan"),
                                 Value::str("Helen")};
    std::vector<Value> dates = {Value::date("Sep/5"), Value::date("Sep/6")};
    std::vector<Value> shifts = {Value::str("morning"), Value::str("afternoon"),
                                 Value::str("night")};
    std::vector<Value> instrs = {Value::str("therm"), Value::str("bpm")};
    std::vector<Value> types = {Value::str("oral"), Value::str("tymp"), Value::str("arm")};

    Instance out;
    auto sig = [](std::string name, std::vector<AttributeSignature> attrs) {
        RelationSignature s;
        s.name = std::move(name);
        s.attributes = std::move(attrs);
        return s;
    };
    Relation& m = out.add_relation(sig("M", {{"patient", AttrKind::Str},
                                             {"value", AttrKind::Str},
                                             {"time", AttrKind::Time},
                                             {"date", AttrKind::Date},
                                             {"instr", AttrKind::Str}}));
    size_t rows = 2 + rng.below(6);
    for (size_t i = 0; i < rows; ++i)
        m.insert({rng.pick(patients), Value::num(Decimal::parse("37.5").value()),
                  Value::time(600 + static_cast<int>(rng.below(10)) * 15), rng.pick(dates),
                  rng.pick(instrs)});
    Relation& s_rel = out.add_relation(
        sig("S", {{"date", AttrKind::Date}, {"shift", AttrKind::Str}, {"nurse", AttrKind::Str}}));
    rows = 2 + rng.below(5);
    for (size_t i = 0; i < rows; ++i)
        s_rel.insert({rng.pick(dates), rng.pick(shifts), rng.pick(nurses)});
    Relation& c = out.add_relation(sig("C", {{"name", AttrKind::Str}, {"year", AttrKind::Num}}));
    rows = rng.below(4);
    for (size_t i = 0; i < rows; ++i)
        c.insert({rng.pick(nurses), Value::num(1995 + static_cast<int64_t>(rng.below(15)))});
    Relation& inst = out.add_relation(sig("I", {{"nurse", AttrKind::Str},
                                                {"date", AttrKind::Date},
                                                {"instr", AttrKind::Str},
                                                {"type", AttrKind::Str}}));
    rows = 2 + rng.below(5);
    for (size_t i = 0; i < rows; ++i)
        inst.insert({rng.pick(nurses), rng.pick(dates), rng.pick(instrs), rng.pick(types)});
    return out;
}

struct RandomSpecCase {
    ContextualSystem system;
    Instance d;
};

/// Small contextual system with an open nickname, one context relation, one
/// quality predicate and (sometimes) an invertible footprint. Active domain
/// is three constants; free-cell count stays enumerable.
inline RandomSpecCase random_lci_case(uint64_t seed, bool copy_mapping = false) {
    Rng rng(seed);
    std::vector<Value> domain = {Value::str("a"), Value::str("b"), Value::str("c")};

    RandomSpecCase out;
    ContextualSystem& sys = out.system;
    size_t r_arity = 1 + rng.below(2);

    RelationSignature r_sig;
    r_sig.name = "R";
    for (size_t i = 0; i < r_arity; ++i)
        r_sig.attributes.push_back({"a" + std::to_string(i + 1), AttrKind::Str});
    sys.sourceSchema.push_back(r_sig);

    RelationSignature nick = r_sig;
    nick.name = "R_C";
    sys.contextSchema.push_back(nick);
    if (copy_mapping) {
        sys.copies.push_back({"R", "R_C"});
        sys.closedContextRelations.insert("R_C");
    } else {
        sys.opens.push_back({"R", "R_C"});
    }

    RelationSignature ctx;
    ctx.name = "Ctx";
    ctx.attributes = {{"a1", AttrKind::Str}};
    sys.contextSchema.push_back(ctx);
    bool ctx_closed = rng.chance(0.5);
    if (ctx_closed) sys.closedContextRelations.insert("Ctx");

    std::string qp = "Good";
    sys.qualityPredicates.insert(qp);
    {
        // Good(x) :- Ctx(x).
        Rule cqp;
        cqp.head.pred = qp;
        cqp.head.args = {Term::make_var("x")};
        RelAtom body;
        body.pred = "Ctx";
        body.args = {Term::make_var("x")};
        cqp.body.push_back(body);
        sys.cqps.push_back({cqp});
    }
    {
        // R_P(x̄) :- R_C(x̄), Good(x1).
        Rule qv;
        qv.head.pred = "R_P";
        RelAtom nick_atom;
        nick_atom.pred = "R_C";
        for (size_t i = 0; i < r_arity; ++i) {
            qv.head.args.push_back(Term::make_var("x" + std::to_string(i + 1)));
            nick_atom.args.push_back(Term::make_var("x" + std::to_string(i + 1)));
        }
        qv.body.push_back(nick_atom);
        RelAtom good;
        good.pred = qp;
        good.args = {Term::make_var("x1")};
        qv.body.push_back(good);
        sys.qualityViews.push_back({"R", qv});
    }
    if (!copy_mapping && rng.chance(0.4)) {
        // Footprint through a second base relation: R(x̄) :- K(x̄).
        RelationSignature k = r_sig;
        k.name = "K";
        sys.contextSchema.push_back(k);
        Rule fp;
        fp.head.pred = "R";
        RelAtom body;
        body.pred = "K";
        for (size_t i = 0; i < r_arity; ++i) {
            fp.head.args.push_back(Term::make_var("x" + std::to_string(i + 1)));
            body.args.push_back(Term::make_var("x" + std::to_string(i + 1)));
        }
        fp.body.push_back(body);
        sys.footprints.push_back({fp});
    }

    // Partial contextual data and the instance under assessment.
    for (const auto& sig : sys.contextSchema) sys.contextualData.add_relation(sig);
    size_t ctx_rows = rng.below(3);
    for (size_t i = 0; i < ctx_rows; ++i)
        sys.contextualData.relation("Ctx").insert({rng.pick(domain)});

    out.d.add_relation(r_sig);
    size_t d_rows = 1 + rng.below(2);
    for (size_t i = 0; i < d_rows; ++i) {
        Tuple t;
        for (size_t a = 0; a < r_arity; ++a) t.push_back(rng.pick(domain));
        out.d.relation("R").insert(std::move(t));
    }
    sys.validate();
    return out;
}

/// Random conjunctive query over the single source relation R of
/// random_lci_case systems.
inline Query random_source_query(uint64_t seed, size_t r_arity) {
    Rng rng(seed);
    std::vector<Value> domain = {Value::str("a"), Value::str("b"), Value::str("c")};
    Query q;
    q.answer = "Ans";
    Rule rule;
    rule.head.pred = "Ans";
    RelAtom atom;
    atom.pred = "R";
    std::vector<std::string> bound;
    for (size_t i = 0; i < r_arity; ++i) {
        if (rng.chance(0.25)) {
            atom.args.push_back(Term::make_const(rng.pick(domain)));
        } else {
            std::string v = "x" + std::to_string(i + 1);
            atom.args.push_back(Term::make_var(v));
            bound.push_back(v);
        }
    }
    rule.body.push_back(atom);
    if (bound.empty()) {
        atom.args.clear();
        rule.body.clear();
        for (size_t i = 0; i < r_arity; ++i) {
            std::string v = "x" + std::to_string(i + 1);
            atom.args.push_back(Term::make_var(v));
            bound.push_back(v);
        }
        rule.body.push_back(atom);
    }
    for (const auto& v : bound) rule.head.args.push_back(Term::make_var(v));
    q.program.rules.push_back(rule);
    q.program.edb.insert("R");
    return q;
}

}  // namespace dq::testing
