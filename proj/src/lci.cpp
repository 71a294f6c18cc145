#include "dq/lci.hpp"

#include <algorithm>

#include "dq/eval.hpp"
#include "dq/parser.hpp"
#include "dq/qua.hpp"

namespace dq {

LciSpec make_lci_spec(const ContextualSystem& system) {
    LciSpec spec;
    spec.system = system;
    for (const auto& m : system.opens) spec.openNicknames.insert(m.nickname);
    spec.partialInstance = system.contextualData;
    return spec;
}

std::vector<Rule> inverse_rules(const std::vector<FootprintMapping>& footprints,
                                const ContextualSystem& system) {
    std::vector<Rule> out;
    for (const auto& fp : footprints) {
        const Rule& view = fp.view;
        auto nickname = system.nickname_of(view.head.pred);
        if (!nickname)
            throw Error(ErrorCode::InvalidSystem,
                        "footprint source " + view.head.pred + " has no nickname mapping");

        std::set<std::string> head_vars = rel_atom_vars(view.head);
        std::set<std::string> forced;  // constant-forced by φ equalities
        std::vector<Atom> builtins;
        for (const auto& a : view.body) {
            const auto* b = as_builtin(a);
            if (!b) continue;
            builtins.push_back(a);
            if (b->is_const_equality()) forced.insert(b->const_eq_var().var);
        }
        for (const auto& a : view.body) {
            const auto* rel = as_rel(a);
            if (!rel) continue;
            for (const auto& t : rel->args) {
                if (t.is_const()) continue;
                if (!head_vars.count(t.var) && !forced.count(t.var))
                    throw Error(ErrorCode::UninvertibleView,
                                "variable " + t.var + " of " + rel->pred + " in footprint '" +
                                    to_string(view) +
                                    "' is neither exported by the head nor forced to a constant");
            }
            Rule inv;
            inv.head = *rel;
            RelAtom src;
            src.pred = *nickname;
            src.args = view.head.args;
            inv.body.push_back(src);
            for (const auto& b : builtins) inv.body.push_back(b);
            out.push_back(std::move(inv));
        }
    }
    return out;
}

namespace {

Program closure_program(const LciSpec& spec) {
    Program prog;
    prog.rules = inverse_rules(spec.system.footprints, spec.system);
    for (const auto& r : spec.system.derivation_rules()) prog.rules.push_back(r);
    auto defined = prog.idb();
    for (const auto& r : prog.rules)
        for (const auto& a : r.body)
            if (const auto* rel = as_rel(a)) {
                if (rel->is_external())
                    prog.externals.insert(rel->pred);
                else if (!defined.count(rel->pred))
                    prog.edb.insert(rel->pred);
            }
    return prog;
}

Instance evaluate_closure(const Program& prog, const Instance& base, const LciSpec& spec,
                          ExternalRegistry* registry) {
    if (prog.externals.empty()) return evaluate(prog, base);
    if (registry) return evaluate_with_externals(prog, base, *registry);
    ExternalRegistry local = spec.system.make_registry();
    return evaluate_with_externals(prog, base, local);
}

Instance lifted_base(const LciSpec& spec, const Instance& d) {
    ContextualSystem sys = spec.system;
    sys.contextualData = spec.partialInstance;
    return lift(sys, d);
}

std::string instance_key(const Instance& i) {
    std::string out;
    for (const auto& [name, rel] : i.relations()) {
        out += name + "{";
        for (const auto& t : rel) out += tuple_to_display(t) + ";";
        out += "}";
    }
    return out;
}

}  // namespace

Instance minimal_lci(const LciSpec& spec, const Instance& d, ExternalRegistry* registry) {
    Instance base = lifted_base(spec, d);
    return evaluate_closure(closure_program(spec), base, spec, registry);
}

std::set<Tuple> quality_answers_certain(const Query& query, const LciSpec& spec, const Instance& d,
                                        ExternalRegistry* registry) {
    require_source_ucq(query, spec.system, ErrorCode::NonMonotoneQuery);
    Instance i_min = minimal_lci(spec, d, registry);
    Query substituted = substitute_quality_nicknames(query, spec.system);
    Instance result = evaluate(substituted.program, i_min);
    const Relation* ans = result.find(substituted.answer);
    return ans ? ans->tuples() : std::set<Tuple>{};
}

std::vector<Instance> enumerate_lcis_bounded(const LciSpec& spec, const Instance& d,
                                             size_t domain_bound, ExternalRegistry* registry) {
    if (domain_bound > 12)
        throw Error(ErrorCode::DomainTooLarge, "domain bound capped at 12, got " +
                                                   std::to_string(domain_bound));

    // Active domain: values in d, in I⁻, and constants in the system rules.
    std::set<Value> domain;
    auto scoop_instance = [&](const Instance& inst) {
        for (const auto& [_, rel] : inst.relations())
            for (const auto& t : rel)
                for (const auto& v : t)
                    if (!v.is_null()) domain.insert(v);
    };
    scoop_instance(d);
    scoop_instance(spec.partialInstance);
    auto scoop_rule = [&](const Rule& r) {
        auto scoop_atom = [&](const Atom& a) {
            if (const auto* rel = as_rel(a)) {
                for (const auto& t : rel->args)
                    if (t.is_const() && !t.value.is_null()) domain.insert(t.value);
            } else {
                for (const auto& t : as_builtin(a)->terms)
                    if (t.is_const() && !t.value.is_null()) domain.insert(t.value);
            }
        };
        for (const auto& t : r.head.args)
            if (t.is_const() && !t.value.is_null()) domain.insert(t.value);
        for (const auto& a : r.body) scoop_atom(a);
    };
    for (const auto& r : spec.system.derivation_rules()) scoop_rule(r);
    for (const auto& fp : spec.system.footprints) scoop_rule(fp.view);
    if (domain.size() > domain_bound)
        throw Error(ErrorCode::DomainTooLarge,
                    "active domain has " + std::to_string(domain.size()) + " values, bound is " +
                        std::to_string(domain_bound));

    Instance mandated = lifted_base(spec, d);

    // Open base relations take any extension between their mandated tuples
    // and the full bounded space; everything else is pinned.
    std::vector<std::pair<std::string, Tuple>> free_cells;
    for (const auto& sig : spec.system.contextSchema) {
        bool open = spec.openNicknames.count(sig.name) ||
                    !spec.system.closedContextRelations.count(sig.name);
        if (!open) continue;
        std::vector<Tuple> space = {Tuple{}};
        for (size_t i = 0; i < sig.arity(); ++i) {
            std::vector<Tuple> next;
            for (const auto& partial : space)
                for (const auto& v : domain) {
                    Tuple t = partial;
                    t.push_back(v);
                    next.push_back(std::move(t));
                }
            space = std::move(next);
        }
        const Relation& have = mandated.relation(sig.name);
        for (auto& t : space) {
            bool fits = true;
            for (size_t i = 0; i < t.size() && fits; ++i)
                fits = sig.attributes[i].kind == AttrKind::Str ||
                       (sig.attributes[i].kind == AttrKind::Num && t[i].kind() == Kind::Num) ||
                       (sig.attributes[i].kind == AttrKind::Time && t[i].kind() == Kind::Time) ||
                       (sig.attributes[i].kind == AttrKind::Date && t[i].kind() == Kind::Date);
            if (fits && !have.contains(t)) free_cells.emplace_back(sig.name, std::move(t));
        }
    }
    if (free_cells.size() > 20)
        throw Error(ErrorCode::DomainTooLarge,
                    "candidate space too large: " + std::to_string(free_cells.size()) +
                        " free cells (max 20)");

    std::vector<Rule> inv = inverse_rules(spec.system.footprints, spec.system);
    Program inv_prog;
    inv_prog.rules = inv;
    for (const auto& r : inv)
        for (const auto& a : r.body)
            if (const auto* rel = as_rel(a)) inv_prog.edb.insert(rel->pred);

    Program full = closure_program(spec);
    // The closure program re-derives into base relations; candidate bases are
    // already final, so here the rules act as definitions for derived
    // predicates and as checks for the bases.
    std::vector<std::pair<std::string, Instance>> found;
    for (uint64_t mask = 0; mask < (uint64_t{1} << free_cells.size()); ++mask) {
        Instance candidate = mandated;
        for (size_t i = 0; i < free_cells.size(); ++i)
            if (mask & (uint64_t{1} << i))
                candidate.insert(free_cells[i].first, free_cells[i].second);

        // Closure under inverse rules: the footprints may not demand tuples
        // the candidate lacks.
        bool legal = true;
        if (!inv.empty()) {
            Instance derived = evaluate(inv_prog, candidate);
            for (const auto& r : inv) {
                const Relation& want = derived.relation(r.head.pred);
                const Relation& got = candidate.relation(r.head.pred);
                for (const auto& t : want)
                    if (!got.contains(t)) {
                        legal = false;
                        break;
                    }
                if (!legal) break;
            }
        }
        if (!legal) continue;

        Instance closed = evaluate_closure(full, candidate, spec, registry);
        // Re-derivation must not grow a base relation either (closed bases
        // reject any rule-forced extension beyond their pinned contents).
        for (const auto& sig : spec.system.contextSchema) {
            if (closed.relation(sig.name).size() != candidate.relation(sig.name).size()) {
                legal = false;
                break;
            }
        }
        if (!legal) continue;
        found.emplace_back(instance_key(closed), std::move(closed));
    }
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Instance> out;
    out.reserve(found.size());
    for (auto& [_, inst] : found) out.push_back(std::move(inst));
    return out;
}

}  // namespace dq
