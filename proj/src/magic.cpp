#include "dq/magic.hpp"

#include <algorithm>
#include <deque>

#include "dq/eval.hpp"
#include "dq/parser.hpp"

namespace dq {

namespace {

std::string adorned_name(const std::string& pred, const std::string& pattern) {
    return pred + "@" + pattern;
}

std::string magic_name(const std::string& adorned_pred) { return "magic_" + adorned_pred; }

std::string pattern_of(const std::string& adorned_pred) {
    auto at = adorned_pred.rfind('@');
    return adorned_pred.substr(at + 1);
}

std::vector<Term> bound_args(const RelAtom& atom, const std::string& pattern) {
    std::vector<Term> out;
    for (size_t i = 0; i < pattern.size(); ++i)
        if (pattern[i] == 'b') out.push_back(atom.args[i]);
    return out;
}

}  // namespace

AdornedProgram adorn(const Query& query,
                     const std::map<std::string, std::string>& external_bindings) {
    Program prog = normalize_program(query.program);
    auto idb = prog.idb();

    AdornedProgram out;
    out.external_bindings = external_bindings;

    // Query adornment: a position is bound iff it is a constant in every
    // rule head of the answer predicate.
    auto answer_rules = prog.rules_for(query.answer);
    if (answer_rules.empty())
        throw Error(ErrorCode::MissingViewDefinition, "answer predicate " + query.answer);
    std::string qa(answer_rules.front()->head.args.size(), 'b');
    for (const auto* r : answer_rules)
        for (size_t i = 0; i < r->head.args.size(); ++i)
            if (!r->head.args[i].is_const()) qa[i] = 'f';
    out.query_adornment = qa;
    out.answer = adorned_name(query.answer, qa);

    // (pred, pattern) pairs to process; rules are emitted in request order,
    // so the adorned program reads top-down from the query.
    std::deque<std::pair<std::string, std::string>> work;
    std::set<std::pair<std::string, std::string>> seen;

    auto request = [&](const std::string& pred, const std::string& pattern) {
        if (seen.emplace(pred, pattern).second) work.emplace_back(pred, pattern);
    };
    request(query.answer, qa);

    while (!work.empty()) {
        auto [pred, pattern] = work.front();
        work.pop_front();
        for (size_t ri = 0; ri < prog.rules.size(); ++ri) {
            const Rule& rule = prog.rules[ri];
            if (rule.head.pred != pred) continue;

            Rule copy = rule;
            copy.head.pred = adorned_name(pred, pattern);
            std::set<std::string> bound;
            for (size_t i = 0; i < pattern.size(); ++i)
                if (pattern[i] == 'b' && rule.head.args[i].is_var())
                    bound.insert(rule.head.args[i].var);

            for (auto& atom : copy.body) {
                if (auto* b = std::get_if<BuiltinAtom>(&atom)) {
                    if (b->is_const_equality()) bound.insert(b->const_eq_var().var);
                    continue;
                }
                auto& rel = std::get<RelAtom>(atom);
                bool intensional = idb.count(rel.pred) > 0;
                bool external = rel.is_external();
                if (intensional || external) {
                    std::string occ(rel.args.size(), 'f');
                    for (size_t i = 0; i < rel.args.size(); ++i)
                        if (rel.args[i].is_const() ||
                            (rel.args[i].is_var() && bound.count(rel.args[i].var)))
                            occ[i] = 'b';
                    if (external) {
                        auto decl = external_bindings.find(rel.pred);
                        if (decl == external_bindings.end())
                            throw Error(ErrorCode::BindingViolation,
                                        rel.pred + " has no declared binding pattern");
                        for (size_t i = 0; i < decl->second.size(); ++i)
                            if (decl->second[i] == 'b' && occ[i] != 'b')
                                throw Error(ErrorCode::BindingViolation,
                                            rel.pred + " requires position " +
                                                std::to_string(i + 1) +
                                                " bound, but it is free in '" + to_string(rule) +
                                                "'");
                    } else {
                        request(rel.pred, occ);
                        rel.pred = adorned_name(rel.pred, occ);
                    }
                }
                for (const auto& t : rel.args)
                    if (t.is_var()) bound.insert(t.var);
            }
            adorned_copies[ri].push_back(std::move(copy));
        }
    }

    for (auto& [ri, copies] : adorned_copies)
        for (auto& r : copies) out.program.rules.push_back(std::move(r));
    out.program.edb = prog.edb;
    out.program.externals = prog.externals;
    for (const auto& pr : seen) out.adorned_preds.insert(adorned_name(pr.first, pr.second));
    return out;
}

bool check_input_guarded(const Rule& rule,
                         const std::map<std::string, std::string>& external_bindings,
                         const std::set<std::string>& bound_head_vars) {
    std::set<std::string> available = bound_head_vars;
    for (const auto& atom : normalize_rule(rule).body) {
        if (const auto* b = as_builtin(atom)) {
            if (b->is_const_equality()) available.insert(b->const_eq_var().var);
            continue;
        }
        const auto& rel = std::get<RelAtom>(atom);
        if (!rel.is_external()) {
            for (const auto& t : rel.args)
                if (t.is_var()) available.insert(t.var);
            continue;
        }
        auto decl = external_bindings.find(rel.pred);
        if (decl == external_bindings.end())
            throw Error(ErrorCode::BindingViolation,
                        rel.pred + " has no declared binding pattern");
        const std::string& binding = decl->second;
        for (size_t i = 0; i < binding.size(); ++i) {
            const Term& t = rel.args[i];
            if (binding[i] == 'b') {
                if (t.is_var() && !available.count(t.var)) return false;
            }
        }
        // Output positions become available; inputs contribute nothing new.
        for (size_t i = 0; i < binding.size(); ++i)
            if (binding[i] == 'f' && rel.args[i].is_var()) available.insert(rel.args[i].var);
    }
    return true;
}

namespace {

struct ChainBuilder {
    const AdornedProgram& adorned;
    std::vector<Rule> rules;

    void add_seed_rules(const Rule& query_rule, std::vector<Rule>& seeds) {
        std::vector<Atom> prefix;
        for (const auto& atom : query_rule.body) {
            const auto* rel = as_rel(atom);
            if (rel && adorned.adorned_preds.count(rel->pred)) {
                Rule seed;
                seed.head.pred = magic_name(rel->pred);
                seed.head.args = bound_args(*rel, pattern_of(rel->pred));
                seed.body = prefix;
                seeds.push_back(seed);
            }
            prefix.push_back(atom);
        }
    }

    void add_chain(const Rule& rule, size_t rule_index) {
        const std::string pattern = pattern_of(rule.head.pred);

        std::vector<std::string> bound_order;
        std::set<std::string> bound;
        auto bind = [&](const Term& t) {
            if (t.is_var() && bound.insert(t.var).second) bound_order.push_back(t.var);
        };
        for (size_t i = 0; i < pattern.size(); ++i)
            if (pattern[i] == 'b') bind(rule.head.args[i]);

        // Variables each suffix still needs (head vars always count).
        std::vector<std::set<std::string>> needed_after(rule.body.size() + 1);
        needed_after[rule.body.size()] = rel_atom_vars(rule.head);
        for (size_t i = rule.body.size(); i-- > 0;) {
            needed_after[i] = needed_after[i + 1];
            auto vs = atom_vars(rule.body[i]);
            needed_after[i].insert(vs.begin(), vs.end());
        }

        RelAtom current;
        current.pred = magic_name(rule.head.pred);
        current.args = bound_args(rule.head, pattern);

        for (size_t i = 0; i < rule.body.size(); ++i) {
            const Atom& atom = rule.body[i];
            if (const auto* rel = as_rel(atom)) {
                if (adorned.adorned_preds.count(rel->pred)) {
                    Rule magic;
                    magic.head.pred = magic_name(rel->pred);
                    magic.head.args = bound_args(*rel, pattern_of(rel->pred));
                    magic.body = {current};
                    rules.push_back(std::move(magic));
                }
                for (const auto& t : rel->args) bind(t);
            } else if (const auto* b = as_builtin(atom); b && b->is_const_equality()) {
                bind(b->const_eq_var());
            }
            Rule sup;
            sup.head.pred = "sup_" + std::to_string(rule_index) + "_" + std::to_string(i + 1);
            for (const auto& v : bound_order)
                if (needed_after[i + 1].count(v)) sup.head.args.push_back(Term::make_var(v));
            sup.body = {current, atom};
            current = sup.head;
            rules.push_back(std::move(sup));
        }

        Rule head_rule;
        head_rule.head = rule.head;
        head_rule.body = {current};
        rules.push_back(std::move(head_rule));
    }
};

bool is_sup(const std::string& pred) { return pred.rfind("sup_", 0) == 0; }

/// Replaces a sole-body supplementary atom by its definition; locals of the
/// definition are renamed on collision.
void inline_definition(Rule& consumer, const Rule& def) {
    const RelAtom& use = std::get<RelAtom>(consumer.body.front());
    std::map<std::string, Term> subst;
    for (size_t i = 0; i < def.head.args.size(); ++i)
        subst[def.head.args[i].var] = use.args[i];

    auto consumer_vars = rule_vars(consumer);
    std::set<std::string> head_vars;
    for (const auto& t : def.head.args) head_vars.insert(t.var);
    for (const auto& v : rule_vars(def)) {
        if (head_vars.count(v)) continue;
        std::string name = v;
        for (int n = 2; consumer_vars.count(name); ++n) name = v + "_" + std::to_string(n);
        consumer_vars.insert(name);
        subst[v] = Term::make_var(name);
    }
    auto apply_term = [&](Term t) {
        if (t.is_var()) {
            auto it = subst.find(t.var);
            if (it != subst.end()) return it->second;
        }
        return t;
    };
    std::vector<Atom> new_body;
    for (const auto& a : def.body) {
        if (const auto* rel = as_rel(a)) {
            RelAtom copy = *rel;
            for (auto& t : copy.args) t = apply_term(t);
            new_body.push_back(copy);
        } else {
            BuiltinAtom copy = *as_builtin(a);
            for (auto& t : copy.terms) t = apply_term(t);
            new_body.push_back(copy);
        }
    }
    consumer.body.erase(consumer.body.begin());
    consumer.body.insert(consumer.body.begin(), new_body.begin(), new_body.end());
}

void simplify(std::vector<Rule>& rules) {
    bool changed = true;
    while (changed) {
        changed = false;
        std::map<std::string, std::vector<size_t>> defs;
        for (size_t i = 0; i < rules.size(); ++i)
            if (is_sup(rules[i].head.pred)) defs[rules[i].head.pred].push_back(i);

        for (auto& rule : rules) {
            if (rule.body.size() != 1) continue;
            const auto* rel = as_rel(rule.body.front());
            if (!rel || !is_sup(rel->pred) || rel->pred == rule.head.pred) continue;
            auto it = defs.find(rel->pred);
            if (it == defs.end() || it->second.size() != 1) continue;
            inline_definition(rule, rules[it->second.front()]);
            changed = true;
        }

        // Drop supplementary definitions nothing references anymore.
        std::set<std::string> referenced;
        for (const auto& r : rules)
            for (const auto& a : r.body)
                if (const auto* rel = as_rel(a)) referenced.insert(rel->pred);
        size_t before = rules.size();
        rules.erase(std::remove_if(rules.begin(), rules.end(),
                                   [&](const Rule& r) {
                                       return is_sup(r.head.pred) && !referenced.count(r.head.pred);
                                   }),
                    rules.end());
        changed = changed || rules.size() != before;
    }
}

}  // namespace

MagicProgram magic_rewrite(const AdornedProgram& adorned) {
    MagicProgram out;
    out.answer = adorned.answer;
    out.external_bindings = adorned.external_bindings;

    ChainBuilder builder{adorned, {}};
    std::vector<Rule> query_rules;
    size_t rule_index = 0;
    for (const auto& rule : adorned.program.rules) {
        if (rule.head.pred == adorned.answer) {
            builder.add_seed_rules(rule, out.seeds);
            query_rules.push_back(rule);
        } else {
            builder.add_chain(rule, ++rule_index);
        }
    }

    std::vector<Rule> all;
    for (const auto& s : out.seeds) all.push_back(s);
    for (const auto& r : builder.rules) all.push_back(r);
    for (const auto& q : query_rules) all.push_back(q);
    simplify(all);

    // Seeds may have been rewritten by the simplifier only if they were
    // sups, which they are not; refresh the stored copies anyway.
    out.seeds.clear();
    for (const auto& r : all)
        if (r.head.pred.rfind("magic_", 0) == 0) {
            bool from_query = true;
            for (const auto& a : r.body)
                if (const auto* rel = as_rel(a); rel && (is_sup(rel->pred) ||
                                                         rel->pred.rfind("magic_", 0) == 0))
                    from_query = false;
            if (from_query) out.seeds.push_back(r);
        }

    out.program.rules = std::move(all);
    auto defined = out.program.idb();
    for (const auto& r : out.program.rules)
        for (const auto& a : r.body)
            if (const auto* rel = as_rel(a)) {
                if (rel->is_external())
                    out.program.externals.insert(rel->pred);
                else if (!defined.count(rel->pred))
                    out.program.edb.insert(rel->pred);
            }
    return out;
}

Instance evaluate_magic(const MagicProgram& magic, const Instance& edb,
                        ExternalRegistry* registry) {
    if (magic.program.externals.empty()) return evaluate(magic.program, edb);
    if (!registry)
        throw Error(ErrorCode::ResolverFailure,
                    "magic program mentions external predicates; a registry is required");
    return evaluate_with_externals(magic.program, edb, *registry);
}

namespace {

std::string render_program(const Program& prog, const std::map<std::string, std::string>& ext) {
    Program copy = prog;
    for (auto& r : copy.rules)
        for (auto& a : r.body)
            if (auto* rel = std::get_if<RelAtom>(&a)) {
                auto it = ext.find(rel->pred);
                if (it != ext.end()) rel->pred = adorned_name(rel->pred, it->second);
            }
    return to_string(copy);
}

}  // namespace

std::string render(const AdornedProgram& p) { return render_program(p.program, p.external_bindings); }

std::string render(const MagicProgram& p) { return render_program(p.program, p.external_bindings); }

}  // namespace dq
