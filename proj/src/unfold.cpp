#include "dq/unfold.hpp"

#include <deque>

#include "dq/parser.hpp"

namespace dq {

namespace {

/// Triangular substitution with chain resolution.
struct Subst {
    std::map<std::string, Term> map;

    Term walk(Term t) const {
        while (t.is_var()) {
            auto it = map.find(t.var);
            if (it == map.end()) break;
            t = it->second;
        }
        return t;
    }

    bool unify(const Term& a0, const Term& b0) {
        Term a = walk(a0), b = walk(b0);
        if (a.is_var() && b.is_var() && a.var == b.var) return true;
        if (a.is_var()) {
            map[a.var] = b;
            return true;
        }
        if (b.is_var()) {
            map[b.var] = a;
            return true;
        }
        return a.value == b.value;
    }

    Term apply(const Term& t) const { return walk(t); }

    RelAtom apply(const RelAtom& a) const {
        RelAtom out = a;
        for (auto& t : out.args) t = apply(t);
        return out;
    }

    Atom apply(const Atom& a) const {
        if (const auto* rel = as_rel(a)) return apply(*rel);
        BuiltinAtom out = *as_builtin(a);
        for (auto& t : out.terms) t = apply(t);
        return out;
    }
};

constexpr char kTempMarker = '$';

// "$<original-name>$<n>" — internal fresh names, prettified afterwards.
std::string temp_var(const std::string& original, int n) {
    return std::string(1, kTempMarker) + original + kTempMarker + std::to_string(n);
}

std::string temp_original(const std::string& name) {
    auto second = name.rfind(kTempMarker);
    return name.substr(1, second - 1);
}

bool is_temp(const std::string& name) { return !name.empty() && name[0] == kTempMarker; }

Rule rename_view_rule(const Rule& r, int& counter) {
    std::map<std::string, std::string> renames;
    auto fix = [&](Term& t) {
        if (!t.is_var()) return;
        auto [it, fresh] = renames.try_emplace(t.var, "");
        if (fresh) it->second = temp_var(t.var, counter++);
        t.var = it->second;
    };
    Rule out = r;
    for (auto& t : out.head.args) fix(t);
    for (auto& a : out.body) {
        if (auto* rel = std::get_if<RelAtom>(&a)) {
            for (auto& t : rel->args) fix(t);
        } else {
            for (auto& t : std::get<BuiltinAtom>(a).terms) fix(t);
        }
    }
    return out;
}

/// Gives leftover temp variables readable names: the view's original name
/// when free, otherwise name_2, name_3, ...
Rule prettify(const Rule& r) {
    std::set<std::string> used;
    for (const auto& v : rule_vars(r))
        if (!is_temp(v)) used.insert(v);
    std::map<std::string, std::string> renames;
    auto fix = [&](Term& t) {
        if (!t.is_var() || !is_temp(t.var)) return;
        auto it = renames.find(t.var);
        if (it == renames.end()) {
            std::string base = temp_original(t.var);
            std::string name = base;
            for (int n = 2; used.count(name); ++n) name = base + "_" + std::to_string(n);
            used.insert(name);
            it = renames.emplace(t.var, name).first;
        }
        t.var = it->second;
    };
    Rule out = r;
    for (auto& t : out.head.args) fix(t);
    for (auto& a : out.body) {
        if (auto* rel = std::get_if<RelAtom>(&a)) {
            for (auto& t : rel->args) fix(t);
        } else {
            for (auto& t : std::get<BuiltinAtom>(a).terms) fix(t);
        }
    }
    return out;
}

}  // namespace

Query unfold(const Query& query, const std::vector<Rule>& views,
             const std::optional<std::set<std::string>>& targets_opt) {
    std::map<std::string, std::vector<const Rule*>> defs;
    for (const auto& v : views) defs[v.head.pred].push_back(&v);
    std::set<std::string> targets;
    if (targets_opt) {
        targets = *targets_opt;
    } else {
        for (const auto& [pred, _] : defs) targets.insert(pred);
    }

    int counter = 0;
    std::deque<Rule> work(query.program.rules.begin(), query.program.rules.end());
    std::vector<Rule> done;
    size_t expansions = 0;
    while (!work.empty()) {
        if (++expansions > 100000)
            throw Error(ErrorCode::RecursionDetected, "unfolding does not terminate");
        Rule rule = std::move(work.front());
        work.pop_front();

        size_t at = rule.body.size();
        for (size_t i = 0; i < rule.body.size(); ++i) {
            const auto* rel = as_rel(rule.body[i]);
            if (rel && targets.count(rel->pred)) {
                at = i;
                break;
            }
        }
        if (at == rule.body.size()) {
            done.push_back(prettify(rule));
            continue;
        }
        const RelAtom use = *as_rel(rule.body[at]);
        auto it = defs.find(use.pred);
        if (it == defs.end() || it->second.empty())
            throw Error(ErrorCode::MissingViewDefinition, use.pred);
        for (const Rule* def : it->second) {
            Rule view = rename_view_rule(*def, counter);
            if (view.head.args.size() != use.args.size())
                throw Error(ErrorCode::SchemaMismatch,
                            use.pred + ": view head arity " + std::to_string(view.head.args.size()) +
                                " vs atom arity " + std::to_string(use.args.size()));
            Subst s;
            bool ok = true;
            for (size_t i = 0; ok && i < use.args.size(); ++i)
                ok = s.unify(view.head.args[i], use.args[i]);
            if (!ok) continue;  // constants clash: this view rule contributes nothing

            Rule next;
            next.head = s.apply(rule.head);
            for (size_t i = 0; i < at; ++i) next.body.push_back(s.apply(rule.body[i]));
            for (const auto& a : view.body) next.body.push_back(s.apply(a));
            for (size_t i = at + 1; i < rule.body.size(); ++i)
                next.body.push_back(s.apply(rule.body[i]));
            work.push_back(std::move(next));
        }
    }

    Query out;
    out.answer = query.answer;
    out.program.rules = std::move(done);
    auto defined = out.program.idb();
    for (const auto& r : out.program.rules)
        for (const auto& a : r.body)
            if (const auto* rel = as_rel(a)) {
                if (rel->is_external())
                    out.program.externals.insert(rel->pred);
                else if (!defined.count(rel->pred))
                    out.program.edb.insert(rel->pred);
            }
    check_program(out.program);
    return out;
}

}  // namespace dq
