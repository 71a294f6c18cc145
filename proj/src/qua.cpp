#include "dq/qua.hpp"

#include "dq/eval.hpp"
#include "dq/parser.hpp"
#include "dq/unfold.hpp"

namespace dq {

void require_source_ucq(const Query& query, const ContextualSystem& system, ErrorCode on_failure) {
    auto own_heads = query.program.idb();
    for (const auto& r : query.program.rules) {
        for (const auto& a : r.body) {
            const auto* rel = as_rel(a);
            if (!rel) continue;
            if (rel->is_external() ||
                (!system.source_signature(rel->pred) && !own_heads.count(rel->pred)))
                throw Error(on_failure,
                            "query atom " + rel->pred +
                                " is not a source-schema predicate; the rewriting handles "
                                "unions of conjunctive queries over the source schema");
        }
    }
}

Query substitute_quality_nicknames(const Query& query, const ContextualSystem& system) {
    Query out = query;
    for (auto& r : out.program.rules) {
        for (auto& a : r.body) {
            auto* rel = std::get_if<RelAtom>(&a);
            if (!rel || !system.source_signature(rel->pred)) continue;
            auto qn = system.quality_nickname_of(rel->pred);
            if (!qn)
                throw Error(ErrorCode::MissingViewDefinition,
                            "no quality view defines a quality nickname for " + rel->pred);
            rel->pred = *qn;
        }
    }
    out.program.edb.clear();
    auto defined = out.program.idb();
    for (const auto& r : out.program.rules)
        for (const auto& a : r.body)
            if (const auto* rel = as_rel(a); rel && !rel->is_external() && !defined.count(rel->pred))
                out.program.edb.insert(rel->pred);
    return out;
}

std::pair<Query, RewriteTrace> qua_rewrite(const Query& query, const ContextualSystem& system,
                                           std::optional<bool> unfold_cqps) {
    require_source_ucq(query, system, ErrorCode::NonConjunctiveQuery);

    RewriteTrace trace;
    Query q1 = substitute_quality_nicknames(query, system);
    trace.stages.push_back({"nickname-substitution", q1});

    std::set<std::string> quality_names;
    for (const auto& qv : system.qualityViews) quality_names.insert(qv.rule.head.pred);
    Query q2 = unfold(q1, system.quality_rules(), quality_names);
    trace.stages.push_back({"view-unfold", q2});

    bool run_stage3 = unfold_cqps.value_or(true);
    if (run_stage3) {
        std::set<std::string> targets = system.context_defined_preds();
        for (const auto& c : system.cqps) {
            const std::string& name = c.rule.head.pred;
            // Under the default policy a quality predicate that reaches an
            // external source stays folded; the evaluator drives the calls.
            if (unfold_cqps.has_value() || !system.cqp_uses_external(name)) targets.insert(name);
        }
        std::vector<Rule> defs = system.contextRules;
        for (const auto& c : system.cqps) defs.push_back(c.rule);
        Query q3 = unfold(q2, defs, targets);
        trace.stages.push_back({"cqp-unfold", q3});
    }
    return {trace.stages.back().query, trace};
}

std::set<Tuple> answer_with_context(const Query& query, const ContextualSystem& system,
                                    const Instance& d, ExternalRegistry* registry,
                                    CallLog* log_out) {
    auto [rewritten, trace] = qua_rewrite(query, system);

    // Definitions for predicates the rewritten query still mentions (folded
    // quality predicates and the auxiliaries they depend on).
    std::vector<Rule> pool = system.contextRules;
    for (const auto& c : system.cqps) pool.push_back(c.rule);
    Program prog = rewritten.program;
    std::set<std::string> needed;
    for (const auto& r : prog.rules)
        for (const auto& a : r.body)
            if (const auto* rel = as_rel(a)) needed.insert(rel->pred);
    bool grew = true;
    std::set<std::string> pulled;
    while (grew) {
        grew = false;
        for (const auto& r : pool) {
            if (!needed.count(r.head.pred) || pulled.count(to_string(r))) continue;
            pulled.insert(to_string(r));
            prog.rules.push_back(r);
            for (const auto& a : r.body)
                if (const auto* rel = as_rel(a)) needed.insert(rel->pred);
            grew = true;
        }
    }
    prog.edb.clear();
    prog.externals.clear();
    auto defined = prog.idb();
    for (const auto& r : prog.rules)
        for (const auto& a : r.body)
            if (const auto* rel = as_rel(a)) {
                if (rel->is_external())
                    prog.externals.insert(rel->pred);
                else if (!defined.count(rel->pred))
                    prog.edb.insert(rel->pred);
            }
    check_program(prog);

    Instance edb = lift(system, d);
    Instance result;
    if (prog.externals.empty()) {
        result = evaluate(prog, edb);
        if (log_out) log_out->clear();
    } else if (registry) {
        result = evaluate_with_externals(prog, edb, *registry);
        if (log_out) *log_out = registry->log();
    } else {
        ExternalRegistry local = system.make_registry();
        result = evaluate_with_externals(prog, edb, local);
        if (log_out) *log_out = local.log();
    }
    const Relation* ans = result.find(rewritten.answer);
    return ans ? ans->tuples() : std::set<Tuple>{};
}

}  // namespace dq
