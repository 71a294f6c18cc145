#include "dq/context.hpp"

#include <algorithm>
#include <functional>

#include "dq/eval.hpp"
#include "dq/parser.hpp"

namespace dq {

namespace {

const RelationSignature* find_sig(const std::vector<RelationSignature>& sigs,
                                  const std::string& name) {
    for (const auto& s : sigs)
        if (s.name == name) return &s;
    return nullptr;
}

}  // namespace

const RelationSignature* ContextualSystem::source_signature(const std::string& name) const {
    return find_sig(sourceSchema, name);
}

const RelationSignature* ContextualSystem::context_signature(const std::string& name) const {
    return find_sig(contextSchema, name);
}

std::optional<std::string> ContextualSystem::nickname_of(const std::string& source) const {
    for (const auto& m : copies)
        if (m.source == source) return m.nickname;
    for (const auto& m : opens)
        if (m.source == source) return m.nickname;
    return std::nullopt;
}

std::optional<std::string> ContextualSystem::quality_nickname_of(const std::string& source) const {
    for (const auto& qv : qualityViews)
        if (qv.source == source) return qv.rule.head.pred;
    return std::nullopt;
}

std::set<std::string> ContextualSystem::context_base_names() const {
    std::set<std::string> out;
    for (const auto& s : contextSchema) out.insert(s.name);
    return out;
}

std::set<std::string> ContextualSystem::context_defined_preds() const {
    std::set<std::string> out;
    for (const auto& r : contextRules) out.insert(r.head.pred);
    return out;
}

std::vector<Rule> ContextualSystem::cqp_rules() const {
    std::vector<Rule> out;
    for (const auto& c : cqps) out.push_back(c.rule);
    return out;
}

std::vector<Rule> ContextualSystem::quality_rules() const {
    std::vector<Rule> out;
    for (const auto& qv : qualityViews) out.push_back(qv.rule);
    return out;
}

std::vector<Rule> ContextualSystem::derivation_rules() const {
    std::vector<Rule> out = contextRules;
    for (const auto& c : cqps) out.push_back(c.rule);
    for (const auto& qv : qualityViews) out.push_back(qv.rule);
    return out;
}

bool ContextualSystem::cqp_uses_external(const std::string& cqp) const {
    auto defined = context_defined_preds();
    std::set<std::string> seen;
    std::function<bool(const Rule&)> scan = [&](const Rule& r) -> bool {
        for (const auto& a : r.body) {
            const auto* rel = as_rel(a);
            if (!rel) continue;
            if (rel->is_external()) return true;
            if (defined.count(rel->pred) && !seen.count(rel->pred)) {
                seen.insert(rel->pred);
                for (const auto& aux : contextRules)
                    if (aux.head.pred == rel->pred && scan(aux)) return true;
            }
        }
        return false;
    };
    for (const auto& c : cqps)
        if (c.rule.head.pred == cqp && scan(c.rule)) return true;
    return false;
}

ExternalRegistry ContextualSystem::make_registry() const {
    return make_table_registry(externals, baseDir);
}

void ContextualSystem::validate(bool require_quality_views) const {
    auto base = context_base_names();
    auto defined = context_defined_preds();
    std::set<std::string> external_names;
    for (const auto& e : externals) {
        e.validate();
        external_names.insert(e.name);
    }

    for (const auto& sig : sourceSchema) {
        size_t mappings = 0;
        for (const auto& m : copies) mappings += m.source == sig.name;
        for (const auto& m : opens) mappings += m.source == sig.name;
        if (mappings != 1)
            throw Error(ErrorCode::InvalidSystem,
                        "source relation " + sig.name + " needs exactly one Copy or OpenGav "
                        "mapping, found " + std::to_string(mappings));
        auto nick = nickname_of(sig.name);
        const RelationSignature* nick_sig = context_signature(*nick);
        if (!nick_sig)
            throw Error(ErrorCode::InvalidSystem, "nickname " + *nick + " is not declared");
        if (nick_sig->attributes != sig.attributes)
            throw Error(ErrorCode::InvalidSystem,
                        "nickname " + *nick + " signature differs from " + sig.name);
        if (require_quality_views && !quality_nickname_of(sig.name))
            throw Error(ErrorCode::InvalidSystem,
                        "source relation " + sig.name + " has no quality view");
    }

    for (const auto& name : closedContextRelations)
        if (!base.count(name))
            throw Error(ErrorCode::InvalidSystem,
                        "closed marker names unknown contextual relation " + name);

    auto check_body = [&](const Rule& r, bool allow_cqp, bool allow_external,
                          const char* what) {
        for (const auto& a : r.body) {
            const auto* rel = as_rel(a);
            if (!rel) continue;
            if (rel->is_external()) {
                if (!allow_external)
                    throw Error(ErrorCode::InvalidSystem,
                                std::string(what) + " '" + to_string(r) +
                                    "' may not use external predicate " + rel->pred);
                if (!external_names.count(rel->pred))
                    throw Error(ErrorCode::InvalidSystem,
                                "undeclared external predicate " + rel->pred);
                continue;
            }
            bool is_cqp = qualityPredicates.count(rel->pred) > 0;
            if (is_cqp) {
                if (!allow_cqp)
                    throw Error(ErrorCode::InvalidSystem,
                                std::string(what) + " '" + to_string(r) +
                                    "' may not use quality predicate " + rel->pred);
                continue;
            }
            if (!base.count(rel->pred) && !defined.count(rel->pred))
                throw Error(ErrorCode::InvalidSystem,
                            std::string(what) + " '" + to_string(r) +
                                "' uses predicate " + rel->pred +
                                " that is neither contextual nor a quality predicate");
        }
    };
    for (const auto& r : contextRules) check_body(r, false, false, "contextual rule");
    for (const auto& c : cqps) check_body(c.rule, false, true, "quality predicate definition");
    for (const auto& qv : qualityViews) {
        check_body(qv.rule, true, false, "quality view");
        if (!source_signature(qv.source))
            throw Error(ErrorCode::InvalidSystem,
                        "quality view for unknown source relation " + qv.source);
    }
    for (const auto& fp : footprints) {
        if (!source_signature(fp.view.head.pred))
            throw Error(ErrorCode::InvalidSystem,
                        "footprint head " + fp.view.head.pred + " is not a source relation");
        check_body(fp.view, false, false, "footprint view");
    }

    // The combined rule set must stay non-recursive and arity-consistent.
    Program combined;
    combined.rules = derivation_rules();
    for (const auto& fp : footprints) combined.rules.push_back(fp.view);
    std::map<std::string, size_t> arities;
    for (const auto& s : sourceSchema) arities[s.name] = s.arity();
    for (const auto& s : contextSchema) arities[s.name] = s.arity();
    for (const auto& e : externals) arities[e.name] = e.signature.arity();
    check_program(combined, &arities);
}

Instance lift(const ContextualSystem& system, const Instance& d) {
    Instance out = system.contextualData;
    for (const auto& sig : system.contextSchema)
        if (!out.has_relation(sig.name)) out.add_relation(sig);

    auto lift_one = [&](const std::string& source, const std::string& nickname) {
        const RelationSignature* ssig = system.source_signature(source);
        if (!ssig) throw Error(ErrorCode::InvalidSystem, "unknown source relation " + source);
        const Relation* rel = d.find(source);
        if (!rel) throw Error(ErrorCode::MissingRelation, source);
        if (rel->signature().attributes != ssig->attributes)
            throw Error(ErrorCode::SchemaMismatch,
                        source + ": instance signature differs from the declared schema");
        for (const auto& t : *rel) out.insert(nickname, t);
    };
    for (const auto& m : system.copies) lift_one(m.source, m.nickname);
    for (const auto& m : system.opens) lift_one(m.source, m.nickname);
    return out;
}

Instance quality_instance(const ContextualSystem& system, const Instance& contextual,
                          ExternalRegistry* registry) {
    Program prog;
    prog.rules = system.derivation_rules();
    auto defined = prog.idb();
    for (const auto& r : prog.rules)
        for (const auto& a : r.body)
            if (const auto* rel = as_rel(a)) {
                if (rel->is_external())
                    prog.externals.insert(rel->pred);
                else if (!defined.count(rel->pred))
                    prog.edb.insert(rel->pred);
            }

    Instance work = contextual;
    for (const auto& sig : system.contextSchema)
        if (!work.has_relation(sig.name)) work.add_relation(sig);

    Instance derived;
    if (prog.externals.empty()) {
        derived = evaluate(prog, work);
    } else if (registry) {
        derived = evaluate_with_externals(prog, work, *registry);
    } else {
        ExternalRegistry local = system.make_registry();
        derived = evaluate_with_externals(prog, work, local);
    }

    Instance out;
    for (const auto& sig : system.sourceSchema) {
        Relation& target = out.add_relation(sig);
        auto qn = system.quality_nickname_of(sig.name);
        if (!qn)
            throw Error(ErrorCode::MissingViewDefinition,
                        "no quality view for source relation " + sig.name);
        if (const Relation* ext = derived.find(*qn))
            for (const auto& t : *ext) target.insert(t);
    }
    return out;
}

ContextualSystem create_nickname_context(const std::vector<RelationSignature>& sourceSchema) {
    ContextualSystem sys;
    sys.sourceSchema = sourceSchema;
    for (const auto& sig : sourceSchema) {
        RelationSignature nick = sig;
        nick.name = sig.name + "_N";
        sys.contextSchema.push_back(nick);
        sys.copies.push_back({sig.name, nick.name});
        sys.closedContextRelations.insert(nick.name);
    }
    sys.validate(false);
    return sys;
}

}  // namespace dq
