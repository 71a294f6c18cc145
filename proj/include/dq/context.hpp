#pragma once

#include <filesystem>
#include <optional>

#include "dq/ast.hpp"
#include "dq/extsrc.hpp"
#include "dq/value.hpp"

namespace dq {

/// R'(x̄) receives R's tuples and is exact: legal contextual instances carry
/// exactly the lifted extension.
struct CopyMapping {
    std::string source, nickname;
};

/// R'(x̄) receives R's tuples as an open source: legal contextual instances
/// may extend it.
struct OpenGavMapping {
    std::string source, nickname;
};

/// The source relation seen as a conjunctive view of contextual predicates;
/// head predicate is the source relation.
struct FootprintMapping {
    Rule view;
};

/// Conjunctive view defining the quality version R'_P of a source relation
/// over contextual and quality predicates.
struct QualityView {
    std::string source;
    Rule rule;
};

/// Contextual quality predicate: a view over contextual (and possibly
/// external) predicates encoding one atomic quality requirement.
struct CqpDef {
    Rule rule;
};

struct ContextualSystem {
    std::vector<RelationSignature> sourceSchema;
    std::vector<RelationSignature> contextSchema;  // base contextual relations, nicknames included
    std::vector<Rule> contextRules;                // auxiliary predicates defined inside the context
    std::set<std::string> qualityPredicates;
    std::vector<ExternalDecl> externals;
    std::vector<CopyMapping> copies;
    std::vector<OpenGavMapping> opens;
    std::vector<FootprintMapping> footprints;
    std::vector<CqpDef> cqps;
    std::vector<QualityView> qualityViews;
    Instance contextualData;                       // I⁻, possibly empty
    std::set<std::string> closedContextRelations;  // exact base relations
    std::filesystem::path baseDir;                 // resolves external table paths

    const RelationSignature* source_signature(const std::string& name) const;
    const RelationSignature* context_signature(const std::string& name) const;
    std::optional<std::string> nickname_of(const std::string& source) const;
    std::optional<std::string> quality_nickname_of(const std::string& source) const;

    std::set<std::string> context_base_names() const;
    std::set<std::string> context_defined_preds() const;
    std::vector<Rule> cqp_rules() const;
    std::vector<Rule> quality_rules() const;
    /// contextRules + cqp rules + quality views, the closure rule set.
    std::vector<Rule> derivation_rules() const;

    bool has_externals() const { return !externals.empty(); }
    /// True when the named CQP reaches an external predicate through its
    /// definition (directly or via auxiliary contextual predicates).
    bool cqp_uses_external(const std::string& cqp) const;

    ExternalRegistry make_registry() const;

    /// Full invariant check; `require_quality_views` is off for the bare
    /// nickname systems that callers extend afterwards.
    void validate(bool require_quality_views = true) const;
};

/// contextualData extended with R'(D) := R(D) for every Copy/OpenGav mapping.
Instance lift(const ContextualSystem& system, const Instance& d);

/// Evaluates auxiliary, CQP and quality-view rules bottom-up over the given
/// contextual instance and returns an instance over the source schema whose
/// relation R holds the extension of R'_P. External atoms are resolved
/// through `registry` when given (one is built from the declarations when
/// the rules need it and none is supplied).
Instance quality_instance(const ContextualSystem& system, const Instance& contextual,
                          ExternalRegistry* registry = nullptr);

/// Minimal system whose contextual schema is exactly the nicknames (one Copy
/// mapping per source relation, treated as exact); no quality views yet.
ContextualSystem create_nickname_context(const std::vector<RelationSignature>& sourceSchema);

}  // namespace dq
