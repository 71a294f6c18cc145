#pragma once

#include "dq/context.hpp"

namespace dq {

/// Inputs for legal-contextual-instance reasoning: the system, the nicknames
/// fed by open sources, and the partial contextual instance I⁻.
struct LciSpec {
    ContextualSystem system;
    std::set<std::string> openNicknames;
    Instance partialInstance;
};

LciSpec make_lci_spec(const ContextualSystem& system);

/// Inverts footprint views: for a footprint R(x̄) ← B₁,…,Bₖ, φ, emits one
/// rule per contextual body atom Bᵢ with body "R-nickname(x̄), φ". Head
/// variables of Bᵢ outside x̄ must be forced to constants by φ-equalities;
/// otherwise the view is rejected (no labelled-null support).
std::vector<Rule> inverse_rules(const std::vector<FootprintMapping>& footprints,
                                const ContextualSystem& system);

/// The smallest legal contextual instance: I⁻, plus the lifted source data,
/// closed under inverse rules and all view definitions (auxiliary contextual
/// rules, quality predicates, quality nicknames). External atoms resolve
/// through `registry` when the definitions need them.
Instance minimal_lci(const LciSpec& spec, const Instance& d, ExternalRegistry* registry = nullptr);

/// Certain quality answers of a monotone source-schema query: the nickname-
/// substituted query evaluated on the minimal LCI.
std::set<Tuple> quality_answers_certain(const Query& query, const LciSpec& spec, const Instance& d,
                                        ExternalRegistry* registry = nullptr);

/// Brute-force oracle: every legal contextual instance whose open base
/// relations draw from the bounded active domain. Candidates must satisfy
/// the open-source lower bounds, compatibility with I⁻, exactness of closed
/// relations, and closure under the footprints' inverse rules; view-defined
/// predicates are computed, not enumerated. Deterministically ordered.
std::vector<Instance> enumerate_lcis_bounded(const LciSpec& spec, const Instance& d,
                                             size_t domain_bound,
                                             ExternalRegistry* registry = nullptr);

}  // namespace dq
