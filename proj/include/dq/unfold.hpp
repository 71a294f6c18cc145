#pragma once

#include <optional>

#include "dq/ast.hpp"

namespace dq {

/// Replaces every body atom over a view predicate by the view's definition,
/// one output rule per combination of chosen view rules (union of conjunctive
/// queries). Unification is structural (no equality atoms are emitted) and
/// view-local variables keep their names unless that would capture, in which
/// case they get a numeric suffix.
///
/// `targets` limits which predicates count as views; by default every head
/// predicate in `views` does. A target atom with no defining rule raises
/// MissingViewDefinition.
Query unfold(const Query& query, const std::vector<Rule>& views,
             const std::optional<std::set<std::string>>& targets = std::nullopt);

}  // namespace dq
