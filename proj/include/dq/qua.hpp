#pragma once

#include <optional>

#include "dq/context.hpp"

namespace dq {

struct RewriteStage {
    std::string name;  // nickname-substitution | view-unfold | cqp-unfold
    Query query;
};

struct RewriteTrace {
    std::vector<RewriteStage> stages;
    const Query& final_query() const { return stages.back().query; }
};

/// Three-stage rewriting of a source-schema query into a contextual query:
/// substitute quality nicknames, unfold the quality views, then (optionally)
/// unfold quality-predicate definitions down to base contextual relations,
/// leaving external atoms in place. With `unfold_cqps` unset, quality
/// predicates whose definitions reach an external source stay folded so the
/// evaluator can drive the calls.
std::pair<Query, RewriteTrace> qua_rewrite(const Query& query, const ContextualSystem& system,
                                           std::optional<bool> unfold_cqps = std::nullopt);

/// Rewrites, then evaluates over lift(system, d): the quality answers to a
/// monotone source-schema query. External atoms resolve through `registry`
/// (a table-backed one is built when needed and none is given). The call log
/// of the registry used ends up in `log_out` when provided.
std::set<Tuple> answer_with_context(const Query& query, const ContextualSystem& system,
                                    const Instance& d, ExternalRegistry* registry = nullptr,
                                    CallLog* log_out = nullptr);

/// Shared precondition: the query must be a union of conjunctive queries
/// over the source schema (plus its own auxiliary predicates and built-ins).
void require_source_ucq(const Query& query, const ContextualSystem& system, ErrorCode on_failure);

/// Body-atom substitution of source predicates by their quality nicknames
/// (stage 1 on its own; also used for certain-answer evaluation).
Query substitute_quality_nicknames(const Query& query, const ContextualSystem& system);

}  // namespace dq
