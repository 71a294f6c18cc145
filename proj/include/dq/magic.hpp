#pragma once

#include "dq/ast.hpp"
#include "dq/extsrc.hpp"

namespace dq {

/// Program with bound/free annotations. Intensional predicate occurrences
/// are renamed to "name@pattern"; extensional predicates stay unannotated
/// and external predicates keep their declared binding (recorded separately
/// for rendering).
struct AdornedProgram {
    Program program;
    std::string answer;            // renamed answer predicate, e.g. "Ans@ff"
    std::string query_adornment;
    std::set<std::string> adorned_preds;
    std::map<std::string, std::string> external_bindings;
};

/// Supplementary-magic rewriting of an adorned program. `seeds` are the
/// magic rules derived from the query rules (also present in `program`);
/// rule order is deterministic: seeds, then per-rule chains, query rules
/// last.
struct MagicProgram {
    Program program;
    std::vector<Rule> seeds;
    std::string answer;
    std::map<std::string, std::string> external_bindings;
};

/// Left-to-right sideways-information-passing adornment, propagated top-down
/// from the query predicate (b positions = constant head arguments). A
/// variable is bound at an occurrence iff it appears in a preceding body
/// relational atom, in a hoisted constant equality, or in a bound head
/// position. Comparison built-ins never bind. An external occurrence whose
/// declared b position ends up free raises BindingViolation.
AdornedProgram adorn(const Query& query,
                     const std::map<std::string, std::string>& external_bindings);

/// True iff every input variable of every external atom is available when
/// the atom is reached: bound by an earlier non-external atom, a constant
/// equality, an earlier external's output position, or listed in
/// `bound_head_vars` (head variables bound by the caller). Appearing only as
/// another external's input does not count.
bool check_input_guarded(const Rule& rule,
                         const std::map<std::string, std::string>& external_bindings,
                         const std::set<std::string>& bound_head_vars = {});

/// Generalized supplementary magic: seed rules from the query-rule prefixes,
/// a supplementary chain per non-query rule (sup_<rule>_<atom>, arguments =
/// variables bound so far that the head or later atoms still need), magic
/// rules pushing bindings into intensional subgoals, and a simplification
/// pass that inlines supplementary predicates standing alone in a body.
MagicProgram magic_rewrite(const AdornedProgram& adorned);

/// Bottom-up evaluation of the magic program; externals fire through the
/// input-relation protocol of the registry. The answer relation (under
/// `magic.answer`) matches direct evaluation of the original query.
Instance evaluate_magic(const MagicProgram& magic, const Instance& edb,
                        ExternalRegistry* registry = nullptr);

std::string render(const AdornedProgram& p);
std::string render(const MagicProgram& p);

}  // namespace dq
