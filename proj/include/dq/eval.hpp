#pragma once

#include "dq/ast.hpp"
#include "dq/value.hpp"

namespace dq {

/// Supplies extensions for '#'-predicates during evaluation. Implemented by
/// the external-source registry; evaluation calls it once per distinct ground
/// input tuple, in lexicographic input order.
class ExternalHook {
public:
    virtual ~ExternalHook() = default;

    /// Ground input values (the declared b positions, in order) -> rows of
    /// output values (the f positions, in order). Undefined inputs yield no
    /// rows here; logging of the null marker is the implementation's concern.
    virtual std::vector<Tuple> call(const std::string& name, const Tuple& inputs) = 0;

    /// The declared b/f pattern, one character per argument position.
    virtual std::string binding(const std::string& name) const = 0;
};

/// Bottom-up evaluation of a non-recursive program: predicates are processed
/// in dependency order and each stratum is saturated, so tuples are derived
/// once. Returns edb extended with all intensional extensions. Programs with
/// external predicates need evaluate_with_hook.
Instance evaluate(const Program& p, const Instance& edb);

Instance evaluate_with_hook(const Program& p, const Instance& edb, ExternalHook* hook);

/// Comparison semantics shared with test oracles: Null satisfies nothing,
/// equality is kind-strict, ordering is defined on num/num and time/time only.
bool comparison_satisfied(CmpOp op, const Value& l, const Value& r);

}  // namespace dq
