#pragma once

#include <string>

#include "dq/context.hpp"
#include "dq/extsrc.hpp"
#include "dq/metrics.hpp"
#include "dq/qua.hpp"

namespace dq {

/// Machine-readable assessment output. Serialization is deterministic:
/// object keys sorted, tuples in canonical order, values rendered as their
/// display strings. Timings are opt-in because they would break the
/// byte-identical-reports guarantee.
struct AssessmentReport {
    const ContextualSystem* system = nullptr;
    const Instance* quality = nullptr;
    const MetricReport* metrics = nullptr;
    const std::set<Tuple>* answers = nullptr;
    const RewriteTrace* trace = nullptr;
    CallLog call_log;
    std::map<std::string, long long> timings_ms;
    bool include_timings = false;
};

std::string render_report_json(const AssessmentReport& report);

}  // namespace dq
