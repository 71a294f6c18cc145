#include "dq/report.hpp"

#include <json.hpp>

namespace dq {

namespace {

using nlohmann::json;

json tuple_json(const Tuple& t) {
    json row = json::array();
    for (const auto& v : t) row.push_back(v.to_display());
    return row;
}

json relation_json(const Relation& rel) {
    json rows = json::array();
    for (const auto& t : rel) rows.push_back(tuple_json(t));
    return rows;
}

json rational_json(const Rational& r) {
    return json{{"num", r.num}, {"den", r.den}, {"decimal", r.decimal4()}};
}

json digest_json(const ContextualSystem& sys) {
    json source = json::array();
    for (const auto& s : sys.sourceSchema) source.push_back(s.name);
    json context = json::array();
    for (const auto& s : sys.contextSchema) context.push_back(s.name);
    json externals = json::array();
    for (const auto& e : sys.externals) externals.push_back(e.name);
    json counts{{"context_rules", sys.contextRules.size()},
                {"cqp_rules", sys.cqps.size()},
                {"quality_views", sys.qualityViews.size()},
                {"footprints", sys.footprints.size()},
                {"mappings", sys.copies.size() + sys.opens.size()}};
    return json{{"source_relations", source},
                {"context_relations", context},
                {"external_sources", externals},
                {"rule_counts", counts}};
}

}  // namespace

std::string render_report_json(const AssessmentReport& report) {
    json out;
    if (report.system) out["system_digest"] = digest_json(*report.system);
    if (report.quality) {
        json q;
        for (const auto& [name, rel] : report.quality->relations())
            q[name] = relation_json(rel);
        out["quality_instance"] = q;
    }
    if (report.metrics) {
        json per;
        for (const auto& [name, pr] : report.metrics->per_relation)
            per[name] = json{{"size", pr.size},
                             {"quality_size", pr.quality_size},
                             {"symmetric_difference", pr.symmetric_difference}};
        out["metrics"] = json{{"qm0", report.metrics->qm0},
                              {"qm1", rational_json(report.metrics->qm1)},
                              {"jaccard_r", rational_json(report.metrics->jaccard_r)},
                              {"qm2", rational_json(report.metrics->qm2)},
                              {"per_relation", per}};
    }
    if (report.answers) {
        json rows = json::array();
        for (const auto& t : *report.answers) rows.push_back(tuple_json(t));
        out["answers"] = rows;
    }
    if (report.trace) {
        json stages = json::array();
        for (const auto& st : report.trace->stages)
            stages.push_back(json{{"stage", st.name}, {"program", to_string(st.query.program)}});
        out["rewrite_trace"] = stages;
    }
    json calls = json::array();
    for (const auto& e : report.call_log) {
        json inputs = tuple_json(e.inputs);
        json outputs = json::array();
        for (const auto& row : e.outputs) outputs.push_back(tuple_json(row));
        calls.push_back(json{{"seq", e.seq},
                             {"source", e.source},
                             {"inputs", inputs},
                             {"outputs", outputs},
                             {"cached", e.cached}});
    }
    out["call_log"] = calls;
    if (report.include_timings) {
        json t;
        for (const auto& [phase, ms] : report.timings_ms) t[phase] = ms;
        out["timings_ms"] = t;
    }
    return out.dump(2) + "\n";
}

}  // namespace dq
