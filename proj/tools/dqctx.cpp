// dqctx — context-based data quality assessment over CSV-backed relations.
//
// Subcommands:
//   assess   load a .dqx system and a data directory, compute the quality
//            version of the instance and the quality metrics, emit a JSON
//            report
//   answer   quality answers to a query (certain-answer mode via --certain)
//   rewrite  print the contextual rewriting of a query, or the adorned and
//            magic programs with --magic
//   metrics  the metrics object of the assess report only
//
// Exit codes: 0 success, 2 input error, 3 external-resolver failure.

#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dq/csv.hpp"
#include "dq/dqx.hpp"
#include "dq/eval.hpp"
#include "dq/lci.hpp"
#include "dq/magic.hpp"
#include "dq/metrics.hpp"
#include "dq/parser.hpp"
#include "dq/qua.hpp"
#include "dq/report.hpp"

namespace {

using namespace dq;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingRelation, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ResolverFailure, "cannot write " + out_path);
    out << text;
}

long long ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 start)
        .count();
}

struct AssessOutput {
    Instance data;
    Instance quality;
    MetricReport metrics;
    CallLog log;
    std::map<std::string, long long> timings;
};

AssessOutput run_assess(const ContextualSystem& sys, const std::string& data_dir) {
    AssessOutput out;
    auto t0 = std::chrono::steady_clock::now();
    out.data = load_facts(data_dir, sys.sourceSchema);
    out.timings["load"] = ms_since(t0);

    ExternalRegistry registry;
    ExternalRegistry* reg = nullptr;
    if (sys.has_externals()) {
        registry = sys.make_registry();
        reg = &registry;
    }

    auto t1 = std::chrono::steady_clock::now();
    Instance lifted = lift(sys, out.data);
    out.quality = quality_instance(sys, lifted, reg);
    out.timings["quality_instance"] = ms_since(t1);

    auto t2 = std::chrono::steady_clock::now();
    LciSpec spec = make_lci_spec(sys);
    out.metrics = compute_metrics(out.data, out.quality, spec, reg);
    out.timings["metrics"] = ms_since(t2);

    if (reg) out.log = reg->log();
    return out;
}

std::map<std::string, std::string> binding_map(const ContextualSystem& sys,
                                               const std::string& overrides) {
    std::map<std::string, std::string> out;
    for (const auto& e : sys.externals) out[e.name] = e.binding;
    std::istringstream ss(overrides);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::SyntaxError,
                        "--bindings entries look like #name=pattern, got '" + item + "'");
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"context-based data quality assessment"};
    app.require_subcommand(1);

    std::string system_path, data_dir, query_path, out_path, bindings;
    bool certain = false, magic = false, trace = false, timings = false;

    auto add_common = [&](CLI::App* cmd, bool needs_data, bool needs_query) {
        cmd->add_option("--system", system_path, "path to the .dqx system file")->required();
        if (needs_data)
            cmd->add_option("--data", data_dir, "directory of source CSV files")->required();
        if (needs_query)
            cmd->add_option("--query", query_path, "query file in rule syntax")->required();
        cmd->add_option("--out", out_path, "write the JSON report here instead of stdout");
    };

    CLI::App* assess = app.add_subcommand("assess", "compute quality instance and metrics");
    add_common(assess, true, false);
    assess->add_flag("--trace", trace, "include the rewrite trace");
    assess->add_flag("--timings", timings, "include per-phase timings (non-deterministic)");

    CLI::App* answer = app.add_subcommand("answer", "quality answers to a query");
    add_common(answer, true, true);
    answer->add_flag("--certain", certain, "certain answers over legal contextual instances");

    CLI::App* rewrite = app.add_subcommand("rewrite", "print the rewritten query");
    add_common(rewrite, false, true);
    rewrite->add_flag("--magic", magic, "print adorned and magic programs");
    rewrite->add_flag("--trace", trace, "print every rewrite stage");
    rewrite->add_option("--bindings", bindings,
                        "binding overrides, comma list of #name=pattern");

    CLI::App* metrics_cmd = app.add_subcommand("metrics", "metrics only");
    add_common(metrics_cmd, true, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    ContextualSystem sys = parse_system_file(system_path);

    if (assess->parsed() || metrics_cmd->parsed()) {
        AssessOutput result = run_assess(sys, data_dir);
        if (metrics_cmd->parsed()) {
            AssessmentReport rep;
            rep.metrics = &result.metrics;
            rep.call_log = result.log;
            emit(render_report_json(rep), out_path);
            return 0;
        }
        AssessmentReport rep;
        rep.system = &sys;
        rep.quality = &result.quality;
        rep.metrics = &result.metrics;
        rep.call_log = result.log;
        rep.timings_ms = result.timings;
        rep.include_timings = timings;
        RewriteTrace trace_obj;
        if (trace) {
            std::map<std::string, size_t> arities;
            for (const auto& s : sys.sourceSchema) arities[s.name] = s.arity();
            // Trace of the identity queries, one per source relation.
            for (const auto& s : sys.sourceSchema) {
                std::string text = "Ans_" + s.name + "(";
                for (size_t i = 0; i < s.arity(); ++i)
                    text += (i ? ", x" : "x") + std::to_string(i + 1);
                text += ") :- " + s.name + "(";
                for (size_t i = 0; i < s.arity(); ++i)
                    text += (i ? ", x" : "x") + std::to_string(i + 1);
                text += ").";
                auto [q, tr] = qua_rewrite(parse_query(text, &arities), sys);
                for (auto& st : tr.stages) trace_obj.stages.push_back(st);
            }
            rep.trace = &trace_obj;
        }
        emit(render_report_json(rep), out_path);
        return 0;
    }

    if (answer->parsed()) {
        Instance d = load_facts(data_dir, sys.sourceSchema);
        std::map<std::string, size_t> arities;
        for (const auto& s : sys.sourceSchema) arities[s.name] = s.arity();
        Query q = parse_query(slurp(query_path), &arities);

        ExternalRegistry registry;
        ExternalRegistry* reg = nullptr;
        if (sys.has_externals()) {
            registry = sys.make_registry();
            reg = &registry;
        }
        std::set<Tuple> rows;
        if (certain) {
            LciSpec spec = make_lci_spec(sys);
            rows = quality_answers_certain(q, spec, d, reg);
        } else {
            rows = answer_with_context(q, sys, d, reg);
        }
        for (const auto& t : rows) {
            for (size_t i = 0; i < t.size(); ++i)
                std::cout << (i ? "," : "") << t[i].to_display();
            std::cout << "\n";
        }
        if (!out_path.empty()) {
            AssessmentReport rep;
            rep.system = &sys;
            rep.answers = &rows;
            if (reg) rep.call_log = reg->log();
            emit(render_report_json(rep), out_path);
        }
        return 0;
    }

    // rewrite
    std::map<std::string, size_t> arities;
    for (const auto& s : sys.sourceSchema) arities[s.name] = s.arity();
    Query q = parse_query(slurp(query_path), &arities);
    if (magic) {
        Query staged = substitute_quality_nicknames(q, sys);
        Program full = staged.program;
        for (const auto& r : sys.derivation_rules()) full.rules.push_back(r);
        full.edb.clear();
        full.externals.clear();
        auto defined = full.idb();
        for (const auto& r : full.rules)
            for (const auto& a : r.body)
                if (const auto* rel = as_rel(a)) {
                    if (rel->is_external())
                        full.externals.insert(rel->pred);
                    else if (!defined.count(rel->pred))
                        full.edb.insert(rel->pred);
                }
        Query magic_input{staged.answer, full};
        AdornedProgram adorned = adorn(magic_input, binding_map(sys, bindings));
        MagicProgram rewritten = magic_rewrite(adorned);
        std::ostringstream os;
        os << "% adorned program\n"
           << render(adorned) << "% magic program\n"
           << render(rewritten);
        emit(os.str(), out_path);
        return 0;
    }
    std::ostringstream os;
    if (trace) {
        auto [rewritten, trace_obj] = qua_rewrite(q, sys);
        (void)rewritten;
        for (const auto& st : trace_obj.stages)
            os << "% stage: " << st.name << "\n" << to_string(st.query.program);
    } else {
        // The contextual query over C ∪ P; quality-predicate unfolding is
        // shown by --trace.
        auto [rewritten, trace_obj] = qua_rewrite(q, sys, false);
        (void)trace_obj;
        os << to_string(rewritten.program);
    }
    emit(os.str(), out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    bool color = isatty(2) != 0;
    const char* env = std::getenv("DQCTX_COLOR");
    if (env && std::string(env) == "0") color = false;
    try {
        return dispatch(argc, argv);
    } catch (const ResolverFailureError& e) {
        std::cerr << (color ? "\033[31merror:\033[0m " : "error: ") << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << (color ? "\033[31merror:\033[0m " : "error: ") << e.what() << "\n";
        return e.code() == ErrorCode::ResolverFailure ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << (color ? "\033[31merror:\033[0m " : "error: ") << e.what() << "\n";
        return 1;
    }
}
