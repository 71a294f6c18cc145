#pragma once

#include <filesystem>
#include <functional>
#include <memory>

#include "dq/ast.hpp"
#include "dq/eval.hpp"
#include "dq/value.hpp"

namespace dq {

/// Declaration of a binding-restricted external predicate. The signature
/// lists input attributes first, then outputs; binding is one 'b'/'f' per
/// position ('b' = input that must be ground at call time).
struct ExternalDecl {
    std::string name;  // '#'-prefixed
    RelationSignature signature;
    std::string binding;
    std::string table;  // CSV path for table-backed sources (may be empty)

    size_t input_arity() const;
    size_t output_arity() const;
    std::vector<size_t> input_positions() const;
    std::vector<size_t> output_positions() const;
    void validate() const;
};

/// Resolves ground inputs to output rows. For inputs the source does not
/// know, the contract is a single all-Null output row ("undefined");
/// table-backed resolvers produce it automatically.
class Resolver {
public:
    virtual ~Resolver() = default;
    virtual std::vector<Tuple> resolve(const Tuple& inputs) = 0;
};

class TableBackedResolver : public Resolver {
public:
    TableBackedResolver(const std::filesystem::path& csv, const ExternalDecl& decl);
    std::vector<Tuple> resolve(const Tuple& inputs) override;

private:
    ExternalDecl decl_;
    Relation table_;
};

/// Wraps a host callback honoring the binding pattern.
class ProceduralResolver : public Resolver {
public:
    using Fn = std::function<std::vector<Tuple>(const Tuple&)>;
    explicit ProceduralResolver(Fn fn) : fn_(std::move(fn)) {}
    std::vector<Tuple> resolve(const Tuple& inputs) override;

private:
    Fn fn_;
};

struct CallLogEntry {
    size_t seq = 0;
    std::string source;
    Tuple inputs;
    std::vector<Tuple> outputs;  // as returned, including the all-Null marker
    bool cached = false;
};

using CallLog = std::vector<CallLogEntry>;

/// Thrown when a resolver fails; carries the calls made so far.
class ResolverFailureError : public Error {
public:
    ResolverFailureError(const std::string& detail, CallLog partial)
        : Error(ErrorCode::ResolverFailure, detail), partial_log_(std::move(partial)) {}
    const CallLog& partial_log() const { return partial_log_; }

private:
    CallLog partial_log_;
};

/// Registry of external sources. Doubles as the evaluator hook: calls are
/// memoized per input tuple and every invocation (cached or not) is logged
/// in order. All-Null "undefined" rows are logged but contribute no facts.
class ExternalRegistry : public ExternalHook {
public:
    void register_source(ExternalDecl decl, std::unique_ptr<Resolver> resolver);
    bool has(const std::string& name) const { return sources_.count(name) > 0; }
    const ExternalDecl& decl(const std::string& name) const;

    /// Memoized invocation; returns all rows including the all-Null marker.
    const std::vector<Tuple>& invoke(const std::string& name, const Tuple& inputs);

    // ExternalHook
    std::vector<Tuple> call(const std::string& name, const Tuple& inputs) override;
    std::string binding(const std::string& name) const override;

    const CallLog& log() const { return log_; }
    void clear_log() { log_.clear(); }
    size_t resolver_calls(const std::string& name) const;
    void set_memoization(bool on) { memoize_ = on; }

private:
    struct Source {
        ExternalDecl decl;
        std::unique_ptr<Resolver> resolver;
        std::map<Tuple, std::vector<Tuple>> cache;
        size_t underlying_calls = 0;
    };
    std::map<std::string, Source> sources_;
    CallLog log_;
    bool memoize_ = true;
};

/// Builds a registry with a table-backed resolver per declaration; relative
/// table paths resolve against `base_dir`.
ExternalRegistry make_table_registry(const std::vector<ExternalDecl>& decls,
                                     const std::filesystem::path& base_dir);

/// Projection of the join of the body atoms preceding the first external
/// atom onto that atom's input variables, evaluated over `prefix_bindings`.
/// The result holds a single relation named "input".
Instance derive_input_relation(const Rule& rule, const Instance& prefix_bindings,
                               const ExternalRegistry& registry);

/// evaluate() for programs that mention external predicates.
Instance evaluate_with_externals(const Program& p, const Instance& edb, ExternalRegistry& registry);

}  // namespace dq
