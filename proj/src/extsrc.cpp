#include "dq/extsrc.hpp"

#include <algorithm>

#include "dq/csv.hpp"

namespace dq {

size_t ExternalDecl::input_arity() const {
    return static_cast<size_t>(std::count(binding.begin(), binding.end(), 'b'));
}

size_t ExternalDecl::output_arity() const { return binding.size() - input_arity(); }

std::vector<size_t> ExternalDecl::input_positions() const {
    std::vector<size_t> out;
    for (size_t i = 0; i < binding.size(); ++i)
        if (binding[i] == 'b') out.push_back(i);
    return out;
}

std::vector<size_t> ExternalDecl::output_positions() const {
    std::vector<size_t> out;
    for (size_t i = 0; i < binding.size(); ++i)
        if (binding[i] == 'f') out.push_back(i);
    return out;
}

void ExternalDecl::validate() const {
    if (name.empty() || name[0] != '#')
        throw Error(ErrorCode::InvalidSystem, "external predicate name must start with '#': " + name);
    if (binding.size() != signature.arity())
        throw Error(ErrorCode::InvalidSystem,
                    name + ": binding pattern '" + binding + "' does not match arity " +
                        std::to_string(signature.arity()));
    for (char c : binding)
        if (c != 'b' && c != 'f')
            throw Error(ErrorCode::InvalidSystem, name + ": binding pattern must use only 'b'/'f'");
}

TableBackedResolver::TableBackedResolver(const std::filesystem::path& csv, const ExternalDecl& decl)
    : decl_(decl) {
    try {
        RelationSignature sig = decl.signature;
        sig.name = decl.name.substr(1);
        table_ = load_relation_csv(csv, sig);
    } catch (const Error& e) {
        throw Error(ErrorCode::ResolverFailure, decl.name + ": " + e.what());
    }
}

std::vector<Tuple> TableBackedResolver::resolve(const Tuple& inputs) {
    auto in_pos = decl_.input_positions();
    auto out_pos = decl_.output_positions();
    std::vector<Tuple> rows;
    for (const auto& t : table_) {
        bool hit = true;
        for (size_t k = 0; k < in_pos.size() && hit; ++k)
            hit = t[in_pos[k]].unifies_with(inputs[k]);
        if (!hit) continue;
        Tuple out;
        out.reserve(out_pos.size());
        for (size_t p : out_pos) out.push_back(t[p]);
        rows.push_back(std::move(out));
    }
    if (rows.empty() && !in_pos.empty())
        rows.push_back(Tuple(out_pos.size(), Value::null()));  // undefined for these inputs
    return rows;
}

std::vector<Tuple> ProceduralResolver::resolve(const Tuple& inputs) { return fn_(inputs); }

void ExternalRegistry::register_source(ExternalDecl decl, std::unique_ptr<Resolver> resolver) {
    decl.validate();
    std::string name = decl.name;
    Source src;
    src.decl = std::move(decl);
    src.resolver = std::move(resolver);
    auto [it, fresh] = sources_.emplace(name, std::move(src));
    if (!fresh) throw Error(ErrorCode::DuplicateSource, name);
}

const ExternalDecl& ExternalRegistry::decl(const std::string& name) const {
    auto it = sources_.find(name);
    if (it == sources_.end()) throw Error(ErrorCode::MissingRelation, "external source " + name);
    return it->second.decl;
}

const std::vector<Tuple>& ExternalRegistry::invoke(const std::string& name, const Tuple& inputs) {
    auto it = sources_.find(name);
    if (it == sources_.end()) throw Error(ErrorCode::MissingRelation, "external source " + name);
    Source& src = it->second;
    if (inputs.size() != src.decl.input_arity())
        throw Error(ErrorCode::SchemaMismatch,
                    name + ": " + std::to_string(inputs.size()) + " inputs, binding expects " +
                        std::to_string(src.decl.input_arity()));
    for (const auto& v : inputs)
        if (v.is_null())
            throw Error(ErrorCode::BindingViolation, name + ": null input value");

    auto cached = src.cache.find(inputs);
    bool from_cache = memoize_ && cached != src.cache.end();
    const std::vector<Tuple>* rows;
    if (from_cache) {
        rows = &cached->second;
    } else {
        std::vector<Tuple> fresh_rows;
        try {
            fresh_rows = src.resolver->resolve(inputs);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw ResolverFailureError(name + ": " + e.what(), log_);
        }
        for (const auto& r : fresh_rows)
            if (r.size() != src.decl.output_arity())
                throw ResolverFailureError(
                    name + ": resolver returned a row of width " + std::to_string(r.size()) +
                        ", expected " + std::to_string(src.decl.output_arity()),
                    log_);
        ++src.underlying_calls;
        rows = &src.cache.emplace(inputs, std::move(fresh_rows)).first->second;
    }
    CallLogEntry entry;
    entry.seq = log_.size() + 1;
    entry.source = name;
    entry.inputs = inputs;
    entry.outputs = *rows;
    entry.cached = from_cache;
    log_.push_back(std::move(entry));
    return *rows;
}

std::vector<Tuple> ExternalRegistry::call(const std::string& name, const Tuple& inputs) {
    const auto& rows = invoke(name, inputs);
    std::vector<Tuple> usable;
    for (const auto& r : rows) {
        bool all_null = !r.empty() && std::all_of(r.begin(), r.end(),
                                                  [](const Value& v) { return v.is_null(); });
        if (!all_null) usable.push_back(r);
    }
    return usable;
}

std::string ExternalRegistry::binding(const std::string& name) const { return decl(name).binding; }

size_t ExternalRegistry::resolver_calls(const std::string& name) const {
    auto it = sources_.find(name);
    return it == sources_.end() ? 0 : it->second.underlying_calls;
}

ExternalRegistry make_table_registry(const std::vector<ExternalDecl>& decls,
                                     const std::filesystem::path& base_dir) {
    ExternalRegistry reg;
    for (const auto& d : decls) {
        if (d.table.empty())
            throw Error(ErrorCode::ResolverFailure,
                        d.name + ": no table configured and no procedural resolver attached");
        std::filesystem::path p = d.table;
        if (p.is_relative()) p = base_dir / p;
        reg.register_source(d, std::make_unique<TableBackedResolver>(p, d));
    }
    return reg;
}

Instance derive_input_relation(const Rule& rule, const Instance& prefix_bindings,
                               const ExternalRegistry& registry) {
    Rule normalized = normalize_rule(rule);
    const RelAtom* external = nullptr;
    std::vector<Atom> prefix;
    for (const auto& a : normalized.body) {
        const auto* rel = as_rel(a);
        if (rel && rel->is_external()) {
            external = rel;
            break;
        }
        prefix.push_back(a);
    }
    if (!external)
        throw Error(ErrorCode::InvalidSystem, "rule has no external atom: " + to_string(rule));

    const ExternalDecl& decl = registry.decl(external->pred);
    auto in_pos = decl.input_positions();

    Rule probe;
    probe.head.pred = "input";
    for (size_t p : in_pos) probe.head.args.push_back(external->args[p]);
    probe.body = std::move(prefix);

    Program prog;
    prog.rules.push_back(probe);
    for (const auto& a : probe.body)
        if (const auto* rel = as_rel(a)) prog.edb.insert(rel->pred);
    Instance result = evaluate(prog, prefix_bindings);

    Instance out;
    out.add_relation(result.relation("input").signature());
    for (const auto& t : result.relation("input")) {
        if (std::any_of(t.begin(), t.end(), [](const Value& v) { return v.is_null(); })) continue;
        out.insert("input", t);
    }
    return out;
}

Instance evaluate_with_externals(const Program& p, const Instance& edb,
                                 ExternalRegistry& registry) {
    return evaluate_with_hook(p, edb, &registry);
}

}  // namespace dq
