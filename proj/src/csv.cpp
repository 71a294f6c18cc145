#include "dq/csv.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace dq {

namespace {

std::string trim_copy(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// One CSV record; fields may be double-quoted, "" escapes a quote.
std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && trim_copy(cur).empty()) {
            quoted = true;
            cur.clear();
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string escape_field(const std::string& f) {
    bool need = f.find_first_of(",\"\n") != std::string::npos ||
                (!f.empty() && (std::isspace(static_cast<unsigned char>(f.front())) ||
                                std::isspace(static_cast<unsigned char>(f.back()))));
    if (!need) return f;
    std::string out = "\"";
    for (char c : f) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

Relation load_relation_csv(const std::filesystem::path& file, const RelationSignature& sig) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::MissingRelation, sig.name + " (" + file.string() + ")");
    Relation rel(sig);
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::SchemaMismatch, sig.name + ": missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_record(line);
    if (header.size() != sig.arity())
        throw Error(ErrorCode::SchemaMismatch,
                    sig.name + ": header has " + std::to_string(header.size()) +
                        " columns, expected " + std::to_string(sig.arity()));
    for (size_t i = 0; i < header.size(); ++i) {
        if (trim_copy(header[i]) != sig.attributes[i].name)
            throw Error(ErrorCode::SchemaMismatch,
                        sig.name + ": header column " + std::to_string(i + 1) + " is '" +
                            trim_copy(header[i]) + "', expected '" + sig.attributes[i].name + "'");
    }
    size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim_copy(line).empty()) continue;
        auto fields = split_record(line);
        if (fields.size() != sig.arity())
            throw Error(ErrorCode::SchemaMismatch,
                        sig.name + " row " + std::to_string(row) + ": " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(sig.arity()));
        Tuple t;
        t.reserve(fields.size());
        for (size_t i = 0; i < fields.size(); ++i) {
            try {
                t.push_back(parse_cell(fields[i], sig.attributes[i].kind));
            } catch (const Error& e) {
                throw Error(ErrorCode::ValueParseError,
                            sig.name + " row " + std::to_string(row) + ", column " +
                                sig.attributes[i].name + ": " + e.what());
            }
        }
        rel.insert(std::move(t));
    }
    return rel;
}

static Instance load_dir(const std::filesystem::path& dir,
                         const std::vector<RelationSignature>& schema, bool partial) {
    Instance out;
    for (const auto& sig : schema) {
        auto file = dir / (sig.name + ".csv");
        if (partial && !std::filesystem::exists(file)) {
            out.add_relation(sig);
            continue;
        }
        Relation rel = load_relation_csv(file, sig);
        out.add_relation(sig);
        for (const auto& t : rel) out.insert(sig.name, t);
    }
    return out;
}

Instance load_facts(const std::filesystem::path& dir,
                    const std::vector<RelationSignature>& schema) {
    return load_dir(dir, schema, false);
}

Instance load_facts_partial(const std::filesystem::path& dir,
                            const std::vector<RelationSignature>& schema) {
    return load_dir(dir, schema, true);
}

void write_relation_csv(const std::filesystem::path& file, const Relation& rel) {
    std::ofstream out(file);
    if (!out) throw Error(ErrorCode::ResolverFailure, "cannot write " + file.string());
    const auto& attrs = rel.signature().attributes;
    for (size_t i = 0; i < attrs.size(); ++i) out << (i ? "," : "") << attrs[i].name;
    out << "\n";
    for (const auto& t : rel) {
        for (size_t i = 0; i < t.size(); ++i)
            out << (i ? "," : "") << escape_field(t[i].to_display());
        out << "\n";
    }
}

void write_instance_csv(const std::filesystem::path& dir, const Instance& instance) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, rel] : instance.relations())
        write_relation_csv(dir / (name + ".csv"), rel);
}

}  // namespace dq
