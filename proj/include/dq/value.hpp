#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dq/error.hpp"

namespace dq {

/// Exact scaled decimal: value = mant * 10^-exp, normalized (exp >= 0, no
/// trailing zeros in the fraction). Enough for clock readings, years and
/// temperatures; overflow on parse is rejected.
class Decimal {
public:
    Decimal() = default;
    static Decimal from_int(int64_t v) { return Decimal(v, 0); }
    static std::optional<Decimal> parse(std::string_view text);

    std::string to_string() const;
    int compare(const Decimal& o) const;

    bool operator==(const Decimal& o) const { return mant_ == o.mant_ && exp_ == o.exp_; }
    std::strong_ordering operator<=>(const Decimal& o) const {
        int c = compare(o);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    int64_t mantissa() const { return mant_; }
    int32_t exponent() const { return exp_; }

private:
    Decimal(int64_t mant, int32_t exp) : mant_(mant), exp_(exp) { normalize(); }
    void normalize();

    int64_t mant_ = 0;
    int32_t exp_ = 0;
};

enum class Kind : uint8_t { Null = 0, Str, Num, Time, Date };

const char* kind_name(Kind k);

/// A single database value. Times are minutes since midnight. Date tags are
/// opaque text compared by equality only. Null is a distinguished value that
/// never unifies with anything (including itself) during joins and never
/// satisfies a comparison built-in; for set semantics and canonical ordering
/// it still compares equal to itself.
class Value {
public:
    Value() : kind_(Kind::Null) {}

    static Value null() { return Value(); }
    static Value str(std::string s);
    static Value num(Decimal d);
    static Value num(int64_t v) { return num(Decimal::from_int(v)); }
    static Value time(int minutes);
    static Value date(std::string tag);

    /// "HH:MM" -> minutes. `max_minutes` admits 24:00 for rule literals;
    /// stored data values stay within [0, 1439].
    static std::optional<int> parse_time(std::string_view text, int max_minutes = 1439);

    Kind kind() const { return kind_; }
    bool is_null() const { return kind_ == Kind::Null; }

    const std::string& text() const { return text_; }  // Str and Date payload
    const Decimal& number() const { return num_; }
    int minutes() const { return minutes_; }

    /// Join equality: false if either side is Null.
    bool unifies_with(const Value& o) const { return !is_null() && !o.is_null() && *this == o; }

    /// Rendering used by CSV cells and JSON reports (no quoting).
    std::string to_display() const;

    bool operator==(const Value& o) const;
    std::strong_ordering operator<=>(const Value& o) const;

private:
    Kind kind_;
    Decimal num_;
    int minutes_ = 0;
    std::string text_;
};

enum class AttrKind : uint8_t { Str, Num, Time, Date };

const char* attr_kind_name(AttrKind k);
std::optional<AttrKind> attr_kind_from_name(std::string_view name);

struct AttributeSignature {
    std::string name;
    AttrKind kind = AttrKind::Str;

    bool operator==(const AttributeSignature&) const = default;
};

struct RelationSignature {
    std::string name;
    std::vector<AttributeSignature> attributes;

    size_t arity() const { return attributes.size(); }
    bool operator==(const RelationSignature&) const = default;
};

using Tuple = std::vector<Value>;

std::string tuple_to_display(const Tuple& t);

/// Parse one CSV cell under a declared attribute kind. Cells are trimmed and
/// an empty cell is Null. A `str` column is the open kind: numeric-looking
/// cells become Num so that one column can mix readings like 38.5 and 110/70;
/// everything else stays verbatim text. num/time/date columns are strict.
Value parse_cell(std::string_view raw, AttrKind kind);

/// Set of tuples under a fixed signature. Insertion enforces arity and value
/// kinds (str columns accept any kind, the rest accept their own kind or
/// Null). Iteration order is the canonical tuple order.
class Relation {
public:
    Relation() = default;
    explicit Relation(RelationSignature sig) : sig_(std::move(sig)) {}

    const RelationSignature& signature() const { return sig_; }
    const std::string& name() const { return sig_.name; }
    size_t arity() const { return sig_.arity(); }

    void insert(Tuple t);
    bool contains(const Tuple& t) const { return tuples_.count(t) > 0; }
    size_t size() const { return tuples_.size(); }
    bool empty() const { return tuples_.empty(); }

    const std::set<Tuple>& tuples() const { return tuples_; }
    auto begin() const { return tuples_.begin(); }
    auto end() const { return tuples_.end(); }

    bool operator==(const Relation& o) const {
        return sig_ == o.sig_ && tuples_ == o.tuples_;
    }

private:
    RelationSignature sig_;
    std::set<Tuple> tuples_;
};

/// Named relations with set semantics. Immutable by convention once built;
/// the engine copies instances rather than mutating shared ones.
class Instance {
public:
    Instance() = default;

    bool has_relation(const std::string& name) const { return rels_.count(name) > 0; }
    Relation& add_relation(RelationSignature sig);
    Relation& relation(const std::string& name);
    const Relation& relation(const std::string& name) const;
    const Relation* find(const std::string& name) const;

    void insert(const std::string& rel, Tuple t) { relation(rel).insert(std::move(t)); }

    /// Union: copies relations from `other`, merging tuples where names
    /// collide (signatures must agree).
    void merge(const Instance& other);

    size_t total_size() const;
    const std::map<std::string, Relation>& relations() const { return rels_; }

    bool operator==(const Instance& o) const { return rels_ == o.rels_; }

private:
    std::map<std::string, Relation> rels_;
};

/// |a.R △ b.R| for one relation present in both instances.
size_t symmetric_difference(const Instance& a, const Instance& b, const std::string& relation);

/// True when every tuple of every relation of `a` appears in `b`.
bool instance_contained(const Instance& a, const Instance& b);

}  // namespace dq
