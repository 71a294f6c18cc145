#include "dq/value.hpp"

#include <cctype>
#include <charconv>

namespace dq {

void Decimal::normalize() {
    if (mant_ == 0) {
        exp_ = 0;
        return;
    }
    while (exp_ > 0 && mant_ % 10 == 0) {
        mant_ /= 10;
        --exp_;
    }
}

std::optional<Decimal> Decimal::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    size_t i = 0;
    bool neg = false;
    if (text[i] == '+' || text[i] == '-') {
        neg = text[i] == '-';
        ++i;
    }
    if (i >= text.size()) return std::nullopt;
    int64_t mant = 0;
    int32_t exp = 0;
    bool any_digit = false, seen_dot = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_dot) return std::nullopt;
            seen_dot = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        if (mant > (INT64_MAX - 9) / 10) return std::nullopt;  // overflow
        mant = mant * 10 + (c - '0');
        if (seen_dot) ++exp;
        any_digit = true;
    }
    if (!any_digit) return std::nullopt;
    Decimal d;
    d.mant_ = neg ? -mant : mant;
    d.exp_ = exp;
    d.normalize();
    return d;
}

std::string Decimal::to_string() const {
    if (exp_ == 0) return std::to_string(mant_);
    std::string digits = std::to_string(mant_ < 0 ? -mant_ : mant_);
    if (static_cast<int32_t>(digits.size()) <= exp_)
        digits.insert(0, exp_ + 1 - digits.size(), '0');
    digits.insert(digits.size() - exp_, 1, '.');
    return (mant_ < 0 ? "-" : "") + digits;
}

int Decimal::compare(const Decimal& o) const {
    // Align exponents in 128-bit to keep the comparison exact.
    __int128 a = mant_, b = o.mant_;
    for (int32_t e = exp_; e < o.exp_; ++e) a *= 10;
    for (int32_t e = o.exp_; e < exp_; ++e) b *= 10;
    return a < b ? -1 : (a > b ? 1 : 0);
}

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::Null: return "null";
        case Kind::Str: return "str";
        case Kind::Num: return "num";
        case Kind::Time: return "time";
        case Kind::Date: return "date";
    }
    return "?";
}

Value Value::str(std::string s) {
    Value v;
    v.kind_ = Kind::Str;
    v.text_ = std::move(s);
    return v;
}

Value Value::num(Decimal d) {
    Value v;
    v.kind_ = Kind::Num;
    v.num_ = d;
    return v;
}

Value Value::time(int minutes) {
    Value v;
    v.kind_ = Kind::Time;
    v.minutes_ = minutes;
    return v;
}

Value Value::date(std::string tag) {
    Value v;
    v.kind_ = Kind::Date;
    v.text_ = std::move(tag);
    return v;
}

std::optional<int> Value::parse_time(std::string_view text, int max_minutes) {
    size_t colon = text.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon > 2 ||
        text.size() - colon - 1 != 2)
        return std::nullopt;
    int h = 0, m = 0;
    auto hr = std::from_chars(text.data(), text.data() + colon, h);
    auto mr = std::from_chars(text.data() + colon + 1, text.data() + text.size(), m);
    if (hr.ec != std::errc() || hr.ptr != text.data() + colon) return std::nullopt;
    if (mr.ec != std::errc() || mr.ptr != text.data() + text.size()) return std::nullopt;
    if (m < 0 || m > 59 || h < 0) return std::nullopt;
    int total = h * 60 + m;
    if (total > max_minutes) return std::nullopt;
    return total;
}

std::string Value::to_display() const {
    switch (kind_) {
        case Kind::Null: return "";
        case Kind::Str:
        case Kind::Date: return text_;
        case Kind::Num: return num_.to_string();
        case Kind::Time: {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%02d:%02d", minutes_ / 60, minutes_ % 60);
            return buf;
        }
    }
    return "";
}

bool Value::operator==(const Value& o) const {
    if (kind_ != o.kind_) return false;
    switch (kind_) {
        case Kind::Null: return true;
        case Kind::Str:
        case Kind::Date: return text_ == o.text_;
        case Kind::Num: return num_ == o.num_;
        case Kind::Time: return minutes_ == o.minutes_;
    }
    return false;
}

std::strong_ordering Value::operator<=>(const Value& o) const {
    if (kind_ != o.kind_) return kind_ <=> o.kind_;
    switch (kind_) {
        case Kind::Null: return std::strong_ordering::equal;
        case Kind::Str:
        case Kind::Date: return text_ <=> o.text_;
        case Kind::Num: return num_ <=> o.num_;
        case Kind::Time: return minutes_ <=> o.minutes_;
    }
    return std::strong_ordering::equal;
}

const char* attr_kind_name(AttrKind k) {
    switch (k) {
        case AttrKind::Str: return "str";
        case AttrKind::Num: return "num";
        case AttrKind::Time: return "time";
        case AttrKind::Date: return "date";
    }
    return "?";
}

std::optional<AttrKind> attr_kind_from_name(std::string_view name) {
    if (name == "str") return AttrKind::Str;
    if (name == "num") return AttrKind::Num;
    if (name == "time") return AttrKind::Time;
    if (name == "date") return AttrKind::Date;
    return std::nullopt;
}

std::string tuple_to_display(const Tuple& t) {
    std::string out = "(";
    for (size_t i = 0; i < t.size(); ++i) {
        if (i > 0) out += ", ";
        out += t[i].to_display();
    }
    return out + ")";
}

static std::string_view trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

Value parse_cell(std::string_view raw, AttrKind kind) {
    std::string_view cell = trim(raw);
    if (cell.empty()) return Value::null();
    switch (kind) {
        case AttrKind::Str: {
            if (auto d = Decimal::parse(cell)) return Value::num(*d);
            return Value::str(std::string(cell));
        }
        case AttrKind::Num: {
            if (auto d = Decimal::parse(cell)) return Value::num(*d);
            throw Error(ErrorCode::ValueParseError, "not a number: '" + std::string(cell) + "'");
        }
        case AttrKind::Time: {
            if (auto m = Value::parse_time(cell)) return Value::time(*m);
            throw Error(ErrorCode::ValueParseError, "not a time: '" + std::string(cell) + "'");
        }
        case AttrKind::Date:
            return Value::date(std::string(cell));
    }
    throw Error(ErrorCode::ValueParseError, "unknown column kind");
}

static bool kind_fits(AttrKind col, const Value& v) {
    if (v.is_null()) return true;
    switch (col) {
        case AttrKind::Str: return true;  // the open, mixed-kind column
        case AttrKind::Num: return v.kind() == Kind::Num;
        case AttrKind::Time: return v.kind() == Kind::Time;
        case AttrKind::Date: return v.kind() == Kind::Date;
    }
    return false;
}

void Relation::insert(Tuple t) {
    if (t.size() != sig_.arity())
        throw Error(ErrorCode::SchemaMismatch,
                    "relation " + sig_.name + ": tuple arity " + std::to_string(t.size()) +
                        " != " + std::to_string(sig_.arity()));
    for (size_t i = 0; i < t.size(); ++i) {
        if (!kind_fits(sig_.attributes[i].kind, t[i]))
            throw Error(ErrorCode::SchemaMismatch,
                        "relation " + sig_.name + ", column " + sig_.attributes[i].name +
                            ": value " + t[i].to_display() + " has kind " +
                            kind_name(t[i].kind()) + ", expected " +
                            attr_kind_name(sig_.attributes[i].kind));
    }
    tuples_.insert(std::move(t));
}

Relation& Instance::add_relation(RelationSignature sig) {
    auto it = rels_.find(sig.name);
    if (it != rels_.end()) {
        if (!(it->second.signature() == sig))
            throw Error(ErrorCode::SchemaMismatch,
                        "conflicting signatures for relation " + sig.name);
        return it->second;
    }
    std::string name = sig.name;
    return rels_.emplace(name, Relation(std::move(sig))).first->second;
}

Relation& Instance::relation(const std::string& name) {
    auto it = rels_.find(name);
    if (it == rels_.end()) throw Error(ErrorCode::MissingRelation, name);
    return it->second;
}

const Relation& Instance::relation(const std::string& name) const {
    auto it = rels_.find(name);
    if (it == rels_.end()) throw Error(ErrorCode::MissingRelation, name);
    return it->second;
}

const Relation* Instance::find(const std::string& name) const {
    auto it = rels_.find(name);
    return it == rels_.end() ? nullptr : &it->second;
}

void Instance::merge(const Instance& other) {
    for (const auto& [name, rel] : other.rels_) {
        auto it = rels_.find(name);
        if (it == rels_.end()) {
            rels_.emplace(name, rel);
            continue;
        }
        if (!(it->second.signature() == rel.signature()))
            throw Error(ErrorCode::SchemaMismatch, "merge: signatures differ for " + name);
        for (const auto& t : rel) it->second.insert(t);
    }
}

size_t Instance::total_size() const {
    size_t n = 0;
    for (const auto& [_, rel] : rels_) n += rel.size();
    return n;
}

size_t symmetric_difference(const Instance& a, const Instance& b, const std::string& relation) {
    const Relation* ra = a.find(relation);
    const Relation* rb = b.find(relation);
    if (!ra || !rb)
        throw Error(ErrorCode::SchemaMismatch, "relation " + relation + " missing from an operand");
    if (!(ra->signature() == rb->signature()))
        throw Error(ErrorCode::SchemaMismatch, "signatures differ for " + relation);
    size_t n = 0;
    for (const auto& t : *ra)
        if (!rb->contains(t)) ++n;
    for (const auto& t : *rb)
        if (!ra->contains(t)) ++n;
    return n;
}

bool instance_contained(const Instance& a, const Instance& b) {
    for (const auto& [name, rel] : a.relations()) {
        if (rel.empty()) continue;
        const Relation* other = b.find(name);
        if (!other) return false;
        for (const auto& t : rel)
            if (!other->contains(t)) return false;
    }
    return true;
}

}  // namespace dq
