#include "dq/parser.hpp"

#include <cctype>
#include <functional>
#include <sstream>

namespace dq {

namespace {

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
bool tag_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '/';
}

}  // namespace

void syntax_error(const Token& at, const std::string& msg) {
    std::ostringstream os;
    os << "line " << at.line << ", column " << at.col << ": " << msg;
    if (!at.text.empty()) os << " (at '" << at.text << "')";
    throw Error(ErrorCode::SyntaxError, os.str());
}

Tokenizer::Tokenizer(std::string_view text) {
    size_t i = 0;
    int line = 1, col = 1;
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (text[i + k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        i += n;
    };
    auto push = [&](Token::Type t, std::string s, int l, int c) {
        Token tok;
        tok.type = t;
        tok.text = std::move(s);
        tok.line = l;
        tok.col = c;
        tokens_.push_back(std::move(tok));
        return &tokens_.back();
    };

    while (i < text.size()) {
        char c = text[i];
        int l = line, cl = col;
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '%') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        // UTF-8 left arrow accepted for ":-"
        if (static_cast<unsigned char>(c) == 0xE2 && i + 2 < text.size() &&
            static_cast<unsigned char>(text[i + 1]) == 0x86 &&
            static_cast<unsigned char>(text[i + 2]) == 0x90) {
            advance(3);
            push(Token::Type::Arrow, ":-", l, cl);
            continue;
        }
        if (ident_start(c) || c == '#') {
            bool external = c == '#';
            size_t j = i + (external ? 1 : 0);
            if (external && (j >= text.size() || !ident_start(text[j]))) {
                Token bad;
                bad.line = l;
                bad.col = cl;
                bad.text = "#";
                syntax_error(bad, "expected identifier after '#'");
            }
            size_t start = j;
            while (j < text.size() && ident_char(text[j])) ++j;
            // A slash directly after an identifier makes a date tag.
            if (!external && j < text.size() && text[j] == '/' && j + 1 < text.size() &&
                tag_char(text[j + 1])) {
                while (j < text.size() && tag_char(text[j])) ++j;
                std::string tag(text.substr(i, j - i));
                advance(j - i);
                auto* t = push(Token::Type::DateTag, tag, l, cl);
                t->value = Value::date(tag);
                continue;
            }
            std::string name(text.substr(start, j - start));
            advance(j - i);
            push(external ? Token::Type::HashIdent : Token::Type::Ident,
                 external ? "#" + name : name, l, cl);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && i + 1 < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            size_t j = i + (c == '-' ? 1 : 0);
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            // Time literal: 1-2 hour digits, colon, exactly 2 minute digits.
            size_t hour_digits = j - i;
            bool minutes_follow = j + 2 < text.size() && text[j] == ':' &&
                                  std::isdigit(static_cast<unsigned char>(text[j + 1])) &&
                                  std::isdigit(static_cast<unsigned char>(text[j + 2]));
            if (c != '-' && hour_digits <= 2 && minutes_follow &&
                !(j + 3 < text.size() && std::isdigit(static_cast<unsigned char>(text[j + 3])))) {
                std::string lit(text.substr(i, j + 3 - i));
                auto m = Value::parse_time(lit, 1440);
                if (!m) {
                    Token bad;
                    bad.line = l;
                    bad.col = cl;
                    bad.text = lit;
                    syntax_error(bad, "invalid time literal");
                }
                advance(j + 3 - i);
                auto* t = push(Token::Type::TimeLit, lit, l, cl);
                t->value = Value::time(*m);
                continue;
            }
            if (j < text.size() && text[j] == '.' && j + 1 < text.size() &&
                std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
                ++j;
                while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            }
            // Digits followed by '/' form a date tag (e.g. 9/11).
            if (c != '-' && j < text.size() && text[j] == '/' && j + 1 < text.size() &&
                tag_char(text[j + 1]) && text.substr(i, j - i).find('.') == std::string_view::npos) {
                while (j < text.size() && tag_char(text[j])) ++j;
                std::string tag(text.substr(i, j - i));
                advance(j - i);
                auto* t = push(Token::Type::DateTag, tag, l, cl);
                t->value = Value::date(tag);
                continue;
            }
            std::string lit(text.substr(i, j - i));
            auto d = Decimal::parse(lit);
            if (!d) {
                Token bad;
                bad.line = l;
                bad.col = cl;
                bad.text = lit;
                syntax_error(bad, "invalid number literal");
            }
            advance(j - i);
            auto* t = push(Token::Type::Number, lit, l, cl);
            t->value = Value::num(*d);
            continue;
        }
        if (c == '"') {
            std::string s;
            size_t j = i + 1;
            bool closed = false;
            while (j < text.size()) {
                if (text[j] == '\\' && j + 1 < text.size()) {
                    s += text[j + 1];
                    j += 2;
                    continue;
                }
                if (text[j] == '"') {
                    closed = true;
                    ++j;
                    break;
                }
                s += text[j];
                ++j;
            }
            if (!closed) {
                Token bad;
                bad.line = l;
                bad.col = cl;
                syntax_error(bad, "unterminated string literal");
            }
            advance(j - i);
            auto* t = push(Token::Type::String, s, l, cl);
            t->value = s.empty() ? Value::null() : Value::str(s);
            continue;
        }
        auto simple = [&](Token::Type t, size_t n) {
            std::string s(text.substr(i, n));
            advance(n);
            push(t, s, l, cl);
        };
        auto cmp = [&](CmpOp op, size_t n) {
            std::string s(text.substr(i, n));
            advance(n);
            auto* t = push(Token::Type::Cmp, s, l, cl);
            t->op = op;
        };
        char c2 = i + 1 < text.size() ? text[i + 1] : '\0';
        switch (c) {
            case '(': simple(Token::Type::LParen, 1); continue;
            case ')': simple(Token::Type::RParen, 1); continue;
            case '{': simple(Token::Type::LBrace, 1); continue;
            case '}': simple(Token::Type::RBrace, 1); continue;
            case ',': simple(Token::Type::Comma, 1); continue;
            case '.': simple(Token::Type::Dot, 1); continue;
            case ':':
                if (c2 == '-') {
                    simple(Token::Type::Arrow, 2);
                } else {
                    simple(Token::Type::Colon, 1);
                }
                continue;
            case '-':
                if (c2 == '>') {
                    simple(Token::Type::RArrow, 2);
                    continue;
                }
                break;
            case '=': cmp(CmpOp::Eq, 1); continue;
            case '!':
                if (c2 == '=') {
                    cmp(CmpOp::Ne, 2);
                    continue;
                }
                break;
            case '<': c2 == '=' ? cmp(CmpOp::Le, 2) : cmp(CmpOp::Lt, 1); continue;
            case '>': c2 == '=' ? cmp(CmpOp::Ge, 2) : cmp(CmpOp::Gt, 1); continue;
            default: break;
        }
        Token bad;
        bad.line = l;
        bad.col = cl;
        bad.text = std::string(1, c);
        syntax_error(bad, "unexpected character");
    }
    Token end;
    end.type = Token::Type::End;
    end.line = line;
    end.col = col;
    tokens_.push_back(end);
}

Term parse_term(Tokenizer& tz) {
    Token t = tz.next();
    switch (t.type) {
        case Token::Type::Ident:
            if (std::islower(static_cast<unsigned char>(t.text[0])))
                return Term::make_var(t.text);
            return Term::make_const(Value::str(t.text));
        case Token::Type::String:
        case Token::Type::Number:
        case Token::Type::TimeLit:
        case Token::Type::DateTag:
            return Term::make_const(t.value);
        default:
            syntax_error(t, "expected a term");
    }
}

static RelAtom parse_rel_atom_tail(Tokenizer& tz, std::string pred) {
    RelAtom a;
    a.pred = std::move(pred);
    Token lp = tz.next();
    if (lp.type != Token::Type::LParen) syntax_error(lp, "expected '('");
    if (tz.peek().type == Token::Type::RParen) {
        tz.next();
        return a;
    }
    for (;;) {
        a.args.push_back(parse_term(tz));
        Token sep = tz.next();
        if (sep.type == Token::Type::Comma) continue;
        if (sep.type == Token::Type::RParen) break;
        syntax_error(sep, "expected ',' or ')'");
    }
    return a;
}

Atom parse_atom(Tokenizer& tz) {
    const Token& t = tz.peek();
    bool call_shape = (t.type == Token::Type::Ident || t.type == Token::Type::HashIdent) &&
                      tz.peek2().type == Token::Type::LParen;
    if (call_shape) {
        Token name = tz.next();
        return parse_rel_atom_tail(tz, name.text);
    }
    BuiltinAtom b;
    b.terms.push_back(parse_term(tz));
    Token op = tz.next();
    if (op.type != Token::Type::Cmp) syntax_error(op, "expected comparison operator");
    b.ops.push_back(op.op);
    b.terms.push_back(parse_term(tz));
    if (tz.peek().type == Token::Type::Cmp) {
        Token op2 = tz.next();
        if (!is_ordering(b.ops[0]) || !is_ordering(op2.op))
            syntax_error(op2, "only ordering comparisons can be chained");
        b.ops.push_back(op2.op);
        b.terms.push_back(parse_term(tz));
    }
    return b;
}

Rule parse_rule(Tokenizer& tz) {
    Rule r;
    Atom head = parse_atom(tz);
    const auto* rel = as_rel(head);
    if (!rel) syntax_error(tz.peek(), "rule head must be a relational atom");
    if (rel->is_external()) syntax_error(tz.peek(), "external predicates cannot be defined by rules");
    r.head = *rel;
    Token t = tz.next();
    if (t.type == Token::Type::Dot) return r;  // fact
    if (t.type != Token::Type::Arrow) syntax_error(t, "expected ':-' or '.'");
    for (;;) {
        r.body.push_back(parse_atom(tz));
        Token sep = tz.next();
        if (sep.type == Token::Type::Comma) continue;
        if (sep.type == Token::Type::Dot) break;
        syntax_error(sep, "expected ',' or '.'");
    }
    return r;
}

namespace {

void check_rule_safety(const Rule& r) {
    std::set<std::string> bound;
    for (const auto& a : r.body) {
        if (const auto* rel = as_rel(a)) {
            for (const auto& t : rel->args)
                if (t.is_var()) bound.insert(t.var);
        } else if (const auto* b = as_builtin(a); b && b->is_const_equality()) {
            bound.insert(b->const_eq_var().var);
        }
    }
    for (const auto& t : r.head.args)
        if (t.is_var() && !bound.count(t.var))
            throw Error(ErrorCode::SafetyViolation,
                        "variable " + t.var + " in head of '" + to_string(r) +
                            "' is not bound by a body atom");
    for (const auto& a : r.body) {
        const auto* b = as_builtin(a);
        if (!b) continue;
        for (const auto& t : b->terms)
            if (t.is_var() && !bound.count(t.var))
                throw Error(ErrorCode::SafetyViolation,
                            "variable " + t.var + " in built-in of '" + to_string(r) +
                                "' is not bound by a body atom");
    }
}

void check_builtin_kinds(const Rule& r) {
    for (const auto& a : r.body) {
        const auto* b = as_builtin(a);
        if (!b) continue;
        for (size_t i = 0; i < b->ops.size(); ++i) {
            if (!is_ordering(b->ops[i])) continue;
            for (const Term* t : {&b->terms[i], &b->terms[i + 1]}) {
                if (t->is_const() && t->value.kind() != Kind::Num &&
                    t->value.kind() != Kind::Time)
                    throw Error(ErrorCode::SyntaxError,
                                "ordering comparison needs num or time operands in '" +
                                    to_string(r) + "'");
            }
            if (b->terms[i].is_const() && b->terms[i + 1].is_const() &&
                b->terms[i].value.kind() != b->terms[i + 1].value.kind())
                throw Error(ErrorCode::SyntaxError,
                            "ordering comparison over mixed kinds in '" + to_string(r) + "'");
        }
    }
}

void check_recursion(const Program& p) {
    std::map<std::string, std::set<std::string>> deps;
    for (const auto& r : p.rules)
        for (const auto& a : r.body)
            if (const auto* rel = as_rel(a)) deps[r.head.pred].insert(rel->pred);

    enum class Mark { None, Active, Done };
    std::map<std::string, Mark> marks;
    std::vector<std::string> path;
    std::function<void(const std::string&)> visit = [&](const std::string& pred) {
        auto& m = marks[pred];
        if (m == Mark::Done) return;
        if (m == Mark::Active) {
            std::string cycle;
            auto it = std::find(path.begin(), path.end(), pred);
            for (; it != path.end(); ++it) cycle += *it + " -> ";
            throw Error(ErrorCode::RecursionDetected, cycle + pred);
        }
        m = Mark::Active;
        path.push_back(pred);
        for (const auto& next : deps[pred]) visit(next);
        path.pop_back();
        marks[pred] = Mark::Done;
    };
    for (const auto& [pred, _] : deps) visit(pred);
}

}  // namespace

void check_program(const Program& p, const std::map<std::string, size_t>* declared_arities) {
    std::map<std::string, size_t> arity;
    if (declared_arities) arity = *declared_arities;
    auto note = [&](const RelAtom& a) {
        auto [it, fresh] = arity.try_emplace(a.pred, a.args.size());
        if (!fresh && it->second != a.args.size())
            throw Error(ErrorCode::SchemaMismatch,
                        "predicate " + a.pred + " used with arity " +
                            std::to_string(a.args.size()) + " and " + std::to_string(it->second));
    };
    for (const auto& r : p.rules) {
        note(r.head);
        for (const auto& a : r.body)
            if (const auto* rel = as_rel(a)) note(*rel);
        if (r.body.empty()) {
            for (const auto& t : r.head.args)
                if (t.is_var())
                    throw Error(ErrorCode::SafetyViolation,
                                "fact '" + to_string(r) + "' must be ground");
        }
        check_rule_safety(r);
        check_builtin_kinds(r);
    }
    check_recursion(p);
}

Program parse_program(const std::string& text,
                      const std::map<std::string, size_t>* declared_arities) {
    Tokenizer tz(text);
    Program p;
    while (!tz.at_end()) p.rules.push_back(parse_rule(tz));

    auto defined = p.idb();
    for (const auto& r : p.rules) {
        for (const auto& a : r.body) {
            const auto* rel = as_rel(a);
            if (!rel) continue;
            if (rel->is_external())
                p.externals.insert(rel->pred);
            else if (!defined.count(rel->pred))
                p.edb.insert(rel->pred);
        }
    }
    check_program(p, declared_arities);
    return p;
}

Query parse_query(const std::string& text,
                  const std::map<std::string, size_t>* declared_arities) {
    Query q;
    q.program = parse_program(text, declared_arities);
    if (q.program.rules.empty())
        throw Error(ErrorCode::SyntaxError, "query file contains no rules");
    std::set<std::string> body_preds;
    for (const auto& r : q.program.rules)
        for (const auto& a : r.body)
            if (const auto* rel = as_rel(a)) body_preds.insert(rel->pred);
    std::set<std::string> sinks;
    for (const auto& r : q.program.rules)
        if (!body_preds.count(r.head.pred)) sinks.insert(r.head.pred);
    if (sinks.size() != 1) {
        std::string names;
        for (const auto& s : sinks) names += (names.empty() ? "" : ", ") + s;
        throw Error(ErrorCode::SyntaxError,
                    "query must have exactly one answer predicate, found " +
                        std::to_string(sinks.size()) + (names.empty() ? "" : ": " + names));
    }
    q.answer = *sinks.begin();
    return q;
}

}  // namespace dq
