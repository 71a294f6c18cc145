#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dq/ast.hpp"

namespace dq {

/// Rule DSL tokens. The tokenizer is shared by the program parser and the
/// .dqx system parser.
struct Token {
    enum class Type {
        Ident,      // starts with letter/underscore; lowercase start = variable in term position
        HashIdent,  // '#name' — external predicate
        String,     // double-quoted
        Number,
        TimeLit,    // HH:MM
        DateTag,    // slash-joined opaque tag, e.g. Sep/5
        LParen, RParen, LBrace, RBrace,
        Comma, Dot, Colon, Arrow, RArrow,
        Cmp,        // = != < <= > >=
        End,
    };
    Type type;
    std::string text;
    Value value;   // Number / TimeLit / DateTag payload
    CmpOp op = CmpOp::Eq;
    int line = 1, col = 1;
};

class Tokenizer {
public:
    explicit Tokenizer(std::string_view text);
    const Token& peek() const { return tokens_[pos_]; }
    const Token& peek2() const { return tokens_[std::min(pos_ + 1, tokens_.size() - 1)]; }
    Token next() { return tokens_[pos_ == tokens_.size() - 1 ? pos_ : pos_++]; }
    bool at_end() const { return peek().type == Token::Type::End; }

private:
    std::vector<Token> tokens_;
    size_t pos_ = 0;
};

[[noreturn]] void syntax_error(const Token& at, const std::string& msg);

/// Shared grammar pieces, reused by the .dqx parser.
Term parse_term(Tokenizer& tz);
Atom parse_atom(Tokenizer& tz);
Rule parse_rule(Tokenizer& tz);

/// Parses a full program and runs all well-formedness checks: arity
/// consistency, rule safety, and non-recursion. Predicates without defining
/// rules become edb ('#'-prefixed ones become externals).
Program parse_program(const std::string& text,
                      const std::map<std::string, size_t>* declared_arities = nullptr);

/// Parses a program and designates the answer predicate: the unique head
/// predicate that occurs in no rule body.
Query parse_query(const std::string& text,
                  const std::map<std::string, size_t>* declared_arities = nullptr);

/// Checks run by parse_program; also used for programs built in code.
void check_program(const Program& p, const std::map<std::string, size_t>* declared_arities = nullptr);

}  // namespace dq
