#include "dq/dqx.hpp"

#include <fstream>
#include <sstream>

#include "dq/csv.hpp"
#include "dq/parser.hpp"

namespace dq {

namespace {

RelationSignature parse_relation_decl(Tokenizer& tz) {
    Token name = tz.next();
    if (name.type != Token::Type::Ident) syntax_error(name, "expected relation name");
    RelationSignature sig;
    sig.name = name.text;
    Token lp = tz.next();
    if (lp.type != Token::Type::LParen) syntax_error(lp, "expected '('");
    for (;;) {
        Token attr = tz.next();
        if (attr.type != Token::Type::Ident) syntax_error(attr, "expected attribute name");
        Token colon = tz.next();
        if (colon.type != Token::Type::Colon) syntax_error(colon, "expected ':'");
        Token kind = tz.next();
        if (kind.type != Token::Type::Ident) syntax_error(kind, "expected attribute kind");
        auto k = attr_kind_from_name(kind.text);
        if (!k) syntax_error(kind, "attribute kind must be str, num, time or date");
        for (const auto& a : sig.attributes)
            if (a.name == attr.text)
                syntax_error(attr, "duplicate attribute name in relation " + sig.name);
        sig.attributes.push_back({attr.text, *k});
        Token sep = tz.next();
        if (sep.type == Token::Type::Comma) continue;
        if (sep.type == Token::Type::RParen) break;
        syntax_error(sep, "expected ',' or ')'");
    }
    if (sig.attributes.empty()) syntax_error(name, "relation needs at least one attribute");
    Token dot = tz.next();
    if (dot.type != Token::Type::Dot) syntax_error(dot, "expected '.'");
    return sig;
}

ExternalDecl parse_external_decl(Tokenizer& tz) {
    ExternalDecl decl;
    Token name = tz.next();
    if (name.type != Token::Type::HashIdent) syntax_error(name, "expected '#'-prefixed name");
    decl.name = name.text;
    decl.signature.name = name.text.substr(1);
    Token lp = tz.next();
    if (lp.type != Token::Type::LParen) syntax_error(lp, "expected '('");
    size_t inputs = 0;
    bool after_arrow = tz.peek().type == Token::Type::RArrow;
    if (after_arrow) tz.next();
    for (;;) {
        Token attr = tz.next();
        if (attr.type != Token::Type::Ident) syntax_error(attr, "expected attribute name");
        Token colon = tz.next();
        if (colon.type != Token::Type::Colon) syntax_error(colon, "expected ':'");
        Token kind = tz.next();
        auto k = kind.type == Token::Type::Ident ? attr_kind_from_name(kind.text) : std::nullopt;
        if (!k) syntax_error(kind, "attribute kind must be str, num, time or date");
        decl.signature.attributes.push_back({attr.text, *k});
        if (!after_arrow) ++inputs;
        Token sep = tz.next();
        if (sep.type == Token::Type::Comma) continue;
        if (sep.type == Token::Type::RArrow) {
            if (after_arrow) syntax_error(sep, "'->' appears twice");
            after_arrow = true;
            continue;
        }
        if (sep.type == Token::Type::RParen) break;
        syntax_error(sep, "expected ',', '->' or ')'");
    }
    Token kw = tz.next();
    if (kw.type != Token::Type::Ident || kw.text != "binding")
        syntax_error(kw, "expected 'binding'");
    Token pattern = tz.next();
    if (pattern.type != Token::Type::String) syntax_error(pattern, "expected binding string");
    decl.binding = pattern.text;
    if (tz.peek().type == Token::Type::Ident && tz.peek().text == "table") {
        tz.next();
        Token path = tz.next();
        if (path.type != Token::Type::String) syntax_error(path, "expected table path string");
        decl.table = path.text;
    }
    Token dot = tz.next();
    if (dot.type != Token::Type::Dot) syntax_error(dot, "expected '.'");

    std::string expected(inputs, 'b');
    expected += std::string(decl.signature.arity() - inputs, 'f');
    if (decl.binding != expected)
        throw Error(ErrorCode::InvalidSystem,
                    decl.name + ": binding \"" + decl.binding +
                        "\" does not match the input/output split (expected \"" + expected + "\")");
    return decl;
}

}  // namespace

ContextualSystem parse_system_text(const std::string& text, const std::filesystem::path& base_dir) {
    ContextualSystem sys;
    sys.baseDir = base_dir;
    std::vector<std::filesystem::path> data_dirs;
    std::set<std::string> opened;

    Tokenizer tz(text);
    while (!tz.at_end()) {
        Token section = tz.next();
        if (section.type != Token::Type::Ident) syntax_error(section, "expected section name");
        const std::string& kind = section.text;
        if (kind != "source" && kind != "context" && kind != "external" && kind != "mapping" &&
            kind != "cqp" && kind != "quality")
            syntax_error(section, "unknown section; expected source, context, external, "
                                  "mapping, cqp or quality");
        Token lb = tz.next();
        if (lb.type != Token::Type::LBrace) syntax_error(lb, "expected '{'");
        while (tz.peek().type != Token::Type::RBrace) {
            if (tz.peek().type == Token::Type::End)
                syntax_error(tz.peek(), "unterminated section " + kind);
            const Token& head = tz.peek();
            if (kind == "source") {
                if (head.type == Token::Type::Ident && head.text == "relation") {
                    tz.next();
                    sys.sourceSchema.push_back(parse_relation_decl(tz));
                    continue;
                }
                syntax_error(head, "source section admits only relation declarations");
            }
            if (kind == "context") {
                if (head.type == Token::Type::Ident && head.text == "relation" &&
                    tz.peek2().type == Token::Type::Ident) {
                    tz.next();
                    sys.contextSchema.push_back(parse_relation_decl(tz));
                    continue;
                }
                if (head.type == Token::Type::Ident && head.text == "data" &&
                    tz.peek2().type == Token::Type::String) {
                    tz.next();
                    Token dir = tz.next();
                    data_dirs.push_back(dir.text);
                    Token dot = tz.next();
                    if (dot.type != Token::Type::Dot) syntax_error(dot, "expected '.'");
                    continue;
                }
                if (head.type == Token::Type::Ident &&
                    (head.text == "closed" || head.text == "open") &&
                    tz.peek2().type == Token::Type::Ident) {
                    Token marker = tz.next();
                    Token rel = tz.next();
                    Token dot = tz.next();
                    if (dot.type != Token::Type::Dot) syntax_error(dot, "expected '.'");
                    if (marker.text == "closed")
                        sys.closedContextRelations.insert(rel.text);
                    else
                        opened.insert(rel.text);
                    continue;
                }
                sys.contextRules.push_back(parse_rule(tz));
                continue;
            }
            if (kind == "external") {
                if (head.type == Token::Type::Ident && head.text == "external") {
                    tz.next();
                    sys.externals.push_back(parse_external_decl(tz));
                    continue;
                }
                syntax_error(head, "external section admits only external declarations");
            }
            if (kind == "mapping") {
                if (head.type == Token::Type::Ident &&
                    (head.text == "copy" || head.text == "open") &&
                    tz.peek2().type == Token::Type::Ident) {
                    Token op = tz.next();
                    Token src = tz.next();
                    Token arrow = tz.next();
                    if (arrow.type != Token::Type::RArrow) syntax_error(arrow, "expected '->'");
                    Token nick = tz.next();
                    if (nick.type != Token::Type::Ident) syntax_error(nick, "expected nickname");
                    Token dot = tz.next();
                    if (dot.type != Token::Type::Dot) syntax_error(dot, "expected '.'");
                    if (op.text == "copy")
                        sys.copies.push_back({src.text, nick.text});
                    else
                        sys.opens.push_back({src.text, nick.text});
                    continue;
                }
                if (head.type == Token::Type::Ident && head.text == "footprint") {
                    tz.next();
                    sys.footprints.push_back({parse_rule(tz)});
                    continue;
                }
                syntax_error(head, "mapping section admits copy, open and footprint entries");
            }
            if (kind == "cqp") {
                Rule r = parse_rule(tz);
                sys.qualityPredicates.insert(r.head.pred);
                sys.cqps.push_back({std::move(r)});
                continue;
            }
            // quality
            Rule r = parse_rule(tz);
            const std::string& headp = r.head.pred;
            auto pos = headp.rfind("_P");
            if (pos == std::string::npos || pos + 2 != headp.size())
                throw Error(ErrorCode::InvalidSystem,
                            "quality view head must be named <Source>_P, got " + headp);
            std::string source = headp.substr(0, pos);
            if (!sys.source_signature(source))
                throw Error(ErrorCode::InvalidSystem,
                            "quality view " + headp + " names unknown source relation " + source);
            sys.qualityViews.push_back({source, std::move(r)});
        }
        tz.next();  // '}'
    }

    // Nicknames inherit their source signature and the mapping kind decides
    // exactness: copies are closed, open mappings stay open.
    for (const auto& m : sys.copies) {
        const auto* src = sys.source_signature(m.source);
        if (!src) throw Error(ErrorCode::InvalidSystem, "copy of unknown source " + m.source);
        if (!sys.context_signature(m.nickname)) {
            RelationSignature nick = *src;
            nick.name = m.nickname;
            sys.contextSchema.push_back(nick);
        }
        sys.closedContextRelations.insert(m.nickname);
    }
    for (const auto& m : sys.opens) {
        const auto* src = sys.source_signature(m.source);
        if (!src) throw Error(ErrorCode::InvalidSystem, "open mapping of unknown source " + m.source);
        if (!sys.context_signature(m.nickname)) {
            RelationSignature nick = *src;
            nick.name = m.nickname;
            sys.contextSchema.push_back(nick);
        }
        opened.insert(m.nickname);
    }

    // Declared contextual relations default to closed (exact).
    for (const auto& sig : sys.contextSchema)
        if (!opened.count(sig.name)) sys.closedContextRelations.insert(sig.name);
    for (const auto& name : opened) sys.closedContextRelations.erase(name);

    for (const auto& dir : data_dirs) {
        std::filesystem::path p = dir;
        if (p.is_relative()) p = base_dir / p;
        Instance data = load_facts_partial(p, sys.contextSchema);
        sys.contextualData.merge(data);
    }
    for (const auto& sig : sys.contextSchema)
        if (!sys.contextualData.has_relation(sig.name)) sys.contextualData.add_relation(sig);

    sys.validate();
    return sys;
}

ContextualSystem parse_system_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingRelation, "cannot open system file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_system_text(buf.str(), path.parent_path());
}

}  // namespace dq
