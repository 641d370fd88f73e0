#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gqw/error.hpp"
#include "gqw/graph/element_ref.hpp"
#include "gqw/graph/property_graph.hpp"
#include "gqw/graph/value.hpp"

// Parser for the read-only query subset this project emits and executes:
//
//   statement := match+ [WHERE pred (AND pred)*] RETURN item (',' item)*
//   match     := MATCH path (',' path)*
//   path      := node (rel node)*
//   node      := '(' [var] (':' name)* [props] ')'
//   rel       := '-' '[' [var] [':' name] [props] ']' '-' ['>'] | '<-' '[' ... ']' '-'
//   props     := '{' name ':' literal (',' name ':' literal)* '}'
//   pred      := var '.' name '=' literal | id '(' var ')' '<>' id '(' var ')'
//   item      := var | id '(' var ')' [AS name]
//
// Anything else, including every writing clause, is a parse error.

namespace gqw::cypher {

struct NodePattern {
    std::string var;
    LabelSet labels;
    PropertyMap properties;
};

enum class Direction { Undirected, Outgoing, Incoming };

struct RelPattern {
    std::string var;
    std::optional<std::string> type;
    PropertyMap properties;
    Direction direction = Direction::Undirected;
};

struct PathPattern {
    NodePattern start;
    std::vector<std::pair<RelPattern, NodePattern>> hops;
};

struct MatchClause {
    std::vector<PathPattern> paths;
};

struct PropertyEquals {
    std::string var;
    std::string key;
    Scalar value;
};

struct IdsDiffer {
    std::string left;
    std::string right;
};

using Predicate = std::variant<PropertyEquals, IdsDiffer>;

struct ReturnItem {
    std::string var;
    bool id_only = false;
    std::string alias;
};

struct Statement {
    std::vector<MatchClause> matches;
    std::vector<Predicate> where;
    std::vector<ReturnItem> returns;
    /// Variable name -> element kind, for every variable the statement binds.
    std::map<std::string, ElementKind> variables;
};

namespace detail {

enum class Tok { Ident, Quoted, String, Integer, Float, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t offset = 0;
};

inline std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto fail = [&](const std::string& msg) {
        throw Error(ErrorCode::ParseError, "offset " + std::to_string(i) + ": " + msg);
    };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token t;
        t.offset = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            t.kind = Tok::Ident;
            t.text = std::string(src.substr(i, j - i));
            i = j;
        } else if (c == '`') {
            std::string s;
            ++i;
            for (;;) {
                if (i >= src.size()) fail("unterminated quoted name");
                if (src[i] == '`') {
                    if (i + 1 < src.size() && src[i + 1] == '`') {
                        s += '`';
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                s += src[i++];
            }
            t.kind = Tok::Quoted;
            t.text = std::move(s);
        } else if (c == '"' || c == '\'') {
            const char quote = c;
            std::string s;
            ++i;
            for (;;) {
                if (i >= src.size()) fail("unterminated string literal");
                char ch = src[i++];
                if (ch == quote) break;
                if (ch == '\\') {
                    if (i >= src.size()) fail("dangling escape");
                    char e = src[i++];
                    switch (e) {
                    case 'n': s += '\n'; break;
                    case 'r': s += '\r'; break;
                    case 't': s += '\t'; break;
                    case '\\': s += '\\'; break;
                    case '"': s += '"'; break;
                    case '\'': s += '\''; break;
                    default: fail(std::string("unknown escape \\") + e);
                    }
                } else {
                    s += ch;
                }
            }
            t.kind = Tok::String;
            t.text = std::move(s);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            bool is_float = false;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                is_float = true;
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    is_float = true;
                    j = k;
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                }
            }
            t.kind = is_float ? Tok::Float : Tok::Integer;
            t.text = std::string(src.substr(i, j - i));
            i = j;
        } else if (c == '<' && i + 1 < src.size() && src[i + 1] == '>') {
            t.kind = Tok::Punct;
            t.text = "<>";
            i += 2;
        } else if (std::string_view("()[]{}:,.-><=$").find(c) != std::string_view::npos) {
            t.kind = Tok::Punct;
            t.text = std::string(1, c);
            ++i;
        } else {
            fail(std::string("unexpected character '") + c + "'");
        }
        out.push_back(std::move(t));
    }
    out.push_back(Token{Tok::End, "", src.size()});
    return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::toupper(static_cast<unsigned char>(x)) == std::toupper(static_cast<unsigned char>(y));
           });
}

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

    Statement parse() {
        Statement st;
        if (!keyword("MATCH")) fail_here("expected MATCH");
        while (accept_keyword("MATCH")) {
            MatchClause clause;
            clause.paths.push_back(path(st));
            while (accept(","))
                clause.paths.push_back(path(st));
            st.matches.push_back(std::move(clause));
        }
        if (accept_keyword("WHERE")) {
            st.where.push_back(predicate(st));
            while (accept_keyword("AND")) st.where.push_back(predicate(st));
        }
        expect_keyword("RETURN");
        st.returns.push_back(return_item(st));
        while (accept(",")) st.returns.push_back(return_item(st));
        if (peek().kind != Tok::End) fail_here("unexpected trailing input '" + peek().text + "'");
        std::set<std::string> cols;
        for (const auto& r : st.returns)
            if (!cols.insert(r.alias).second) fail_here("duplicate return column '" + r.alias + "'");
        return st;
    }

private:
    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }

    [[noreturn]] void fail_here(const std::string& msg) const {
        throw Error(ErrorCode::ParseError, "offset " + std::to_string(peek().offset) + ": " + msg);
    }

    bool is_punct(std::string_view p, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
    }
    bool accept(std::string_view p) {
        if (!is_punct(p)) return false;
        ++pos_;
        return true;
    }
    void expect(std::string_view p) {
        if (!accept(p)) fail_here("expected '" + std::string(p) + "'");
    }
    bool keyword(std::string_view kw) const { return peek().kind == Tok::Ident && iequals(peek().text, kw); }
    bool accept_keyword(std::string_view kw) {
        if (!keyword(kw)) return false;
        ++pos_;
        return true;
    }
    void expect_keyword(std::string_view kw) {
        if (!accept_keyword(kw)) fail_here("expected " + std::string(kw) + (peek().kind == Tok::End ? "" : ", got '" + peek().text + "'"));
    }

    std::string name() {
        const auto& t = peek();
        if (t.kind != Tok::Ident && t.kind != Tok::Quoted) fail_here("expected a name");
        ++pos_;
        return t.text;
    }

    std::string variable() {
        const auto& t = peek();
        if (t.kind != Tok::Ident) fail_here("expected a variable");
        for (auto kw : {"MATCH", "WHERE", "RETURN", "AND", "AS"})
            if (iequals(t.text, kw)) fail_here("reserved word used as variable");
        ++pos_;
        return t.text;
    }

    Scalar literal() {
        bool negative = accept("-");
        const auto t = peek();
        switch (t.kind) {
        case Tok::Integer: {
            ++pos_;
            std::int64_t v = 0;
            std::string text = (negative ? "-" : "") + t.text;
            auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc()) fail_here("integer literal out of range");
            return v;
        }
        case Tok::Float: {
            ++pos_;
            double v = std::stod(t.text);
            return negative ? -v : v;
        }
        case Tok::String:
            if (negative) fail_here("unexpected '-'");
            ++pos_;
            return t.text;
        case Tok::Ident:
            if (!negative && iequals(t.text, "true")) {
                ++pos_;
                return true;
            }
            if (!negative && iequals(t.text, "false")) {
                ++pos_;
                return false;
            }
            [[fallthrough]];
        default:
            fail_here("expected a literal");
        }
    }

    PropertyMap properties() {
        PropertyMap props;
        expect("{");
        if (accept("}")) return props;
        do {
            std::string key = name();
            expect(":");
            auto value = literal();
            if (!props.emplace(key, value).second) fail_here("duplicate property key '" + key + "'");
        } while (accept(","));
        expect("}");
        return props;
    }

    void declare(Statement& st, const std::string& var, ElementKind kind) {
        auto [it, inserted] = st.variables.emplace(var, kind);
        if (!inserted && it->second != kind) fail_here("variable '" + var + "' used as both node and relationship");
        if (!inserted && kind == ElementKind::Relationship) fail_here("relationship variable '" + var + "' bound twice");
    }

    std::string anonymous(Statement& st) { return " anon" + std::to_string(anon_++) + "_" + std::to_string(st.variables.size()); }

    NodePattern node(Statement& st) {
        NodePattern n;
        expect("(");
        if (peek().kind == Tok::Ident) n.var = variable();
        else n.var = anonymous(st);
        while (accept(":")) n.labels.insert(name());
        if (is_punct("{")) n.properties = properties();
        expect(")");
        declare(st, n.var, ElementKind::Node);
        return n;
    }

    RelPattern rel(Statement& st) {
        RelPattern r;
        bool incoming = false;
        if (accept("<")) incoming = true;
        expect("-");
        expect("[");
        if (peek().kind == Tok::Ident) r.var = variable();
        else r.var = anonymous(st);
        if (accept(":")) r.type = name();
        if (is_punct("{")) r.properties = properties();
        expect("]");
        expect("-");
        bool outgoing = accept(">");
        if (incoming && outgoing) fail_here("relationship cannot point both ways");
        r.direction = incoming ? Direction::Incoming : outgoing ? Direction::Outgoing : Direction::Undirected;
        declare(st, r.var, ElementKind::Relationship);
        return r;
    }

    PathPattern path(Statement& st) {
        PathPattern p;
        p.start = node(st);
        while (is_punct("-") || is_punct("<")) {
            auto r = rel(st);
            auto n = node(st);
            p.hops.emplace_back(std::move(r), std::move(n));
        }
        return p;
    }

    void require_bound(const Statement& st, const std::string& var) const {
        if (!st.variables.contains(var)) fail_here("unbound variable '" + var + "'");
    }

    std::string id_call(const Statement& st) {
        if (!(peek().kind == Tok::Ident && iequals(peek().text, "id") && is_punct("(", 1))) fail_here("expected id(...)");
        pos_ += 2;
        std::string v = variable();
        require_bound(st, v);
        expect(")");
        return v;
    }

    Predicate predicate(const Statement& st) {
        if (peek().kind == Tok::Ident && iequals(peek().text, "id") && is_punct("(", 1)) {
            IdsDiffer p;
            p.left = id_call(st);
            expect("<>");
            p.right = id_call(st);
            return p;
        }
        PropertyEquals p;
        p.var = variable();
        require_bound(st, p.var);
        expect(".");
        p.key = name();
        expect("=");
        p.value = literal();
        return p;
    }

    ReturnItem return_item(const Statement& st) {
        ReturnItem item;
        if (peek().kind == Tok::Ident && iequals(peek().text, "id") && is_punct("(", 1)) {
            item.var = id_call(st);
            item.id_only = true;
            item.alias = "id(" + item.var + ")";
        } else {
            item.var = variable();
            require_bound(st, item.var);
            item.alias = item.var;
        }
        if (accept_keyword("AS")) item.alias = name();
        return item;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::size_t anon_ = 0;
};

} // namespace detail

inline Statement parse(std::string_view text) { return detail::Parser(text).parse(); }

} // namespace gqw::cypher
