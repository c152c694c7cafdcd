#include "xmlsem/sparql.hpp"

#include "xmlsem/error.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace xmlsem::sparql {

const char* const kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

namespace {

constexpr const char* kXsdPrefix = "http://www.w3.org/2001/XMLSchema#";

// ---------------------------------------------------------------------------
// lexer

struct Token {
    enum Type {
        End, IriRef, PName, BlankLabel, Var, String, Integer, Decimal, Double,
        Ident, LangTag, LBrace, RBrace, LParen, RParen, LBracket, RBracket,
        Dot, Semicolon, Comma, AndAnd, OrOr, Bang, Eq, Ne, Lt, Gt, Le, Ge,
        Plus, Minus, Star, Slash, DtSep, Pipe, Caret,
    } type = End;
    std::string text;   // payload without sigils/quotes
    std::string prefix; // PName only
    int line = 1, col = 1;
};

const char* token_name(Token::Type t) {
    switch (t) {
        case Token::End: return "end of input";
        case Token::IriRef: return "IRI";
        case Token::PName: return "prefixed name";
        case Token::BlankLabel: return "blank node label";
        case Token::Var: return "variable";
        case Token::String: return "string literal";
        case Token::Integer: return "integer";
        case Token::Decimal: return "decimal";
        case Token::Double: return "double";
        case Token::Ident: return "identifier";
        case Token::LangTag: return "language tag";
        case Token::LBrace: return "'{'";
        case Token::RBrace: return "'}'";
        case Token::LParen: return "'('";
        case Token::RParen: return "')'";
        case Token::LBracket: return "'['";
        case Token::RBracket: return "']'";
        case Token::Dot: return "'.'";
        case Token::Semicolon: return "';'";
        case Token::Comma: return "','";
        case Token::AndAnd: return "'&&'";
        case Token::OrOr: return "'||'";
        case Token::Bang: return "'!'";
        case Token::Eq: return "'='";
        case Token::Ne: return "'!='";
        case Token::Lt: return "'<'";
        case Token::Gt: return "'>'";
        case Token::Le: return "'<='";
        case Token::Ge: return "'>='";
        case Token::Plus: return "'+'";
        case Token::Minus: return "'-'";
        case Token::Star: return "'*'";
        case Token::Slash: return "'/'";
        case Token::DtSep: return "'^^'";
        case Token::Pipe: return "'|'";
        case Token::Caret: return "'^'";
    }
    return "token";
}

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

struct Lexer {
    const std::string& src;
    size_t pos = 0;
    int line = 1, col = 1;

    explicit Lexer(const std::string& s) : src(s) {}

    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream os;
        os << "line " << line << " col " << col << ": " << what;
        throw Error(ErrorCode::SYNTAX, os.str());
    }

    char peek(size_t ahead = 0) const {
        return pos + ahead < src.size() ? src[pos + ahead] : '\0';
    }

    char advance() {
        char c = src[pos++];
        if (c == '\n') { line++; col = 1; } else { col++; }
        return c;
    }

    void skip_space() {
        while (pos < src.size()) {
            char c = peek();
            if (c == '#') {
                while (pos < src.size() && peek() != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    Token next() {
        skip_space();
        Token t;
        t.line = line;
        t.col = col;
        if (pos >= src.size()) return t;
        char c = peek();

        if (c == '<') {
            // IRIREF (never a comparison in term position; '<' as an operator
            // is resolved by the parser via expression context)
            size_t look = pos + 1;
            bool iri = false;
            for (; look < src.size(); look++) {
                char k = src[look];
                if (k == '>') { iri = true; break; }
                if (std::isspace(static_cast<unsigned char>(k)) || k == '<') break;
            }
            if (iri) {
                advance();
                while (peek() != '>') {
                    if (pos >= src.size()) fail("unterminated IRI");
                    t.text += advance();
                }
                advance();
                t.type = Token::IriRef;
                return t;
            }
            advance();
            if (peek() == '=') { advance(); t.type = Token::Le; return t; }
            t.type = Token::Lt;
            return t;
        }
        if (c == '?' || c == '$') {
            advance();
            if (!name_start(peek()) && !std::isdigit(static_cast<unsigned char>(peek())))
                fail("expected variable name after '" + std::string(1, c) + "'");
            while (name_char(peek())) t.text += advance();
            t.type = Token::Var;
            return t;
        }
        if (c == '"' || c == '\'') {
            char quote = advance();
            while (true) {
                if (pos >= src.size()) fail("unterminated string literal");
                char k = advance();
                if (k == quote) break;
                if (k == '\\') {
                    if (pos >= src.size()) fail("unterminated escape");
                    char e = advance();
                    switch (e) {
                        case 't': t.text += '\t'; break;
                        case 'n': t.text += '\n'; break;
                        case 'r': t.text += '\r'; break;
                        case '\\': t.text += '\\'; break;
                        case '"': t.text += '"'; break;
                        case '\'': t.text += '\''; break;
                        default: fail(std::string("unknown escape '\\") + e + "'");
                    }
                } else {
                    t.text += k;
                }
            }
            t.type = Token::String;
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            bool dot = false, exp = false;
            while (true) {
                char k = peek();
                if (std::isdigit(static_cast<unsigned char>(k))) { t.text += advance(); continue; }
                if (k == '.' && !dot && !exp &&
                    std::isdigit(static_cast<unsigned char>(peek(1)))) {
                    dot = true;
                    t.text += advance();
                    continue;
                }
                if ((k == 'e' || k == 'E') && !exp) {
                    char n1 = peek(1);
                    char n2 = peek(2);
                    if (std::isdigit(static_cast<unsigned char>(n1)) ||
                        ((n1 == '+' || n1 == '-') &&
                         std::isdigit(static_cast<unsigned char>(n2)))) {
                        exp = true;
                        t.text += advance();
                        if (peek() == '+' || peek() == '-') t.text += advance();
                        continue;
                    }
                }
                break;
            }
            t.type = exp ? Token::Double : dot ? Token::Decimal : Token::Integer;
            return t;
        }
        if (c == '_' && peek(1) == ':') {
            advance();
            advance();
            if (!name_start(peek())) fail("expected blank node label after '_:'");
            while (name_char(peek())) t.text += advance();
            t.type = Token::BlankLabel;
            return t;
        }
        if (name_start(c)) {
            while (name_char(peek())) t.text += advance();
            if (peek() == ':') {
                advance();
                t.prefix = t.text;
                t.text.clear();
                if (name_start(peek()))
                    while (name_char(peek())) t.text += advance();
                t.type = Token::PName;
                return t;
            }
            t.type = Token::Ident;
            return t;
        }
        if (c == ':') {
            advance();
            if (name_start(peek()))
                while (name_char(peek())) t.text += advance();
            t.type = Token::PName; // empty prefix
            return t;
        }
        if (c == '@') {
            advance();
            if (!std::isalpha(static_cast<unsigned char>(peek()))) fail("expected language tag");
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')
                t.text += advance();
            t.type = Token::LangTag;
            return t;
        }

        advance();
        switch (c) {
            case '{': t.type = Token::LBrace; return t;
            case '}': t.type = Token::RBrace; return t;
            case '(': t.type = Token::LParen; return t;
            case ')': t.type = Token::RParen; return t;
            case '[': t.type = Token::LBracket; return t;
            case ']': t.type = Token::RBracket; return t;
            case '.': t.type = Token::Dot; return t;
            case ';': t.type = Token::Semicolon; return t;
            case ',': t.type = Token::Comma; return t;
            case '+': t.type = Token::Plus; return t;
            case '-': t.type = Token::Minus; return t;
            case '*': t.type = Token::Star; return t;
            case '/': t.type = Token::Slash; return t;
            case '|':
                if (peek() == '|') { advance(); t.type = Token::OrOr; return t; }
                t.type = Token::Pipe;
                return t;
            case '&':
                if (peek() == '&') { advance(); t.type = Token::AndAnd; return t; }
                fail("expected '&&'");
            case '!':
                if (peek() == '=') { advance(); t.type = Token::Ne; return t; }
                t.type = Token::Bang;
                return t;
            case '=': t.type = Token::Eq; return t;
            case '>':
                if (peek() == '=') { advance(); t.type = Token::Ge; return t; }
                t.type = Token::Gt;
                return t;
            case '^':
                if (peek() == '^') { advance(); t.type = Token::DtSep; return t; }
                t.type = Token::Caret;
                return t;
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

std::vector<Token> tokenize(const std::string& text) {
    Lexer lx(text);
    std::vector<Token> out;
    while (true) {
        Token t = lx.next();
        bool end = t.type == Token::End;
        out.push_back(std::move(t));
        if (end) break;
    }
    return out;
}

bool ident_is(const Token& t, const char* kw) {
    if (t.type != Token::Ident) return false;
    if (t.text.size() != std::string_view(kw).size()) return false;
    for (size_t i = 0; i < t.text.size(); i++)
        if (std::toupper(static_cast<unsigned char>(t.text[i])) != kw[i]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// parser

const std::map<std::string, int>& builtin_arity() {
    // name -> arity (-3 means 2 or 3)
    static const std::map<std::string, int> table = {
        {"regex", -3},    {"bound", 1},     {"str", 1},        {"datatype", 1},
        {"lang", 1},      {"langMatches", 2}, {"isIRI", 1},    {"isBlank", 1},
        {"isLiteral", 1}, {"sameTerm", 2},  {"strstarts", 2},  {"contains", 2},
    };
    return table;
}

std::string canonical_function(const std::string& raw) {
    std::string low;
    for (char c : raw) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (low == "regex") return "regex";
    if (low == "bound") return "bound";
    if (low == "str") return "str";
    if (low == "datatype") return "datatype";
    if (low == "lang") return "lang";
    if (low == "langmatches") return "langMatches";
    if (low == "isiri" || low == "isuri") return "isIRI";
    if (low == "isblank") return "isBlank";
    if (low == "isliteral") return "isLiteral";
    if (low == "sameterm") return "sameTerm";
    if (low == "strstarts") return "strstarts";
    if (low == "contains") return "contains";
    return "";
}

struct Parser {
    std::vector<Token> toks;
    size_t pos = 0;
    std::map<std::string, std::string> prefixes;
    int anon_counter = 0;
    std::set<std::string> blank_vars;

    const Token& cur() const { return toks[pos]; }
    const Token& ahead(size_t n = 1) const {
        return toks[std::min(pos + n, toks.size() - 1)];
    }

    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = cur();
        std::ostringstream os;
        os << "line " << t.line << " col " << t.col << ": expected " << expected << ", found "
           << token_name(t.type);
        if (t.type == Token::Ident) os << " '" << t.text << "'";
        throw Error(ErrorCode::SYNTAX, os.str());
    }

    [[noreturn]] void unsupported(const std::string& production) const {
        throw Error(ErrorCode::UNSUPPORTED_FEATURE, production);
    }

    Token take(Token::Type type, const char* expected) {
        if (cur().type != type) fail(expected);
        return toks[pos++];
    }

    bool eat(Token::Type type) {
        if (cur().type != type) return false;
        pos++;
        return true;
    }

    bool eat_ident(const char* kw) {
        if (!ident_is(cur(), kw)) return false;
        pos++;
        return true;
    }

    std::string expand_pname(const Token& t) {
        auto it = prefixes.find(t.prefix);
        if (it == prefixes.end())
            throw Error(ErrorCode::SYNTAX, "line " + std::to_string(t.line) + " col " +
                                               std::to_string(t.col) + ": unknown prefix '" +
                                               t.prefix + ":'");
        return it->second + t.text;
    }

    std::string blank_var(const std::string& label) {
        std::string name = label.empty() ? "_b" + std::to_string(anon_counter++)
                                         : "_b_" + label;
        blank_vars.insert(name);
        return name;
    }

    // ---- prologue ----

    void parse_prologue() {
        while (true) {
            if (eat_ident("PREFIX")) {
                Token name = take(Token::PName, "prefix name");
                if (!name.text.empty()) fail("prefix declaration ending in ':'");
                Token iri = take(Token::IriRef, "IRI");
                prefixes[name.prefix] = iri.text;
            } else if (ident_is(cur(), "BASE")) {
                unsupported("BASE declaration");
            } else {
                break;
            }
        }
    }

    // ---- terms ----

    bool starts_term() const {
        switch (cur().type) {
            case Token::Var:
            case Token::IriRef:
            case Token::PName:
            case Token::BlankLabel:
            case Token::String:
            case Token::Integer:
            case Token::Decimal:
            case Token::Double:
                return true;
            case Token::LBracket:
                return true;
            case Token::Ident:
                return ident_is(cur(), "TRUE") || ident_is(cur(), "FALSE");
            default:
                return false;
        }
    }

    Term parse_literal_term() {
        Token t = toks[pos++];
        switch (t.type) {
            case Token::String: {
                std::string dt, lang;
                if (cur().type == Token::LangTag) { lang = toks[pos++].text; }
                else if (eat(Token::DtSep)) {
                    if (cur().type == Token::IriRef) dt = toks[pos++].text;
                    else if (cur().type == Token::PName) dt = expand_pname(toks[pos++]);
                    else fail("datatype IRI");
                }
                return Term::literal(t.text, dt, lang);
            }
            case Token::Integer:
                return Term::literal(t.text, std::string(kXsdPrefix) + "integer");
            case Token::Decimal:
                return Term::literal(t.text, std::string(kXsdPrefix) + "decimal");
            case Token::Double:
                return Term::literal(t.text, std::string(kXsdPrefix) + "double");
            default: break;
        }
        pos--;
        fail("literal");
    }

    Term parse_term(bool allow_literal) {
        const Token& t = cur();
        switch (t.type) {
            case Token::Var: pos++; return Term::var(t.text);
            case Token::IriRef: pos++; return Term::iri(t.text);
            case Token::PName: pos++; return Term::iri(expand_pname(t));
            case Token::BlankLabel: pos++; return Term::var(blank_var(t.text));
            case Token::LBracket:
                pos++;
                if (!eat(Token::RBracket)) unsupported("blank node property list");
                return Term::var(blank_var(""));
            case Token::Ident:
                if (ident_is(t, "TRUE")) {
                    pos++;
                    return Term::literal("true", std::string(kXsdPrefix) + "boolean");
                }
                if (ident_is(t, "FALSE")) {
                    pos++;
                    return Term::literal("false", std::string(kXsdPrefix) + "boolean");
                }
                fail(allow_literal ? "term" : "variable or IRI");
            default:
                if (allow_literal &&
                    (t.type == Token::String || t.type == Token::Integer ||
                     t.type == Token::Decimal || t.type == Token::Double))
                    return parse_literal_term();
                fail(allow_literal ? "term" : "variable or IRI");
        }
    }

    Term parse_predicate() {
        Term p;
        if (ident_is(cur(), "A") && cur().text == "a") {
            pos++;
            p = Term::iri(kRdfType);
        } else {
            const Token& t = cur();
            if (t.type == Token::Var) { pos++; p = Term::var(t.text); }
            else if (t.type == Token::IriRef) { pos++; p = Term::iri(t.text); }
            else if (t.type == Token::PName) { pos++; p = Term::iri(expand_pname(t)); }
            else fail("predicate");
        }
        switch (cur().type) {
            case Token::Slash:
            case Token::Pipe:
            case Token::Caret:
            case Token::Star:
            case Token::Plus:
                unsupported("property paths");
            default: break;
        }
        return p;
    }

    // ---- triples ----

    void parse_triples_block(std::vector<TriplePattern>& out) {
        while (true) {
            Term subj = parse_term(false);
            // property list
            while (true) {
                Term pred = parse_predicate();
                while (true) {
                    Term obj = parse_term(true);
                    out.push_back({subj, pred, obj});
                    if (!eat(Token::Comma)) break;
                }
                if (!eat(Token::Semicolon)) break;
                // trailing ';' before '.' or '}' is allowed
                bool pred_next = cur().type == Token::Var || cur().type == Token::IriRef ||
                                 cur().type == Token::PName ||
                                 (cur().type == Token::Ident && cur().text == "a");
                if (!pred_next) break;
            }
            bool dot = eat(Token::Dot);
            if (!dot) break;
            if (!starts_term()) break;
        }
    }

    // ---- filters ----

    FilterExpr parse_expression() { return parse_or(); }

    FilterExpr parse_or() {
        FilterExpr e = parse_and();
        while (eat(Token::OrOr)) {
            FilterExpr rhs = parse_and();
            FilterExpr node;
            node.kind = FilterExpr::Or;
            node.args = {std::move(e), std::move(rhs)};
            e = std::move(node);
        }
        return e;
    }

    FilterExpr parse_and() {
        FilterExpr e = parse_relational();
        while (eat(Token::AndAnd)) {
            FilterExpr rhs = parse_relational();
            FilterExpr node;
            node.kind = FilterExpr::And;
            node.args = {std::move(e), std::move(rhs)};
            e = std::move(node);
        }
        return e;
    }

    FilterExpr parse_relational() {
        FilterExpr e = parse_additive();
        const char* op = nullptr;
        switch (cur().type) {
            case Token::Eq: op = "="; break;
            case Token::Ne: op = "!="; break;
            case Token::Lt: op = "<"; break;
            case Token::Gt: op = ">"; break;
            case Token::Le: op = "<="; break;
            case Token::Ge: op = ">="; break;
            default: return e;
        }
        pos++;
        FilterExpr rhs = parse_additive();
        FilterExpr node;
        node.kind = FilterExpr::Compare;
        node.op = op;
        node.args = {std::move(e), std::move(rhs)};
        return node;
    }

    FilterExpr parse_additive() {
        FilterExpr e = parse_multiplicative();
        while (cur().type == Token::Plus || cur().type == Token::Minus) {
            std::string op = cur().type == Token::Plus ? "+" : "-";
            pos++;
            FilterExpr rhs = parse_multiplicative();
            FilterExpr node;
            node.kind = FilterExpr::Arith;
            node.op = op;
            node.args = {std::move(e), std::move(rhs)};
            e = std::move(node);
        }
        return e;
    }

    FilterExpr parse_multiplicative() {
        FilterExpr e = parse_unary();
        while (cur().type == Token::Star || cur().type == Token::Slash) {
            std::string op = cur().type == Token::Star ? "*" : "/";
            pos++;
            FilterExpr rhs = parse_unary();
            FilterExpr node;
            node.kind = FilterExpr::Arith;
            node.op = op;
            node.args = {std::move(e), std::move(rhs)};
            e = std::move(node);
        }
        return e;
    }

    FilterExpr parse_unary() {
        if (eat(Token::Bang)) {
            FilterExpr node;
            node.kind = FilterExpr::Not;
            node.args = {parse_unary()};
            return node;
        }
        if (eat(Token::Minus)) {
            FilterExpr node;
            node.kind = FilterExpr::Neg;
            node.args = {parse_unary()};
            return node;
        }
        if (eat(Token::Plus)) return parse_unary();
        return parse_primary();
    }

    FilterExpr parse_primary() {
        const Token& t = cur();
        FilterExpr e;
        switch (t.type) {
            case Token::LParen: {
                pos++;
                e = parse_expression();
                take(Token::RParen, "')'");
                return e;
            }
            case Token::Var:
                pos++;
                e.kind = FilterExpr::Variable;
                e.text = t.text;
                return e;
            case Token::IriRef:
                pos++;
                if (cur().type == Token::LParen) unsupported("custom function call");
                e.kind = FilterExpr::IriRef;
                e.text = t.text;
                return e;
            case Token::String:
            case Token::Integer:
            case Token::Decimal:
            case Token::Double: {
                Term lit = parse_literal_term();
                e.kind = FilterExpr::Lit;
                e.text = lit.text;
                e.datatype = lit.datatype;
                e.lang = lit.lang;
                return e;
            }
            case Token::PName: {
                pos++;
                std::string iri = expand_pname(t);
                if (cur().type == Token::LParen) unsupported("custom function call");
                e.kind = FilterExpr::IriRef;
                e.text = iri;
                return e;
            }
            case Token::Ident: {
                if (ident_is(t, "TRUE") || ident_is(t, "FALSE")) {
                    e.kind = FilterExpr::Lit;
                    e.text = ident_is(t, "TRUE") ? "true" : "false";
                    e.datatype = std::string(kXsdPrefix) + "boolean";
                    pos++;
                    return e;
                }
                std::string fn = canonical_function(t.text);
                if (fn.empty()) {
                    static const char* kNewer[] = {"EXISTS", "NOT", "COUNT", "SUM",
                                                   "AVG", "MIN", "MAX", "IF",
                                                   "COALESCE", "BNODE", "IRI", "URI",
                                                   "STRLEN", "SUBSTR", "UCASE", "LCASE",
                                                   "CONCAT", "ABS", "ROUND", "NOW"};
                    for (const char* kw : kNewer)
                        if (ident_is(t, kw)) unsupported(std::string(t.text) + " (newer-standard built-in)");
                    fail("supported function name");
                }
                pos++;
                take(Token::LParen, "'('");
                e.kind = FilterExpr::Call;
                e.op = fn;
                if (!eat(Token::RParen)) {
                    while (true) {
                        e.args.push_back(parse_expression());
                        if (!eat(Token::Comma)) break;
                    }
                    take(Token::RParen, "')'");
                }
                int arity = builtin_arity().at(fn);
                bool ok = arity == -3 ? (e.args.size() == 2 || e.args.size() == 3)
                                      : e.args.size() == static_cast<size_t>(arity);
                if (!ok)
                    throw Error(ErrorCode::SYNTAX,
                                "function " + fn + " called with " +
                                    std::to_string(e.args.size()) + " arguments");
                if (fn == "bound" && (e.args.size() != 1 || e.args[0].kind != FilterExpr::Variable))
                    throw Error(ErrorCode::SYNTAX, "bound() takes a single variable");
                return e;
            }
            default:
                fail("expression");
        }
    }

    FilterExpr parse_constraint() {
        if (cur().type == Token::LParen) {
            pos++;
            FilterExpr e = parse_expression();
            take(Token::RParen, "')'");
            return e;
        }
        if (cur().type == Token::Ident) return parse_primary(); // built-in call
        fail("'(' or built-in call after FILTER");
    }

    // ---- graph patterns ----

    GraphPattern join(GraphPattern current, GraphPattern next, bool merge_triples) {
        bool cur_empty = current.kind == GraphPattern::BGP && current.triples.empty();
        if (cur_empty) return next;
        if (merge_triples && current.kind == GraphPattern::BGP &&
            next.kind == GraphPattern::BGP) {
            current.triples.insert(current.triples.end(), next.triples.begin(),
                                   next.triples.end());
            return current;
        }
        GraphPattern out;
        out.kind = GraphPattern::And;
        out.children = {std::move(current), std::move(next)};
        return out;
    }

    GraphPattern parse_group() {
        take(Token::LBrace, "'{'");
        GraphPattern current; // empty BGP
        std::vector<FilterExpr> filters;
        while (true) {
            if (cur().type == Token::RBrace) break;
            if (eat_ident("OPTIONAL")) {
                GraphPattern sub = parse_group();
                GraphPattern opt;
                opt.kind = GraphPattern::Opt;
                opt.children = {std::move(current), std::move(sub)};
                current = std::move(opt);
            } else if (eat_ident("FILTER")) {
                filters.push_back(parse_constraint());
            } else if (cur().type == Token::LBrace) {
                GraphPattern sub = parse_group();
                while (eat_ident("UNION")) {
                    GraphPattern rhs = parse_group();
                    GraphPattern u;
                    u.kind = GraphPattern::Union;
                    u.children = {std::move(sub), std::move(rhs)};
                    sub = std::move(u);
                }
                current = join(std::move(current), std::move(sub), false);
            } else if (ident_is(cur(), "GRAPH")) {
                unsupported("GRAPH");
            } else if (ident_is(cur(), "SERVICE") || ident_is(cur(), "MINUS") ||
                       ident_is(cur(), "BIND") || ident_is(cur(), "VALUES") ||
                       ident_is(cur(), "SELECT")) {
                unsupported(cur().text + " inside a group pattern (newer-standard construct)");
            } else if (starts_term()) {
                GraphPattern bgp;
                parse_triples_block(bgp.triples);
                current = join(std::move(current), std::move(bgp), true);
            } else if (eat(Token::Dot)) {
                continue;
            } else {
                fail("graph pattern element or '}'");
            }
        }
        take(Token::RBrace, "'}'");
        for (auto& f : filters) {
            GraphPattern wrapped;
            wrapped.kind = GraphPattern::Filter;
            wrapped.children = {std::move(current)};
            wrapped.constraint = std::move(f);
            current = std::move(wrapped);
        }
        return current;
    }

    // ---- modifiers ----

    void parse_modifiers(Modifiers& m, bool allow) {
        bool seen_any = false;
        while (true) {
            if (eat_ident("ORDER")) {
                if (!eat_ident("BY")) fail("BY after ORDER");
                seen_any = true;
                while (true) {
                    OrderKey key;
                    if (eat_ident("DESC")) {
                        key.descending = true;
                        take(Token::LParen, "'('");
                        key.expr = parse_expression();
                        take(Token::RParen, "')'");
                    } else if (eat_ident("ASC")) {
                        take(Token::LParen, "'('");
                        key.expr = parse_expression();
                        take(Token::RParen, "')'");
                    } else if (cur().type == Token::Var) {
                        key.expr.kind = FilterExpr::Variable;
                        key.expr.text = cur().text;
                        pos++;
                    } else if (cur().type == Token::LParen) {
                        pos++;
                        key.expr = parse_expression();
                        take(Token::RParen, "')'");
                    } else {
                        break;
                    }
                    m.order_by.push_back(std::move(key));
                }
                if (m.order_by.empty()) fail("order condition");
            } else if (eat_ident("LIMIT")) {
                seen_any = true;
                Token n = take(Token::Integer, "non-negative integer");
                m.limit = std::stol(n.text);
            } else if (eat_ident("OFFSET")) {
                seen_any = true;
                Token n = take(Token::Integer, "non-negative integer");
                m.offset = std::stol(n.text);
            } else {
                break;
            }
        }
        if (seen_any && !allow)
            throw Error(ErrorCode::SYNTAX, "solution modifiers are not allowed on this query form");
    }

    // ---- query forms ----

    SparqlQuery parse() {
        SparqlQuery q;
        parse_prologue();
        q.prefixes = prefixes;

        if (eat_ident("SELECT")) {
            q.form = SparqlQuery::Select;
            if (eat_ident("DISTINCT")) q.distinctness = SparqlQuery::Distinct;
            else if (eat_ident("REDUCED")) q.distinctness = SparqlQuery::Reduced;
            if (eat(Token::Star)) {
                q.select_all = true;
            } else {
                while (cur().type == Token::Var) {
                    q.projection.push_back(cur().text);
                    pos++;
                }
                if (q.projection.empty()) fail("'*' or projection variables");
            }
            if (ident_is(cur(), "FROM")) unsupported("FROM dataset clause");
            eat_ident("WHERE");
            q.pattern = parse_group();
            parse_modifiers(q.modifiers, true);
        } else if (eat_ident("ASK")) {
            q.form = SparqlQuery::Ask;
            if (ident_is(cur(), "FROM")) unsupported("FROM dataset clause");
            eat_ident("WHERE");
            q.pattern = parse_group();
            parse_modifiers(q.modifiers, false);
        } else if (eat_ident("CONSTRUCT")) {
            q.form = SparqlQuery::Construct;
            take(Token::LBrace, "'{'");
            if (cur().type != Token::RBrace) parse_triples_block(q.construct_template);
            take(Token::RBrace, "'}'");
            if (ident_is(cur(), "FROM")) unsupported("FROM dataset clause");
            if (!eat_ident("WHERE")) fail("WHERE");
            q.pattern = parse_group();
            parse_modifiers(q.modifiers, true);
        } else if (eat_ident("DESCRIBE")) {
            q.form = SparqlQuery::Describe;
            while (cur().type == Token::Var || cur().type == Token::IriRef ||
                   cur().type == Token::PName) {
                q.describe_targets.push_back(parse_term(false));
            }
            if (q.describe_targets.empty()) fail("DESCRIBE target");
            if (eat_ident("WHERE") || cur().type == Token::LBrace) q.pattern = parse_group();
            parse_modifiers(q.modifiers, true);
        } else {
            fail("SELECT, ASK, CONSTRUCT or DESCRIBE");
        }

        if (cur().type != Token::End) fail("end of query");

        // deterministic diagnostics
        std::set<std::string> pattern_vars = pattern_variables(q.pattern);
        for (const auto& v : q.projection)
            if (!pattern_vars.count(v))
                q.warnings.push_back("UNBOUND_PROJECTION: ?" + v);
        for (const auto& tp : q.construct_template)
            for (const Term* t : {&tp.s, &tp.p, &tp.o})
                if (t->kind == Term::Var && !pattern_vars.count(t->text))
                    throw Error(ErrorCode::SYNTAX, "CONSTRUCT template variable ?" + t->text +
                                                       " does not appear in the pattern");
        return q;
    }
};

// ---------------------------------------------------------------------------
// printer

bool plain_number(const std::string& text, const std::string& dt) {
    if (dt != std::string(kXsdPrefix) + "integer" && dt != std::string(kXsdPrefix) + "decimal" &&
        dt != std::string(kXsdPrefix) + "double" && dt != std::string(kXsdPrefix) + "boolean")
        return false;
    if (dt == std::string(kXsdPrefix) + "boolean") return text == "true" || text == "false";
    if (text.empty()) return false;
    bool digit = false, dot = false, exp = false;
    for (size_t i = 0; i < text.size(); i++) {
        char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c))) { digit = true; continue; }
        if (c == '.' && !dot && !exp) { dot = true; continue; }
        if ((c == 'e' || c == 'E') && !exp && digit) { exp = true; continue; }
        if ((c == '+' || c == '-') && i > 0 && (text[i - 1] == 'e' || text[i - 1] == 'E')) continue;
        return false;
    }
    if (!digit) return false;
    if (dt == std::string(kXsdPrefix) + "integer") return !dot && !exp;
    if (dt == std::string(kXsdPrefix) + "decimal") return dot && !exp;
    return exp; // double
}

std::string quote_literal(const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out + "\"";
}

std::string print_term(const Term& t) {
    switch (t.kind) {
        case Term::Var: return "?" + t.text;
        case Term::Iri: return "<" + t.text + ">";
        case Term::Literal:
            if (!t.lang.empty()) return quote_literal(t.text) + "@" + t.lang;
            if (plain_number(t.text, t.datatype)) return t.text;
            if (!t.datatype.empty()) return quote_literal(t.text) + "^^<" + t.datatype + ">";
            return quote_literal(t.text);
    }
    return "";
}

std::string print_expr(const FilterExpr& e) {
    switch (e.kind) {
        case FilterExpr::And: return "( " + print_expr(e.args[0]) + " && " + print_expr(e.args[1]) + " )";
        case FilterExpr::Or: return "( " + print_expr(e.args[0]) + " || " + print_expr(e.args[1]) + " )";
        case FilterExpr::Not: return "( ! " + print_expr(e.args[0]) + " )";
        case FilterExpr::Neg: return "( - " + print_expr(e.args[0]) + " )";
        case FilterExpr::Compare:
        case FilterExpr::Arith:
            return "( " + print_expr(e.args[0]) + " " + e.op + " " + print_expr(e.args[1]) + " )";
        case FilterExpr::Call: {
            std::string out = e.op + "(";
            for (size_t i = 0; i < e.args.size(); i++) {
                if (i) out += ", ";
                else out += " ";
                out += print_expr(e.args[i]);
            }
            return out + (e.args.empty() ? ")" : " )");
        }
        case FilterExpr::Variable: return "?" + e.text;
        case FilterExpr::IriRef: return "<" + e.text + ">";
        case FilterExpr::Lit: {
            Term t = Term::literal(e.text, e.datatype, e.lang);
            return print_term(t);
        }
    }
    return "";
}

void print_pattern_elems(const GraphPattern& gp, std::ostringstream& out,
                         const std::string& indent);

void print_braced(const GraphPattern& gp, std::ostringstream& out, const std::string& indent) {
    out << indent << "{\n";
    print_pattern_elems(gp, out, indent + "  ");
    out << indent << "}\n";
}

void print_union_chain(const GraphPattern& gp, std::ostringstream& out,
                       const std::string& indent) {
    if (gp.kind == GraphPattern::Union) {
        print_union_chain(gp.children[0], out, indent);
        out << indent << "UNION\n";
        print_braced(gp.children[1], out, indent);
    } else {
        print_braced(gp, out, indent);
    }
}

void print_pattern_elems(const GraphPattern& gp, std::ostringstream& out,
                         const std::string& indent) {
    switch (gp.kind) {
        case GraphPattern::BGP:
            for (const auto& t : gp.triples)
                out << indent << print_term(t.s) << " " << print_term(t.p) << " "
                    << print_term(t.o) << " .\n";
            break;
        case GraphPattern::And:
            print_pattern_elems(gp.children[0], out, indent);
            print_braced(gp.children[1], out, indent);
            break;
        case GraphPattern::Opt:
            print_pattern_elems(gp.children[0], out, indent);
            out << indent << "OPTIONAL\n";
            print_braced(gp.children[1], out, indent);
            break;
        case GraphPattern::Filter:
            print_pattern_elems(gp.children[0], out, indent);
            out << indent << "FILTER ( " << print_expr(gp.constraint) << " )\n";
            break;
        case GraphPattern::Union:
            print_union_chain(gp, out, indent);
            break;
    }
}

} // namespace

SparqlQuery parse_query(const std::string& text) {
    Parser p;
    p.toks = tokenize(text);
    return p.parse();
}

std::string print_query(const SparqlQuery& q) {
    std::ostringstream out;
    for (const auto& [name, iri] : q.prefixes)
        out << "PREFIX " << name << ": <" << iri << ">\n";

    switch (q.form) {
        case SparqlQuery::Select: {
            out << "SELECT";
            if (q.distinctness == SparqlQuery::Distinct) out << " DISTINCT";
            if (q.distinctness == SparqlQuery::Reduced) out << " REDUCED";
            if (q.select_all) out << " *";
            for (const auto& v : q.projection) out << " ?" << v;
            out << "\nWHERE {\n";
            print_pattern_elems(q.pattern, out, "  ");
            out << "}\n";
            break;
        }
        case SparqlQuery::Ask:
            out << "ASK {\n";
            print_pattern_elems(q.pattern, out, "  ");
            out << "}\n";
            break;
        case SparqlQuery::Construct:
            out << "CONSTRUCT {\n";
            for (const auto& t : q.construct_template)
                out << "  " << print_term(t.s) << " " << print_term(t.p) << " "
                    << print_term(t.o) << " .\n";
            out << "}\nWHERE {\n";
            print_pattern_elems(q.pattern, out, "  ");
            out << "}\n";
            break;
        case SparqlQuery::Describe: {
            out << "DESCRIBE";
            for (const auto& t : q.describe_targets) out << " " << print_term(t);
            out << "\n";
            bool empty = q.pattern.kind == GraphPattern::BGP && q.pattern.triples.empty();
            if (!empty) {
                out << "WHERE {\n";
                print_pattern_elems(q.pattern, out, "  ");
                out << "}\n";
            }
            break;
        }
    }

    if (!q.modifiers.order_by.empty()) {
        out << "ORDER BY";
        for (const auto& k : q.modifiers.order_by) {
            if (k.descending) out << " DESC( " << print_expr(k.expr) << " )";
            else if (k.expr.kind == FilterExpr::Variable) out << " ?" << k.expr.text;
            else out << " ASC( " << print_expr(k.expr) << " )";
        }
        out << "\n";
    }
    if (q.modifiers.limit) out << "LIMIT " << *q.modifiers.limit << "\n";
    if (q.modifiers.offset) out << "OFFSET " << *q.modifiers.offset << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// variable collection

namespace {

void collect_term_var(const Term& t, std::set<std::string>& out) {
    if (t.kind == Term::Var) out.insert(t.text);
}

void collect_pattern_vars(const GraphPattern& gp, std::set<std::string>& out) {
    for (const auto& t : gp.triples) {
        collect_term_var(t.s, out);
        collect_term_var(t.p, out);
        collect_term_var(t.o, out);
    }
    for (const auto& c : gp.children) collect_pattern_vars(c, out);
}

void collect_expr_vars(const FilterExpr& e, std::set<std::string>& out) {
    if (e.kind == FilterExpr::Variable) out.insert(e.text);
    for (const auto& a : e.args) collect_expr_vars(a, out);
}

} // namespace

std::set<std::string> pattern_variables(const GraphPattern& gp) {
    std::set<std::string> out;
    collect_pattern_vars(gp, out);
    return out;
}

std::set<std::string> certain_variables(const GraphPattern& gp) {
    switch (gp.kind) {
        case GraphPattern::BGP: {
            std::set<std::string> out;
            for (const auto& t : gp.triples) {
                collect_term_var(t.s, out);
                collect_term_var(t.p, out);
                collect_term_var(t.o, out);
            }
            return out;
        }
        case GraphPattern::And: {
            std::set<std::string> l = certain_variables(gp.children[0]);
            std::set<std::string> r = certain_variables(gp.children[1]);
            l.insert(r.begin(), r.end());
            return l;
        }
        case GraphPattern::Union: {
            std::set<std::string> l = certain_variables(gp.children[0]);
            std::set<std::string> r = certain_variables(gp.children[1]);
            std::set<std::string> out;
            std::set_intersection(l.begin(), l.end(), r.begin(), r.end(),
                                  std::inserter(out, out.begin()));
            return out;
        }
        case GraphPattern::Opt:
            return certain_variables(gp.children[0]);
        case GraphPattern::Filter:
            return certain_variables(gp.children[0]);
    }
    return {};
}

std::set<std::string> expr_variables(const FilterExpr& e) {
    std::set<std::string> out;
    collect_expr_vars(e, out);
    return out;
}

// ---------------------------------------------------------------------------
// normalization

namespace {

struct Branch {
    std::vector<TriplePattern> triples;
    std::vector<FilterExpr> filters;
    std::vector<GraphPattern> opts; // already-normalized patterns
};

std::set<std::string> branch_triple_vars(const Branch& b) {
    std::set<std::string> out;
    for (const auto& t : b.triples) {
        collect_term_var(t.s, out);
        collect_term_var(t.p, out);
        collect_term_var(t.o, out);
    }
    return out;
}

std::set<std::string> branch_all_vars(const Branch& b) {
    std::set<std::string> out = branch_triple_vars(b);
    for (const auto& o : b.opts) {
        std::set<std::string> ov = pattern_variables(o);
        out.insert(ov.begin(), ov.end());
    }
    return out;
}

bool disjoint(const std::set<std::string>& a, const std::set<std::string>& b) {
    for (const auto& x : a)
        if (b.count(x)) return false;
    return true;
}

bool subset(const std::set<std::string>& a, const std::set<std::string>& b) {
    for (const auto& x : a)
        if (!b.count(x)) return false;
    return true;
}

std::vector<Branch> norm_branches(const GraphPattern& gp);

Branch merge_branches(const Branch& l, const Branch& r) {
    // Safety of hoisting each side's filters to the merged scope: the filter
    // must depend only on its own side's certainly bound variables, or touch
    // nothing the other side can bind.
    auto check_filters = [](const Branch& own, const Branch& other) {
        std::set<std::string> certain = branch_triple_vars(own);
        std::set<std::string> other_vars = branch_all_vars(other);
        for (const auto& f : own.filters) {
            std::set<std::string> fv = expr_variables(f);
            if (!subset(fv, certain) && !disjoint(fv, other_vars))
                throw Error(ErrorCode::UNSUPPORTED_FEATURE,
                            "filter scoped inside a nested group shares variables with a "
                            "sibling pattern");
        }
    };
    // Well-designedness: an optional part's variables seen by the other side
    // must already be certain on the optional's own side.
    auto check_opts = [](const Branch& own, const Branch& other) {
        std::set<std::string> certain = branch_triple_vars(own);
        std::set<std::string> other_vars = branch_all_vars(other);
        for (const auto& o : own.opts) {
            for (const auto& v : pattern_variables(o))
                if (other_vars.count(v) && !certain.count(v))
                    throw Error(ErrorCode::UNSUPPORTED_FEATURE,
                                "OPTIONAL variable ?" + v +
                                    " shared outside its group (non-well-designed pattern)");
        }
    };
    check_filters(l, r);
    check_filters(r, l);
    check_opts(l, r);
    check_opts(r, l);

    Branch out;
    out.triples = l.triples;
    out.triples.insert(out.triples.end(), r.triples.begin(), r.triples.end());
    out.opts = l.opts;
    out.opts.insert(out.opts.end(), r.opts.begin(), r.opts.end());
    out.filters = l.filters;
    out.filters.insert(out.filters.end(), r.filters.begin(), r.filters.end());
    return out;
}

std::vector<Branch> norm_branches(const GraphPattern& gp) {
    switch (gp.kind) {
        case GraphPattern::BGP: {
            Branch b;
            b.triples = gp.triples;
            return {std::move(b)};
        }
        case GraphPattern::Union: {
            std::vector<Branch> l = norm_branches(gp.children[0]);
            std::vector<Branch> r = norm_branches(gp.children[1]);
            for (auto& b : r) l.push_back(std::move(b));
            return l;
        }
        case GraphPattern::Filter: {
            std::vector<Branch> bs = norm_branches(gp.children[0]);
            for (auto& b : bs) b.filters.push_back(gp.constraint);
            return bs;
        }
        case GraphPattern::Opt: {
            std::vector<Branch> ls = norm_branches(gp.children[0]);
            GraphPattern nr = normalize(gp.children[1]);
            std::set<std::string> right_vars = pattern_variables(gp.children[1]);
            for (auto& b : ls) {
                // filters collected so far are scoped to the left side; keeping
                // them outside the new optional is only sound when the optional
                // cannot rebind anything they mention
                std::set<std::string> certain = branch_triple_vars(b);
                for (const auto& f : b.filters) {
                    std::set<std::string> fv = expr_variables(f);
                    for (const auto& v : fv)
                        if (right_vars.count(v) && !certain.count(v))
                            throw Error(ErrorCode::UNSUPPORTED_FEATURE,
                                        "filter left of OPTIONAL shares variable ?" + v +
                                            " with the optional part");
                }
                b.opts.push_back(nr);
            }
            return ls;
        }
        case GraphPattern::And: {
            std::vector<Branch> ls = norm_branches(gp.children[0]);
            std::vector<Branch> rs = norm_branches(gp.children[1]);
            std::vector<Branch> out;
            for (const auto& lb : ls)
                for (const auto& rb : rs) out.push_back(merge_branches(lb, rb));
            return out;
        }
    }
    return {};
}

GraphPattern rebuild_branch(const Branch& b) {
    GraphPattern core;
    core.kind = GraphPattern::BGP;
    core.triples = b.triples;
    for (const auto& o : b.opts) {
        GraphPattern opt;
        opt.kind = GraphPattern::Opt;
        opt.children = {std::move(core), o};
        core = std::move(opt);
    }
    for (const auto& f : b.filters) {
        GraphPattern fl;
        fl.kind = GraphPattern::Filter;
        fl.children = {std::move(core)};
        fl.constraint = f;
        core = std::move(fl);
    }
    return core;
}

} // namespace

GraphPattern normalize(const GraphPattern& gp) {
    std::vector<Branch> bs = norm_branches(gp);
    GraphPattern out = rebuild_branch(bs[0]);
    for (size_t i = 1; i < bs.size(); i++) {
        GraphPattern u;
        u.kind = GraphPattern::Union;
        u.children = {std::move(out), rebuild_branch(bs[i])};
        out = std::move(u);
    }
    return out;
}

std::vector<NormBranch> union_branches(const GraphPattern& normalized) {
    std::vector<const GraphPattern*> leaves;
    std::vector<const GraphPattern*> work{&normalized};
    while (!work.empty()) {
        const GraphPattern* g = work.back();
        work.pop_back();
        if (g->kind == GraphPattern::Union) {
            work.push_back(&g->children[1]);
            work.push_back(&g->children[0]);
        } else {
            leaves.push_back(g);
        }
    }
    // depth-first pop order above visits left chains first
    std::vector<NormBranch> out;
    for (const GraphPattern* leaf : leaves) {
        NormBranch nb;
        const GraphPattern* g = leaf;
        std::vector<const GraphPattern*> filters;
        while (g->kind == GraphPattern::Filter) {
            filters.push_back(g);
            g = &g->children[0];
        }
        // filters were wrapped innermost-first; restore collection order
        for (auto it = filters.rbegin(); it != filters.rend(); ++it)
            nb.filters.push_back((*it)->constraint);
        std::vector<const GraphPattern*> opts;
        while (g->kind == GraphPattern::Opt) {
            opts.push_back(&g->children[1]);
            g = &g->children[0];
        }
        for (auto it = opts.rbegin(); it != opts.rend(); ++it) nb.optionals.push_back(**it);
        if (g->kind != GraphPattern::BGP)
            throw Error(ErrorCode::INTERNAL, "union_branches expects a normalized pattern");
        nb.triples = g->triples;
        out.push_back(std::move(nb));
    }
    return out;
}

} // namespace xmlsem::sparql
