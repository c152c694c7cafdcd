#include "xmlsem/xquery_ast.hpp"

#include "xmlsem/error.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace xmlsem::xq {

bool XqStep::operator==(const XqStep&) const = default;
bool XqClause::operator==(const XqClause&) const = default;
bool XqExpr::operator==(const XqExpr&) const = default;

namespace {

const std::set<std::string>& function_names() {
    static const std::set<std::string> names = {
        "collection", "doc", "string", "exists", "matches", "starts-with",
        "contains", "position", "count", "distinct-values", "concat",
        "node-id", "not", "true", "false",
    };
    return names;
}

// ---------------------------------------------------------------------------
// scope validation

void check_scope(const XqExpr& e, std::set<std::string> env);

void check_children(const XqExpr& e, const std::set<std::string>& env) {
    for (const auto& a : e.args) check_scope(a, env);
    for (const auto& p : e.start_preds) check_scope(p, env);
    for (const auto& st : e.steps)
        for (const auto& p : st.preds) check_scope(p, env);
}

void check_scope(const XqExpr& e, std::set<std::string> env) {
    if (e.kind == XqExpr::VarRef) {
        if (!env.count(e.text))
            throw Error(ErrorCode::UNBOUND_VARIABLE, "$" + e.text);
        return;
    }
    if (e.kind == XqExpr::Flwor) {
        for (const auto& c : e.clauses) {
            for (const auto& x : c.exprs) check_scope(x, env);
            if (c.kind == XqClause::For || c.kind == XqClause::Let) {
                env.insert(c.var);
                if (!c.pos_var.empty()) env.insert(c.pos_var);
            }
        }
        if (!e.args.empty()) check_scope(e.args[0], env);
        return;
    }
    check_children(e, env);
}

// ---------------------------------------------------------------------------
// printer

int precedence(const XqExpr& e) {
    switch (e.kind) {
        case XqExpr::OrOp: return 1;
        case XqExpr::AndOp: return 2;
        case XqExpr::Compare: return 3;
        case XqExpr::Arith: return e.op == "*" || e.op == "div" ? 5 : 4;
        case XqExpr::NegOp: return 6;
        default: return 7;
    }
}

bool is_multiline(const XqExpr& e) {
    if (e.kind == XqExpr::Flwor) return true;
    if (e.kind == XqExpr::Seq)
        return std::any_of(e.args.begin(), e.args.end(),
                           [](const XqExpr& a) { return is_multiline(a); });
    return false;
}

std::string escape_string_lit(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '"') out += "&quot;";
        else if (c == '<') out += "&lt;";
        else out += c;
    }
    return out;
}

std::string escape_ctor_text(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '{') out += "{{";
        else if (c == '}') out += "}}";
        else out += c;
    }
    return out;
}

struct Printer {
    std::ostringstream out;

    std::string inline_expr(const XqExpr& e) {
        std::ostringstream os;
        print_inline(e, os);
        return os.str();
    }

    void print_operand(const XqExpr& child, int parent_prec, bool right,
                       std::ostringstream& os) {
        int cp = precedence(child);
        bool wrap = right ? cp <= parent_prec : cp < parent_prec;
        if (child.kind == XqExpr::Compare && parent_prec == 3) wrap = true;
        if (child.kind == XqExpr::Flwor || child.kind == XqExpr::IfThen) wrap = true;
        if (wrap) {
            os << "(";
            print_inline(child, os);
            os << ")";
        } else {
            print_inline(child, os);
        }
    }

    void print_inline(const XqExpr& e, std::ostringstream& os) {
        switch (e.kind) {
            case XqExpr::VarRef: os << "$" << e.text; return;
            case XqExpr::Context: os << "."; return;
            case XqExpr::StrLit: os << "\"" << escape_string_lit(e.text) << "\""; return;
            case XqExpr::NumLit: os << e.text; return;
            case XqExpr::Path: {
                const XqExpr& start = e.args[0];
                if (start.kind == XqExpr::VarRef || start.kind == XqExpr::Context ||
                    start.kind == XqExpr::FnCall) {
                    print_inline(start, os);
                } else {
                    os << "(";
                    print_inline(start, os);
                    os << ")";
                }
                for (const auto& p : e.start_preds) {
                    os << "[";
                    print_inline(p, os);
                    os << "]";
                }
                for (const auto& st : e.steps) {
                    os << "/";
                    if (st.axis == XqStep::Attribute) os << "@";
                    os << st.name;
                    for (const auto& p : st.preds) {
                        os << "[";
                        print_inline(p, os);
                        os << "]";
                    }
                }
                return;
            }
            case XqExpr::FnCall: {
                os << e.text << "(";
                for (size_t i = 0; i < e.args.size(); i++) {
                    if (i) os << ", ";
                    print_inline(e.args[i], os);
                }
                os << ")";
                return;
            }
            case XqExpr::Compare: {
                print_operand(e.args[0], 3, false, os);
                os << " " << e.op << " ";
                print_operand(e.args[1], 3, true, os);
                return;
            }
            case XqExpr::Arith: {
                int prec = precedence(e);
                print_operand(e.args[0], prec, false, os);
                os << " " << (e.op == "/" ? "div" : e.op) << " ";
                print_operand(e.args[1], prec, true, os);
                return;
            }
            case XqExpr::AndOp:
                print_operand(e.args[0], 2, false, os);
                os << " and ";
                print_operand(e.args[1], 2, true, os);
                return;
            case XqExpr::OrOp:
                print_operand(e.args[0], 1, false, os);
                os << " or ";
                print_operand(e.args[1], 1, true, os);
                return;
            case XqExpr::NotOp:
                os << "not(";
                print_inline(e.args[0], os);
                os << ")";
                return;
            case XqExpr::NegOp:
                os << "-";
                print_operand(e.args[0], 6, true, os);
                return;
            case XqExpr::Seq: {
                if (e.args.empty()) { os << "()"; return; }
                os << "( ";
                for (size_t i = 0; i < e.args.size(); i++) {
                    if (i) os << " , ";
                    print_inline(e.args[i], os);
                }
                os << " )";
                return;
            }
            case XqExpr::IfThen:
                os << "if ( ";
                print_inline(e.args[0], os);
                os << " ) then ( ";
                print_inline(e.args[1], os);
                os << " ) else ( ";
                print_inline(e.args[2], os);
                os << " )";
                return;
            case XqExpr::ElemCtor: {
                if (e.args.empty()) { os << "<" << e.text << "/>"; return; }
                os << "<" << e.text << ">";
                for (const auto& c : e.args) {
                    if (c.kind == XqExpr::Text) os << escape_ctor_text(c.text);
                    else if (c.kind == XqExpr::ElemCtor) print_inline(c, os);
                    else {
                        os << "{ ";
                        print_inline(c, os);
                        os << " }";
                    }
                }
                os << "</" << e.text << ">";
                return;
            }
            case XqExpr::Text:
                os << escape_ctor_text(e.text);
                return;
            case XqExpr::Flwor: {
                // single-line form for operand and argument positions
                for (const auto& cl : e.clauses) {
                    switch (cl.kind) {
                        case XqClause::For:
                            os << "for $" << cl.var;
                            if (!cl.pos_var.empty()) os << " at $" << cl.pos_var;
                            os << " in ";
                            print_inline(cl.exprs[0], os);
                            break;
                        case XqClause::Let:
                            os << "let $" << cl.var << " := ";
                            print_inline(cl.exprs[0], os);
                            break;
                        case XqClause::Where:
                            os << "where ";
                            print_inline(cl.exprs[0], os);
                            break;
                        case XqClause::OrderBy:
                            os << "order by ";
                            for (size_t i = 0; i < cl.exprs.size(); i++) {
                                if (i) os << " , ";
                                print_inline(cl.exprs[i], os);
                                if (cl.descending[i]) os << " descending";
                                os << " empty least";
                            }
                            break;
                    }
                    os << " ";
                }
                const XqExpr& ret = e.args[0];
                if (ret.kind == XqExpr::Seq && !ret.args.empty()) {
                    os << "return ";
                    print_inline(ret, os);
                } else {
                    os << "return ( ";
                    print_inline(ret, os);
                    os << " )";
                }
                return;
            }
        }
    }

    // Prints e starting at the cursor; multiline nodes indent to `indent`.
    void print_block(const XqExpr& e, const std::string& indent) {
        if (e.kind == XqExpr::Flwor) {
            print_flwor(e, indent);
        } else if (e.kind == XqExpr::Seq && is_multiline(e)) {
            for (size_t i = 0; i < e.args.size(); i++) {
                if (i) out << indent << ",\n";
                out << indent;
                if (is_multiline(e.args[i])) {
                    // nested multiline item printed as parenthesized block
                    out << "(\n";
                    print_block(e.args[i], indent + "  ");
                    out << indent << ")\n";
                } else {
                    std::ostringstream os;
                    print_inline(e.args[i], os);
                    out << os.str() << "\n";
                }
            }
        } else {
            std::ostringstream os;
            print_inline(e, os);
            out << indent << os.str() << "\n";
        }
    }

    void print_source(const XqExpr& src, const std::string& indent) {
        if (is_multiline(src)) {
            out << "(\n";
            print_block(src, indent + "  ");
            out << indent << ")\n";
        } else {
            std::ostringstream os;
            print_inline(src, os);
            out << os.str() << "\n";
        }
    }

    void print_flwor(const XqExpr& e, const std::string& indent) {
        for (const auto& c : e.clauses) {
            switch (c.kind) {
                case XqClause::For:
                    out << indent << "for $" << c.var;
                    if (!c.pos_var.empty()) out << " at $" << c.pos_var;
                    out << " in ";
                    print_source(c.exprs[0], indent);
                    break;
                case XqClause::Let:
                    out << indent << "let $" << c.var << " := ";
                    print_source(c.exprs[0], indent);
                    break;
                case XqClause::Where: {
                    std::ostringstream os;
                    print_inline(c.exprs[0], os);
                    out << indent << "where " << os.str() << "\n";
                    break;
                }
                case XqClause::OrderBy: {
                    out << indent << "order by ";
                    for (size_t i = 0; i < c.exprs.size(); i++) {
                        if (i) out << " , ";
                        std::ostringstream os;
                        print_inline(c.exprs[i], os);
                        out << os.str();
                        if (c.descending[i]) out << " descending";
                        out << " empty least";
                    }
                    out << "\n";
                    break;
                }
            }
        }
        const XqExpr& ret = e.args[0];
        if (ret.kind == XqExpr::Seq && !ret.args.empty() && !is_multiline(ret)) {
            std::ostringstream os;
            print_inline(ret, os);
            out << indent << "return " << os.str() << "\n";
        } else if (is_multiline(ret)) {
            out << indent << "return (\n";
            print_block(ret, indent + "  ");
            out << indent << ")\n";
        } else {
            std::ostringstream os;
            print_inline(ret, os);
            out << indent << "return ( " << os.str() << " )\n";
        }
    }
};

// ---------------------------------------------------------------------------
// parser

bool xq_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool xq_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

struct Cursor {
    const std::string& src;
    size_t pos = 0;

    explicit Cursor(const std::string& s) : src(s) {}

    [[noreturn]] void fail(const std::string& what) const {
        int line = 1, col = 1;
        for (size_t i = 0; i < pos && i < src.size(); i++) {
            if (src[i] == '\n') { line++; col = 1; } else col++;
        }
        std::ostringstream os;
        os << "line " << line << " col " << col << ": " << what;
        throw Error(ErrorCode::SYNTAX, os.str());
    }

    char peek(size_t ahead = 0) const {
        return pos + ahead < src.size() ? src[pos + ahead] : '\0';
    }

    void skip_ws() {
        while (pos < src.size()) {
            char c = src[pos];
            if (std::isspace(static_cast<unsigned char>(c))) { pos++; continue; }
            if (c == '(' && peek(1) == ':') {
                int depth = 1;
                pos += 2;
                while (pos < src.size() && depth > 0) {
                    if (peek() == '(' && peek(1) == ':') { depth++; pos += 2; }
                    else if (peek() == ':' && peek(1) == ')') { depth--; pos += 2; }
                    else pos++;
                }
                continue;
            }
            break;
        }
    }

    bool eat_sym(const char* sym) {
        skip_ws();
        size_t n = std::string_view(sym).size();
        if (src.compare(pos, n, sym) != 0) return false;
        pos += n;
        return true;
    }

    bool peek_keyword(const char* kw) {
        skip_ws();
        size_t n = std::string_view(kw).size();
        if (src.compare(pos, n, kw) != 0) return false;
        char after = peek(n);
        return !xq_name_char(after);
    }

    bool eat_keyword(const char* kw) {
        if (!peek_keyword(kw)) return false;
        pos += std::string_view(kw).size();
        return true;
    }

    std::string take_name() {
        skip_ws();
        if (!xq_name_start(peek())) fail("expected a name");
        std::string n;
        while (xq_name_char(peek())) n += src[pos++];
        return n;
    }

    void expect(const char* sym) {
        if (!eat_sym(sym)) fail(std::string("expected '") + sym + "'");
    }
};

std::string decode_entities(Cursor& c, char stop1, char stop2) {
    // reads raw content until stop1/stop2, decoding entity references
    std::string out;
    while (true) {
        char k = c.peek();
        if (k == '\0') c.fail("unterminated content");
        if (k == stop1 || k == stop2) break;
        if (k == '&') {
            size_t sem = c.src.find(';', c.pos);
            if (sem == std::string::npos) c.fail("unterminated entity reference");
            std::string ent = c.src.substr(c.pos + 1, sem - c.pos - 1);
            if (ent == "amp") out += '&';
            else if (ent == "lt") out += '<';
            else if (ent == "gt") out += '>';
            else if (ent == "quot") out += '"';
            else if (ent == "apos") out += '\'';
            else c.fail("unknown entity '&" + ent + ";'");
            c.pos = sem + 1;
            continue;
        }
        out += k;
        c.pos++;
    }
    return out;
}

struct XqParser {
    Cursor c;

    explicit XqParser(const std::string& text) : c(text) {}

    XqExpr parse_expr() {
        if (c.peek_keyword("for") || c.peek_keyword("let")) return parse_flwor();
        return parse_or();
    }

    XqExpr parse_flwor() {
        XqExpr e;
        e.kind = XqExpr::Flwor;
        while (true) {
            if (c.eat_keyword("for")) {
                XqClause cl;
                cl.kind = XqClause::For;
                c.expect("$");
                cl.var = c.take_name();
                if (c.eat_keyword("at")) {
                    c.expect("$");
                    cl.pos_var = c.take_name();
                }
                if (!c.eat_keyword("in")) c.fail("expected 'in'");
                cl.exprs.push_back(parse_single());
                e.clauses.push_back(std::move(cl));
            } else if (c.eat_keyword("let")) {
                XqClause cl;
                cl.kind = XqClause::Let;
                c.expect("$");
                cl.var = c.take_name();
                c.expect(":=");
                cl.exprs.push_back(parse_single());
                e.clauses.push_back(std::move(cl));
            } else if (c.eat_keyword("where")) {
                XqClause cl;
                cl.kind = XqClause::Where;
                cl.exprs.push_back(parse_single());
                e.clauses.push_back(std::move(cl));
            } else if (c.peek_keyword("order")) {
                c.eat_keyword("order");
                if (!c.eat_keyword("by")) c.fail("expected 'by' after 'order'");
                XqClause cl;
                cl.kind = XqClause::OrderBy;
                while (true) {
                    cl.exprs.push_back(parse_single());
                    bool desc = false;
                    if (c.eat_keyword("descending")) desc = true;
                    else c.eat_keyword("ascending");
                    cl.descending.push_back(desc);
                    if (c.eat_keyword("empty")) {
                        if (!c.eat_keyword("least"))
                            c.fail("only 'empty least' ordering is supported");
                    }
                    if (!c.eat_sym(",")) break;
                }
                e.clauses.push_back(std::move(cl));
            } else {
                break;
            }
        }
        if (e.clauses.empty()) c.fail("expected a FLWOR clause");
        if (!c.eat_keyword("return")) c.fail("expected 'return'");
        e.args.push_back(parse_expr());
        return e;
    }

    // ExprSingle: no top-level comma
    XqExpr parse_single() {
        if (c.peek_keyword("for") || c.peek_keyword("let")) return parse_flwor();
        if (c.peek_keyword("if")) return parse_if();
        return parse_or();
    }

    XqExpr parse_if() {
        c.eat_keyword("if");
        c.expect("(");
        XqExpr cond = parse_comma_seq();
        c.expect(")");
        if (!c.eat_keyword("then")) c.fail("expected 'then'");
        XqExpr t = parse_single();
        if (!c.eat_keyword("else")) c.fail("expected 'else'");
        XqExpr f = parse_single();
        XqExpr e;
        e.kind = XqExpr::IfThen;
        e.args = {std::move(cond), std::move(t), std::move(f)};
        return e;
    }

    XqExpr parse_or() {
        XqExpr e = parse_and();
        while (c.eat_keyword("or")) {
            XqExpr rhs = parse_and();
            XqExpr n;
            n.kind = XqExpr::OrOp;
            n.args = {std::move(e), std::move(rhs)};
            e = std::move(n);
        }
        return e;
    }

    XqExpr parse_and() {
        XqExpr e = parse_cmp();
        while (c.eat_keyword("and")) {
            XqExpr rhs = parse_cmp();
            XqExpr n;
            n.kind = XqExpr::AndOp;
            n.args = {std::move(e), std::move(rhs)};
            e = std::move(n);
        }
        return e;
    }

    XqExpr parse_cmp() {
        XqExpr e = parse_add();
        c.skip_ws();
        const char* op = nullptr;
        if (c.eat_sym("!=")) op = "!=";
        else if (c.eat_sym("<=")) op = "<=";
        else if (c.eat_sym(">=")) op = ">=";
        else if (c.eat_sym("=")) op = "=";
        else {
            // '<' here is always a comparison (constructors only start operands)
            c.skip_ws();
            if (c.peek() == '<' && c.peek(1) != '/') { c.pos++; op = "<"; }
            else if (c.peek() == '>') { c.pos++; op = ">"; }
        }
        if (!op) return e;
        XqExpr rhs = parse_add();
        XqExpr n;
        n.kind = XqExpr::Compare;
        n.op = op;
        n.args = {std::move(e), std::move(rhs)};
        return n;
    }

    XqExpr parse_add() {
        XqExpr e = parse_mul();
        while (true) {
            c.skip_ws();
            char k = c.peek();
            if (k != '+' && k != '-') break;
            c.pos++;
            XqExpr rhs = parse_mul();
            XqExpr n;
            n.kind = XqExpr::Arith;
            n.op = std::string(1, k);
            n.args = {std::move(e), std::move(rhs)};
            e = std::move(n);
        }
        return e;
    }

    XqExpr parse_mul() {
        XqExpr e = parse_unary();
        while (true) {
            std::string op;
            c.skip_ws();
            if (c.peek() == '*') { c.pos++; op = "*"; }
            else if (c.eat_keyword("div")) op = "div";
            else break;
            XqExpr rhs = parse_unary();
            XqExpr n;
            n.kind = XqExpr::Arith;
            n.op = op;
            n.args = {std::move(e), std::move(rhs)};
            e = std::move(n);
        }
        return e;
    }

    XqExpr parse_unary() {
        c.skip_ws();
        if (c.peek() == '-') {
            c.pos++;
            XqExpr n;
            n.kind = XqExpr::NegOp;
            n.args = {parse_unary()};
            return n;
        }
        return parse_path();
    }

    XqExpr parse_path() {
        XqExpr start = parse_primary();
        std::vector<XqExpr> start_preds;
        while (true) {
            c.skip_ws();
            if (c.peek() != '[') break;
            c.pos++;
            start_preds.push_back(parse_comma_seq());
            c.expect("]");
        }
        std::vector<XqStep> steps;
        while (true) {
            c.skip_ws();
            if (c.peek() != '/' || c.peek(1) == '/') break;
            c.pos++;
            XqStep st;
            c.skip_ws();
            if (c.peek() == '@') {
                c.pos++;
                st.axis = XqStep::Attribute;
            }
            st.name = c.take_name();
            while (true) {
                c.skip_ws();
                if (c.peek() != '[') break;
                c.pos++;
                st.preds.push_back(parse_comma_seq());
                c.expect("]");
            }
            steps.push_back(std::move(st));
        }
        if (start_preds.empty() && steps.empty()) return start;
        XqExpr e;
        e.kind = XqExpr::Path;
        e.args = {std::move(start)};
        e.start_preds = std::move(start_preds);
        e.steps = std::move(steps);
        return e;
    }

    XqExpr parse_comma_seq() {
        XqExpr first = parse_single();
        c.skip_ws();
        if (c.peek() != ',') return first;
        XqExpr e;
        e.kind = XqExpr::Seq;
        e.args.push_back(std::move(first));
        while (c.eat_sym(",")) e.args.push_back(parse_single());
        return e;
    }

    XqExpr parse_primary() {
        c.skip_ws();
        char k = c.peek();
        XqExpr e;
        if (k == '$') {
            c.pos++;
            e.kind = XqExpr::VarRef;
            e.text = c.take_name();
            return e;
        }
        if (k == '.' && !std::isdigit(static_cast<unsigned char>(c.peek(1)))) {
            c.pos++;
            e.kind = XqExpr::Context;
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(k)) ||
            (k == '.' && std::isdigit(static_cast<unsigned char>(c.peek(1))))) {
            e.kind = XqExpr::NumLit;
            bool dot = false, exp = false;
            while (true) {
                char d = c.peek();
                if (std::isdigit(static_cast<unsigned char>(d))) { e.text += d; c.pos++; continue; }
                if (d == '.' && !dot && !exp) { dot = true; e.text += d; c.pos++; continue; }
                if ((d == 'e' || d == 'E') && !exp) {
                    char n1 = c.peek(1);
                    if (std::isdigit(static_cast<unsigned char>(n1)) || n1 == '+' || n1 == '-') {
                        exp = true;
                        e.text += d;
                        c.pos++;
                        if (c.peek() == '+' || c.peek() == '-') { e.text += c.peek(); c.pos++; }
                        continue;
                    }
                }
                break;
            }
            return e;
        }
        if (k == '"' || k == '\'') {
            c.pos++;
            e.kind = XqExpr::StrLit;
            e.text = decode_entities(c, k, '\0');
            c.pos++; // closing quote
            return e;
        }
        if (k == '(') {
            c.pos++;
            c.skip_ws();
            if (c.peek() == ')') {
                c.pos++;
                e.kind = XqExpr::Seq;
                return e;
            }
            std::vector<XqExpr> items;
            items.push_back(parse_single());
            while (c.eat_sym(",")) items.push_back(parse_single());
            c.expect(")");
            if (items.size() == 1) return std::move(items[0]);
            e.kind = XqExpr::Seq;
            e.args = std::move(items);
            return e;
        }
        if (k == '<') {
            return parse_ctor();
        }
        if (c.peek_keyword("if")) return parse_if();
        if (xq_name_start(k)) {
            std::string name = c.take_name();
            if (!function_names().count(name))
                c.fail("unsupported function '" + name + "'");
            c.expect("(");
            e.kind = XqExpr::FnCall;
            e.text = name;
            c.skip_ws();
            if (c.peek() != ')') {
                e.args.push_back(parse_single());
                while (c.eat_sym(",")) e.args.push_back(parse_single());
            }
            c.expect(")");
            if (name == "not") {
                if (e.args.size() != 1) c.fail("not() takes one argument");
                XqExpr n;
                n.kind = XqExpr::NotOp;
                n.args = {std::move(e.args[0])};
                return n;
            }
            return e;
        }
        c.fail("expected an expression");
    }

    XqExpr parse_ctor() {
        c.expect("<");
        XqExpr e;
        e.kind = XqExpr::ElemCtor;
        e.text = c.take_name();
        c.skip_ws();
        if (c.eat_sym("/>")) return e;
        c.expect(">");
        while (true) {
            if (c.peek() == '\0') c.fail("unterminated element constructor");
            if (c.peek() == '<' && c.peek(1) == '/') {
                c.pos += 2;
                std::string closing = c.take_name();
                if (closing != e.text)
                    c.fail("mismatched </" + closing + ">, expected </" + e.text + ">");
                c.expect(">");
                return e;
            }
            if (c.peek() == '<') {
                e.args.push_back(parse_ctor());
                continue;
            }
            if (c.peek() == '{' && c.peek(1) != '{') {
                c.pos++;
                e.args.push_back(parse_comma_seq());
                c.expect("}");
                continue;
            }
            // raw text run; '{{' and '}}' are escaped braces
            std::string raw;
            while (true) {
                char k = c.peek();
                if (k == '<' || k == '\0') break;
                if (k == '{') {
                    if (c.peek(1) == '{') { raw += '{'; c.pos += 2; continue; }
                    break;
                }
                if (k == '}') {
                    if (c.peek(1) == '}') { raw += '}'; c.pos += 2; continue; }
                    c.fail("unescaped '}' in element content");
                }
                if (k == '&') {
                    size_t sem = c.src.find(';', c.pos);
                    if (sem == std::string::npos) c.fail("unterminated entity reference");
                    std::string ent = c.src.substr(c.pos + 1, sem - c.pos - 1);
                    if (ent == "amp") raw += '&';
                    else if (ent == "lt") raw += '<';
                    else if (ent == "gt") raw += '>';
                    else if (ent == "quot") raw += '"';
                    else if (ent == "apos") raw += '\'';
                    else c.fail("unknown entity '&" + ent + ";'");
                    c.pos = sem + 1;
                    continue;
                }
                raw += k;
                c.pos++;
            }
            bool ws_only = std::all_of(raw.begin(), raw.end(), [](char ch) {
                return std::isspace(static_cast<unsigned char>(ch));
            });
            if (!ws_only) {
                if (!e.args.empty() && e.args.back().kind == XqExpr::Text) {
                    e.args.back().text += raw;
                } else {
                    XqExpr t;
                    t.kind = XqExpr::Text;
                    t.text = raw;
                    e.args.push_back(std::move(t));
                }
            }
        }
    }
};

} // namespace

std::string pretty_print(const XQueryProgram& program) {
    check_scope(program.root, {});
    Printer p;
    p.print_block(program.root, "");
    return p.out.str();
}

XQueryProgram parse_subset(const std::string& text) {
    XqParser p(text);
    XQueryProgram prog;
    prog.root = p.parse_expr();
    p.c.skip_ws();
    if (p.c.pos != p.c.src.size()) p.c.fail("unexpected trailing content");
    return prog;
}

XqExpr var_ref(std::string name) {
    XqExpr e;
    e.kind = XqExpr::VarRef;
    e.text = std::move(name);
    return e;
}

XqExpr str_lit(std::string value) {
    XqExpr e;
    e.kind = XqExpr::StrLit;
    e.text = std::move(value);
    return e;
}

XqExpr num_lit(long value) {
    XqExpr e;
    e.kind = XqExpr::NumLit;
    e.text = std::to_string(value);
    return e;
}

XqExpr fncall(std::string name, std::vector<XqExpr> args) {
    XqExpr e;
    e.kind = XqExpr::FnCall;
    e.text = std::move(name);
    e.args = std::move(args);
    return e;
}

XqExpr compare(std::string op, XqExpr l, XqExpr r) {
    XqExpr e;
    e.kind = XqExpr::Compare;
    e.op = std::move(op);
    e.args = {std::move(l), std::move(r)};
    return e;
}

XqExpr and_op(XqExpr l, XqExpr r) {
    XqExpr e;
    e.kind = XqExpr::AndOp;
    e.args = {std::move(l), std::move(r)};
    return e;
}

XqExpr seq(std::vector<XqExpr> items) {
    if (items.size() == 1) return std::move(items[0]);
    XqExpr e;
    e.kind = XqExpr::Seq;
    e.args = std::move(items);
    return e;
}

XqExpr context_item() {
    XqExpr e;
    e.kind = XqExpr::Context;
    return e;
}

} // namespace xmlsem::xq
