#pragma once

#include <string>
#include <vector>

namespace xmlsem::xq {

struct XqExpr;

// One step of a path expression ("/name", "/@name").
struct XqStep {
    enum Axis { Child, Attribute } axis = Child;
    std::string name;
    std::vector<XqExpr> preds;

    bool operator==(const XqStep&) const;
};

// FLWOR clause.  For/Let put the source in exprs[0]; Where puts the
// condition there; OrderBy holds one key per entry of exprs with a parallel
// descending flag (keys always sort empty least).
struct XqClause {
    enum Kind { For, Let, Where, OrderBy } kind = For;
    std::string var;     // For/Let
    std::string pos_var; // For ... at $pos; empty if absent
    std::vector<XqExpr> exprs;
    std::vector<bool> descending; // OrderBy only

    bool operator==(const XqClause&) const;
};

struct XqExpr {
    enum Kind {
        Flwor,    // clauses + args[0] = return expression
        Path,     // args[0] = start (VarRef/FnCall/ContextItem), start_preds, steps
        VarRef,   // text = name
        Context,  // '.'
        ElemCtor, // text = element name; args = children (Text children are raw)
        Text,     // raw text inside an element constructor
        FnCall,   // text = function name; args
        Compare,  // op in {=,!=,<,>,<=,>=}; args: 2
        Arith,    // op in {+,-,*,div}; args: 2
        AndOp,    // args: 2
        OrOp,     // args: 2
        NotOp,    // args: 1 (prints as not(...))
        NegOp,    // unary minus; args: 1
        Seq,      // parenthesized sequence; args (possibly empty -> "()")
        IfThen,   // args: condition, then, else
        StrLit,   // text = value
        NumLit,   // text = lexical form
    } kind = Seq;
    std::string text;
    std::string op;
    std::vector<XqExpr> args;
    std::vector<XqExpr> start_preds; // Path: predicates applied to the start
    std::vector<XqStep> steps;       // Path
    std::vector<XqClause> clauses;   // Flwor

    bool operator==(const XqExpr&) const;
};

struct XQueryProgram {
    XqExpr root;

    bool operator==(const XQueryProgram&) const = default;
};

// Deterministic layout; raises UNBOUND_VARIABLE when a referenced variable
// has no enclosing for/let binding.
std::string pretty_print(const XQueryProgram& program);

// Parses text within the emitted grammar; parse_subset(pretty_print(p)) == p.
// Unknown functions raise SYNTAX naming the function.
XQueryProgram parse_subset(const std::string& text);

// ---- construction helpers ----

XqExpr var_ref(std::string name);
XqExpr str_lit(std::string value);
XqExpr num_lit(long value);
XqExpr fncall(std::string name, std::vector<XqExpr> args = {});
XqExpr compare(std::string op, XqExpr l, XqExpr r);
XqExpr and_op(XqExpr l, XqExpr r);
XqExpr seq(std::vector<XqExpr> items);
XqExpr context_item();

} // namespace xmlsem::xq
