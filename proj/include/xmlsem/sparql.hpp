#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace xmlsem::sparql {

// A term in a triple pattern.
struct Term {
    enum Kind { Var, Iri, Literal } kind = Var;
    std::string text;     // variable name (no '?'), IRI, or literal lexical form
    std::string datatype; // literals only; full IRI, empty for plain literals
    std::string lang;     // literals only

    bool operator==(const Term&) const = default;

    static Term var(std::string name) { return {Var, std::move(name), "", ""}; }
    static Term iri(std::string value) { return {Iri, std::move(value), "", ""}; }
    static Term literal(std::string value, std::string dt = "", std::string lg = "") {
        return {Literal, std::move(value), std::move(dt), std::move(lg)};
    }
};

struct TriplePattern {
    Term s, p, o;

    bool operator==(const TriplePattern&) const = default;
};

// Expression tree for FILTER constraints and ORDER BY keys.
struct FilterExpr {
    enum Kind {
        And,     // args: 2
        Or,      // args: 2
        Not,     // args: 1
        Compare, // op in {=,!=,<,>,<=,>=}; args: 2
        Arith,   // op in {+,-,*,/}; args: 2
        Neg,     // unary minus; args: 1
        Call,    // op = function name; args: arguments
        Variable,
        IriRef,
        Lit,
    } kind = Lit;
    std::string op;
    std::vector<FilterExpr> args;
    std::string text;     // variable name / IRI / literal lexical form
    std::string datatype; // literals
    std::string lang;     // literals

    bool operator==(const FilterExpr&) const = default;
};

// Recursive graph pattern: BGP / AND / UNION / OPT / FILTER.
struct GraphPattern {
    enum Kind { BGP, And, Union, Opt, Filter } kind = BGP;
    std::vector<TriplePattern> triples; // BGP
    std::vector<GraphPattern> children; // And/Union/Opt: {left, right}; Filter: {inner}
    FilterExpr constraint;              // Filter

    bool operator==(const GraphPattern&) const = default;
};

struct OrderKey {
    FilterExpr expr;
    bool descending = false;

    bool operator==(const OrderKey&) const = default;
};

struct Modifiers {
    std::vector<OrderKey> order_by;
    std::optional<long> limit;
    std::optional<long> offset;

    bool operator==(const Modifiers&) const = default;
};

struct SparqlQuery {
    enum Form { Select, Ask, Construct, Describe } form = Select;
    enum Distinctness { Plain, Distinct, Reduced } distinctness = Plain;
    bool select_all = false;                      // SELECT *
    std::vector<std::string> projection;          // in declaration order
    std::vector<TriplePattern> construct_template;
    std::vector<Term> describe_targets;
    GraphPattern pattern;
    Modifiers modifiers;
    std::map<std::string, std::string> prefixes;
    // Deterministic diagnostics (e.g. projected variables absent from the
    // pattern); regenerated identically on re-parse.
    std::vector<std::string> warnings;

    bool operator==(const SparqlQuery&) const = default;
};

// Parses the supported query subset.  Prefixes are expanded to full IRIs,
// `a` becomes rdf:type, predicate-object and object lists become plain
// triples, blank nodes become fresh non-projected variables.  Raises SYNTAX
// with position and expected token, and UNSUPPORTED_FEATURE (naming the
// production) for constructs outside the subset.
SparqlQuery parse_query(const std::string& text);

// Canonical text for a parsed query; parse_query(print_query(q)) == q.
std::string print_query(const SparqlQuery& q);

// Rewrites a pattern into union normal form: a top-level UNION chain of
// union-free branches, each shaped Filter*(Opt*(BGP)) with merged triples.
// UNION under an OPT right-hand side stays in place (distribution there is
// unsound).  Raises UNSUPPORTED_FEATURE when a filter's scope or an optional
// part's variable sharing makes flattening unsound.
GraphPattern normalize(const GraphPattern& gp);

// Union-free branch extracted from a normalized pattern.
struct NormBranch {
    std::vector<TriplePattern> triples;
    std::vector<FilterExpr> filters;
    std::vector<GraphPattern> optionals; // each a normalized pattern
};

// Splits a normalized pattern into its union branches.
std::vector<NormBranch> union_branches(const GraphPattern& normalized);

// Variables appearing in triple patterns (including optional parts).
std::set<std::string> pattern_variables(const GraphPattern& gp);
// Variables certain to be bound in every solution (triples outside OPT).
std::set<std::string> certain_variables(const GraphPattern& gp);
std::set<std::string> expr_variables(const FilterExpr& e);

extern const char* const kRdfType; // full rdf:type IRI

} // namespace xmlsem::sparql
