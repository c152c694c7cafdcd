#pragma once

#include "xmlsem/mapping.hpp"
#include "xmlsem/owl_model.hpp"
#include "xmlsem/sparql.hpp"
#include "xmlsem/xquery_ast.hpp"

#include <map>
#include <string>
#include <vector>

namespace xmlsem::translate {

enum class VarType { Node, Literal, Class, Predicate };

struct VarTypeMap {
    std::map<std::string, VarType> types;
    // literal variable -> datatype IRI of the mapped property's range; empty
    // when branches disagree or the datatype is unknown
    std::map<std::string, std::string> datatypes;
};

struct TranslationContext {
    const map::MappingSet* mappings = nullptr;
    const owl::Ontology* ontology = nullptr; // optional: enables subproperty
                                             // expansion and schema-triple answering
    std::string source_uri;
    bool source_is_doc = false; // doc(...) instead of collection(...)
    std::string base_iri = "http://example.com/ns";
    bool strict = false;
};

struct Translation {
    xq::XQueryProgram program;
    VarTypeMap var_types;
    std::vector<std::string> projection; // ordered result variables
    sparql::SparqlQuery::Form form = sparql::SparqlQuery::Select;
    std::string base_iri;
};

// Infers one type per variable over a normalized pattern; conflicting uses
// raise TYPE_CONFLICT naming both triples.
VarTypeMap specify_variable_types(const sparql::GraphPattern& normalized,
                                  const TranslationContext& ctx);

// Full pipeline: normalize, type variables, process schema triples, bind
// variables to XPath sets, translate the algebra and modifiers, and build the
// query-form skeleton.
Translation translate_query(const sparql::SparqlQuery& q, const TranslationContext& ctx);

} // namespace xmlsem::translate
