#pragma once

#include "xmlsem/owl_model.hpp"
#include "xmlsem/xsd_model.hpp"

#include <string>

namespace xmlsem::xs2owl {

struct TransformConfig {
    std::string base_iri = "http://example.com/ns";
};

struct TransformResult {
    owl::Ontology schema_ontology; // classes, properties, axioms
    owl::Ontology compat_ontology; // info individuals preserving schema detail
};

// ':' in type names becomes '_' so ids stay single tokens ("xs:string" ->
// "xs_string").
std::string sanitize_type_name(const std::string& type_name);

// Ontology class id for a complex type: its name, or NS_<host>_UNType for
// anonymous types.
std::string class_id_for(const xsd::ComplexType& type);
std::string class_id_from_identity(const std::string& identity);

// Property id: element/attribute name, a group infix when declared inside a
// named model group, and the sanitized range id.
std::string property_id(const std::string& name, const std::string& group,
                        const std::string& range_id);

TransformResult transform(const xsd::XsdSchema& schema, const TransformConfig& config = {});

} // namespace xmlsem::xs2owl
