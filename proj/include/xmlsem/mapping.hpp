#pragma once

#include "xmlsem/owl_model.hpp"
#include "xmlsem/xsd_model.hpp"

#include <map>
#include <string>
#include <vector>

namespace xmlsem::map {

enum class ConstructKind { Class, DatatypeProperty, ObjectProperty };

// Absolute location paths; always non-empty, deduplicated, sorted.
struct XPathSet {
    std::vector<std::string> paths;

    bool operator==(const XPathSet&) const = default;
};

struct Mapping {
    std::string construct;
    ConstructKind kind = ConstructKind::Class;
    XPathSet xpaths;

    bool operator==(const Mapping&) const = default;
};

struct MappingSet {
    std::string ontology_iri;
    std::string schema_namespace;
    std::vector<std::string> notes; // header comments, preserved verbatim
    std::map<std::string, Mapping> by_construct;

    bool operator==(const MappingSet&) const = default;

    const Mapping* find(const std::string& construct) const {
        auto it = by_construct.find(construct);
        return it == by_construct.end() ? nullptr : &it->second;
    }
};

// Derives the complete mapping set for a schema whose ontology came from the
// same transformation.  Deterministic: byte-identical output on re-runs.
MappingSet generate_mappings(const xsd::XsdSchema& schema, const owl::Ontology& os,
                             const xsd::PathCatalog& catalog);

// Fixed wire format (two-space indent, LF, sorted constructs).
std::string serialize_mappings(const MappingSet& ms);

enum class Strictness { Lenient, Strict };

// Parses and validates a mapping document.  When an ontology is supplied,
// constructs are checked against it (UNKNOWN_CONSTRUCT under Strict).
MappingSet parse_mappings(const std::string& text, const owl::Ontology* ontology = nullptr,
                          Strictness strictness = Strictness::Lenient,
                          std::vector<std::string>* warnings = nullptr);

// Paths of a property joined with the paths of its transitive subproperties.
// Raises UNMAPPED_CONSTRUCT when neither the property nor any subproperty is
// mapped.
XPathSet resolve_property_paths(const MappingSet& ms, const owl::Ontology& os,
                                const std::string& property_id);

// One step of a location path.
struct PathStep {
    bool is_attr = false;
    std::string name;
    std::string predicate; // raw text between brackets, empty if none

    bool operator==(const PathStep&) const = default;
};

// Splits an absolute path into steps; predicates are kept verbatim.
std::vector<PathStep> parse_xpath(const std::string& path);
std::string join_xpath(const std::vector<PathStep>& steps);

} // namespace xmlsem::map
