#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace xmlsem::owl {

// Class definition expression derived from a content model.
struct ClassExpression {
    enum Kind { None, Intersection, Union } kind = None;
    std::vector<std::string> members; // property ids

    bool operator==(const ClassExpression&) const = default;
};

struct OwlClass {
    std::string id;
    std::vector<std::string> super_classes; // empty means only the top class
    ClassExpression definition;

    bool operator==(const OwlClass&) const = default;
};

struct OwlProperty {
    std::string id;
    bool is_object = false;
    std::set<std::string> domains; // class ids or "owl:Thing"
    std::set<std::string> ranges;  // datatype names (xs:*) or class ids
    std::set<std::string> super_properties;

    bool operator==(const OwlProperty&) const = default;
};

// A value carried by an individual: either a reference to another construct
// or a literal (plain string or integer).
struct PropertyValue {
    enum Kind { Ref, Str, Int } kind = Str;
    std::string text;
    long number = 0;

    bool operator==(const PropertyValue&) const = default;
};

struct Individual {
    std::string id;
    std::string type; // class id
    std::vector<std::pair<std::string, PropertyValue>> values;

    bool operator==(const Individual&) const = default;
};

struct HasKeyAxiom {
    std::string class_id;
    std::vector<std::string> properties;

    bool operator==(const HasKeyAxiom&) const = default;
};

struct CardinalityAxiom {
    std::string class_id;
    std::string property_id;
    long count = 1;

    bool operator==(const CardinalityAxiom&) const = default;
};

struct Ontology {
    std::string base_iri; // prefix "ns:" binds to base_iri + "#"
    std::map<std::string, OwlClass> classes;
    std::map<std::string, OwlProperty> properties; // datatype and object
    std::map<std::string, Individual> individuals;
    std::set<std::string> datatypes; // user-declared datatype names
    std::vector<HasKeyAxiom> keys;
    std::vector<CardinalityAxiom> cardinalities;
    std::map<std::string, std::string> comments; // construct id -> text

    bool operator==(const Ontology&) const = default;

    bool has_id(const std::string& id) const {
        return classes.count(id) || properties.count(id) || individuals.count(id);
    }

    // Transitive super-properties of a property id (not including itself).
    std::vector<std::string> super_property_closure(const std::string& id) const;
    // Direct sub-properties of a property id.
    std::vector<std::string> sub_properties(const std::string& id) const;
    // Transitive sub-properties (not including itself).
    std::vector<std::string> sub_property_closure(const std::string& id) const;
    // Classes whose super_classes chain reaches `id` (extension descendants).
    std::vector<std::string> subclass_closure(const std::string& id) const;
};

// Idempotent construct registration; merges domains/ranges/supers when the
// same property id arrives from two schema contexts.  Throws
// ID_KIND_CONFLICT when an id is reused with a different construct kind.
void add_class(Ontology& o, const OwlClass& c);
void add_property(Ontology& o, const OwlProperty& p);
void add_individual(Ontology& o, const Individual& i);

// Validates acyclicity of class/property hierarchies and reference targets.
void validate(const Ontology& o);

// Deterministic single-syntax Turtle emission: fixed prefix block, sorted
// construct ids, one construct per statement block.
std::string serialize_turtle(const Ontology& o);

// Parses exactly the serialize_turtle subset (plus arbitrary statement
// order); anything outside it raises UNSUPPORTED_TRIPLE.
Ontology parse_turtle(const std::string& text);

} // namespace xmlsem::owl
