#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace xmlsem::xsd {

// maxOccurs value; -1 means unbounded.
constexpr long kUnbounded = -1;

// Where a declaration appears in the schema.
struct DeclContext {
    enum Kind { TopLevel, InType, InGroup } kind = TopLevel;
    std::string owner; // type identity or group name; empty for top level

    bool operator==(const DeclContext&) const = default;
};

struct ElementDecl {
    std::string name;               // empty when `ref` is set
    std::string ref;                // name of a referenced top-level element
    std::string type_name;          // named type; empty for inline anonymous types
    int anon_type = -1;             // index into XsdSchema::types for an inline complex type
    int min_occurs = 1;
    long max_occurs = 1;
    std::string default_value;
    std::string fixed_value;
    bool has_default = false;
    bool has_fixed = false;
    std::string substitution_group; // head element name; top-level declarations only
    DeclContext declared_in;
    std::string annotation;

    bool operator==(const ElementDecl&) const = default;
};

struct AttributeDecl {
    std::string name;
    std::string type_name; // always a simple type
    bool required = false;
    std::string default_value;
    std::string fixed_value;
    bool has_default = false;
    bool has_fixed = false;
    DeclContext declared_in;
    std::string annotation;

    bool operator==(const AttributeDecl&) const = default;
};

// Content-model particle tree.  Element particles hold the declaration
// inline; group references are resolved lazily by name.
struct Particle {
    enum Kind { Sequence, Choice, All, GroupRef, Elem, Any } kind = Sequence;
    std::vector<Particle> children; // compositors
    std::string group_ref;          // GroupRef
    ElementDecl element;            // Elem

    bool operator==(const Particle&) const = default;
};

struct ComplexType {
    std::string name;         // empty for anonymous types
    std::string host_element; // for anonymous types: the declaring element's name
    bool has_content = false;
    Particle content;
    std::vector<AttributeDecl> attributes;
    bool any_attribute = false;
    std::string base; // derivation base type, empty if none
    enum Derivation { None, Extension, Restriction } derivation = None;
    std::string annotation;

    bool operator==(const ComplexType&) const = default;

    // Internal identity: the declared name, or a host-element keyed identity
    // for anonymous types.
    std::string identity() const { return name.empty() ? "@anon:" + host_element : name; }
};

struct ModelGroup {
    std::string name;
    Particle content;
    std::string annotation;

    bool operator==(const ModelGroup&) const = default;
};

// unique / key / keyref declared under an element.
struct IdentityConstraint {
    enum Kind { Unique, Key, Keyref } kind = Unique;
    std::string name;
    std::string selector;
    std::vector<std::string> fields;
    std::string refer;        // keyref only
    std::string host_element; // the element the constraint is declared under

    bool operator==(const IdentityConstraint&) const = default;
};

// Newer-schema construct kept verbatim for the compatibility ontology.
struct RecordedConstruct {
    std::string kind; // "alternative", "assert", "override", "redefine"
    std::string xml;  // verbatim serialization
    std::string location;

    bool operator==(const RecordedConstruct&) const = default;
};

struct XsdSchema {
    std::string target_namespace;
    std::vector<ComplexType> types; // named and anonymous
    std::vector<ElementDecl> top_elements;
    std::vector<AttributeDecl> top_attributes;
    std::vector<ModelGroup> groups;
    std::vector<std::string> simple_types; // user-declared simple type names
    std::vector<IdentityConstraint> identity_constraints;
    std::vector<RecordedConstruct> recorded_constructs;
    // head element name -> member element names, in declaration order
    std::map<std::string, std::vector<std::string>> substitution_members;

    bool operator==(const XsdSchema&) const = default;

    const ComplexType* find_type(const std::string& identity) const;
    const ModelGroup* find_group(const std::string& name) const;
    const ElementDecl* find_top_element(const std::string& name) const;
    // Transitive substitution members for a head element.
    std::vector<std::string> substitutable(const std::string& head) const;
};

bool is_builtin_simple_type(const std::string& name);

// Parses schema text into the model; resolves and validates all references.
XsdSchema parse_schema(const std::string& text);

// Re-serializes the model as schema text (parse . serialize is identity on
// the model).
std::string serialize_schema(const XsdSchema& schema);

// One possible attachment of a declaration below a complex type.
struct ChildSlot {
    enum Kind { Element, Attribute } kind = Element;
    std::string step;            // element name or attribute name
    std::string type_identity;   // complex type identity, empty for simple
    std::string simple_type;     // simple type name, empty for complex
    int min_occurs = 1;
    long max_occurs = 1;
    std::string host_type;       // identity of the type declaring the slot
    std::string subst_head;      // set when this slot is a substitution alternative
    bool in_choice = false;      // at least one enclosing compositor is a choice
    const ElementDecl* decl = nullptr;
    const AttributeDecl* attr = nullptr;
};

struct PathCatalog {
    int max_depth = 16;
    // complex type identity -> sorted absolute paths where the type occurs
    std::map<std::string, std::vector<std::string>> class_paths;
    // complex type identity -> effective ordered content (inherited first)
    std::map<std::string, std::vector<ChildSlot>> attachments;
    // document root element names (top-level elements with complex type)
    std::vector<std::string> roots;
};

// Enumerates every element path derivable from the schema, grouped by the
// complex type governing the path's last step.  Throws RECURSION_LIMIT when
// expansion exceeds max_depth (naming the type cycle) and
// UNSUPPORTED_CONSTRUCT when path enumeration reaches an xs:all or wildcard
// particle.
PathCatalog enumerate_paths(const XsdSchema& schema, int max_depth = 16);

} // namespace xmlsem::xsd
