#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace xmlsem::xml {

struct Attr {
    std::string name;
    std::string value;
};

// Element node.  Text content is kept as a single string: the supported
// document shapes never interleave text with child elements, so a node has
// either text or children (or neither).  Whitespace-only text runs between
// elements are dropped at parse time.
struct Node {
    std::string name;
    std::vector<Attr> attrs;
    std::string text;
    std::vector<std::unique_ptr<Node>> children;
    Node* parent = nullptr;
    int order = 0; // preorder position in the owning document, 0-based

    const std::string* attr(const std::string& n) const;
    Node* first_child(const std::string& n) const;
    std::vector<Node*> children_named(const std::string& n) const;
    // Concatenation of all text content in document order.
    std::string string_value() const;

    std::unique_ptr<Node> clone() const;
};

struct Doc {
    std::unique_ptr<Node> root;

    Doc() = default;
    Doc(Doc&&) = default;
    Doc& operator=(Doc&&) = default;
};

// Parses a well-formed document; throws Error(WELL_FORMEDNESS) with a
// line/column position otherwise.  Comments, processing instructions and the
// XML declaration are skipped; the five predefined entities and numeric
// character references are decoded.
Doc parse(std::string_view text);

// Serializes with two-space indentation, LF line endings and a trailing LF.
std::string serialize(const Doc& doc);
std::string serialize(const Node& node, int indent = 0);

// Renumbers `order` fields of the whole tree in preorder.
void renumber(Node& root);

std::string escape_text(std::string_view s);
std::string escape_attr(std::string_view s);

} // namespace xmlsem::xml
