#include "xmlsem/xml.hpp"

#include "xmlsem/error.hpp"

#include <cctype>
#include <sstream>

namespace xmlsem::xml {

const std::string* Node::attr(const std::string& n) const {
    for (const auto& a : attrs)
        if (a.name == n) return &a.value;
    return nullptr;
}

Node* Node::first_child(const std::string& n) const {
    for (const auto& c : children)
        if (c->name == n) return c.get();
    return nullptr;
}

std::vector<Node*> Node::children_named(const std::string& n) const {
    std::vector<Node*> out;
    for (const auto& c : children)
        if (c->name == n) out.push_back(c.get());
    return out;
}

std::string Node::string_value() const {
    std::string out = text;
    for (const auto& c : children) out += c->string_value();
    return out;
}

std::unique_ptr<Node> Node::clone() const {
    auto n = std::make_unique<Node>();
    n->name = name;
    n->attrs = attrs;
    n->text = text;
    n->order = order;
    for (const auto& c : children) {
        auto cc = c->clone();
        cc->parent = n.get();
        n->children.push_back(std::move(cc));
    }
    return n;
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Doc run() {
        Doc doc;
        skip_misc();
        if (eof()) fail("document has no root element");
        doc.root = parse_element();
        doc.root->parent = nullptr;
        skip_misc();
        if (!eof()) fail("content after root element");
        renumber(*doc.root);
        return doc;
    }

private:
    std::string_view text_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    bool starts_with(std::string_view s) const { return text_.compare(pos_, s.size(), s) == 0; }

    char get() {
        char c = text_[pos_++];
        if (c == '\n') { line_++; col_ = 1; } else { col_++; }
        return c;
    }

    void advance(size_t n) {
        for (size_t i = 0; i < n && !eof(); i++) get();
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorCode::WELL_FORMEDNESS,
                    msg + " at line " + std::to_string(line_) + ", column " + std::to_string(col_));
    }

    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) get();
    }

    // Skips whitespace, comments, PIs and the XML declaration.
    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<!--")) {
                advance(4);
                size_t end = text_.find("-->", pos_);
                if (end == std::string_view::npos) fail("unterminated comment");
                while (pos_ < end + 3) get();
            } else if (starts_with("<?")) {
                size_t end = text_.find("?>", pos_);
                if (end == std::string_view::npos) fail("unterminated processing instruction");
                while (pos_ < end + 2) get();
            } else if (starts_with("<!DOCTYPE")) {
                // minimal: skip to the first '>' (no internal subsets supported)
                size_t end = text_.find('>', pos_);
                if (end == std::string_view::npos) fail("unterminated DOCTYPE");
                while (pos_ <= end) get();
            } else {
                return;
            }
        }
    }

    static bool is_name_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
    }
    static bool is_name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '-' || c == '.';
    }

    std::string parse_name() {
        if (eof() || !is_name_start(peek())) fail("expected a name");
        std::string n;
        n += get();
        while (!eof() && is_name_char(peek())) n += get();
        return n;
    }

    std::string decode_entity() {
        // positioned on '&'
        get();
        std::string ent;
        while (!eof() && peek() != ';') {
            ent += get();
            if (ent.size() > 10) fail("malformed entity reference");
        }
        if (eof()) fail("unterminated entity reference");
        get(); // ';'
        if (ent == "lt") return "<";
        if (ent == "gt") return ">";
        if (ent == "amp") return "&";
        if (ent == "quot") return "\"";
        if (ent == "apos") return "'";
        if (!ent.empty() && ent[0] == '#') {
            long code = 0;
            try {
                code = (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X'))
                           ? std::stol(ent.substr(2), nullptr, 16)
                           : std::stol(ent.substr(1));
            } catch (...) {
                fail("malformed character reference");
            }
            // encode as UTF-8
            std::string out;
            unsigned long cp = static_cast<unsigned long>(code);
            if (cp < 0x80) out += static_cast<char>(cp);
            else if (cp < 0x800) {
                out += static_cast<char>(0xC0 | (cp >> 6));
                out += static_cast<char>(0x80 | (cp & 0x3F));
            } else if (cp < 0x10000) {
                out += static_cast<char>(0xE0 | (cp >> 12));
                out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
                out += static_cast<char>(0x80 | (cp & 0x3F));
            } else {
                out += static_cast<char>(0xF0 | (cp >> 18));
                out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
                out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
                out += static_cast<char>(0x80 | (cp & 0x3F));
            }
            return out;
        }
        fail("unknown entity '&" + ent + ";'");
    }

    std::string parse_attr_value() {
        if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
        char quote = get();
        std::string v;
        while (!eof() && peek() != quote) {
            if (peek() == '&') v += decode_entity();
            else if (peek() == '<') fail("'<' in attribute value");
            else v += get();
        }
        if (eof()) fail("unterminated attribute value");
        get();
        return v;
    }

    std::unique_ptr<Node> parse_element() {
        if (peek() != '<') fail("expected '<'");
        get();
        auto node = std::make_unique<Node>();
        node->name = parse_name();
        for (;;) {
            skip_ws();
            if (eof()) fail("unterminated start tag");
            if (peek() == '>') { get(); break; }
            if (starts_with("/>")) {
                advance(2);
                return node;
            }
            Attr a;
            a.name = parse_name();
            skip_ws();
            if (eof() || peek() != '=') fail("expected '=' after attribute name");
            get();
            skip_ws();
            a.value = parse_attr_value();
            for (const auto& prev : node->attrs)
                if (prev.name == a.name) fail("duplicate attribute '" + a.name + "'");
            node->attrs.push_back(std::move(a));
        }
        parse_content(*node);
        return node;
    }

    void parse_content(Node& node) {
        std::string text;
        auto flush_text = [&]() {
            bool only_ws = true;
            for (char c : text)
                if (!std::isspace(static_cast<unsigned char>(c))) { only_ws = false; break; }
            if (!only_ws) node.text += text;
            text.clear();
        };
        for (;;) {
            if (eof()) fail("unterminated element '" + node.name + "'");
            if (starts_with("</")) {
                flush_text();
                advance(2);
                std::string n = parse_name();
                if (n != node.name) fail("mismatched end tag '" + n + "' for '" + node.name + "'");
                skip_ws();
                if (eof() || peek() != '>') fail("malformed end tag");
                get();
                return;
            }
            if (starts_with("<!--")) {
                flush_text();
                size_t end = text_.find("-->", pos_);
                if (end == std::string_view::npos) fail("unterminated comment");
                while (pos_ < end + 3) get();
                continue;
            }
            if (starts_with("<![CDATA[")) {
                advance(9);
                size_t end = text_.find("]]>", pos_);
                if (end == std::string_view::npos) fail("unterminated CDATA section");
                while (pos_ < end) text += get();
                advance(3);
                continue;
            }
            if (starts_with("<?")) {
                flush_text();
                size_t end = text_.find("?>", pos_);
                if (end == std::string_view::npos) fail("unterminated processing instruction");
                while (pos_ < end + 2) get();
                continue;
            }
            if (peek() == '<') {
                flush_text();
                auto child = parse_element();
                child->parent = &node;
                node.children.push_back(std::move(child));
                continue;
            }
            if (peek() == '&') { text += decode_entity(); continue; }
            text += get();
        }
    }
};

void renumber_from(Node& n, int& counter) {
    n.order = counter++;
    for (auto& c : n.children) {
        c->parent = &n;
        renumber_from(*c, counter);
    }
}

void serialize_node(std::ostringstream& out, const Node& n, int indent) {
    std::string pad(static_cast<size_t>(indent) * 2, ' ');
    out << pad << '<' << n.name;
    for (const auto& a : n.attrs) out << ' ' << a.name << "=\"" << escape_attr(a.value) << '"';
    if (n.text.empty() && n.children.empty()) {
        out << "/>\n";
        return;
    }
    out << '>';
    if (!n.text.empty()) {
        out << escape_text(n.text);
        if (!n.children.empty()) out << '\n';
    } else if (!n.children.empty()) {
        out << '\n';
    }
    for (const auto& c : n.children) serialize_node(out, *c, indent + 1);
    if (!n.children.empty()) out << pad;
    out << "</" << n.name << ">\n";
}

} // namespace

Doc parse(std::string_view text) {
    return Parser(text).run();
}

void renumber(Node& root) {
    int counter = 0;
    renumber_from(root, counter);
}

std::string serialize(const Node& node, int indent) {
    std::ostringstream out;
    serialize_node(out, node, indent);
    return out.str();
}

std::string serialize(const Doc& doc) {
    if (!doc.root) return "";
    return serialize(*doc.root, 0);
}

std::string escape_text(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string escape_attr(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace xmlsem::xml
