#include "xmlsem/owl_model.hpp"

#include "xmlsem/error.hpp"

#include <algorithm>
#include <sstream>

namespace xmlsem::owl {

namespace {

constexpr const char* kXsdPrefix = "http://www.w3.org/2001/XMLSchema#";
constexpr const char* kRdfPrefix = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
constexpr const char* kRdfsPrefix = "http://www.w3.org/2000/01/rdf-schema#";
constexpr const char* kOwlPrefix = "http://www.w3.org/2002/07/owl#";

std::string escape_literal(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '\\' || c == '"') { out += '\\'; out += c; }
        else if (c == '\n') out += "\\n";
        else if (c == '\t') out += "\\t";
        else if (c == '\r') out += "\\r";
        else out += c;
    }
    return out;
}

} // namespace

std::vector<std::string> Ontology::super_property_closure(const std::string& id) const {
    std::vector<std::string> out, work{id};
    while (!work.empty()) {
        std::string cur = work.back();
        work.pop_back();
        auto it = properties.find(cur);
        if (it == properties.end()) continue;
        for (const auto& sup : it->second.super_properties) {
            if (sup == id || std::find(out.begin(), out.end(), sup) != out.end()) continue;
            out.push_back(sup);
            work.push_back(sup);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> Ontology::sub_properties(const std::string& id) const {
    std::vector<std::string> out;
    for (const auto& [pid, p] : properties)
        if (p.super_properties.count(id)) out.push_back(pid);
    return out;
}

std::vector<std::string> Ontology::sub_property_closure(const std::string& id) const {
    std::vector<std::string> out, work{id};
    while (!work.empty()) {
        std::string cur = work.back();
        work.pop_back();
        for (const auto& sub : sub_properties(cur)) {
            if (sub == id || std::find(out.begin(), out.end(), sub) != out.end()) continue;
            out.push_back(sub);
            work.push_back(sub);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> Ontology::subclass_closure(const std::string& id) const {
    std::vector<std::string> out, work{id};
    while (!work.empty()) {
        std::string cur = work.back();
        work.pop_back();
        for (const auto& [cid, c] : classes) {
            if (std::find(c.super_classes.begin(), c.super_classes.end(), cur) == c.super_classes.end())
                continue;
            if (cid == id || std::find(out.begin(), out.end(), cid) != out.end()) continue;
            out.push_back(cid);
            work.push_back(cid);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

void add_class(Ontology& o, const OwlClass& c) {
    if (o.properties.count(c.id) || o.individuals.count(c.id))
        throw Error(ErrorCode::ID_KIND_CONFLICT, "id '" + c.id + "' is already used by another construct kind");
    auto it = o.classes.find(c.id);
    if (it == o.classes.end()) {
        o.classes[c.id] = c;
        return;
    }
    // merge supers; first definition wins
    for (const auto& s : c.super_classes)
        if (std::find(it->second.super_classes.begin(), it->second.super_classes.end(), s) ==
            it->second.super_classes.end())
            it->second.super_classes.push_back(s);
    if (it->second.definition.kind == ClassExpression::None) it->second.definition = c.definition;
}

void add_property(Ontology& o, const OwlProperty& p) {
    if (o.classes.count(p.id) || o.individuals.count(p.id))
        throw Error(ErrorCode::ID_KIND_CONFLICT, "id '" + p.id + "' is already used by another construct kind");
    auto it = o.properties.find(p.id);
    if (it == o.properties.end()) {
        o.properties[p.id] = p;
        return;
    }
    if (it->second.is_object != p.is_object)
        throw Error(ErrorCode::ID_KIND_CONFLICT,
                    "property '" + p.id + "' re-registered with a different property kind");
    it->second.domains.insert(p.domains.begin(), p.domains.end());
    it->second.ranges.insert(p.ranges.begin(), p.ranges.end());
    it->second.super_properties.insert(p.super_properties.begin(), p.super_properties.end());
}

void add_individual(Ontology& o, const Individual& i) {
    if (o.classes.count(i.id) || o.properties.count(i.id))
        throw Error(ErrorCode::ID_KIND_CONFLICT, "id '" + i.id + "' is already used by another construct kind");
    auto it = o.individuals.find(i.id);
    if (it == o.individuals.end()) {
        o.individuals[i.id] = i;
        return;
    }
    for (const auto& v : i.values)
        if (std::find(it->second.values.begin(), it->second.values.end(), v) == it->second.values.end())
            it->second.values.push_back(v);
}

void validate(const Ontology& o) {
    // acyclic subclass graph
    for (const auto& [id, c] : o.classes) {
        (void)c;
        std::set<std::string> seen;
        std::vector<std::string> work{id};
        while (!work.empty()) {
            std::string cur = work.back();
            work.pop_back();
            auto it = o.classes.find(cur);
            if (it == o.classes.end()) continue;
            for (const auto& sup : it->second.super_classes) {
                if (sup == "owl:Thing") continue;
                if (sup == id)
                    throw Error(ErrorCode::INCONSISTENT_INPUT, "subclass cycle through '" + id + "'");
                if (seen.insert(sup).second) work.push_back(sup);
            }
        }
    }
    for (const auto& [id, p] : o.properties) {
        (void)p;
        std::set<std::string> seen;
        std::vector<std::string> work{id};
        while (!work.empty()) {
            std::string cur = work.back();
            work.pop_back();
            auto it = o.properties.find(cur);
            if (it == o.properties.end()) continue;
            for (const auto& sup : it->second.super_properties) {
                if (sup == id)
                    throw Error(ErrorCode::INCONSISTENT_INPUT, "subproperty cycle through '" + id + "'");
                if (seen.insert(sup).second) work.push_back(sup);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// serialization

std::string serialize_turtle(const Ontology& o) {
    std::ostringstream out;
    out << "@prefix xs: <" << kXsdPrefix << "> .\n";
    out << "@prefix rdf: <" << kRdfPrefix << "> .\n";
    out << "@prefix rdfs: <" << kRdfsPrefix << "> .\n";
    out << "@prefix owl: <" << kOwlPrefix << "> .\n";
    out << "@prefix ns: <" << o.base_iri << "#> .\n";

    auto ref = [](const std::string& id) -> std::string {
        if (id == "owl:Thing") return "owl:Thing";
        if (id.rfind("xs:", 0) == 0) return id;
        return "ns:" + id;
    };

    auto block = [&out](const std::string& subject, const std::vector<std::string>& lines) {
        out << "\n" << subject << "\n";
        for (size_t i = 0; i < lines.size(); i++)
            out << "  " << lines[i] << (i + 1 == lines.size() ? " ." : " ;") << "\n";
    };

    for (const auto& dt : o.datatypes)
        block(ref(dt), {"rdf:type rdfs:Datatype"});

    for (const auto& [id, c] : o.classes) {
        std::vector<std::string> lines{"rdf:type owl:Class"};
        if (c.super_classes.empty()) {
            lines.push_back("rdfs:subClassOf owl:Thing");
        } else {
            std::vector<std::string> sorted = c.super_classes;
            std::sort(sorted.begin(), sorted.end());
            for (const auto& s : sorted) lines.push_back("rdfs:subClassOf " + ref(s));
        }
        if (c.definition.kind != ClassExpression::None) {
            std::string expr = c.definition.kind == ClassExpression::Intersection ? "intersection(" : "union(";
            for (size_t i = 0; i < c.definition.members.size(); i++)
                expr += (i ? " " : "") + c.definition.members[i];
            expr += ")";
            lines.push_back("ns:classExpression \"" + escape_literal(expr) + "\"");
        }
        auto cm = o.comments.find(id);
        if (cm != o.comments.end()) lines.push_back("rdfs:comment \"" + escape_literal(cm->second) + "\"");
        block(ref(id), lines);
    }

    for (const auto& [id, p] : o.properties) {
        std::vector<std::string> lines{std::string("rdf:type owl:") +
                                       (p.is_object ? "ObjectProperty" : "DatatypeProperty")};
        for (const auto& s : p.super_properties) lines.push_back("rdfs:subPropertyOf " + ref(s));
        for (const auto& d : p.domains) lines.push_back("rdfs:domain " + ref(d));
        for (const auto& r : p.ranges) lines.push_back("rdfs:range " + ref(r));
        auto cm = o.comments.find(id);
        if (cm != o.comments.end()) lines.push_back("rdfs:comment \"" + escape_literal(cm->second) + "\"");
        block(ref(id), lines);
    }

    for (const auto& [id, ind] : o.individuals) {
        std::vector<std::string> lines{"rdf:type " + ref(ind.type)};
        for (const auto& [prop, val] : ind.values) {
            std::string v;
            switch (val.kind) {
            case PropertyValue::Ref: v = ref(val.text); break;
            case PropertyValue::Str: v = "\"" + escape_literal(val.text) + "\""; break;
            case PropertyValue::Int: v = std::to_string(val.number); break;
            }
            lines.push_back("ns:" + prop + " " + v);
        }
        auto cm = o.comments.find(id);
        if (cm != o.comments.end()) lines.push_back("rdfs:comment \"" + escape_literal(cm->second) + "\"");
        block(ref(id), lines);
    }

    std::vector<HasKeyAxiom> keys = o.keys;
    std::sort(keys.begin(), keys.end(), [](const HasKeyAxiom& a, const HasKeyAxiom& b) {
        return std::tie(a.class_id, a.properties) < std::tie(b.class_id, b.properties);
    });
    for (const auto& k : keys) {
        std::string lst;
        for (const auto& p : k.properties) lst += " " + ref(p);
        out << "\n" << ref(k.class_id) << " owl:hasKey (" << lst << " ) .\n";
    }

    std::vector<CardinalityAxiom> cards = o.cardinalities;
    std::sort(cards.begin(), cards.end(), [](const CardinalityAxiom& a, const CardinalityAxiom& b) {
        return std::tie(a.class_id, a.property_id, a.count) < std::tie(b.class_id, b.property_id, b.count);
    });
    for (const auto& c : cards)
        out << "\n" << ref(c.class_id) << " ns:hasExactCardinality ( " << ref(c.property_id) << " "
            << c.count << " ) .\n";

    return out.str();
}

// ---------------------------------------------------------------------------
// parsing

namespace {

struct Token {
    enum Kind { Pname, Iri, Literal, Integer, Punct, AtKeyword, End } kind = End;
    std::string text;
    long number = 0;
    int line = 1;
};

class TurtleLexer {
public:
    explicit TurtleLexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_ws();
        Token t;
        t.line = line_;
        if (pos_ >= text_.size()) return t;
        char c = text_[pos_];
        if (c == '<') {
            size_t end = text_.find('>', pos_);
            if (end == std::string::npos) fail("unterminated IRI");
            t.kind = Token::Iri;
            t.text = text_.substr(pos_ + 1, end - pos_ - 1);
            pos_ = end + 1;
            return t;
        }
        if (c == '"') {
            pos_++;
            std::string v;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                    pos_++;
                    char e = text_[pos_++];
                    if (e == 'n') v += '\n';
                    else if (e == 't') v += '\t';
                    else if (e == 'r') v += '\r';
                    else v += e;
                } else {
                    if (text_[pos_] == '\n') line_++;
                    v += text_[pos_++];
                }
            }
            if (pos_ >= text_.size()) fail("unterminated literal");
            pos_++;
            t.kind = Token::Literal;
            t.text = v;
            return t;
        }
        if (c == '@') {
            pos_++;
            t.kind = Token::AtKeyword;
            while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_])))
                t.text += text_[pos_++];
            return t;
        }
        if (c == '(' || c == ')' || c == ';' || c == ',' || c == '.') {
            // '.' may start a decimal number; here numbers always start with a digit
            pos_++;
            t.kind = Token::Punct;
            t.text = c;
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '-' && pos_ + 1 < text_.size())) {
            std::string num;
            if (c == '-') { num += c; pos_++; }
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                num += text_[pos_++];
            t.kind = Token::Integer;
            t.text = num;
            t.number = std::stol(num);
            return t;
        }
        // prefixed name
        std::string name;
        while (pos_ < text_.size()) {
            char ch = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == ':' || ch == '-' ||
                ch == '.') {
                // a trailing '.' ends the statement, not the name
                if (ch == '.' && (pos_ + 1 >= text_.size() ||
                                  std::isspace(static_cast<unsigned char>(text_[pos_ + 1])) ||
                                  text_[pos_ + 1] == '\n'))
                    break;
                name += ch;
                pos_++;
            } else {
                break;
            }
        }
        if (name.empty()) fail(std::string("unexpected character '") + c + "'");
        t.kind = Token::Pname;
        t.text = name;
        return t;
    }

private:
    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1;

    void skip_ws() {
        for (;;) {
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
                if (text_[pos_] == '\n') line_++;
                pos_++;
            }
            if (pos_ < text_.size() && text_[pos_] == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') pos_++;
            } else {
                return;
            }
        }
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw Error(ErrorCode::WELL_FORMEDNESS, msg + " at line " + std::to_string(line_));
    }
};

struct RawObject {
    enum Kind { Name, Literal, Integer, List } kind = Name;
    std::string text;
    long number = 0;
    std::vector<RawObject> items;
};

struct RawTriple {
    std::string subject; // prefixed name
    std::string predicate;
    RawObject object;
};

class TurtleReader {
public:
    Ontology run(const std::string& text) {
        TurtleLexer lex(text);
        std::vector<Token> toks;
        for (;;) {
            Token t = lex.next();
            toks.push_back(t);
            if (t.kind == Token::End) break;
        }
        toks_ = std::move(toks);
        read_statements();
        build();
        return std::move(onto_);
    }

private:
    std::vector<Token> toks_;
    size_t i_ = 0;
    std::map<std::string, std::string> prefixes_;
    std::vector<RawTriple> triples_;
    Ontology onto_;

    const Token& peek() const { return toks_[i_]; }
    Token take() { return toks_[i_++]; }

    [[noreturn]] void fail(const std::string& msg) {
        throw Error(ErrorCode::WELL_FORMEDNESS,
                    msg + " at line " + std::to_string(peek().line));
    }

    void expect_punct(const std::string& p) {
        if (peek().kind != Token::Punct || peek().text != p) fail("expected '" + p + "'");
        take();
    }

    void read_statements() {
        while (peek().kind != Token::End) {
            if (peek().kind == Token::AtKeyword) {
                Token kw = take();
                if (kw.text == "prefix") {
                    if (peek().kind != Token::Pname) fail("expected prefix name");
                    std::string pn = take().text;
                    if (!pn.empty() && pn.back() == ':') pn.pop_back();
                    if (peek().kind != Token::Iri) fail("expected IRI in prefix declaration");
                    prefixes_[pn] = take().text;
                    expect_punct(".");
                } else if (kw.text == "base") {
                    if (peek().kind != Token::Iri) fail("expected IRI in base declaration");
                    take();
                    expect_punct(".");
                } else {
                    fail("unknown directive '@" + kw.text + "'");
                }
                continue;
            }
            read_triple_block();
        }
    }

    void read_triple_block() {
        if (peek().kind != Token::Pname) fail("expected a subject name");
        std::string subject = take().text;
        for (;;) {
            if (peek().kind != Token::Pname) fail("expected a predicate name");
            std::string predicate = take().text;
            for (;;) {
                RawObject obj = read_object();
                triples_.push_back({subject, predicate, obj});
                if (peek().kind == Token::Punct && peek().text == ",") { take(); continue; }
                break;
            }
            if (peek().kind == Token::Punct && peek().text == ";") { take(); continue; }
            expect_punct(".");
            return;
        }
    }

    RawObject read_object() {
        RawObject o;
        const Token& t = peek();
        if (t.kind == Token::Pname) { o.kind = RawObject::Name; o.text = take().text; return o; }
        if (t.kind == Token::Literal) { o.kind = RawObject::Literal; o.text = take().text; return o; }
        if (t.kind == Token::Integer) { o.kind = RawObject::Integer; o.number = take().number; return o; }
        if (t.kind == Token::Punct && t.text == "(") {
            take();
            o.kind = RawObject::List;
            while (!(peek().kind == Token::Punct && peek().text == ")")) {
                if (peek().kind == Token::End) fail("unterminated list");
                o.items.push_back(read_object());
            }
            take();
            return o;
        }
        fail("expected an object");
    }

    // strips a known prefix ("ns" for local ids); validates the prefix exists
    std::string local(const std::string& pname) {
        auto pos = pname.find(':');
        if (pos == std::string::npos)
            throw Error(ErrorCode::UNSUPPORTED_TRIPLE, "unprefixed name '" + pname + "'");
        std::string prefix = pname.substr(0, pos);
        if (!prefixes_.count(prefix))
            throw Error(ErrorCode::UNSUPPORTED_TRIPLE, "undeclared prefix in '" + pname + "'");
        return pname.substr(pos + 1);
    }

    bool is_ns(const std::string& pname) const { return pname.rfind("ns:", 0) == 0; }

    // reference in object position: ns-local id, owl:Thing, or xs:* datatype
    std::string ref_id(const std::string& pname) {
        if (pname == "owl:Thing") return "owl:Thing";
        if (pname.rfind("xs:", 0) == 0) return pname;
        if (is_ns(pname)) return local(pname);
        throw Error(ErrorCode::UNSUPPORTED_TRIPLE, "reference '" + pname + "' is outside the subset");
    }

    void build() {
        auto nsit = prefixes_.find("ns");
        if (nsit != prefixes_.end()) {
            std::string iri = nsit->second;
            if (!iri.empty() && iri.back() == '#') iri.pop_back();
            onto_.base_iri = iri;
        }

        // pass 1: declarations
        for (const auto& t : triples_) {
            if (t.predicate != "rdf:type") continue;
            if (!is_ns(t.subject))
                throw Error(ErrorCode::UNSUPPORTED_TRIPLE, "subject '" + t.subject + "' is outside the subset");
            std::string id = local(t.subject);
            if (t.object.kind != RawObject::Name)
                throw Error(ErrorCode::UNSUPPORTED_TRIPLE, "rdf:type object must be a name");
            const std::string& o = t.object.text;
            if (o == "owl:Class") add_class(onto_, {id, {}, {}});
            else if (o == "owl:DatatypeProperty") add_property(onto_, {id, false, {}, {}, {}});
            else if (o == "owl:ObjectProperty") add_property(onto_, {id, true, {}, {}, {}});
            else if (o == "rdfs:Datatype") onto_.datatypes.insert(id);
            else if (is_ns(o)) add_individual(onto_, {id, local(o), {}});
            else throw Error(ErrorCode::UNSUPPORTED_TRIPLE, "rdf:type " + o + " is outside the subset");
        }

        // pass 2: everything else
        for (const auto& t : triples_) {
            if (t.predicate == "rdf:type") continue;
            std::string id = is_ns(t.subject) ? local(t.subject) : t.subject;

            if (t.predicate == "rdfs:subClassOf") {
                auto it = onto_.classes.find(id);
                if (it == onto_.classes.end())
                    throw Error(ErrorCode::UNSUPPORTED_TRIPLE, "rdfs:subClassOf on non-class '" + id + "'");
                std::string sup = ref_id(t.object.text);
                if (sup != "owl:Thing") it->second.super_classes.push_back(sup);
                continue;
            }
            if (t.predicate == "rdfs:subPropertyOf") {
                auto it = onto_.properties.find(id);
                if (it == onto_.properties.end())
                    throw Error(ErrorCode::UNSUPPORTED_TRIPLE, "rdfs:subPropertyOf on non-property '" + id + "'");
                it->second.super_properties.insert(ref_id(t.object.text));
                continue;
            }
            if (t.predicate == "rdfs:domain" || t.predicate == "rdfs:range") {
                auto it = onto_.properties.find(id);
                if (it == onto_.properties.end())
                    throw Error(ErrorCode::UNSUPPORTED_TRIPLE, t.predicate + " on non-property '" + id + "'");
                if (t.predicate == "rdfs:domain") it->second.domains.insert(ref_id(t.object.text));
                else it->second.ranges.insert(ref_id(t.object.text));
                continue;
            }
            if (t.predicate == "rdfs:comment") {
                if (t.object.kind != RawObject::Literal)
                    throw Error(ErrorCode::UNSUPPORTED_TRIPLE, "rdfs:comment must carry a literal");
                onto_.comments[id] = t.object.text;
                continue;
            }
            if (t.predicate == "owl:hasKey") {
                if (t.object.kind != RawObject::List)
                    throw Error(ErrorCode::UNSUPPORTED_TRIPLE, "owl:hasKey must carry a list");
                HasKeyAxiom k;
                k.class_id = id;
                for (const auto& item : t.object.items) k.properties.push_back(ref_id(item.text));
                onto_.keys.push_back(k);
                continue;
            }
            if (t.predicate == "ns:classExpression") {
                auto it = onto_.classes.find(id);
                if (it == onto_.classes.end())
                    throw Error(ErrorCode::UNSUPPORTED_TRIPLE, "class expression on non-class '" + id + "'");
                it->second.definition = parse_expression(t.object.text);
                continue;
            }
            if (t.predicate == "ns:hasExactCardinality") {
                if (t.object.kind != RawObject::List || t.object.items.size() != 2)
                    throw Error(ErrorCode::UNSUPPORTED_TRIPLE, "malformed cardinality axiom");
                CardinalityAxiom c;
                c.class_id = id;
                c.property_id = ref_id(t.object.items[0].text);
                c.count = t.object.items[1].number;
                onto_.cardinalities.push_back(c);
                continue;
            }
            if (t.predicate.rfind("ns:", 0) == 0) {
                auto it = onto_.individuals.find(id);
                if (it == onto_.individuals.end())
                    throw Error(ErrorCode::UNSUPPORTED_TRIPLE,
                                "predicate " + t.predicate + " on non-individual '" + id + "'");
                PropertyValue v;
                switch (t.object.kind) {
                case RawObject::Name: v.kind = PropertyValue::Ref; v.text = ref_id(t.object.text); break;
                case RawObject::Literal: v.kind = PropertyValue::Str; v.text = t.object.text; break;
                case RawObject::Integer: v.kind = PropertyValue::Int; v.number = t.object.number; break;
                case RawObject::List:
                    throw Error(ErrorCode::UNSUPPORTED_TRIPLE, "list value on individual '" + id + "'");
                }
                it->second.values.emplace_back(local(t.predicate), v);
                continue;
            }
            throw Error(ErrorCode::UNSUPPORTED_TRIPLE, "predicate '" + t.predicate + "' is outside the subset");
        }

        // canonical ordering for set-like collections
        std::sort(onto_.keys.begin(), onto_.keys.end(), [](const HasKeyAxiom& a, const HasKeyAxiom& b) {
            return std::tie(a.class_id, a.properties) < std::tie(b.class_id, b.properties);
        });
        std::sort(onto_.cardinalities.begin(), onto_.cardinalities.end(),
                  [](const CardinalityAxiom& a, const CardinalityAxiom& b) {
                      return std::tie(a.class_id, a.property_id, a.count) <
                             std::tie(b.class_id, b.property_id, b.count);
                  });
        for (auto& [id, c] : onto_.classes) {
            (void)id;
            std::sort(c.super_classes.begin(), c.super_classes.end());
            c.super_classes.erase(std::unique(c.super_classes.begin(), c.super_classes.end()),
                                  c.super_classes.end());
        }
    }

    static ClassExpression parse_expression(const std::string& text) {
        ClassExpression e;
        size_t open = text.find('(');
        if (open == std::string::npos || text.empty() || text.back() != ')')
            throw Error(ErrorCode::UNSUPPORTED_TRIPLE, "malformed class expression '" + text + "'");
        std::string head = text.substr(0, open);
        if (head == "intersection") e.kind = ClassExpression::Intersection;
        else if (head == "union") e.kind = ClassExpression::Union;
        else throw Error(ErrorCode::UNSUPPORTED_TRIPLE, "unknown class expression '" + head + "'");
        std::istringstream in(text.substr(open + 1, text.size() - open - 2));
        std::string member;
        while (in >> member) e.members.push_back(member);
        return e;
    }
};

} // namespace

Ontology parse_turtle(const std::string& text) {
    return TurtleReader().run(text);
}

} // namespace xmlsem::owl
