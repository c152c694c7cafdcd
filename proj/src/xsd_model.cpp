#include "xmlsem/xsd_model.hpp"

#include "xmlsem/error.hpp"
#include "xmlsem/xml.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

namespace xmlsem::xsd {

namespace {

constexpr const char* kXsdNamespace = "http://www.w3.org/2001/XMLSchema";

const std::set<std::string>& builtin_simple_types() {
    static const std::set<std::string> names = {
        "xs:string",   "xs:integer",       "xs:int",     "xs:long",  "xs:short",
        "xs:decimal",  "xs:float",         "xs:double",  "xs:boolean",
        "xs:date",     "xs:dateTime",      "xs:time",    "xs:anyURI",
        "xs:ID",       "xs:IDREF",         "xs:NMTOKEN", "xs:token",
        "xs:normalizedString", "xs:nonNegativeInteger", "xs:positiveInteger",
        "xs:gYear",    "xs:duration",      "xs:byte",    "xs:unsignedInt",
        "xs:error",
    };
    return names;
}

} // namespace

bool is_builtin_simple_type(const std::string& name) {
    return builtin_simple_types().count(name) > 0;
}

const ComplexType* XsdSchema::find_type(const std::string& identity) const {
    for (const auto& t : types)
        if (t.identity() == identity) return &t;
    return nullptr;
}

const ModelGroup* XsdSchema::find_group(const std::string& name) const {
    for (const auto& g : groups)
        if (g.name == name) return &g;
    return nullptr;
}

const ElementDecl* XsdSchema::find_top_element(const std::string& name) const {
    for (const auto& e : top_elements)
        if (e.name == name) return &e;
    return nullptr;
}

std::vector<std::string> XsdSchema::substitutable(const std::string& head) const {
    std::vector<std::string> out;
    std::vector<std::string> work{head};
    while (!work.empty()) {
        std::string cur = work.back();
        work.pop_back();
        auto it = substitution_members.find(cur);
        if (it == substitution_members.end()) continue;
        for (const auto& m : it->second) {
            if (m == head || std::find(out.begin(), out.end(), m) != out.end()) continue;
            out.push_back(m);
            work.push_back(m);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// parsing

namespace {

class SchemaReader {
public:
    XsdSchema run(const std::string& text) {
        doc_ = xml::parse(text);
        push_prefixes(*doc_.root);
        if (local_name(*doc_.root) != "schema" || !in_xsd_ns(*doc_.root))
            throw Error(ErrorCode::UNSUPPORTED_CONSTRUCT, "document root is not an XML Schema");
        if (const auto* tns = doc_.root->attr("targetNamespace")) schema_.target_namespace = *tns;
        // Elements are read after every other top-level construct so the
        // model's ordering does not depend on source ordering (serialization
        // emits the same canonical arrangement).
        for (const auto& child : doc_.root->children)
            if (!in_xsd_ns(*child) || local_name(*child) != "element") read_top_level(*child);
        for (const auto& child : doc_.root->children)
            if (in_xsd_ns(*child) && local_name(*child) == "element") read_top_level(*child);
        resolve();
        std::sort(schema_.recorded_constructs.begin(), schema_.recorded_constructs.end(),
                  [](const RecordedConstruct& a, const RecordedConstruct& b) {
                      return std::tie(a.location, a.kind, a.xml) < std::tie(b.location, b.kind, b.xml);
                  });
        return std::move(schema_);
    }

private:
    xml::Doc doc_;
    XsdSchema schema_;
    std::vector<std::map<std::string, std::string>> prefix_stack_; // prefix -> namespace

    void push_prefixes(const xml::Node& n) {
        std::map<std::string, std::string> scope =
            prefix_stack_.empty() ? std::map<std::string, std::string>{} : prefix_stack_.back();
        for (const auto& a : n.attrs) {
            if (a.name == "xmlns")
                scope[""] = a.value;
            else if (a.name.rfind("xmlns:", 0) == 0)
                scope[a.name.substr(6)] = a.value;
        }
        prefix_stack_.push_back(std::move(scope));
    }
    void pop_prefixes() { prefix_stack_.pop_back(); }

    std::string ns_for_prefix(const std::string& prefix) const {
        for (auto it = prefix_stack_.rbegin(); it != prefix_stack_.rend(); ++it) {
            auto f = it->find(prefix);
            if (f != it->end()) return f->second;
        }
        return "";
    }

    static std::string local_name(const xml::Node& n) {
        auto pos = n.name.find(':');
        return pos == std::string::npos ? n.name : n.name.substr(pos + 1);
    }

    bool in_xsd_ns(const xml::Node& n) const {
        auto pos = n.name.find(':');
        std::string prefix = pos == std::string::npos ? "" : n.name.substr(0, pos);
        return ns_for_prefix(prefix) == kXsdNamespace;
    }

    // Normalizes a QName in a type/ref position: schema-namespace names get
    // the canonical "xs:" prefix, target-namespace names lose theirs.
    std::string normalize_qname(const std::string& qname) {
        auto pos = qname.find(':');
        std::string prefix = pos == std::string::npos ? "" : qname.substr(0, pos);
        std::string local = pos == std::string::npos ? qname : qname.substr(pos + 1);
        std::string ns = ns_for_prefix(prefix);
        if (ns == kXsdNamespace) return "xs:" + local;
        if (ns.empty() || ns == schema_.target_namespace) return local;
        throw Error(ErrorCode::UNRESOLVED_REF, "name '" + qname + "' is in foreign namespace " + ns);
    }

    [[noreturn]] void unsupported(const xml::Node& n, const std::string& where) {
        throw Error(ErrorCode::UNSUPPORTED_CONSTRUCT, "xs:" + local_name(n) + " in " + where);
    }

    static std::string annotation_text(const xml::Node& n) {
        std::string out;
        for (const auto& c : n.children) {
            std::string s = c->string_value();
            // trim
            size_t b = s.find_first_not_of(" \t\r\n");
            size_t e = s.find_last_not_of(" \t\r\n");
            if (b == std::string::npos) continue;
            if (!out.empty()) out += " ";
            out += s.substr(b, e - b + 1);
        }
        return out;
    }

    static long parse_max_occurs(const std::string& v) {
        if (v == "unbounded") return kUnbounded;
        try {
            return std::stol(v);
        } catch (...) {
            throw Error(ErrorCode::WELL_FORMEDNESS, "bad maxOccurs value '" + v + "'");
        }
    }

    void record(const std::string& kind, const xml::Node& n, const std::string& location) {
        schema_.recorded_constructs.push_back({kind, xml::serialize(n, 0), location});
    }

    void read_top_level(const xml::Node& n) {
        if (!in_xsd_ns(n)) unsupported(n, "schema");
        push_prefixes(n);
        std::string name = local_name(n);
        if (name == "complexType") {
            schema_.types.push_back(read_complex_type(n, ""));
        } else if (name == "element") {
            schema_.top_elements.push_back(read_element(n, {DeclContext::TopLevel, ""}, true));
        } else if (name == "attribute") {
            schema_.top_attributes.push_back(read_attribute(n, {DeclContext::TopLevel, ""}));
        } else if (name == "group") {
            schema_.groups.push_back(read_group(n));
        } else if (name == "simpleType") {
            const auto* nm = n.attr("name");
            if (!nm) throw Error(ErrorCode::WELL_FORMEDNESS, "top-level simpleType without name");
            schema_.simple_types.push_back(*nm);
        } else if (name == "annotation") {
            // schema-level annotation: ignored
        } else if (name == "override" || name == "redefine") {
            record(name, n, "schema");
        } else {
            unsupported(n, "schema");
        }
        pop_prefixes();
    }

    ComplexType read_complex_type(const xml::Node& n, const std::string& host_element) {
        ComplexType ct;
        if (const auto* nm = n.attr("name")) ct.name = *nm;
        ct.host_element = ct.name.empty() ? host_element : "";
        for (const auto& cp : n.children) {
            const xml::Node& c = *cp;
            if (!in_xsd_ns(c)) unsupported(c, "complexType");
            push_prefixes(c);
            std::string cn = local_name(c);
            if (cn == "annotation") {
                ct.annotation = annotation_text(c);
            } else if (cn == "sequence" || cn == "choice" || cn == "all" || cn == "group") {
                ct.content = read_particle(c, ct.identity());
                ct.has_content = true;
            } else if (cn == "attribute") {
                ct.attributes.push_back(read_attribute(c, {DeclContext::InType, ct.identity()}));
            } else if (cn == "anyAttribute") {
                ct.any_attribute = true;
            } else if (cn == "complexContent") {
                read_complex_content(c, ct);
            } else if (cn == "assert") {
                record("assert", c, "type:" + ct.identity());
            } else {
                unsupported(c, "complexType");
            }
            pop_prefixes();
        }
        return ct;
    }

    void read_complex_content(const xml::Node& n, ComplexType& ct) {
        for (const auto& cp : n.children) {
            const xml::Node& c = *cp;
            push_prefixes(c);
            std::string cn = local_name(c);
            if (cn == "annotation") {
                ct.annotation = annotation_text(c);
                pop_prefixes();
                continue;
            }
            if (cn != "extension" && cn != "restriction") unsupported(c, "complexContent");
            const auto* base = c.attr("base");
            if (!base) throw Error(ErrorCode::WELL_FORMEDNESS, "derivation without base");
            ct.base = normalize_qname(*base);
            ct.derivation = cn == "extension" ? ComplexType::Extension : ComplexType::Restriction;
            for (const auto& gp : c.children) {
                const xml::Node& g = *gp;
                push_prefixes(g);
                std::string gn = local_name(g);
                if (gn == "annotation") {
                    if (ct.annotation.empty()) ct.annotation = annotation_text(g);
                } else if (gn == "sequence" || gn == "choice" || gn == "all" || gn == "group") {
                    ct.content = read_particle(g, ct.identity());
                    ct.has_content = true;
                } else if (gn == "attribute") {
                    ct.attributes.push_back(read_attribute(g, {DeclContext::InType, ct.identity()}));
                } else if (gn == "anyAttribute") {
                    ct.any_attribute = true;
                } else if (gn == "assert") {
                    record("assert", g, "type:" + ct.identity());
                } else {
                    unsupported(g, cn);
                }
                pop_prefixes();
            }
            pop_prefixes();
        }
    }

    Particle read_particle(const xml::Node& n, const std::string& owner) {
        Particle p;
        std::string name = local_name(n);
        if (name == "sequence") p.kind = Particle::Sequence;
        else if (name == "choice") p.kind = Particle::Choice;
        else if (name == "all") p.kind = Particle::All;
        else if (name == "group") {
            p.kind = Particle::GroupRef;
            const auto* ref = n.attr("ref");
            if (!ref) throw Error(ErrorCode::WELL_FORMEDNESS, "group particle without ref");
            p.group_ref = normalize_qname(*ref);
            return p;
        } else if (name == "any") {
            p.kind = Particle::Any;
            return p;
        } else {
            unsupported(n, "content model");
        }
        for (const auto& cp : n.children) {
            const xml::Node& c = *cp;
            if (!in_xsd_ns(c)) unsupported(c, name);
            push_prefixes(c);
            std::string cn = local_name(c);
            if (cn == "element") {
                Particle ep;
                ep.kind = Particle::Elem;
                DeclContext ctx = owner[0] == '#' ? DeclContext{DeclContext::InGroup, owner.substr(1)}
                                                  : DeclContext{DeclContext::InType, owner};
                ep.element = read_element(c, ctx, false);
                p.children.push_back(std::move(ep));
            } else if (cn == "sequence" || cn == "choice" || cn == "all" || cn == "group" || cn == "any") {
                p.children.push_back(read_particle(c, owner));
            } else if (cn == "annotation") {
                // compositor annotations are not retained
            } else {
                unsupported(c, name);
            }
            pop_prefixes();
        }
        return p;
    }

    ElementDecl read_element(const xml::Node& n, DeclContext ctx, bool top_level) {
        ElementDecl e;
        e.declared_in = ctx;
        if (const auto* v = n.attr("name")) e.name = *v;
        if (const auto* v = n.attr("ref")) {
            if (top_level) throw Error(ErrorCode::WELL_FORMEDNESS, "top-level element with ref");
            e.ref = normalize_qname(*v);
        }
        if (e.name.empty() && e.ref.empty())
            throw Error(ErrorCode::WELL_FORMEDNESS, "element without name or ref");
        if (const auto* v = n.attr("type")) e.type_name = normalize_qname(*v);
        if (const auto* v = n.attr("minOccurs")) {
            try {
                e.min_occurs = std::stoi(*v);
            } catch (...) {
                throw Error(ErrorCode::WELL_FORMEDNESS, "bad minOccurs value '" + *v + "'");
            }
        }
        if (const auto* v = n.attr("maxOccurs")) e.max_occurs = parse_max_occurs(*v);
        if (const auto* v = n.attr("default")) { e.default_value = *v; e.has_default = true; }
        if (const auto* v = n.attr("fixed")) { e.fixed_value = *v; e.has_fixed = true; }
        if (const auto* v = n.attr("substitutionGroup")) {
            if (!top_level)
                throw Error(ErrorCode::WELL_FORMEDNESS, "substitutionGroup on a local element");
            e.substitution_group = normalize_qname(*v);
        }
        for (const auto& cp : n.children) {
            const xml::Node& c = *cp;
            push_prefixes(c);
            std::string cn = local_name(c);
            if (cn == "annotation") {
                e.annotation = annotation_text(c);
            } else if (cn == "complexType") {
                if (!e.type_name.empty())
                    throw Error(ErrorCode::WELL_FORMEDNESS, "element has both type and inline type");
                schema_.types.push_back(read_complex_type(c, e.name));
                e.anon_type = static_cast<int>(schema_.types.size()) - 1;
            } else if (cn == "unique" || cn == "key" || cn == "keyref") {
                read_identity_constraint(c, cn, e.name);
            } else if (cn == "alternative") {
                record("alternative", c, "element:" + e.name);
            } else if (cn == "simpleType") {
                unsupported(c, "element (inline simple types are not modeled)");
            } else {
                unsupported(c, "element");
            }
            pop_prefixes();
        }
        if (!e.substitution_group.empty())
            schema_.substitution_members[e.substitution_group].push_back(e.name);
        return e;
    }

    AttributeDecl read_attribute(const xml::Node& n, DeclContext ctx) {
        AttributeDecl a;
        a.declared_in = ctx;
        const auto* nm = n.attr("name");
        if (!nm) throw Error(ErrorCode::WELL_FORMEDNESS, "attribute without name");
        a.name = *nm;
        if (const auto* v = n.attr("type")) a.type_name = normalize_qname(*v);
        if (const auto* v = n.attr("use")) a.required = (*v == "required");
        if (const auto* v = n.attr("default")) { a.default_value = *v; a.has_default = true; }
        if (const auto* v = n.attr("fixed")) { a.fixed_value = *v; a.has_fixed = true; }
        for (const auto& cp : n.children) {
            push_prefixes(*cp);
            std::string cn = local_name(*cp);
            if (cn == "annotation") a.annotation = annotation_text(*cp);
            else unsupported(*cp, "attribute");
            pop_prefixes();
        }
        if (a.type_name.empty()) a.type_name = "xs:string";
        return a;
    }

    ModelGroup read_group(const xml::Node& n) {
        ModelGroup g;
        const auto* nm = n.attr("name");
        if (!nm) throw Error(ErrorCode::WELL_FORMEDNESS, "top-level group without name");
        g.name = *nm;
        for (const auto& cp : n.children) {
            const xml::Node& c = *cp;
            push_prefixes(c);
            std::string cn = local_name(c);
            if (cn == "annotation") g.annotation = annotation_text(c);
            else if (cn == "sequence" || cn == "choice" || cn == "all")
                g.content = read_particle(c, "#" + g.name);
            else
                unsupported(c, "group");
            pop_prefixes();
        }
        return g;
    }

    void read_identity_constraint(const xml::Node& n, const std::string& kind, const std::string& host) {
        IdentityConstraint ic;
        ic.kind = kind == "unique" ? IdentityConstraint::Unique
                : kind == "key"    ? IdentityConstraint::Key
                                   : IdentityConstraint::Keyref;
        const auto* nm = n.attr("name");
        if (!nm) throw Error(ErrorCode::WELL_FORMEDNESS, kind + " without name");
        ic.name = *nm;
        if (const auto* v = n.attr("refer")) ic.refer = normalize_qname(*v);
        ic.host_element = host;
        for (const auto& cp : n.children) {
            push_prefixes(*cp);
            std::string cn = local_name(*cp);
            if (cn == "selector") {
                if (const auto* v = cp->attr("xpath")) ic.selector = *v;
            } else if (cn == "field") {
                if (const auto* v = cp->attr("xpath")) ic.fields.push_back(*v);
            } else if (cn != "annotation") {
                unsupported(*cp, kind);
            }
            pop_prefixes();
        }
        schema_.identity_constraints.push_back(std::move(ic));
    }

    // -----------------------------------------------------------------------
    // reference resolution and validation

    void resolve() {
        check_unique_names();
        for (const auto& t : schema_.types) {
            if (!t.base.empty()) {
                const ComplexType* base = schema_.find_type(t.base);
                if (!base)
                    throw Error(ErrorCode::UNRESOLVED_REF,
                                "type '" + t.identity() + "' derives from unknown base '" + t.base + "'");
            }
            for (const auto& a : t.attributes) check_simple_type(a.type_name, "attribute '" + a.name + "'");
            if (t.has_content) check_particle(t.content);
        }
        for (const auto& g : schema_.groups) check_particle(g.content);
        for (const auto& e : schema_.top_elements) check_element(e);
        for (const auto& a : schema_.top_attributes) check_simple_type(a.type_name, "attribute '" + a.name + "'");
        for (const auto& [head, members] : schema_.substitution_members) {
            if (!schema_.find_top_element(head))
                throw Error(ErrorCode::UNRESOLVED_REF,
                            "substitutionGroup head '" + head + "' is not a top-level element");
            (void)members;
        }
        for (const auto& ic : schema_.identity_constraints) {
            if (ic.kind == IdentityConstraint::Keyref) {
                bool found = false;
                for (const auto& other : schema_.identity_constraints)
                    if (other.kind == IdentityConstraint::Key && other.name == ic.refer) found = true;
                if (!found)
                    throw Error(ErrorCode::UNRESOLVED_REF,
                                "keyref '" + ic.name + "' refers to unknown key '" + ic.refer + "'");
            }
        }
        check_derivation_cycles();
        check_group_cycles();
    }

    void check_unique_names() {
        std::set<std::string> type_names;
        for (const auto& t : schema_.types) {
            if (!type_names.insert(t.identity()).second)
                throw Error(ErrorCode::UNSUPPORTED_CONSTRUCT,
                            t.name.empty() ? "two anonymous types hosted by elements named '" + t.host_element + "'"
                                           : "duplicate type name '" + t.name + "'");
        }
        for (const auto& s : schema_.simple_types)
            if (!type_names.insert(s).second)
                throw Error(ErrorCode::UNSUPPORTED_CONSTRUCT, "duplicate type name '" + s + "'");
        std::set<std::string> names;
        for (const auto& e : schema_.top_elements)
            if (!names.insert(e.name).second)
                throw Error(ErrorCode::UNSUPPORTED_CONSTRUCT, "duplicate top-level element '" + e.name + "'");
        names.clear();
        for (const auto& g : schema_.groups)
            if (!names.insert(g.name).second)
                throw Error(ErrorCode::UNSUPPORTED_CONSTRUCT, "duplicate group '" + g.name + "'");
        names.clear();
        for (const auto& a : schema_.top_attributes)
            if (!names.insert(a.name).second)
                throw Error(ErrorCode::UNSUPPORTED_CONSTRUCT, "duplicate top-level attribute '" + a.name + "'");
    }

    void check_simple_type(const std::string& name, const std::string& where) {
        if (name.empty() || is_builtin_simple_type(name)) return;
        if (std::find(schema_.simple_types.begin(), schema_.simple_types.end(), name) !=
            schema_.simple_types.end())
            return;
        if (name.rfind("xs:", 0) == 0)
            throw Error(ErrorCode::UNRESOLVED_REF, "unknown schema type '" + name + "' in " + where);
        throw Error(ErrorCode::UNRESOLVED_REF, "unknown simple type '" + name + "' in " + where);
    }

    void check_element(const ElementDecl& e) {
        if (!e.ref.empty()) {
            if (!schema_.find_top_element(e.ref))
                throw Error(ErrorCode::UNRESOLVED_REF, "element ref '" + e.ref + "' does not resolve");
            return;
        }
        if (e.max_occurs != kUnbounded && e.max_occurs < e.min_occurs)
            throw Error(ErrorCode::WELL_FORMEDNESS,
                        "element '" + e.name + "' has maxOccurs < minOccurs");
        if (e.anon_type >= 0) return;
        if (e.type_name.empty())
            throw Error(ErrorCode::UNRESOLVED_REF, "element '" + e.name + "' has no type");
        if (is_builtin_simple_type(e.type_name)) return;
        if (std::find(schema_.simple_types.begin(), schema_.simple_types.end(), e.type_name) !=
            schema_.simple_types.end())
            return;
        if (!schema_.find_type(e.type_name))
            throw Error(ErrorCode::UNRESOLVED_REF,
                        "element '" + e.name + "' has unknown type '" + e.type_name + "'");
    }

    void check_particle(const Particle& p) {
        switch (p.kind) {
        case Particle::Elem:
            check_element(p.element);
            break;
        case Particle::GroupRef:
            if (!schema_.find_group(p.group_ref))
                throw Error(ErrorCode::UNRESOLVED_REF, "group ref '" + p.group_ref + "' does not resolve");
            break;
        case Particle::Any:
            break;
        default:
            for (const auto& c : p.children) check_particle(c);
        }
    }

    void check_derivation_cycles() {
        for (const auto& t : schema_.types) {
            std::set<std::string> seen;
            const ComplexType* cur = &t;
            while (cur && !cur->base.empty()) {
                if (!seen.insert(cur->identity()).second)
                    throw Error(ErrorCode::UNRESOLVED_REF,
                                "cyclic derivation involving type '" + t.identity() + "'");
                cur = schema_.find_type(cur->base);
            }
        }
    }

    void walk_group_refs(const Particle& p, std::set<std::string>& visiting) {
        if (p.kind == Particle::GroupRef) {
            if (!visiting.insert(p.group_ref).second)
                throw Error(ErrorCode::UNRESOLVED_REF,
                            "circular group reference through '" + p.group_ref + "'");
            walk_group_refs(schema_.find_group(p.group_ref)->content, visiting);
            visiting.erase(p.group_ref);
            return;
        }
        for (const auto& c : p.children) walk_group_refs(c, visiting);
    }

    void check_group_cycles() {
        for (const auto& g : schema_.groups) {
            std::set<std::string> visiting{g.name};
            walk_group_refs(g.content, visiting);
        }
    }
};

} // namespace

XsdSchema parse_schema(const std::string& text) {
    return SchemaReader().run(text);
}

// ---------------------------------------------------------------------------
// serialization

namespace {

class SchemaWriter {
public:
    explicit SchemaWriter(const XsdSchema& s) : s_(s) {}

    std::string run() {
        out_ << "<xs:schema xmlns:xs=\"" << kXsdNamespace << "\"";
        if (!s_.target_namespace.empty())
            out_ << " targetNamespace=\"" << xml::escape_attr(s_.target_namespace) << "\" xmlns=\""
                 << xml::escape_attr(s_.target_namespace) << "\"";
        out_ << ">\n";
        for (const auto& t : s_.types)
            if (!t.name.empty()) write_complex_type(t, 1);
        for (const auto& e : s_.top_elements) write_element(e, 1);
        for (const auto& a : s_.top_attributes) write_attribute(a, 1);
        for (const auto& g : s_.groups) write_group(g, 1);
        for (const auto& st : s_.simple_types)
            line(1, "<xs:simpleType name=\"" + st + "\"><xs:restriction base=\"xs:string\"/></xs:simpleType>");
        for (const auto& rc : s_.recorded_constructs)
            if (rc.location == "schema") write_verbatim(rc.xml, 1);
        out_ << "</xs:schema>\n";
        return out_.str();
    }

private:
    const XsdSchema& s_;
    std::ostringstream out_;

    void line(int indent, const std::string& text) {
        out_ << std::string(static_cast<size_t>(indent) * 2, ' ') << text << "\n";
    }

    void write_verbatim(const std::string& fragment, int indent) {
        // the fragment is already a serialized element; re-indent line-wise
        std::istringstream in(fragment);
        std::string l;
        while (std::getline(in, l)) line(indent, l);
    }

    void write_annotation(const std::string& text, int indent) {
        if (text.empty()) return;
        line(indent, "<xs:annotation><xs:documentation>" + std::string(xml::escape_text(text)) +
                         "</xs:documentation></xs:annotation>");
    }

    static std::string occurs_attrs(const ElementDecl& e) {
        std::string out;
        if (e.min_occurs != 1) out += " minOccurs=\"" + std::to_string(e.min_occurs) + "\"";
        if (e.max_occurs == kUnbounded) out += " maxOccurs=\"unbounded\"";
        else if (e.max_occurs != 1) out += " maxOccurs=\"" + std::to_string(e.max_occurs) + "\"";
        return out;
    }

    void write_element(const ElementDecl& e, int indent) {
        std::string attrs;
        if (!e.ref.empty()) {
            attrs = " ref=\"" + e.ref + "\"";
        } else {
            attrs = " name=\"" + e.name + "\"";
            if (!e.type_name.empty()) attrs += " type=\"" + e.type_name + "\"";
        }
        attrs += occurs_attrs(e);
        if (e.has_default) attrs += " default=\"" + xml::escape_attr(e.default_value) + "\"";
        if (e.has_fixed) attrs += " fixed=\"" + xml::escape_attr(e.fixed_value) + "\"";
        if (!e.substitution_group.empty()) attrs += " substitutionGroup=\"" + e.substitution_group + "\"";

        const ComplexType* anon = e.anon_type >= 0 ? &s_.types[static_cast<size_t>(e.anon_type)] : nullptr;
        // constraints and recorded constructs are keyed by element name
        std::vector<const IdentityConstraint*> ics;
        std::vector<const RecordedConstruct*> rcs;
        for (const auto& ic : s_.identity_constraints)
            if (ic.host_element == e.name) ics.push_back(&ic);
        for (const auto& rc : s_.recorded_constructs)
            if (rc.location == "element:" + e.name) rcs.push_back(&rc);
        bool has_body = anon || !ics.empty() || !rcs.empty() || !e.annotation.empty();
        if (!has_body) {
            line(indent, "<xs:element" + attrs + "/>");
            return;
        }
        line(indent, "<xs:element" + attrs + ">");
        write_annotation(e.annotation, indent + 1);
        if (anon) write_complex_type(*anon, indent + 1);
        for (const auto* rc : rcs) write_verbatim(rc->xml, indent + 1);
        for (const auto* ic : ics) write_identity_constraint(*ic, indent + 1);
        line(indent, "</xs:element>");
    }

    void write_attribute(const AttributeDecl& a, int indent) {
        std::string attrs = " name=\"" + a.name + "\" type=\"" + a.type_name + "\"";
        if (a.required) attrs += " use=\"required\"";
        if (a.has_default) attrs += " default=\"" + xml::escape_attr(a.default_value) + "\"";
        if (a.has_fixed) attrs += " fixed=\"" + xml::escape_attr(a.fixed_value) + "\"";
        if (a.annotation.empty()) {
            line(indent, "<xs:attribute" + attrs + "/>");
        } else {
            line(indent, "<xs:attribute" + attrs + ">");
            write_annotation(a.annotation, indent + 1);
            line(indent, "</xs:attribute>");
        }
    }

    void write_complex_type(const ComplexType& t, int indent) {
        std::string attrs = t.name.empty() ? "" : " name=\"" + t.name + "\"";
        line(indent, "<xs:complexType" + attrs + ">");
        write_annotation(t.annotation, indent + 1);
        int body = indent + 1;
        bool derived = t.derivation != ComplexType::None;
        if (derived) {
            line(body, "<xs:complexContent>");
            line(body + 1, std::string("<xs:") + (t.derivation == ComplexType::Extension ? "extension" : "restriction") +
                               " base=\"" + t.base + "\">");
            body += 2;
        }
        if (t.has_content) write_particle(t.content, body);
        for (const auto& a : t.attributes) write_attribute(a, body);
        if (t.any_attribute) line(body, "<xs:anyAttribute/>");
        for (const auto& rc : s_.recorded_constructs)
            if (rc.location == "type:" + t.identity()) write_verbatim(rc.xml, body);
        if (derived) {
            line(indent + 2, t.derivation == ComplexType::Extension ? "</xs:extension>" : "</xs:restriction>");
            line(indent + 1, "</xs:complexContent>");
        }
        line(indent, "</xs:complexType>");
    }

    void write_particle(const Particle& p, int indent) {
        switch (p.kind) {
        case Particle::Elem:
            write_element(p.element, indent);
            return;
        case Particle::GroupRef:
            line(indent, "<xs:group ref=\"" + p.group_ref + "\"/>");
            return;
        case Particle::Any:
            line(indent, "<xs:any/>");
            return;
        case Particle::Sequence:
        case Particle::Choice:
        case Particle::All: {
            std::string tag = p.kind == Particle::Sequence ? "sequence"
                            : p.kind == Particle::Choice   ? "choice"
                                                           : "all";
            line(indent, "<xs:" + tag + ">");
            for (const auto& c : p.children) write_particle(c, indent + 1);
            line(indent, "</xs:" + tag + ">");
            return;
        }
        }
    }

    void write_group(const ModelGroup& g, int indent) {
        line(indent, "<xs:group name=\"" + g.name + "\">");
        write_annotation(g.annotation, indent + 1);
        write_particle(g.content, indent + 1);
        line(indent, "</xs:group>");
    }

    void write_identity_constraint(const IdentityConstraint& ic, int indent) {
        std::string tag = ic.kind == IdentityConstraint::Unique ? "unique"
                        : ic.kind == IdentityConstraint::Key    ? "key"
                                                                : "keyref";
        std::string attrs = " name=\"" + ic.name + "\"";
        if (ic.kind == IdentityConstraint::Keyref) attrs += " refer=\"" + ic.refer + "\"";
        line(indent, "<xs:" + tag + attrs + ">");
        line(indent + 1, "<xs:selector xpath=\"" + xml::escape_attr(ic.selector) + "\"/>");
        for (const auto& f : ic.fields) line(indent + 1, "<xs:field xpath=\"" + xml::escape_attr(f) + "\"/>");
        line(indent, "</xs:" + tag + ">");
    }
};

} // namespace

std::string serialize_schema(const XsdSchema& schema) {
    return SchemaWriter(schema).run();
}

// ---------------------------------------------------------------------------
// path enumeration

namespace {

class PathEnumerator {
public:
    PathEnumerator(const XsdSchema& s, int max_depth) : s_(s) { catalog_.max_depth = max_depth; }

    PathCatalog run() {
        for (const auto& e : s_.top_elements) {
            std::string type_id = element_type_identity(e);
            if (type_id.empty()) continue; // simple-typed top-level elements do not root documents
            catalog_.roots.push_back(e.name);
            descend("/" + e.name, type_id, {});
        }
        for (auto& [id, paths] : catalog_.class_paths) {
            std::sort(paths.begin(), paths.end());
            paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
            (void)id;
        }
        return std::move(catalog_);
    }

private:
    const XsdSchema& s_;
    PathCatalog catalog_;
    std::map<std::string, std::vector<ChildSlot>> slot_cache_;

    // Complex type identity for an element declaration, empty for simple.
    std::string element_type_identity(const ElementDecl& e) const {
        const ElementDecl* d = &e;
        if (!e.ref.empty()) d = s_.find_top_element(e.ref);
        if (d->anon_type >= 0) return s_.types[static_cast<size_t>(d->anon_type)].identity();
        if (d->type_name.empty()) return "";
        const ComplexType* t = s_.find_type(d->type_name);
        return t ? t->identity() : "";
    }

    std::string element_simple_type(const ElementDecl& e) const {
        const ElementDecl* d = &e;
        if (!e.ref.empty()) d = s_.find_top_element(e.ref);
        if (d->anon_type >= 0) return "";
        if (s_.find_type(d->type_name)) return "";
        return d->type_name;
    }

    void collect_slots(const Particle& p, const std::string& host, bool in_choice,
                       std::vector<ChildSlot>& out) {
        switch (p.kind) {
        case Particle::Elem: {
            const ElementDecl& e = p.element;
            const ElementDecl* target = e.ref.empty() ? &e : s_.find_top_element(e.ref);
            ChildSlot slot;
            slot.kind = ChildSlot::Element;
            slot.step = target->name;
            slot.type_identity = element_type_identity(e);
            slot.simple_type = element_simple_type(e);
            slot.min_occurs = e.min_occurs;
            slot.max_occurs = e.max_occurs;
            slot.host_type = host;
            slot.in_choice = in_choice;
            slot.decl = target;
            out.push_back(slot);
            if (!e.ref.empty()) {
                // substitution alternatives attach wherever the head is referenced
                for (const auto& member : s_.substitutable(e.ref)) {
                    const ElementDecl* m = s_.find_top_element(member);
                    ChildSlot ms;
                    ms.kind = ChildSlot::Element;
                    ms.step = m->name;
                    ms.type_identity = element_type_identity(*m);
                    ms.simple_type = element_simple_type(*m);
                    ms.min_occurs = e.min_occurs;
                    ms.max_occurs = e.max_occurs;
                    ms.host_type = host;
                    ms.subst_head = e.ref;
                    ms.in_choice = in_choice;
                    ms.decl = m;
                    out.push_back(ms);
                }
            }
            return;
        }
        case Particle::GroupRef:
            collect_slots(s_.find_group(p.group_ref)->content, host, in_choice, out);
            return;
        case Particle::Any:
            throw Error(ErrorCode::UNSUPPORTED_CONSTRUCT,
                        "xs:any wildcard reached during path enumeration (type '" + host + "')");
        case Particle::All:
            throw Error(ErrorCode::UNSUPPORTED_CONSTRUCT,
                        "xs:all reached during path enumeration (type '" + host + "')");
        case Particle::Sequence:
        case Particle::Choice:
            for (const auto& c : p.children)
                collect_slots(c, host, in_choice || p.kind == Particle::Choice, out);
            return;
        }
    }

    // Effective ordered content of a type: base-chain slots first, then own.
    const std::vector<ChildSlot>& effective_slots(const std::string& type_id) {
        auto it = slot_cache_.find(type_id);
        if (it != slot_cache_.end()) return it->second;
        const ComplexType* t = s_.find_type(type_id);
        std::vector<ChildSlot> slots;
        if (!t->base.empty() && s_.find_type(t->base)) {
            const auto& base = effective_slots(t->base);
            slots.insert(slots.end(), base.begin(), base.end());
        }
        if (t->any_attribute)
            throw Error(ErrorCode::UNSUPPORTED_CONSTRUCT,
                        "attribute wildcard reached during path enumeration (type '" + type_id + "')");
        if (t->has_content) collect_slots(t->content, type_id, false, slots);
        for (const auto& a : t->attributes) {
            ChildSlot slot;
            slot.kind = ChildSlot::Attribute;
            slot.step = a.name;
            slot.simple_type = a.type_name;
            slot.min_occurs = a.required ? 1 : 0;
            slot.max_occurs = 1;
            slot.host_type = type_id;
            slot.attr = &a;
            slots.push_back(slot);
        }
        return slot_cache_.emplace(type_id, std::move(slots)).first->second;
    }

    void descend(const std::string& path, const std::string& type_id,
                 std::vector<std::string> stack) {
        catalog_.class_paths[type_id].push_back(path);
        if (static_cast<int>(stack.size()) + 1 > catalog_.max_depth) {
            for (size_t i = 0; i < stack.size(); i++) {
                if (stack[i] == type_id) {
                    std::string cycle;
                    for (size_t j = i; j < stack.size(); j++) cycle += stack[j] + " -> ";
                    cycle += type_id;
                    throw Error(ErrorCode::RECURSION_LIMIT,
                                "type cycle " + cycle + " exceeds depth " +
                                    std::to_string(catalog_.max_depth));
                }
            }
            throw Error(ErrorCode::RECURSION_LIMIT,
                        "path " + path + " exceeds depth " + std::to_string(catalog_.max_depth));
        }
        stack.push_back(type_id);
        for (const auto& slot : effective_slots(type_id)) {
            if (slot.kind != ChildSlot::Element) continue;
            if (!slot.type_identity.empty() && slot.subst_head.empty())
                descend(path + "/" + slot.step, slot.type_identity, stack);
        }
    }

public:
    const std::map<std::string, std::vector<ChildSlot>>& slots() const { return slot_cache_; }
    PathCatalog take_with_slots() {
        PathCatalog c = run();
        c.attachments = std::move(slot_cache_);
        return c;
    }
};

} // namespace

PathCatalog enumerate_paths(const XsdSchema& schema, int max_depth) {
    PathEnumerator walker(schema, max_depth);
    return walker.take_with_slots();
}

} // namespace xmlsem::xsd
