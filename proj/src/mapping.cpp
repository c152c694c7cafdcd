#include "xmlsem/mapping.hpp"

#include "xmlsem/error.hpp"
#include "xmlsem/xml.hpp"
#include "xmlsem/xs2owl.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace xmlsem::map {

namespace {

constexpr const char* kMappingNamespace = "urn:xmlsem-bridge:mappings:v1";
constexpr const char* kGeneratorNote =
    "auto-generated; nested element paths carry every ancestor step";

void insert_path(std::vector<std::string>& paths, const std::string& p) {
    if (std::find(paths.begin(), paths.end(), p) == paths.end()) paths.push_back(p);
}

} // namespace

MappingSet generate_mappings(const xsd::XsdSchema& schema, const owl::Ontology& os,
                             const xsd::PathCatalog& catalog) {
    MappingSet ms;
    ms.ontology_iri = os.base_iri;
    ms.schema_namespace = schema.target_namespace;
    ms.notes.push_back(kGeneratorNote);

    // extension descendants per type identity (paths of a declaration's host
    // extend to every type that inherits its content)
    auto ext_descendants = [&schema](const std::string& identity) {
        std::vector<std::string> out, work{identity};
        while (!work.empty()) {
            std::string cur = work.back();
            work.pop_back();
            for (const auto& t : schema.types) {
                if (t.base != cur || t.derivation != xsd::ComplexType::Extension) continue;
                if (std::find(out.begin(), out.end(), t.identity()) != out.end()) continue;
                out.push_back(t.identity());
                work.push_back(t.identity());
            }
        }
        return out;
    };

    // class mappings straight from the catalog
    for (const auto& [identity, paths] : catalog.class_paths) {
        std::string cls = xs2owl::class_id_from_identity(identity);
        if (!os.classes.count(cls))
            throw Error(ErrorCode::INCONSISTENT_INPUT,
                        "catalog type '" + cls + "' is missing from the ontology");
        if (paths.empty()) continue;
        Mapping m;
        m.construct = cls;
        m.kind = ConstructKind::Class;
        m.xpaths.paths = paths;
        ms.by_construct[cls] = std::move(m);
    }

    auto class_paths_of = [&catalog](const std::string& identity) -> std::vector<std::string> {
        auto it = catalog.class_paths.find(identity);
        return it == catalog.class_paths.end() ? std::vector<std::string>{} : it->second;
    };

    std::map<std::string, std::vector<std::string>> prop_paths; // property id -> paths

    // properties attached below classes
    for (const auto& [identity, slots] : catalog.attachments) {
        std::vector<std::string> hosts = class_paths_of(identity);
        for (const auto& d : ext_descendants(identity))
            for (const auto& p : class_paths_of(d)) insert_path(hosts, p);
        if (hosts.empty()) continue;
        for (const auto& slot : slots) {
            if (slot.host_type != identity) continue; // inherited copies handled by their declarer
            std::string pid;
            if (slot.kind == xsd::ChildSlot::Attribute)
                pid = xs2owl::property_id(slot.attr->name, "", slot.attr->type_name);
            else {
                const auto* d = slot.decl;
                std::string group =
                    d->declared_in.kind == xsd::DeclContext::InGroup ? d->declared_in.owner : "";
                std::string range = slot.type_identity.empty()
                                        ? slot.simple_type
                                        : xs2owl::class_id_from_identity(slot.type_identity);
                pid = xs2owl::property_id(d->name, group, range);
            }
            std::string step = slot.kind == xsd::ChildSlot::Attribute ? "/@" + slot.step
                                                                      : "/" + slot.step;
            for (const auto& h : hosts) insert_path(prop_paths[pid], h + step);
        }
    }

    // top-level complex elements can root a document
    for (const auto& root : catalog.roots) {
        const auto* e = schema.find_top_element(root);
        std::string group; // top-level declarations carry no group infix
        std::string range;
        if (e->anon_type >= 0)
            range = xs2owl::class_id_for(schema.types[static_cast<size_t>(e->anon_type)]);
        else {
            const auto* t = schema.find_type(e->type_name);
            range = t ? xs2owl::class_id_for(*t) : e->type_name;
        }
        std::string pid = xs2owl::property_id(e->name, group, range);
        insert_path(prop_paths[pid], "/" + root);
    }

    for (auto& [pid, paths] : prop_paths) {
        if (paths.empty()) continue;
        auto it = os.properties.find(pid);
        if (it == os.properties.end())
            throw Error(ErrorCode::INCONSISTENT_INPUT,
                        "derived property '" + pid + "' is missing from the ontology");
        Mapping m;
        m.construct = pid;
        m.kind = it->second.is_object ? ConstructKind::ObjectProperty
                                      : ConstructKind::DatatypeProperty;
        std::sort(paths.begin(), paths.end());
        m.xpaths.paths = paths;
        ms.by_construct[pid] = std::move(m);
    }

    return ms;
}

// ---------------------------------------------------------------------------
// wire format

std::string serialize_mappings(const MappingSet& ms) {
    std::ostringstream out;
    out << "<mappings xmlns=\"" << kMappingNamespace << "\" ontology=\""
        << xml::escape_attr(ms.ontology_iri) << "\" schemaNamespace=\""
        << xml::escape_attr(ms.schema_namespace) << "\">\n";
    for (const auto& note : ms.notes) out << "  <!-- " << note << " -->\n";
    for (const auto& [construct, m] : ms.by_construct) {
        const char* kind = m.kind == ConstructKind::Class              ? "class"
                           : m.kind == ConstructKind::DatatypeProperty ? "dtp"
                                                                        : "op";
        out << "  <mapping construct=\"" << xml::escape_attr(construct) << "\" kind=\"" << kind
            << "\">\n";
        for (const auto& p : m.xpaths.paths)
            out << "    <xpath>" << xml::escape_text(p) << "</xpath>\n";
        out << "  </mapping>\n";
    }
    out << "</mappings>\n";
    return out.str();
}

namespace {

void validate_path(const std::string& p) {
    if (p.empty() || p[0] != '/')
        throw Error(ErrorCode::WELL_FORMEDNESS, "path '" + p + "' is not absolute");
    int depth = 0;
    bool in_string = false;
    char quote = 0;
    for (char c : p) {
        if (in_string) {
            if (c == quote) in_string = false;
            continue;
        }
        if (c == '"' || c == '\'') { in_string = true; quote = c; continue; }
        if (c == '[') depth++;
        if (c == ']') {
            depth--;
            if (depth < 0) throw Error(ErrorCode::WELL_FORMEDNESS, "unbalanced ']' in path '" + p + "'");
        }
    }
    if (depth != 0 || in_string)
        throw Error(ErrorCode::WELL_FORMEDNESS, "unbalanced predicate in path '" + p + "'");
}

} // namespace

MappingSet parse_mappings(const std::string& text, const owl::Ontology* ontology,
                          Strictness strictness, std::vector<std::string>* warnings) {
    MappingSet ms;

    // header comments are part of the canonical format; recover them from the
    // raw text since the reader drops comments
    {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            size_t b = line.find("<!--");
            if (b == std::string::npos) {
                if (line.find("<mapping ") != std::string::npos) break;
                continue;
            }
            size_t e = line.find("-->", b);
            if (e == std::string::npos) break;
            std::string note = line.substr(b + 4, e - b - 4);
            size_t nb = note.find_first_not_of(' ');
            size_t ne = note.find_last_not_of(' ');
            if (nb != std::string::npos) ms.notes.push_back(note.substr(nb, ne - nb + 1));
        }
    }

    xml::Doc doc = xml::parse(text);
    if (doc.root->name != "mappings")
        throw Error(ErrorCode::WELL_FORMEDNESS, "root element is not <mappings>");
    const auto* ns = doc.root->attr("xmlns");
    if (!ns || *ns != kMappingNamespace)
        throw Error(ErrorCode::WELL_FORMEDNESS, "unexpected mapping namespace");
    if (const auto* v = doc.root->attr("ontology")) ms.ontology_iri = *v;
    if (const auto* v = doc.root->attr("schemaNamespace")) ms.schema_namespace = *v;

    for (const auto& child : doc.root->children) {
        if (child->name != "mapping")
            throw Error(ErrorCode::WELL_FORMEDNESS, "unexpected element <" + child->name + ">");
        Mapping m;
        const auto* construct = child->attr("construct");
        const auto* kind = child->attr("kind");
        if (!construct || !kind)
            throw Error(ErrorCode::WELL_FORMEDNESS, "mapping without construct or kind");
        m.construct = *construct;
        if (*kind == "class") m.kind = ConstructKind::Class;
        else if (*kind == "dtp") m.kind = ConstructKind::DatatypeProperty;
        else if (*kind == "op") m.kind = ConstructKind::ObjectProperty;
        else throw Error(ErrorCode::WELL_FORMEDNESS, "unknown mapping kind '" + *kind + "'");
        for (const auto& x : child->children) {
            if (x->name != "xpath")
                throw Error(ErrorCode::WELL_FORMEDNESS, "unexpected element <" + x->name + ">");
            validate_path(x->text);
            m.xpaths.paths.push_back(x->text);
        }
        if (m.xpaths.paths.empty())
            throw Error(ErrorCode::WELL_FORMEDNESS,
                        "mapping for '" + m.construct + "' has no paths");
        std::sort(m.xpaths.paths.begin(), m.xpaths.paths.end());
        m.xpaths.paths.erase(std::unique(m.xpaths.paths.begin(), m.xpaths.paths.end()),
                             m.xpaths.paths.end());
        if (ms.by_construct.count(m.construct))
            throw Error(ErrorCode::INCONSISTENT_INPUT,
                        "construct '" + m.construct + "' is mapped twice");

        if (ontology) {
            bool known = m.kind == ConstructKind::Class
                             ? ontology->classes.count(m.construct) > 0
                             : ontology->properties.count(m.construct) > 0;
            if (known && m.kind != ConstructKind::Class) {
                bool is_obj = ontology->properties.at(m.construct).is_object;
                if (is_obj != (m.kind == ConstructKind::ObjectProperty)) known = false;
            }
            if (!known) {
                std::string msg = "construct '" + m.construct + "' is not in the ontology";
                if (strictness == Strictness::Strict)
                    throw Error(ErrorCode::UNKNOWN_CONSTRUCT, msg);
                if (warnings) warnings->push_back("UNKNOWN_CONSTRUCT: " + msg);
            }
        }
        ms.by_construct[m.construct] = std::move(m);
    }
    return ms;
}

XPathSet resolve_property_paths(const MappingSet& ms, const owl::Ontology& os,
                                const std::string& property_id) {
    std::set<std::string> merged;
    const Mapping* own = ms.find(property_id);
    if (own) merged.insert(own->xpaths.paths.begin(), own->xpaths.paths.end());
    for (const auto& sub : os.sub_property_closure(property_id)) {
        const Mapping* m = ms.find(sub);
        if (m) merged.insert(m->xpaths.paths.begin(), m->xpaths.paths.end());
    }
    if (merged.empty())
        throw Error(ErrorCode::UNMAPPED_CONSTRUCT,
                    "property '" + property_id + "' has no mapped paths (own or subproperty)");
    XPathSet out;
    out.paths.assign(merged.begin(), merged.end());
    return out;
}

// ---------------------------------------------------------------------------
// path steps

std::vector<PathStep> parse_xpath(const std::string& path) {
    validate_path(path);
    std::vector<PathStep> steps;
    size_t i = 1; // skip leading '/'
    while (i <= path.size()) {
        PathStep st;
        if (i < path.size() && path[i] == '@') { st.is_attr = true; i++; }
        while (i < path.size() && path[i] != '/' && path[i] != '[') st.name += path[i++];
        if (st.name.empty())
            throw Error(ErrorCode::WELL_FORMEDNESS, "empty step in path '" + path + "'");
        while (i < path.size() && path[i] == '[') {
            // capture bracketed text verbatim (handles nesting and strings)
            int depth = 0;
            bool in_string = false;
            char quote = 0;
            size_t start = ++i;
            for (; i < path.size(); i++) {
                char c = path[i];
                if (in_string) {
                    if (c == quote) in_string = false;
                    continue;
                }
                if (c == '"' || c == '\'') { in_string = true; quote = c; continue; }
                if (c == '[') depth++;
                else if (c == ']') {
                    if (depth == 0) break;
                    depth--;
                }
            }
            if (!st.predicate.empty()) st.predicate += " and ";
            st.predicate += path.substr(start, i - start);
            i++; // closing bracket
        }
        steps.push_back(std::move(st));
        if (i >= path.size()) break;
        if (path[i] != '/')
            throw Error(ErrorCode::WELL_FORMEDNESS, "malformed path '" + path + "'");
        i++;
    }
    if (steps.empty()) throw Error(ErrorCode::WELL_FORMEDNESS, "empty path");
    return steps;
}

std::string join_xpath(const std::vector<PathStep>& steps) {
    std::string out;
    for (const auto& st : steps) {
        out += "/";
        if (st.is_attr) out += "@";
        out += st.name;
        if (!st.predicate.empty()) out += "[" + st.predicate + "]";
    }
    return out;
}

} // namespace xmlsem::map
