#include "xmlsem/xs2owl.hpp"

#include "xmlsem/error.hpp"

#include <algorithm>

namespace xmlsem::xs2owl {

using owl::Individual;
using owl::Ontology;
using owl::OwlClass;
using owl::OwlProperty;
using owl::PropertyValue;
using xsd::ComplexType;
using xsd::ElementDecl;
using xsd::Particle;
using xsd::XsdSchema;

std::string sanitize_type_name(const std::string& type_name) {
    std::string out = type_name;
    std::replace(out.begin(), out.end(), ':', '_');
    return out;
}

std::string class_id_from_identity(const std::string& identity) {
    if (identity.rfind("@anon:", 0) == 0) return "NS_" + identity.substr(6) + "_UNType";
    return identity;
}

std::string class_id_for(const ComplexType& type) {
    return class_id_from_identity(type.identity());
}

std::string property_id(const std::string& name, const std::string& group,
                        const std::string& range_id) {
    std::string id = name;
    if (!group.empty()) id += "_" + group;
    id += "__" + sanitize_type_name(range_id);
    return id;
}

namespace {

const std::vector<std::string>& compat_vocabulary() {
    static const std::vector<std::string> names = {
        "ComplexTypeInfoType",      "ElementInfoType",  "DatatypePropertyInfoType",
        "ObjectPropertyInfoType",   "KeyrefInfoType",   "Xsd11ConstructInfoType",
    };
    return names;
}

class Transformer {
public:
    Transformer(const XsdSchema& schema, const TransformConfig& config)
        : s_(schema), config_(config) {}

    TransformResult run() {
        os_.base_iri = config_.base_iri;
        obc_.base_iri = config_.base_iri;
        for (const auto& name : compat_vocabulary()) owl::add_class(obc_, {name, {}, {}});

        for (const auto& st : s_.simple_types) os_.datatypes.insert(st);

        for (const auto& t : s_.types) make_class(t);
        for (const auto& t : s_.types) walk_type_content(t);
        make_top_level_properties();
        apply_substitution_groups();
        finalize_domains();
        make_identity_constraints();
        make_recorded_constructs();

        owl::validate(os_);
        return {std::move(os_), std::move(obc_)};
    }

private:
    const XsdSchema& s_;
    const TransformConfig& config_;
    Ontology os_, obc_;
    // property id -> referencing class ids, filled while walking content
    std::map<std::string, std::set<std::string>> domains_;
    // property ids created for top-level element declarations
    std::map<std::string, std::string> top_element_props_; // element name -> property id

    // ---- classes -----------------------------------------------------------

    void make_class(const ComplexType& t) {
        OwlClass c;
        c.id = class_id_for(t);
        if (!t.base.empty()) {
            const ComplexType* base = s_.find_type(t.base);
            if (base) c.super_classes.push_back(class_id_for(*base));
        }
        if (t.has_content) c.definition = content_expression(t);
        owl::add_class(os_, c);
        if (!t.annotation.empty()) os_.comments[c.id] = t.annotation;

        Individual info;
        info.id = c.id;
        info.type = "ComplexTypeInfoType";
        info.values.emplace_back("schemaConstruct", PropertyValue{PropertyValue::Ref, c.id, 0});
        if (!t.name.empty())
            info.values.emplace_back("xmlName", PropertyValue{PropertyValue::Str, t.name, 0});
        else
            info.values.emplace_back("hostElement", PropertyValue{PropertyValue::Str, t.host_element, 0});
        info.values.emplace_back("contentModel",
                                 PropertyValue{PropertyValue::Str, content_model_name(t), 0});
        if (t.derivation != ComplexType::None) {
            info.values.emplace_back("derivedFrom",
                                     PropertyValue{PropertyValue::Ref,
                                                   class_id_from_identity(t.base), 0});
            info.values.emplace_back(
                "derivationMethod",
                PropertyValue{PropertyValue::Str,
                              t.derivation == ComplexType::Extension ? "extension" : "restriction", 0});
        }
        owl::add_individual(obc_, info);
    }

    static std::string content_model_name(const ComplexType& t) {
        if (!t.has_content) return "empty";
        const Particle* p = &t.content;
        switch (p->kind) {
        case Particle::Sequence: return "sequence";
        case Particle::Choice: return "choice";
        case Particle::All: return "all";
        case Particle::GroupRef: return "group";
        default: return "other";
        }
    }

    // The outer compositor decides intersection vs union; members are the
    // property ids of all (recursively flattened) element declarations.
    owl::ClassExpression content_expression(const ComplexType& t) {
        owl::ClassExpression e;
        const Particle* outer = &t.content;
        while (outer->kind == Particle::GroupRef) {
            const auto* g = s_.find_group(outer->group_ref);
            if (!g) return e;
            outer = &g->content;
        }
        e.kind = outer->kind == Particle::Choice ? owl::ClassExpression::Union
                                                 : owl::ClassExpression::Intersection;
        collect_member_ids(t.content, e.members);
        return e;
    }

    void collect_member_ids(const Particle& p, std::vector<std::string>& out) {
        switch (p.kind) {
        case Particle::Elem:
            out.push_back(property_id_for_decl(decl_target(p.element)));
            return;
        case Particle::GroupRef: {
            const auto* g = s_.find_group(p.group_ref);
            if (g) collect_member_ids(g->content, out);
            return;
        }
        case Particle::Any:
            return;
        default:
            for (const auto& c : p.children) collect_member_ids(c, out);
        }
    }

    // ---- properties --------------------------------------------------------

    const ElementDecl* decl_target(const ElementDecl& e) const {
        return e.ref.empty() ? &e : s_.find_top_element(e.ref);
    }

    // Range id of an element declaration: a class id for complex ranges, the
    // (prefixed) simple type name otherwise.
    std::string range_id_for_decl(const ElementDecl& d) const {
        if (d.anon_type >= 0) return class_id_for(s_.types[static_cast<size_t>(d.anon_type)]);
        const ComplexType* t = s_.find_type(d.type_name);
        if (t) return class_id_for(*t);
        return d.type_name;
    }

    bool decl_is_object(const ElementDecl& d) const {
        return d.anon_type >= 0 || s_.find_type(d.type_name) != nullptr;
    }

    std::string property_id_for_decl(const ElementDecl* d) const {
        std::string group =
            d->declared_in.kind == xsd::DeclContext::InGroup ? d->declared_in.owner : "";
        return property_id(d->name, group, range_id_for_decl(*d));
    }

    // Creates the property, and (for the declaration site itself) its info
    // individual.  Reference occurrences pass create_info=false so the info
    // individual always describes where the element is declared.
    std::string ensure_element_property(const ElementDecl* d, int order, bool create_info = true) {
        std::string id = property_id_for_decl(d);
        OwlProperty p;
        p.id = id;
        p.is_object = decl_is_object(*d);
        p.ranges.insert(decl_is_object(*d) ? range_id_for_decl(*d)
                                           : d->type_name);
        owl::add_property(os_, p);
        if (!d->annotation.empty()) os_.comments[id] = d->annotation;
        if (!create_info) return id;

        // info individual: context prefix for declarations made directly
        // inside a complex type, bare ids for group and top-level homes
        std::string info_id = id + "__ei";
        if (d->declared_in.kind == xsd::DeclContext::InType)
            info_id = class_id_from_identity(d->declared_in.owner) + "_" + info_id;
        if (!obc_.individuals.count(info_id)) {
            Individual info;
            info.id = info_id;
            info.type = "ElementInfoType";
            info.values.emplace_back("schemaConstruct", PropertyValue{PropertyValue::Ref, id, 0});
            info.values.emplace_back("xmlName", PropertyValue{PropertyValue::Str, d->name, 0});
            info.values.emplace_back("order", PropertyValue{PropertyValue::Int, "", order});
            info.values.emplace_back("minOccurs", PropertyValue{PropertyValue::Int, "", d->min_occurs});
            if (d->max_occurs == xsd::kUnbounded)
                info.values.emplace_back("maxOccurs", PropertyValue{PropertyValue::Str, "unbounded", 0});
            else
                info.values.emplace_back("maxOccurs", PropertyValue{PropertyValue::Int, "", d->max_occurs});
            if (d->has_default)
                info.values.emplace_back("default", PropertyValue{PropertyValue::Str, d->default_value, 0});
            if (d->has_fixed)
                info.values.emplace_back("fixed", PropertyValue{PropertyValue::Str, d->fixed_value, 0});
            owl::add_individual(obc_, info);
        }
        return id;
    }

    std::string ensure_attribute_property(const xsd::AttributeDecl& a, const std::string& owner_class) {
        std::string id = property_id(a.name, "", a.type_name);
        OwlProperty p;
        p.id = id;
        p.is_object = false;
        p.ranges.insert(a.type_name);
        owl::add_property(os_, p);
        if (!a.annotation.empty()) os_.comments[id] = a.annotation;

        std::string info_id = owner_class.empty() ? id : owner_class + "_" + id;
        if (!obc_.individuals.count(info_id)) {
            Individual info;
            info.id = info_id;
            info.type = "DatatypePropertyInfoType";
            info.values.emplace_back("schemaConstruct", PropertyValue{PropertyValue::Ref, id, 0});
            info.values.emplace_back("xmlName", PropertyValue{PropertyValue::Str, a.name, 0});
            info.values.emplace_back("attribute", PropertyValue{PropertyValue::Str, "true", 0});
            if (a.required)
                info.values.emplace_back("use", PropertyValue{PropertyValue::Str, "required", 0});
            if (a.has_default)
                info.values.emplace_back("default", PropertyValue{PropertyValue::Str, a.default_value, 0});
            if (a.has_fixed)
                info.values.emplace_back("fixed", PropertyValue{PropertyValue::Str, a.fixed_value, 0});
            owl::add_individual(obc_, info);
        }
        return id;
    }

    // Walks a type's own content (groups flattened); registers properties and
    // collects the walking class as a domain.
    void walk_type_content(const ComplexType& t) {
        std::string cls = class_id_for(t);
        int order = 0;
        if (t.has_content) walk_particle(t.content, cls, order);
        for (const auto& a : t.attributes) {
            std::string id = ensure_attribute_property(a, cls);
            domains_[id].insert(cls);
        }
    }

    void walk_particle(const Particle& p, const std::string& cls, int& order) {
        switch (p.kind) {
        case Particle::Elem: {
            const ElementDecl* target = decl_target(p.element);
            bool is_ref = !p.element.ref.empty();
            std::string id = ensure_element_property(target, ++order, !is_ref);
            domains_[id].insert(cls);
            if (is_ref) {
                for (const auto& member : s_.substitutable(p.element.ref)) {
                    const ElementDecl* m = s_.find_top_element(member);
                    std::string mid = ensure_element_property(m, 0, false);
                    domains_[mid].insert(cls);
                }
            }
            return;
        }
        case Particle::GroupRef: {
            const auto* g = s_.find_group(p.group_ref);
            if (g) {
                int group_order = 0;
                walk_particle(g->content, cls, group_order);
            }
            return;
        }
        case Particle::Any:
            return;
        default:
            for (const auto& c : p.children) walk_particle(c, cls, order);
        }
    }

    void make_top_level_properties() {
        for (size_t i = 0; i < s_.top_elements.size(); i++) {
            const ElementDecl& e = s_.top_elements[i];
            std::string id = ensure_element_property(&e, static_cast<int>(i) + 1);
            top_element_props_[e.name] = id;
        }
        for (const auto& a : s_.top_attributes) {
            std::string id = ensure_attribute_property(a, "");
            domains_[id]; // top-level attributes default to the top class
        }
    }

    void apply_substitution_groups() {
        for (const auto& [head, members] : s_.substitution_members) {
            const ElementDecl* h = s_.find_top_element(head);
            std::string head_id = property_id_for_decl(h);
            for (const auto& mname : members) {
                const ElementDecl* m = s_.find_top_element(mname);
                std::string mid = property_id_for_decl(m);
                os_.properties[mid].super_properties.insert(head_id);
            }
        }
        // members appear wherever their (transitive) head is referenced
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& [head, members] : s_.substitution_members) {
                const std::string head_id = property_id_for_decl(s_.find_top_element(head));
                for (const auto& mname : members) {
                    std::string mid = property_id_for_decl(s_.find_top_element(mname));
                    for (const auto& d : domains_[head_id])
                        changed |= domains_[mid].insert(d).second;
                }
            }
        }
    }

    void finalize_domains() {
        for (auto& [id, p] : os_.properties) {
            auto it = domains_.find(id);
            if (it != domains_.end() && !it->second.empty())
                p.domains.insert(it->second.begin(), it->second.end());
            else
                p.domains.insert("owl:Thing");
        }
    }

    // ---- identity constraints ---------------------------------------------

    // Resolves a child-step selector from an element's type; returns the
    // terminal class id or empty when unsupported.
    std::string resolve_selector(const std::string& host_element, const std::string& selector) const {
        const ElementDecl* host = s_.find_top_element(host_element);
        if (!host) return "";
        std::string type_id = host->anon_type >= 0
                                  ? s_.types[static_cast<size_t>(host->anon_type)].identity()
                                  : host->type_name;
        std::string sel = selector;
        if (sel.rfind("./", 0) == 0) sel = sel.substr(2);
        if (sel.empty() || sel.find("//") != std::string::npos || sel[0] == '/' || sel[0] == '@')
            return "";
        size_t start = 0;
        while (start <= sel.size()) {
            size_t slash = sel.find('/', start);
            std::string step = sel.substr(start, slash == std::string::npos ? std::string::npos
                                                                            : slash - start);
            const ElementDecl* d = find_child_decl(type_id, step);
            if (!d) return "";
            const ElementDecl* target = decl_target(*d);
            if (target->anon_type >= 0)
                type_id = s_.types[static_cast<size_t>(target->anon_type)].identity();
            else if (s_.find_type(target->type_name))
                type_id = target->type_name;
            else
                return "";
            if (slash == std::string::npos) break;
            start = slash + 1;
        }
        const ComplexType* t = s_.find_type(type_id);
        return t ? class_id_for(*t) : "";
    }

    const ElementDecl* find_child_decl(const std::string& type_id, const std::string& name) const {
        const ComplexType* t = s_.find_type(type_id);
        while (t) {
            const ElementDecl* found = nullptr;
            if (t->has_content) found = find_in_particle(t->content, name);
            if (found) return found;
            t = t->base.empty() ? nullptr : s_.find_type(t->base);
        }
        return nullptr;
    }

    const ElementDecl* find_in_particle(const Particle& p, const std::string& name) const {
        switch (p.kind) {
        case Particle::Elem: {
            const ElementDecl* target = decl_target(p.element);
            return target->name == name ? target : nullptr;
        }
        case Particle::GroupRef: {
            const auto* g = s_.find_group(p.group_ref);
            return g ? find_in_particle(g->content, name) : nullptr;
        }
        case Particle::Any:
            return nullptr;
        default:
            for (const auto& c : p.children)
                if (const auto* found = find_in_particle(c, name)) return found;
            return nullptr;
        }
    }

    // Field steps resolve to a property of the selector's terminal class.
    std::string resolve_field(const std::string& class_id, const std::string& field) const {
        std::string f = field;
        if (f.rfind("./", 0) == 0) f = f.substr(2);
        const ComplexType* t = nullptr;
        for (const auto& ct : s_.types)
            if (class_id_for(ct) == class_id) t = &ct;
        if (!t) return "";
        if (!f.empty() && f[0] == '@') {
            std::string name = f.substr(1);
            const ComplexType* cur = t;
            while (cur) {
                for (const auto& a : cur->attributes)
                    if (a.name == name) return property_id(a.name, "", a.type_name);
                cur = cur->base.empty() ? nullptr : s_.find_type(cur->base);
            }
            return "";
        }
        if (f.find('/') != std::string::npos) return "";
        const ElementDecl* d = find_child_decl(t->identity(), f);
        return d ? property_id_for_decl(d) : "";
    }

    void make_identity_constraints() {
        for (const auto& ic : s_.identity_constraints) {
            if (ic.kind == xsd::IdentityConstraint::Keyref) {
                Individual info;
                info.id = ic.name;
                info.type = "KeyrefInfoType";
                info.values.emplace_back("name", PropertyValue{PropertyValue::Str, ic.name, 0});
                info.values.emplace_back("refer", PropertyValue{PropertyValue::Str, ic.refer, 0});
                info.values.emplace_back("selector", PropertyValue{PropertyValue::Str, ic.selector, 0});
                for (const auto& f : ic.fields)
                    info.values.emplace_back("field", PropertyValue{PropertyValue::Str, f, 0});
                info.values.emplace_back("hostElement",
                                         PropertyValue{PropertyValue::Str, ic.host_element, 0});
                owl::add_individual(obc_, info);
                continue;
            }
            std::string cls = resolve_selector(ic.host_element, ic.selector);
            std::vector<std::string> props;
            bool resolved = !cls.empty();
            if (resolved) {
                for (const auto& f : ic.fields) {
                    std::string pid = resolve_field(cls, f);
                    if (pid.empty()) { resolved = false; break; }
                    props.push_back(pid);
                }
            }
            if (resolved) {
                os_.keys.push_back({cls, props});
                if (ic.kind == xsd::IdentityConstraint::Key)
                    for (const auto& p : props) os_.cardinalities.push_back({cls, p, 1});
            } else {
                // unresolvable selectors survive as compatibility records
                Individual info;
                info.id = ic.name;
                info.type = "KeyrefInfoType";
                info.values.emplace_back("name", PropertyValue{PropertyValue::Str, ic.name, 0});
                info.values.emplace_back(
                    "kind", PropertyValue{PropertyValue::Str,
                                          ic.kind == xsd::IdentityConstraint::Unique ? "unique" : "key", 0});
                info.values.emplace_back("selector", PropertyValue{PropertyValue::Str, ic.selector, 0});
                for (const auto& f : ic.fields)
                    info.values.emplace_back("field", PropertyValue{PropertyValue::Str, f, 0});
                owl::add_individual(obc_, info);
            }
        }
    }

    void make_recorded_constructs() {
        int n = 0;
        for (const auto& rc : s_.recorded_constructs) {
            Individual info;
            info.id = "xsd11_construct_" + std::to_string(++n);
            info.type = "Xsd11ConstructInfoType";
            info.values.emplace_back("kind", PropertyValue{PropertyValue::Str, rc.kind, 0});
            info.values.emplace_back("location", PropertyValue{PropertyValue::Str, rc.location, 0});
            info.values.emplace_back("xml", PropertyValue{PropertyValue::Str, rc.xml, 0});
            owl::add_individual(obc_, info);
        }
    }
};

} // namespace

TransformResult transform(const XsdSchema& schema, const TransformConfig& config) {
    return Transformer(schema, config).run();
}

} // namespace xmlsem::xs2owl
