#include "xmlsem/translator.hpp"

#include "xmlsem/error.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>

namespace xmlsem::translate {

namespace {

using map::PathStep;
using sparql::FilterExpr;
using sparql::GraphPattern;
using sparql::NormBranch;
using sparql::Term;
using sparql::TriplePattern;
using xq::XqClause;
using xq::XqExpr;
using xq::XqStep;

using StepPath = std::vector<PathStep>;

constexpr const char* kXsdIri = "http://www.w3.org/2001/XMLSchema#";
constexpr const char* kSubClassOf = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
constexpr const char* kSubPropertyOf = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";

std::string term_text(const Term& t) {
    switch (t.kind) {
        case Term::Var: return "?" + t.text;
        case Term::Iri: return "<" + t.text + ">";
        case Term::Literal: return "\"" + t.text + "\"";
    }
    return "";
}

std::string triple_text(const TriplePattern& t) {
    return term_text(t.s) + " " + term_text(t.p) + " " + term_text(t.o);
}

bool numeric_datatype(const std::string& dt) {
    return dt == std::string(kXsdIri) + "integer" || dt == std::string(kXsdIri) + "decimal" ||
           dt == std::string(kXsdIri) + "double" || dt == std::string(kXsdIri) + "float";
}

// SPARQL variable names map onto XQuery names; a leading digit gets a prefix.
std::string xq_name(const std::string& v) {
    if (!v.empty() && std::isdigit(static_cast<unsigned char>(v[0]))) return "v_" + v;
    return v;
}

// ---------------------------------------------------------------------------
// predicate string handling (manual mappings may carry path predicates)

std::vector<std::string> split_conjuncts(const std::string& pred) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t p = pred.find(" and ", start);
        if (p == std::string::npos) break;
        out.push_back(pred.substr(start, p - start));
        start = p + 5;
    }
    out.push_back(pred.substr(start));
    return out;
}

std::string merge_predicates(const std::string& a, const std::string& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    std::vector<std::string> conj = split_conjuncts(a);
    for (const auto& c : split_conjuncts(b))
        if (std::find(conj.begin(), conj.end(), c) == conj.end()) conj.push_back(c);
    std::string out;
    for (size_t i = 0; i < conj.size(); i++) {
        if (i) out += " and ";
        out += conj[i];
    }
    return out;
}

XqExpr parse_predicate_expr(const std::string& text) {
    try {
        return xq::parse_subset(text).root;
    } catch (const Error& e) {
        throw Error(ErrorCode::SYNTAX,
                    std::string("mapping path predicate '") + text + "': " + e.what());
    }
}

XqStep to_xq_step(const PathStep& st) {
    XqStep out;
    out.axis = st.is_attr ? XqStep::Attribute : XqStep::Child;
    out.name = st.name;
    if (!st.predicate.empty()) out.preds.push_back(parse_predicate_expr(st.predicate));
    return out;
}

// ---------------------------------------------------------------------------
// step-path matching

bool steps_match(const StepPath& a, const StepPath& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); i++)
        if (a[i].is_attr != b[i].is_attr || a[i].name != b[i].name) return false;
    return true;
}

StepPath merge_paths(const StepPath& a, const StepPath& b) {
    StepPath out = a;
    for (size_t i = 0; i < out.size(); i++)
        out[i].predicate = merge_predicates(out[i].predicate, b[i].predicate);
    return out;
}

void dedup_paths(std::vector<StepPath>& ps) {
    std::sort(ps.begin(), ps.end(), [](const StepPath& x, const StepPath& y) {
        return map::join_xpath(x) < map::join_xpath(y);
    });
    ps.erase(std::unique(ps.begin(), ps.end(),
                         [](const StepPath& x, const StepPath& y) {
                             return map::join_xpath(x) == map::join_xpath(y);
                         }),
             ps.end());
}

std::vector<StepPath> intersect_paths(const std::vector<StepPath>& a,
                                      const std::vector<StepPath>& b) {
    std::vector<StepPath> out;
    for (const auto& x : a)
        for (const auto& y : b)
            if (steps_match(x, y)) out.push_back(merge_paths(x, y));
    dedup_paths(out);
    return out;
}

// ---------------------------------------------------------------------------
// concrete (schema-triple-free) branch

struct DataTriple {
    std::string subject;  // variable name
    std::string property; // local construct id
    Term object;
    TriplePattern origin;
};

struct ConcreteBranch {
    std::vector<DataTriple> triples;
    std::vector<FilterExpr> filters;
    std::vector<GraphPattern> opts;
    std::map<std::string, std::string> fixed_meta;  // var -> full IRI (class/predicate)
    std::map<std::string, VarType> local_types;     // refinements for this branch
    std::map<std::string, std::vector<StepPath>> seeds; // from rdf:type
    bool dead = false;
};

// how a bound variable is referenced in emitted expressions
struct VarRefInfo {
    enum Kind { Core, OptChild, Meta } kind = Core;
    std::string xq_var;   // Core: the variable; OptChild: the row variable
    std::string child;    // OptChild: row child name
    std::string meta_iri; // Meta
    VarType type = VarType::Literal;

    XqExpr value_seq() const {
        switch (kind) {
            case Core: return xq::var_ref(xq_var);
            case OptChild: {
                XqExpr p;
                p.kind = XqExpr::Path;
                p.args = {xq::var_ref(xq_var)};
                XqStep st;
                st.name = child;
                p.steps = {st};
                return p;
            }
            case Meta: return xq::str_lit(meta_iri);
        }
        return {};
    }
};

using Scope = std::map<std::string, VarRefInfo>;

struct Translator {
    const TranslationContext& ctx;
    const sparql::SparqlQuery& q;
    std::string ns_prefix; // construct IRI prefix
    VarTypeMap global_types;
    int opt_counter = 0;
    int join_counter = 0;

    Translator(const TranslationContext& c, const sparql::SparqlQuery& query)
        : ctx(c), q(query) {
        ns_prefix = ctx.mappings->ontology_iri + "#";
    }

    // ---- id helpers ----

    std::string local_id(const std::string& iri) const {
        if (iri.size() > ns_prefix.size() && iri.compare(0, ns_prefix.size(), ns_prefix) == 0)
            return iri.substr(ns_prefix.size());
        return "";
    }

    std::optional<bool> property_is_object(const std::string& id) const {
        if (ctx.ontology) {
            auto it = ctx.ontology->properties.find(id);
            if (it != ctx.ontology->properties.end()) return it->second.is_object;
        }
        const map::Mapping* m = ctx.mappings->find(id);
        if (m && m->kind != map::ConstructKind::Class)
            return m->kind == map::ConstructKind::ObjectProperty;
        if (ctx.ontology) return std::nullopt;
        // no ontology: fall back to the id's range suffix
        size_t p = id.rfind("__");
        if (p == std::string::npos) return std::nullopt;
        std::string range = id.substr(p + 2);
        if (range.rfind("xs_", 0) == 0) return false;
        return std::nullopt;
    }

    std::string property_datatype(const std::string& id) const {
        if (ctx.ontology) {
            auto it = ctx.ontology->properties.find(id);
            if (it != ctx.ontology->properties.end() && !it->second.is_object &&
                !it->second.ranges.empty()) {
                const std::string& r = *it->second.ranges.begin();
                if (r.rfind("xs:", 0) == 0) return std::string(kXsdIri) + r.substr(3);
                return ns_prefix + r;
            }
        }
        size_t p = id.rfind("__");
        if (p == std::string::npos) return "";
        std::string range = id.substr(p + 2);
        if (range.rfind("xs_", 0) == 0) return std::string(kXsdIri) + range.substr(3);
        return ns_prefix + range;
    }

    // property paths including mapped subproperties when an ontology is present
    std::vector<StepPath> property_paths(const std::string& id) const {
        std::set<std::string> raw;
        const map::Mapping* own = ctx.mappings->find(id);
        if (own) raw.insert(own->xpaths.paths.begin(), own->xpaths.paths.end());
        if (ctx.ontology) {
            for (const auto& sub : ctx.ontology->sub_property_closure(id)) {
                const map::Mapping* m = ctx.mappings->find(sub);
                if (m) raw.insert(m->xpaths.paths.begin(), m->xpaths.paths.end());
            }
        }
        std::vector<StepPath> out;
        for (const auto& p : raw) out.push_back(map::parse_xpath(p));
        return out;
    }

    std::vector<StepPath> class_paths(const std::string& id) const {
        const map::Mapping* m = ctx.mappings->find(id);
        if (!m || m->kind != map::ConstructKind::Class) return {};
        std::vector<StepPath> out;
        for (const auto& p : m->xpaths.paths) out.push_back(map::parse_xpath(p));
        return out;
    }

    // ---- variable typing ----

    void type_triples(const GraphPattern& gp,
                      std::map<std::string, std::pair<VarType, TriplePattern>>& acc) {
        auto assign = [&](const std::string& v, VarType t, const TriplePattern& origin) {
            auto it = acc.find(v);
            if (it == acc.end()) {
                acc.emplace(v, std::make_pair(t, origin));
                return;
            }
            if (it->second.first == t) return;
            auto name = [](VarType x) {
                switch (x) {
                    case VarType::Node: return "NODE";
                    case VarType::Literal: return "LITERAL";
                    case VarType::Class: return "CLASS";
                    case VarType::Predicate: return "PREDICATE";
                }
                return "";
            };
            throw Error(ErrorCode::TYPE_CONFLICT,
                        "?" + v + " is " + name(it->second.first) + " in { " +
                            triple_text(it->second.second) + " } but " + name(t) + " in { " +
                            triple_text(origin) + " }");
        };
        for (const auto& t : gp.triples) {
            if (t.s.kind == Term::Var) assign(t.s.text, VarType::Node, t);
            if (t.p.kind == Term::Var) assign(t.p.text, VarType::Predicate, t);
            if (t.o.kind != Term::Var) continue;
            if (t.p.kind != Term::Iri) continue;
            if (t.p.text == sparql::kRdfType) {
                assign(t.o.text, VarType::Class, t);
                continue;
            }
            std::string id = local_id(t.p.text);
            if (id.empty()) continue;
            std::optional<bool> obj = property_is_object(id);
            if (!obj) {
                if (ctx.strict)
                    throw Error(ErrorCode::UNKNOWN_PREDICATE, "<" + t.p.text + ">");
                continue;
            }
            assign(t.o.text, *obj ? VarType::Node : VarType::Literal, t);
        }
        for (const auto& c : gp.children) type_triples(c, acc);
    }

    VarTypeMap compute_types(const GraphPattern& normalized) {
        std::map<std::string, std::pair<VarType, TriplePattern>> acc;
        type_triples(normalized, acc);
        VarTypeMap vt;
        for (const auto& [v, p] : acc) vt.types[v] = p.first;
        return vt;
    }

    VarType type_of(const std::string& v, const ConcreteBranch& cb) const {
        auto it = cb.local_types.find(v);
        if (it != cb.local_types.end()) return it->second;
        auto g = global_types.types.find(v);
        if (g != global_types.types.end()) return g->second;
        return VarType::Literal;
    }

    void note_datatype(const std::string& v, const std::string& dt) {
        auto it = global_types.datatypes.find(v);
        if (it == global_types.datatypes.end()) global_types.datatypes[v] = dt;
        else if (it->second != dt) it->second = "";
    }

    // ---- schema-triple processing and meta-variable enumeration ----

    std::vector<ConcreteBranch> expand_branch(const NormBranch& nb) {
        ConcreteBranch base;
        base.filters = nb.filters;
        base.optionals_to(base, nb);
        std::vector<ConcreteBranch> acc{std::move(base)};
        for (const auto& t : nb.triples) {
            std::vector<ConcreteBranch> next;
            for (const auto& cb : acc) {
                if (cb.dead) { next.push_back(cb); continue; }
                expand_triple(cb, t, next);
            }
            acc = std::move(next);
        }
        return acc;
    }

    void expand_triple(const ConcreteBranch& cb, const TriplePattern& t,
                       std::vector<ConcreteBranch>& out) {
        // rdf:type
        if (t.p.kind == Term::Iri && t.p.text == sparql::kRdfType) {
            if (t.s.kind != Term::Var)
                throw Error(ErrorCode::UNSUPPORTED_FEATURE,
                            "resource IRI in subject position of rdf:type");
            if (t.o.kind == Term::Iri) {
                std::string cls = local_id(t.o.text);
                std::vector<StepPath> paths = cls.empty() ? std::vector<StepPath>{}
                                                          : class_paths(cls);
                if (paths.empty()) {
                    if (ctx.strict)
                        throw Error(ErrorCode::UNMAPPED_CLASS, "<" + t.o.text + ">");
                    ConcreteBranch dead = cb;
                    dead.dead = true;
                    out.push_back(std::move(dead));
                    return;
                }
                ConcreteBranch nb = cb;
                seed(nb, t.s.text, paths);
                out.push_back(std::move(nb));
                return;
            }
            if (t.o.kind == Term::Var) {
                // one branch per mapped class
                bool any = false;
                for (const auto& [id, m] : ctx.mappings->by_construct) {
                    if (m.kind != map::ConstructKind::Class) continue;
                    ConcreteBranch nb = cb;
                    nb.fixed_meta[t.o.text] = ns_prefix + id;
                    std::vector<StepPath> paths;
                    for (const auto& p : m.xpaths.paths) paths.push_back(map::parse_xpath(p));
                    seed(nb, t.s.text, paths);
                    out.push_back(std::move(nb));
                    any = true;
                }
                if (!any) {
                    ConcreteBranch dead = cb;
                    dead.dead = true;
                    out.push_back(std::move(dead));
                }
                return;
            }
            // literal object can never type a resource
            ConcreteBranch dead = cb;
            dead.dead = true;
            out.push_back(std::move(dead));
            return;
        }

        // schema-structure triples answered against the ontology
        if (t.p.kind == Term::Iri &&
            (t.p.text == kSubClassOf || t.p.text == kSubPropertyOf)) {
            if (t.s.kind != Term::Iri || t.o.kind != Term::Iri)
                throw Error(ErrorCode::UNSUPPORTED_FEATURE,
                            "variables over schema structure (rdfs:subClassOf/subPropertyOf)");
            if (!ctx.ontology) {
                if (ctx.strict)
                    throw Error(ErrorCode::UNKNOWN_PREDICATE,
                                "<" + t.p.text + "> cannot be answered without an ontology");
                ConcreteBranch dead = cb;
                dead.dead = true;
                out.push_back(std::move(dead));
                return;
            }
            std::string sub = local_id(t.s.text), sup = local_id(t.o.text);
            bool holds = false;
            if (t.p.text == kSubClassOf) {
                auto closure = ctx.ontology->subclass_closure(sub);
                holds = sub == sup ||
                        std::find(closure.begin(), closure.end(), sup) != closure.end();
            } else {
                auto closure = ctx.ontology->super_property_closure(sub);
                holds = sub == sup ||
                        std::find(closure.begin(), closure.end(), sup) != closure.end();
            }
            ConcreteBranch nb = cb;
            if (!holds) nb.dead = true; // triple fails: the whole branch yields nothing
            out.push_back(std::move(nb));
            return;
        }

        // variable predicate: one branch per mapped property
        if (t.p.kind == Term::Var) {
            bool any = false;
            for (const auto& [id, m] : ctx.mappings->by_construct) {
                if (m.kind == map::ConstructKind::Class) continue;
                bool is_obj = m.kind == map::ConstructKind::ObjectProperty;
                // object kind must stay consistent with the global typing
                if (t.o.kind == Term::Var) {
                    auto g = global_types.types.find(t.o.text);
                    if (g != global_types.types.end()) {
                        if (g->second == VarType::Node && !is_obj) continue;
                        if (g->second == VarType::Literal && is_obj) continue;
                        if (g->second == VarType::Class || g->second == VarType::Predicate)
                            continue;
                    }
                }
                if (t.o.kind == Term::Literal && is_obj) continue;
                if (t.o.kind == Term::Iri) continue; // resource constants unsupported below
                ConcreteBranch nb = cb;
                nb.fixed_meta[t.p.text] = ns_prefix + id;
                if (t.o.kind == Term::Var)
                    nb.local_types[t.o.text] = is_obj ? VarType::Node : VarType::Literal;
                push_data_triple(nb, t, id);
                out.push_back(std::move(nb));
                any = true;
            }
            if (!any) {
                ConcreteBranch dead = cb;
                dead.dead = true;
                out.push_back(std::move(dead));
            }
            return;
        }

        // ordinary data triple
        std::string id = local_id(t.p.text);
        if (id.empty()) {
            if (ctx.strict) throw Error(ErrorCode::UNKNOWN_PREDICATE, "<" + t.p.text + ">");
            ConcreteBranch dead = cb;
            dead.dead = true;
            out.push_back(std::move(dead));
            return;
        }
        ConcreteBranch nb = cb;
        push_data_triple(nb, t, id);
        out.push_back(std::move(nb));
    }

    void push_data_triple(ConcreteBranch& nb, const TriplePattern& t, const std::string& id) {
        if (t.s.kind != Term::Var)
            throw Error(ErrorCode::UNSUPPORTED_FEATURE,
                        "resource IRI constants in data triple subjects");
        if (t.o.kind == Term::Iri)
            throw Error(ErrorCode::UNSUPPORTED_FEATURE,
                        "resource IRI constants in data triple objects");
        DataTriple dt;
        dt.subject = t.s.text;
        dt.property = id;
        dt.object = t.o;
        dt.origin = t;
        nb.triples.push_back(std::move(dt));
    }

    void seed(ConcreteBranch& nb, const std::string& var, const std::vector<StepPath>& paths) {
        auto it = nb.seeds.find(var);
        if (it == nb.seeds.end()) nb.seeds[var] = paths;
        else it->second = intersect_paths(it->second, paths);
    }

    // ---- binding (phase A: absolute path sets) ----

    struct Bindings {
        std::map<std::string, std::vector<StepPath>> abs;
        bool empty_binding = false; // some variable's path set became empty
    };

    Bindings bind_absolute(const ConcreteBranch& cb, const Scope& scope) {
        Bindings b;
        for (const auto& [v, paths] : cb.seeds) {
            b.abs[v] = paths;
            if (paths.empty()) b.empty_binding = true;
        }
        // property path cache, with unmapped detection
        std::map<std::string, std::vector<StepPath>> ppaths;
        for (const auto& t : cb.triples) {
            if (ppaths.count(t.property)) continue;
            std::vector<StepPath> ps = property_paths(t.property);
            if (ps.empty()) {
                if (ctx.strict)
                    throw Error(ErrorCode::UNMAPPED_PROPERTY, t.property);
                b.empty_binding = true;
            }
            ppaths[t.property] = std::move(ps);
        }
        if (b.empty_binding) return b;

        auto refine = [&](const std::string& v, const std::vector<StepPath>& paths) {
            if (scope.count(v)) return true; // bound outside: no refinement here
            auto it = b.abs.find(v);
            if (it == b.abs.end()) {
                b.abs[v] = paths;
                return !paths.empty();
            }
            it->second = intersect_paths(it->second, paths);
            return !it->second.empty();
        };

        for (int iter = 0; iter < static_cast<int>(cb.triples.size()) + 2; iter++) {
            bool changed = false;
            std::map<std::string, std::string> before;
            for (const auto& [v, ps] : b.abs) {
                std::string key;
                for (const auto& p : ps) key += map::join_xpath(p) + "|";
                before[v] = key;
            }
            for (const auto& t : cb.triples) {
                const auto& pp = ppaths[t.property];
                std::vector<StepPath> parents;
                for (const auto& p : pp) {
                    StepPath par(p.begin(), p.end() - 1);
                    if (!par.empty()) parents.push_back(par);
                }
                dedup_paths(parents);
                if (parents.empty()) {
                    // property mapped at document root: subject would have to be
                    // the document itself, which no class path can be
                    b.empty_binding = true;
                    return b;
                }
                if (!refine(t.subject, parents)) {
                    b.empty_binding = true;
                    return b;
                }
                if (t.object.kind == Term::Var && !scope.count(t.object.text) &&
                    !cb.fixed_meta.count(t.object.text)) {
                    const std::vector<StepPath>* subj_abs = nullptr;
                    auto sit = b.abs.find(t.subject);
                    if (sit != b.abs.end()) subj_abs = &sit->second;
                    if (subj_abs) {
                        std::vector<StepPath> child;
                        for (const auto& a : *subj_abs) {
                            for (const auto& p : pp) {
                                StepPath par(p.begin(), p.end() - 1);
                                if (!steps_match(par, a)) continue;
                                StepPath merged = merge_paths(a, par);
                                merged.push_back(p.back());
                                child.push_back(std::move(merged));
                            }
                        }
                        dedup_paths(child);
                        if (!refine(t.object.text, child)) {
                            b.empty_binding = true;
                            return b;
                        }
                    }
                }
            }
            for (const auto& [v, ps] : b.abs) {
                std::string key;
                for (const auto& p : ps) key += map::join_xpath(p) + "|";
                if (before.count(v) == 0 || before[v] != key) changed = true;
            }
            if (!changed) break;
        }
        return b;
    }

    // residual steps of a property below one absolute subject path
    std::vector<PathStep> residual_steps(const std::vector<StepPath>& ppaths,
                                         const StepPath& subj_path,
                                         const std::vector<StepPath>* object_abs) {
        std::vector<PathStep> out;
        for (const auto& p : ppaths) {
            StepPath par(p.begin(), p.end() - 1);
            if (!steps_match(par, subj_path)) continue;
            PathStep last = p.back();
            if (object_abs) {
                StepPath full = subj_path;
                full.push_back(last);
                bool ok = false;
                for (const auto& oa : *object_abs)
                    if (steps_match(full, oa)) {
                        last.predicate = merge_predicates(last.predicate, oa.back().predicate);
                        ok = true;
                        break;
                    }
                if (!ok) continue;
            }
            bool dup = false;
            for (const auto& e : out)
                if (e.is_attr == last.is_attr && e.name == last.name &&
                    e.predicate == last.predicate)
                    dup = true;
            if (!dup) out.push_back(std::move(last));
        }
        return out;
    }

    // ---- filter compilation ----

    struct CompiledFilters {
        std::map<std::string, std::vector<XqExpr>> pushed; // var -> context predicates
        std::vector<FilterExpr> residual;
    };

    void flatten_and(const FilterExpr& e, std::vector<FilterExpr>& out) {
        if (e.kind == FilterExpr::And) {
            flatten_and(e.args[0], out);
            flatten_and(e.args[1], out);
            return;
        }
        out.push_back(e);
    }

    XqExpr literal_const(const FilterExpr& lit) {
        if (numeric_datatype(lit.datatype)) {
            XqExpr n;
            n.kind = XqExpr::NumLit;
            n.text = lit.text;
            return n;
        }
        return xq::str_lit(lit.text);
    }

    // pushdown candidate: single core-bound literal variable against a constant
    std::optional<std::pair<std::string, XqExpr>> try_push(
        const FilterExpr& e, const ConcreteBranch& cb,
        const std::set<std::string>& core_literal_vars) {
        auto var_of = [&](const FilterExpr& x) -> std::string {
            if (x.kind == FilterExpr::Variable && core_literal_vars.count(x.text) &&
                !cb.fixed_meta.count(x.text))
                return x.text;
            return "";
        };
        if (e.kind == FilterExpr::Compare) {
            const FilterExpr &l = e.args[0], &r = e.args[1];
            std::string v = var_of(l);
            if (!v.empty() && r.kind == FilterExpr::Lit)
                return std::make_pair(v, xq::compare(e.op, xq::context_item(), literal_const(r)));
            v = var_of(r);
            if (!v.empty() && l.kind == FilterExpr::Lit) {
                std::string op = e.op;
                if (op == "<") op = ">";
                else if (op == ">") op = "<";
                else if (op == "<=") op = ">=";
                else if (op == ">=") op = "<=";
                return std::make_pair(v, xq::compare(op, xq::context_item(), literal_const(l)));
            }
            return std::nullopt;
        }
        if (e.kind == FilterExpr::Call && e.args.size() == 2 &&
            e.args[1].kind == FilterExpr::Lit) {
            std::string v = var_of(e.args[0]);
            if (v.empty()) return std::nullopt;
            std::string fn;
            if (e.op == "regex") fn = "matches";
            else if (e.op == "strstarts") fn = "starts-with";
            else if (e.op == "contains") fn = "contains";
            else return std::nullopt;
            return std::make_pair(
                v, xq::fncall(fn, {xq::context_item(), xq::str_lit(e.args[1].text)}));
        }
        return std::nullopt;
    }

    CompiledFilters compile_filters(const ConcreteBranch& cb, const Scope& scope,
                                    const std::set<std::string>& core_vars) {
        CompiledFilters cf;
        std::set<std::string> core_literal_vars;
        for (const auto& v : core_vars)
            if (type_of(v, cb) == VarType::Literal && !scope.count(v)) core_literal_vars.insert(v);
        for (const auto& f : cb.filters) {
            std::vector<FilterExpr> conjuncts;
            flatten_and(f, conjuncts);
            for (const auto& c : conjuncts) {
                auto pushed = try_push(c, cb, core_literal_vars);
                if (pushed) cf.pushed[pushed->first].push_back(pushed->second);
                else cf.residual.push_back(c);
            }
        }
        return cf;
    }

    // residual filter expression over bound variable references
    XqExpr filter_to_xq(const FilterExpr& e, const Scope& refs) {
        switch (e.kind) {
            case FilterExpr::And: {
                XqExpr n;
                n.kind = XqExpr::AndOp;
                n.args = {filter_to_xq(e.args[0], refs), filter_to_xq(e.args[1], refs)};
                return n;
            }
            case FilterExpr::Or: {
                XqExpr n;
                n.kind = XqExpr::OrOp;
                n.args = {filter_to_xq(e.args[0], refs), filter_to_xq(e.args[1], refs)};
                return n;
            }
            case FilterExpr::Not: {
                XqExpr n;
                n.kind = XqExpr::NotOp;
                n.args = {filter_to_xq(e.args[0], refs)};
                return n;
            }
            case FilterExpr::Neg: {
                XqExpr n;
                n.kind = XqExpr::NegOp;
                n.args = {filter_to_xq(e.args[0], refs)};
                return n;
            }
            case FilterExpr::Compare:
                return xq::compare(e.op, filter_to_xq(e.args[0], refs),
                                   filter_to_xq(e.args[1], refs));
            case FilterExpr::Arith: {
                XqExpr n;
                n.kind = XqExpr::Arith;
                n.op = e.op == "/" ? "div" : e.op;
                n.args = {filter_to_xq(e.args[0], refs), filter_to_xq(e.args[1], refs)};
                return n;
            }
            case FilterExpr::Lit:
                return literal_const(e);
            case FilterExpr::IriRef:
                return xq::str_lit(e.text);
            case FilterExpr::Variable: {
                auto it = refs.find(e.text);
                if (it == refs.end())
                    // variable never bound: comparisons against the empty
                    // sequence are false, mirroring SPARQL's unbound error
                    return xq::seq({});
                const VarRefInfo& r = it->second;
                if (r.kind == VarRefInfo::Meta) return xq::str_lit(r.meta_iri);
                if (r.type == VarType::Node)
                    return xq::fncall("concat",
                                      {xq::str_lit(ctx.base_iri + "#"),
                                       xq::fncall("node-id", {r.value_seq()})});
                return r.value_seq();
            }
            case FilterExpr::Call: {
                if (e.op == "regex") {
                    std::vector<XqExpr> args;
                    for (const auto& a : e.args) args.push_back(filter_to_xq(a, refs));
                    return xq::fncall("matches", std::move(args));
                }
                if (e.op == "strstarts" || e.op == "contains") {
                    return xq::fncall(e.op == "strstarts" ? "starts-with" : "contains",
                                      {filter_to_xq(e.args[0], refs),
                                       filter_to_xq(e.args[1], refs)});
                }
                if (e.op == "bound") {
                    const std::string& v = e.args[0].text;
                    auto it = refs.find(v);
                    if (it == refs.end()) return xq::fncall("false");
                    if (it->second.kind == VarRefInfo::Meta) return xq::fncall("true");
                    return xq::fncall("exists", {it->second.value_seq()});
                }
                if (e.op == "str") {
                    if (e.args[0].kind == FilterExpr::Variable) {
                        auto it = refs.find(e.args[0].text);
                        if (it != refs.end() && it->second.type == VarType::Node)
                            throw Error(ErrorCode::UNTRANSLATABLE_FILTER,
                                        "str over a node-valued variable");
                    }
                    return xq::fncall("string", {filter_to_xq(e.args[0], refs)});
                }
                if (e.op == "isIRI" || e.op == "isLiteral" || e.op == "isBlank") {
                    bool truth = false;
                    if (e.args[0].kind == FilterExpr::Variable) {
                        auto it = refs.find(e.args[0].text);
                        VarType t = it == refs.end() ? VarType::Literal : it->second.type;
                        if (e.op == "isIRI") truth = t != VarType::Literal;
                        if (e.op == "isLiteral") truth = t == VarType::Literal;
                    } else if (e.args[0].kind == FilterExpr::IriRef) {
                        truth = e.op == "isIRI";
                    } else if (e.args[0].kind == FilterExpr::Lit) {
                        truth = e.op == "isLiteral";
                    }
                    return xq::fncall(truth ? "true" : "false");
                }
                if (e.op == "sameTerm") {
                    const FilterExpr &a = e.args[0], &b = e.args[1];
                    auto ref_type = [&](const FilterExpr& x) -> VarType {
                        if (x.kind != FilterExpr::Variable) return VarType::Literal;
                        auto it = refs.find(x.text);
                        return it == refs.end() ? VarType::Literal : it->second.type;
                    };
                    VarType ta = ref_type(a), tb = ref_type(b);
                    if (ta == VarType::Node && tb == VarType::Node) {
                        auto node_of = [&](const FilterExpr& x) {
                            return xq::fncall("node-id",
                                              {refs.at(x.text).value_seq()});
                        };
                        return xq::compare("=", node_of(a), node_of(b));
                    }
                    if (ta == VarType::Literal && tb == VarType::Literal)
                        return xq::compare("=",
                                           xq::fncall("string", {filter_to_xq(a, refs)}),
                                           xq::fncall("string", {filter_to_xq(b, refs)}));
                    return xq::fncall("false");
                }
                throw Error(ErrorCode::UNTRANSLATABLE_FILTER, e.op);
            }
        }
        return {};
    }

    // ---- branch emission ----

    struct EmitVars {
        std::vector<std::string> names; // row children, in order
    };

    XqExpr path_from(const std::string& start_var, const StepPath& steps,
                     const std::vector<XqExpr>& extra_last_preds) {
        XqExpr p;
        p.kind = XqExpr::Path;
        p.args = {xq::var_ref(start_var)};
        for (size_t i = 0; i < steps.size(); i++) {
            XqStep st = to_xq_step(steps[i]);
            if (i + 1 == steps.size())
                for (const auto& e : extra_last_preds) st.preds.push_back(e);
            p.steps.push_back(std::move(st));
        }
        return p;
    }

    XqExpr source_from_paths(const std::string& start_var,
                             const std::vector<StepPath>& paths,
                             const std::vector<XqExpr>& extra_last_preds) {
        std::vector<XqExpr> items;
        for (const auto& p : paths) items.push_back(path_from(start_var, p, extra_last_preds));
        return xq::seq(std::move(items));
    }

    // translate one concrete branch into a FLWOR producing <row_name> rows;
    // nullopt when the branch can never match
    std::optional<XqExpr> translate_concrete(const ConcreteBranch& cb, const Scope& outer,
                                             const EmitVars& emit,
                                             const std::string& row_name) {
        if (cb.dead) return std::nullopt;
        Bindings b = bind_absolute(cb, outer);
        if (b.empty_binding) {
            if (ctx.strict)
                throw Error(ErrorCode::EMPTY_INTERSECTION,
                            "variable bindings became empty in a union branch");
            return std::nullopt;
        }

        // property paths again (bind_absolute validated them)
        std::map<std::string, std::vector<StepPath>> ppaths;
        for (const auto& t : cb.triples)
            if (!ppaths.count(t.property)) ppaths[t.property] = property_paths(t.property);

        // decide variables: binding order, parents, categories
        std::vector<std::string> order; // first-appearance order of core vars
        std::set<std::string> seen;
        auto note = [&](const std::string& v) {
            if (outer.count(v) || cb.fixed_meta.count(v)) return;
            if (!seen.count(v)) {
                seen.insert(v);
                order.push_back(v);
            }
        };
        for (const auto& t : cb.triples) {
            note(t.subject);
            if (t.object.kind == Term::Var) note(t.object.text);
        }
        for (const auto& [v, paths] : cb.seeds) note(v); // typed-only variables

        // first binding triple per object var; later triples become joins
        std::map<std::string, size_t> first_binding; // var -> triple index
        std::vector<size_t> join_triples;
        for (size_t i = 0; i < cb.triples.size(); i++) {
            const auto& t = cb.triples[i];
            if (t.object.kind != Term::Var) continue;
            const std::string& o = t.object.text;
            if (outer.count(o) || cb.fixed_meta.count(o)) {
                join_triples.push_back(i);
                continue;
            }
            if (first_binding.count(o)) join_triples.push_back(i);
            else first_binding[o] = i;
        }

        // collect vars used beyond filters (to decide for vs let)
        std::set<std::string> must_for;
        for (const auto& v : emit.names) must_for.insert(v);
        for (const auto& t : cb.triples) must_for.insert(t.subject);
        // order-by-only usage still allows let
        for (const auto& k : q.modifiers.order_by)
            if (k.expr.kind == FilterExpr::Variable) must_for.erase(k.expr.text);
        for (const auto& v : emit.names) {
            // projected/template vars iterate; recompute after order-by erase
        }
        std::set<std::string> projected_or_template;
        for (const auto& v : q.projection) projected_or_template.insert(v);
        if (q.select_all)
            for (const auto& v : sparql::pattern_variables(q.pattern))
                if (v.rfind("_b", 0) != 0) projected_or_template.insert(v);
        for (const auto& t : q.construct_template)
            for (const Term* term : {&t.s, &t.p, &t.o})
                if (term->kind == Term::Var) projected_or_template.insert(term->text);
        std::set<std::string> parents;
        for (const auto& t : cb.triples) parents.insert(t.subject);

        auto use_for = [&](const std::string& v) {
            if (parents.count(v)) return true;
            if (projected_or_template.count(v)) return true;
            return false;
        };

        // filters
        std::set<std::string> core_vars(order.begin(), order.end());
        CompiledFilters cf = compile_filters(cb, outer, core_vars);

        // check for filters that can never hold (literal ops over meta vars)
        Scope refs = outer;
        for (const auto& [v, iri] : cb.fixed_meta) {
            VarRefInfo r;
            r.kind = VarRefInfo::Meta;
            r.meta_iri = iri;
            r.type = type_of(v, cb);
            refs[v] = r;
        }

        XqExpr flwor;
        flwor.kind = XqExpr::Flwor;
        std::vector<XqExpr> wheres;

        // emit core variable clauses in first-appearance order
        std::set<std::string> emitted;
        for (const auto& v : order) {
            std::vector<XqExpr> pushed;
            auto pit = cf.pushed.find(v);
            if (pit != cf.pushed.end()) pushed = pit->second;

            XqClause cl;
            bool let = !use_for(v) && !pushed.empty() ? true : !use_for(v);
            cl.kind = let ? XqClause::Let : XqClause::For;
            cl.var = xq_name(v);

            auto fb = first_binding.find(v);
            if (fb == first_binding.end()) {
                // root variable: absolute paths below $doc
                auto ait = b.abs.find(v);
                if (ait == b.abs.end() || ait->second.empty()) return std::nullopt;
                // constant-object constraints on this subject become predicates
                std::vector<StepPath> paths = ait->second;
                std::vector<XqExpr> items;
                for (const auto& a : paths) {
                    std::vector<XqExpr> preds = subject_constraint_preds(cb, ppaths, v, a);
                    for (const auto& e : pushed) preds.push_back(e);
                    items.push_back(path_from("doc", a, preds));
                }
                cl.exprs.push_back(xq::seq(std::move(items)));
            } else {
                const DataTriple& t = cb.triples[fb->second];
                const std::string& parent = t.subject;
                std::string parent_xq;
                auto oit = outer.find(parent);
                if (oit != outer.end()) {
                    if (oit->second.kind != VarRefInfo::Core)
                        throw Error(ErrorCode::INTERNAL, "optional row used as a parent");
                    parent_xq = oit->second.xq_var;
                } else {
                    parent_xq = xq_name(parent);
                }
                // residual steps constrained by both subject and object paths
                const std::vector<StepPath>* subj_abs = abs_of(b, outer, parent);
                const std::vector<StepPath>* obj_abs =
                    b.abs.count(v) ? &b.abs.at(v) : nullptr;
                std::vector<XqExpr> items;
                if (!subj_abs) return std::nullopt;
                std::set<std::string> seen_steps;
                for (const auto& a : *subj_abs) {
                    for (auto& st : residual_steps(ppaths[t.property], a, obj_abs)) {
                        std::string key = (st.is_attr ? "@" : "") + st.name + "[" +
                                          st.predicate + "]";
                        if (seen_steps.count(key)) continue;
                        seen_steps.insert(key);
                        StepPath one{st};
                        items.push_back(path_from(parent_xq, one, pushed));
                    }
                }
                if (items.empty()) return std::nullopt;
                cl.exprs.push_back(xq::seq(std::move(items)));
                if (type_of(v, cb) == VarType::Literal)
                    note_datatype(v, property_datatype(t.property));
            }
            bool is_let = cl.kind == XqClause::Let;
            flwor.clauses.push_back(std::move(cl));
            VarRefInfo r;
            r.kind = VarRefInfo::Core;
            r.xq_var = xq_name(v);
            r.type = type_of(v, cb);
            refs[v] = r;
            emitted.insert(v);
            if (is_let)
                wheres.push_back(xq::fncall("exists", {xq::var_ref(xq_name(v))}));
        }

        // join triples: fresh iteration plus an equality guard
        for (size_t idx : join_triples) {
            const DataTriple& t = cb.triples[idx];
            const std::string& o = t.object.text;
            if (cb.fixed_meta.count(o))
                throw Error(ErrorCode::UNSUPPORTED_FEATURE,
                            "class/predicate variable in object position of a data triple");
            const std::vector<StepPath>* subj_abs = abs_of(b, outer, t.subject);
            if (!subj_abs) return std::nullopt;
            std::string parent_xq = outer.count(t.subject)
                                        ? outer.at(t.subject).xq_var
                                        : xq_name(t.subject);
            std::vector<XqExpr> items;
            std::set<std::string> seen_steps;
            for (const auto& a : *subj_abs) {
                for (auto& st : residual_steps(ppaths[t.property], a, nullptr)) {
                    std::string key =
                        (st.is_attr ? "@" : "") + st.name + "[" + st.predicate + "]";
                    if (seen_steps.count(key)) continue;
                    seen_steps.insert(key);
                    StepPath one{st};
                    items.push_back(path_from(parent_xq, one, {}));
                }
            }
            if (items.empty()) return std::nullopt;
            std::string jv = "join_" + std::to_string(join_counter++);
            XqClause cl;
            cl.kind = XqClause::For;
            cl.var = jv;
            cl.exprs.push_back(xq::seq(std::move(items)));
            flwor.clauses.push_back(std::move(cl));
            // equality with the existing binding
            XqExpr existing = refs.at(o).value_seq();
            if (type_of(o, cb) == VarType::Node) {
                wheres.push_back(xq::compare("=", xq::fncall("node-id", {xq::var_ref(jv)}),
                                             xq::fncall("node-id", {existing})));
            } else {
                wheres.push_back(xq::compare("=", xq::fncall("string", {xq::var_ref(jv)}),
                                             xq::fncall("string", {existing})));
            }
        }

        for (auto& w : wheres) {
            XqClause cl;
            cl.kind = XqClause::Where;
            cl.exprs.push_back(std::move(w));
            flwor.clauses.push_back(std::move(cl));
        }
        wheres.clear();

        // optional parts
        std::map<std::string, std::pair<std::string, std::string>> opt_bindings;
        for (const auto& opt : cb.opts) {
            int k = opt_counter++;
            std::string opt_var = "opt_" + std::to_string(k);
            std::string row_var = "optrow_" + std::to_string(k);
            std::set<std::string> opt_vars_set = sparql::pattern_variables(opt);
            std::vector<std::string> new_vars;
            for (const auto& v : opt_vars_set)
                if (!refs.count(v)) new_vars.push_back(v);
            EmitVars opt_emit;
            opt_emit.names = new_vars;
            XqExpr inner = translate_pattern(opt, refs, opt_emit, "OptRow");
            XqClause let_cl;
            let_cl.kind = XqClause::Let;
            let_cl.var = opt_var;
            let_cl.exprs.push_back(std::move(inner));
            flwor.clauses.push_back(std::move(let_cl));
            XqClause for_cl;
            for_cl.kind = XqClause::For;
            for_cl.var = row_var;
            XqExpr fallback;
            fallback.kind = XqExpr::ElemCtor;
            fallback.text = "OptRow";
            XqExpr guard;
            guard.kind = XqExpr::IfThen;
            guard.args = {xq::fncall("exists", {xq::var_ref(opt_var)}),
                          xq::var_ref(opt_var), std::move(fallback)};
            for_cl.exprs.push_back(std::move(guard));
            flwor.clauses.push_back(std::move(for_cl));
            for (const auto& v : new_vars) {
                VarRefInfo r;
                r.kind = VarRefInfo::OptChild;
                r.xq_var = row_var;
                r.child = xq_name(v);
                r.type = global_types.types.count(v) ? global_types.types[v]
                                                     : VarType::Literal;
                refs[v] = r;
            }
        }

        // residual filters
        for (const auto& rf : cf.residual) {
            XqExpr cond;
            bool constant_false = false;
            try {
                cond = filter_to_xq(rf, refs);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::UNTRANSLATABLE_FILTER) throw;
                throw;
            }
            // literal-position type errors: SPARQL evaluates them to Error and
            // drops the solution; a filter over a meta variable compared to a
            // literal can never hold
            if (constant_false) return std::nullopt;
            XqClause cl;
            cl.kind = XqClause::Where;
            cl.exprs.push_back(std::move(cond));
            flwor.clauses.push_back(std::move(cl));
        }

        // row construction
        XqExpr row;
        row.kind = XqExpr::ElemCtor;
        row.text = row_name;
        for (const auto& v : emit.names) {
            auto it = refs.find(v);
            if (it == refs.end()) continue; // unbound in this branch
            const VarRefInfo& r = it->second;
            if (r.kind == VarRefInfo::OptChild) {
                row.args.push_back(r.value_seq()); // copy the optional row child
                continue;
            }
            XqExpr child;
            child.kind = XqExpr::ElemCtor;
            child.text = xq_name(v);
            if (r.kind == VarRefInfo::Meta) {
                child.args.push_back(xq::str_lit(r.meta_iri));
            } else if (r.type == VarType::Node) {
                child.args.push_back(xq::fncall("node-id", {r.value_seq()}));
            } else {
                child.args.push_back(xq::fncall("string", {r.value_seq()}));
            }
            row.args.push_back(std::move(child));
        }

        if (flwor.clauses.empty()) {
            // no variables at all: one unconditional solution
            return row;
        }
        flwor.args.push_back(std::move(row));
        return flwor;
    }

    const std::vector<StepPath>* abs_of(const Bindings& b, const Scope& outer,
                                        const std::string& v) {
        auto it = b.abs.find(v);
        if (it != b.abs.end()) return &it->second;
        if (outer.count(v)) return nullptr; // outer vars need no absolute refinement
        return nullptr;
    }

    // constant-object triples become predicates on the subject's source path
    std::vector<XqExpr> subject_constraint_preds(
        const ConcreteBranch& cb, std::map<std::string, std::vector<StepPath>>& ppaths,
        const std::string& subject, const StepPath& subj_path) {
        std::vector<XqExpr> out;
        for (const auto& t : cb.triples) {
            if (t.subject != subject || t.object.kind != Term::Literal) continue;
            std::vector<XqExpr> disjuncts;
            for (auto& st : residual_steps(ppaths[t.property], subj_path, nullptr)) {
                XqExpr path;
                path.kind = XqExpr::Path;
                path.args = {xq::context_item()};
                path.steps = {to_xq_step(st)};
                XqExpr cmp = xq::compare("=", std::move(path), constant_of(t.object));
                disjuncts.push_back(std::move(cmp));
            }
            if (disjuncts.empty()) continue;
            XqExpr pred = disjuncts[0];
            for (size_t i = 1; i < disjuncts.size(); i++) {
                XqExpr o;
                o.kind = XqExpr::OrOp;
                o.args = {std::move(pred), std::move(disjuncts[i])};
                pred = std::move(o);
            }
            out.push_back(std::move(pred));
        }
        return out;
    }

    XqExpr constant_of(const Term& lit) {
        if (numeric_datatype(lit.datatype)) {
            XqExpr n;
            n.kind = XqExpr::NumLit;
            n.text = lit.text;
            return n;
        }
        return xq::str_lit(lit.text);
    }

    // also used for constant-object subject seeding in bind_absolute: constant
    // objects still constrain the subject to parents of the property paths —
    // handled there via the shared triple walk.

    // ---- pattern translation (normalized, possibly a union) ----

    XqExpr translate_pattern(const GraphPattern& normalized, const Scope& outer,
                             const EmitVars& emit, const std::string& row_name) {
        std::vector<XqExpr> branches;
        for (const auto& nb : sparql::union_branches(normalized)) {
            for (const auto& cbr : expand_branch(nb)) {
                auto r = translate_concrete(cbr, outer, emit, row_name);
                if (r) branches.push_back(std::move(*r));
            }
        }
        return xq::seq(std::move(branches));
    }

    // ---- modifiers ----

    XqExpr order_key_expr(const FilterExpr& key, const std::string& iter_var) {
        if (key.kind == FilterExpr::Variable) {
            XqExpr p;
            p.kind = XqExpr::Path;
            p.args = {xq::var_ref(iter_var)};
            XqStep st;
            st.name = xq_name(key.text);
            p.steps = {st};
            return p;
        }
        // non-variable keys: rewrite variables to row children, translate the rest
        Scope refs;
        for (const auto& v : sparql::pattern_variables(q.pattern)) {
            VarRefInfo r;
            r.kind = VarRefInfo::OptChild; // row-child access shape
            r.xq_var = iter_var;
            r.child = xq_name(v);
            r.type = VarType::Literal;
            refs[v] = r;
        }
        return filter_to_xq(key, refs);
    }

    // wraps $Results according to ORDER BY / DISTINCT / OFFSET / LIMIT
    XqExpr modifier_wrap(const std::vector<std::string>& head_vars) {
        XqExpr cur = xq::var_ref("Results");
        std::vector<std::pair<std::string, XqExpr>> lets; // name -> definition

        if (!q.modifiers.order_by.empty()) {
            XqExpr fl;
            fl.kind = XqExpr::Flwor;
            XqClause fc;
            fc.kind = XqClause::For;
            fc.var = "iter";
            fc.exprs.push_back(cur);
            fl.clauses.push_back(std::move(fc));
            XqClause ob;
            ob.kind = XqClause::OrderBy;
            for (const auto& k : q.modifiers.order_by) {
                ob.exprs.push_back(order_key_expr(k.expr, "iter"));
                ob.descending.push_back(k.descending);
            }
            fl.clauses.push_back(std::move(ob));
            fl.args.push_back(xq::seq({xq::var_ref("iter")}));
            lets.emplace_back("Ordered_Results", std::move(fl));
            cur = xq::var_ref("Ordered_Results");
        }

        if (q.distinctness == sparql::SparqlQuery::Distinct) {
            XqExpr fl;
            fl.kind = XqExpr::Flwor;
            XqClause fc;
            fc.kind = XqClause::For;
            fc.var = "iter";
            fc.pos_var = "pos";
            fc.exprs.push_back(cur);
            fl.clauses.push_back(std::move(fc));
            // no earlier row may agree on every projected child
            XqExpr prior = cur;
            XqExpr scan;
            scan.kind = XqExpr::Path;
            scan.args = {prior};
            scan.start_preds.push_back(
                xq::compare("<", xq::fncall("position"), xq::var_ref("pos")));
            XqExpr eq_all;
            bool first = true;
            for (const auto& v : head_vars) {
                XqExpr self_child;
                self_child.kind = XqExpr::Path;
                self_child.args = {xq::context_item()};
                XqStep st1;
                st1.name = xq_name(v);
                self_child.steps = {st1};
                XqExpr iter_child;
                iter_child.kind = XqExpr::Path;
                iter_child.args = {xq::var_ref("iter")};
                XqStep st2;
                st2.name = xq_name(v);
                iter_child.steps = {st2};
                XqExpr val_eq = xq::compare("=", xq::fncall("string", {self_child}),
                                            xq::fncall("string", {iter_child}));
                XqExpr cnt_eq = xq::compare("=", xq::fncall("count", {self_child}),
                                            xq::fncall("count", {iter_child}));
                XqExpr both = xq::and_op(std::move(val_eq), std::move(cnt_eq));
                if (first) {
                    eq_all = std::move(both);
                    first = false;
                } else {
                    eq_all = xq::and_op(std::move(eq_all), std::move(both));
                }
            }
            if (first) {
                // zero projected variables: all rows identical
                eq_all = xq::fncall("true");
            }
            scan.start_preds.push_back(std::move(eq_all));
            XqClause wc;
            wc.kind = XqClause::Where;
            wc.exprs.push_back(
                xq::compare("=", xq::fncall("count", {std::move(scan)}), num_lit_expr(0)));
            fl.clauses.push_back(std::move(wc));
            fl.args.push_back(xq::seq({xq::var_ref("iter")}));
            lets.emplace_back("Distinct_Results", std::move(fl));
            cur = xq::var_ref("Distinct_Results");
        }

        if (q.modifiers.offset || q.modifiers.limit) {
            long off = q.modifiers.offset.value_or(0);
            XqExpr windowed;
            windowed.kind = XqExpr::Path;
            windowed.args = {cur};
            XqExpr lower = xq::compare(">", xq::fncall("position"), num_lit_expr(off));
            if (q.modifiers.limit) {
                XqExpr upper = xq::compare("<=", xq::fncall("position"),
                                           num_lit_expr(off + *q.modifiers.limit));
                if (off > 0 || !q.modifiers.offset) {
                    if (q.modifiers.offset)
                        windowed.start_preds.push_back(
                            xq::and_op(std::move(lower), std::move(upper)));
                    else
                        windowed.start_preds.push_back(std::move(upper));
                } else {
                    windowed.start_preds.push_back(
                        xq::and_op(std::move(lower), std::move(upper)));
                }
            } else {
                windowed.start_preds.push_back(std::move(lower));
            }
            cur = std::move(windowed);
        }

        // fold the lets around the final expression, innermost first
        XqExpr body = cur;
        for (auto it = lets.rbegin(); it != lets.rend(); ++it) {
            XqExpr fl;
            fl.kind = XqExpr::Flwor;
            XqClause lc;
            lc.kind = XqClause::Let;
            lc.var = it->first;
            lc.exprs.push_back(std::move(it->second));
            fl.clauses.push_back(std::move(lc));
            fl.args.push_back(std::move(body));
            body = std::move(fl);
        }
        return body;
    }

    static XqExpr num_lit_expr(long v) { return xq::num_lit(v); }

    // ---- query forms ----

    Translation run() {
        if (q.form == sparql::SparqlQuery::Describe)
            throw Error(ErrorCode::UNSUPPORTED_FORM, "DESCRIBE");

        GraphPattern normalized = sparql::normalize(q.pattern);
        global_types = compute_types(normalized);

        // head variables
        std::vector<std::string> head;
        if (q.form == sparql::SparqlQuery::Select) {
            if (q.select_all) {
                for (const auto& v : sparql::pattern_variables(q.pattern))
                    if (v.rfind("_b", 0) != 0) head.push_back(v);
            } else {
                head = q.projection;
            }
        } else if (q.form == sparql::SparqlQuery::Construct) {
            std::set<std::string> seen;
            for (const auto& t : q.construct_template)
                for (const Term* term : {&t.s, &t.p, &t.o})
                    if (term->kind == Term::Var && !seen.count(term->text)) {
                        seen.insert(term->text);
                        head.push_back(term->text);
                    }
        }

        // rows must also carry order-by variables
        EmitVars emit;
        emit.names = head;
        std::set<std::string> have(head.begin(), head.end());
        for (const auto& k : q.modifiers.order_by) {
            std::set<std::string> kv = sparql::expr_variables(k.expr);
            for (const auto& v : kv)
                if (!have.count(v)) {
                    have.insert(v);
                    emit.names.push_back(v);
                }
        }

        Scope top;
        XqExpr inner = translate_pattern(normalized, top, emit, "Result");

        // program skeleton
        XqExpr program;
        program.kind = XqExpr::Flwor;
        XqClause doc_cl;
        doc_cl.kind = XqClause::Let;
        doc_cl.var = "doc";
        doc_cl.exprs.push_back(xq::fncall(ctx.source_is_doc ? "doc" : "collection",
                                          {xq::str_lit(ctx.source_uri)}));
        program.clauses.push_back(std::move(doc_cl));

        if (q.form == sparql::SparqlQuery::Ask) {
            XqExpr body = ask_body(inner);
            XqExpr wrapper;
            wrapper.kind = XqExpr::ElemCtor;
            wrapper.text = "boolean";
            wrapper.args.push_back(std::move(body));
            program.args.push_back(std::move(wrapper));
        } else {
            XqExpr modified;
            modified.kind = XqExpr::Flwor;
            XqClause results_cl;
            results_cl.kind = XqClause::Let;
            results_cl.var = "Results";
            results_cl.exprs.push_back(std::move(inner));
            modified.clauses.push_back(std::move(results_cl));
            modified.args.push_back(modifier_wrap(head));

            XqClause mod_cl;
            mod_cl.kind = XqClause::Let;
            mod_cl.var = "Modified_Results";
            mod_cl.exprs.push_back(std::move(modified));
            program.clauses.push_back(std::move(mod_cl));

            if (q.form == sparql::SparqlQuery::Select) {
                XqExpr wrapper;
                wrapper.kind = XqExpr::ElemCtor;
                wrapper.text = "Results";
                wrapper.args.push_back(xq::var_ref("Modified_Results"));
                program.args.push_back(std::move(wrapper));
            } else {
                // CONSTRUCT: instantiate the template per solution row
                XqExpr per_row;
                per_row.kind = XqExpr::Flwor;
                XqClause fc;
                fc.kind = XqClause::For;
                fc.var = "iter";
                fc.exprs.push_back(xq::var_ref("Modified_Results"));
                per_row.clauses.push_back(std::move(fc));
                std::vector<XqExpr> triples;
                for (const auto& t : q.construct_template)
                    triples.push_back(template_triple(t));
                per_row.args.push_back(xq::seq(std::move(triples)));

                XqClause triples_cl;
                triples_cl.kind = XqClause::Let;
                triples_cl.var = "Triples";
                triples_cl.exprs.push_back(std::move(per_row));
                program.clauses.push_back(std::move(triples_cl));

                XqExpr wrapper;
                wrapper.kind = XqExpr::ElemCtor;
                wrapper.text = "triples";
                wrapper.args.push_back(xq::var_ref("Triples"));
                program.args.push_back(std::move(wrapper));
            }
        }

        Translation out;
        out.program.root = std::move(program);
        out.form = q.form;
        out.projection = head;
        out.base_iri = ctx.base_iri;
        out.var_types.types = global_types.types;
        out.var_types.datatypes = global_types.datatypes;
        for (const auto& v : head)
            if (!out.var_types.types.count(v)) out.var_types.types[v] = VarType::Literal;
        return out;
    }

    // ASK core; collapses single-path bodies to a bare existence test
    XqExpr ask_body(XqExpr& inner) {
        XqExpr arg = std::move(inner);
        if (arg.kind == XqExpr::Flwor && arg.clauses.size() == 1 &&
            arg.clauses[0].kind == XqClause::For) {
            // single root iteration returning a bare row: exists(source)
            const XqExpr& ret = arg.args[0];
            if (ret.kind == XqExpr::ElemCtor && ret.args.empty())
                arg = arg.clauses[0].exprs[0];
        }
        return xq::fncall("exists", {std::move(arg)});
    }

    // CONSTRUCT template position -> structured term element
    XqExpr template_term(const Term& t, const char* tag) {
        XqExpr cell;
        cell.kind = XqExpr::ElemCtor;
        cell.text = tag;
        auto text_child = [](const std::string& s) {
            XqExpr x;
            x.kind = XqExpr::Text;
            x.text = s;
            return x;
        };
        if (t.kind == Term::Iri) {
            XqExpr uri;
            uri.kind = XqExpr::ElemCtor;
            uri.text = "uri";
            uri.args.push_back(text_child(t.text));
            cell.args.push_back(std::move(uri));
            return cell;
        }
        if (t.kind == Term::Literal) {
            XqExpr lit;
            lit.kind = XqExpr::ElemCtor;
            lit.text = "literal";
            lit.args.push_back(text_child(t.text));
            cell.args.push_back(std::move(lit));
            if (!t.datatype.empty()) {
                XqExpr dt;
                dt.kind = XqExpr::ElemCtor;
                dt.text = "datatype";
                dt.args.push_back(text_child(t.datatype));
                cell.args.push_back(std::move(dt));
            }
            return cell;
        }
        // variable: shape depends on its inferred type
        const std::string child = xq_name(t.text);
        XqExpr child_path;
        child_path.kind = XqExpr::Path;
        child_path.args = {xq::var_ref("iter")};
        XqStep st;
        st.name = child;
        child_path.steps = {st};
        VarType vt = global_types.types.count(t.text) ? global_types.types[t.text]
                                                      : VarType::Literal;
        if (vt == VarType::Literal) {
            XqExpr lit;
            lit.kind = XqExpr::ElemCtor;
            lit.text = "literal";
            lit.args.push_back(xq::fncall("string", {child_path}));
            cell.args.push_back(std::move(lit));
            auto dt = global_types.datatypes.find(t.text);
            if (dt != global_types.datatypes.end() && !dt->second.empty()) {
                XqExpr d;
                d.kind = XqExpr::ElemCtor;
                d.text = "datatype";
                d.args.push_back(text_child(dt->second));
                cell.args.push_back(std::move(d));
            }
        } else if (vt == VarType::Node) {
            XqExpr uri;
            uri.kind = XqExpr::ElemCtor;
            uri.text = "uri";
            uri.args.push_back(xq::fncall(
                "concat", {xq::str_lit(ctx.base_iri + "#"), xq::fncall("string", {child_path})}));
            cell.args.push_back(std::move(uri));
        } else {
            // class/predicate variables carry full IRIs in their row children
            XqExpr uri;
            uri.kind = XqExpr::ElemCtor;
            uri.text = "uri";
            uri.args.push_back(xq::fncall("string", {child_path}));
            cell.args.push_back(std::move(uri));
        }
        return cell;
    }

    XqExpr template_triple(const TriplePattern& t) {
        XqExpr triple;
        triple.kind = XqExpr::ElemCtor;
        triple.text = "triple";
        triple.args.push_back(template_term(t.s, "s"));
        triple.args.push_back(template_term(t.p, "p"));
        triple.args.push_back(template_term(t.o, "o"));
        return triple;
    }
};

} // namespace

VarTypeMap specify_variable_types(const GraphPattern& normalized,
                                  const TranslationContext& ctx) {
    sparql::SparqlQuery dummy;
    Translator tr(ctx, dummy);
    return tr.compute_types(normalized);
}

Translation translate_query(const sparql::SparqlQuery& q, const TranslationContext& ctx) {
    if (!ctx.mappings) throw Error(ErrorCode::INTERNAL, "translation requires a mapping set");
    Translator tr(ctx, q);
    return tr.run();
}

} // namespace xmlsem::translate
