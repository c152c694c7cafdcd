#include "xmlsem/error.hpp"

namespace xmlsem {

const char* error_code_name(ErrorCode c) {
    switch (c) {
    case ErrorCode::WELL_FORMEDNESS: return "WELL_FORMEDNESS";
    case ErrorCode::UNRESOLVED_REF: return "UNRESOLVED_REF";
    case ErrorCode::UNSUPPORTED_CONSTRUCT: return "UNSUPPORTED_CONSTRUCT";
    case ErrorCode::RECURSION_LIMIT: return "RECURSION_LIMIT";
    case ErrorCode::ID_KIND_CONFLICT: return "ID_KIND_CONFLICT";
    case ErrorCode::UNSUPPORTED_TRIPLE: return "UNSUPPORTED_TRIPLE";
    case ErrorCode::UNKNOWN_CONSTRUCT: return "UNKNOWN_CONSTRUCT";
    case ErrorCode::UNMAPPED_CONSTRUCT: return "UNMAPPED_CONSTRUCT";
    case ErrorCode::INCONSISTENT_INPUT: return "INCONSISTENT_INPUT";
    case ErrorCode::SYNTAX: return "SYNTAX";
    case ErrorCode::UNSUPPORTED_FEATURE: return "UNSUPPORTED_FEATURE";
    case ErrorCode::TYPE_CONFLICT: return "TYPE_CONFLICT";
    case ErrorCode::UNKNOWN_PREDICATE: return "UNKNOWN_PREDICATE";
    case ErrorCode::UNMAPPED_CLASS: return "UNMAPPED_CLASS";
    case ErrorCode::UNMAPPED_PROPERTY: return "UNMAPPED_PROPERTY";
    case ErrorCode::EMPTY_INTERSECTION: return "EMPTY_INTERSECTION";
    case ErrorCode::UNTRANSLATABLE_FILTER: return "UNTRANSLATABLE_FILTER";
    case ErrorCode::UNSUPPORTED_FORM: return "UNSUPPORTED_FORM";
    case ErrorCode::UNBOUND_VARIABLE: return "UNBOUND_VARIABLE";
    case ErrorCode::RUNTIME_TYPE: return "RUNTIME_TYPE";
    case ErrorCode::MISSING_SOURCE: return "MISSING_SOURCE";
    case ErrorCode::SHAPE: return "SHAPE";
    case ErrorCode::UNMATCHED_NODE: return "UNMATCHED_NODE";
    case ErrorCode::INTERNAL: return "INTERNAL";
    }
    return "INTERNAL";
}

ErrorPhase error_phase(ErrorCode c) {
    switch (c) {
    case ErrorCode::WELL_FORMEDNESS:
    case ErrorCode::UNRESOLVED_REF:
    case ErrorCode::UNSUPPORTED_CONSTRUCT:
    case ErrorCode::RECURSION_LIMIT:
    case ErrorCode::ID_KIND_CONFLICT:
    case ErrorCode::UNSUPPORTED_TRIPLE:
    case ErrorCode::UNKNOWN_CONSTRUCT:
    case ErrorCode::INCONSISTENT_INPUT:
        return ErrorPhase::Schema;
    case ErrorCode::SYNTAX:
    case ErrorCode::UNSUPPORTED_FEATURE:
        return ErrorPhase::QuerySyntax;
    case ErrorCode::TYPE_CONFLICT:
    case ErrorCode::UNKNOWN_PREDICATE:
    case ErrorCode::UNMAPPED_CLASS:
    case ErrorCode::UNMAPPED_PROPERTY:
    case ErrorCode::EMPTY_INTERSECTION:
    case ErrorCode::UNTRANSLATABLE_FILTER:
    case ErrorCode::UNSUPPORTED_FORM:
    case ErrorCode::UNMAPPED_CONSTRUCT:
        return ErrorPhase::Translation;
    default:
        return ErrorPhase::Runtime;
    }
}

} // namespace xmlsem
