#pragma once

#include <stdexcept>
#include <string>

namespace xmlsem {

// Every failure in the toolkit carries one of these codes so that callers
// (and the command-line driver) can map it to a stable exit status.
enum class ErrorCode {
    // xml / schema layer
    WELL_FORMEDNESS,
    UNRESOLVED_REF,
    UNSUPPORTED_CONSTRUCT,
    RECURSION_LIMIT,
    // ontology model
    ID_KIND_CONFLICT,
    UNSUPPORTED_TRIPLE,
    // mapping layer
    UNKNOWN_CONSTRUCT,
    UNMAPPED_CONSTRUCT,
    INCONSISTENT_INPUT,
    // query frontend
    SYNTAX,
    UNSUPPORTED_FEATURE,
    // translator
    TYPE_CONFLICT,
    UNKNOWN_PREDICATE,
    UNMAPPED_CLASS,
    UNMAPPED_PROPERTY,
    EMPTY_INTERSECTION,
    UNTRANSLATABLE_FILTER,
    UNSUPPORTED_FORM,
    // program model / evaluators
    UNBOUND_VARIABLE,
    RUNTIME_TYPE,
    MISSING_SOURCE,
    SHAPE,
    UNMATCHED_NODE,
    // anything else
    INTERNAL,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Phase classification used by the command-line driver to pick exit codes.
enum class ErrorPhase { Schema, QuerySyntax, Translation, Runtime };

ErrorPhase error_phase(ErrorCode c);

} // namespace xmlsem
