#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "nkt/errors.hpp"
#include "nkt/theory.hpp"

namespace nkt {

/// Location of a diagnostic: 1-based line/column and a byte range [begin, end).
struct SourceSpan {
    int line = 1;
    int column = 1;
    std::size_t begin = 0;
    std::size_t end = 0;

    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class DiagnosticKind { Lexical, Syntax, Semantic };
const char* to_string(DiagnosticKind k);

struct ParseError : Error {
    ParseError(DiagnosticKind k, SourceSpan s, const std::string& message);
    DiagnosticKind kind;
    SourceSpan span;
    std::string message;  ///< without the location prefix
};

/// Parses and validates a theory file. Every failure is a ParseError.
Theory parse_theory(std::string_view text);

/// Parses one expression against a theory's declarations.
GradedPolynomial parse_expression(std::string_view text, const Theory& theory);

/// Parses a rendered operator (`role ... { ... }`, optionally prefixed by `operator NAME`).
LinearJetOperator parse_operator(std::string_view text, const Theory& theory);

std::string render(const Theory& theory);
std::string render(const LinearJetOperator& op, const RenderOptions& opts = {});

}  // namespace nkt
