#pragma once

#include <span>
#include <string>
#include <vector>

#include "cogscope/lexer.hpp"

namespace cogscope {

enum class ConstructKind {
    MethodDecl,
    If,
    ElseIf,
    Else,
    Ternary,
    Switch,
    For,
    Foreach,
    While,
    DoWhile,
    Catch,
    GotoLabelJump,
    BreakLabeled,
    ContinueLabeled,
    Lambda,
    LogicalOperatorSequence,
    RecursiveCall,
    Block,
};

const char* construct_kind_name(ConstructKind kind);

// Contributes 1 + nesting depth and raises the nesting of its children.
bool is_structural(ConstructKind kind);
// Contributes a flat 1 regardless of depth.
bool is_flat_increment(ConstructKind kind);
// Raises the nesting of children (structural kinds plus else/else-if/lambda).
bool raises_nesting(ConstructKind kind);

struct SourceSpan {
    int begin_line = 0;
    int begin_column = 0;
    int end_line = 0;
    int end_column = 0;
};

struct StructuralNode {
    ConstructKind kind = ConstructKind::Block;
    std::vector<StructuralNode> children;
    int nesting_depth = 0;
    SourceSpan span{};
    std::string detail;     // operator spelling, callee name, or label role
    int operator_count = 0; // logical sequences: operator occurrences in the run
};

struct MethodUnit {
    std::string qualified_name;
    std::string parameters_signature;
    StructuralNode body; // root kind MethodDecl at nesting depth 0
    std::string source_file;
    SourceSpan span{};
    bool tolerant = false;
    std::vector<Token> unit_tokens;   // header + body tokens of this unit
    std::size_t body_token_offset = 0; // index into unit_tokens where the body starts
};

struct BuildResult {
    std::vector<MethodUnit> units;
    std::vector<ScanDiagnostic> diagnostics;
    bool tolerant = false;
};

// Builds one MethodUnit per method/function in the token stream. Free
// statements outside any method are collected into a synthetic unit named
// "<snippet>". Unbalanced braces are recovered by closing open scopes at
// end of input and marking the affected units tolerant.
BuildResult build_structure(const std::vector<Token>& tokens, const LanguageProfile& profile);

// Finds runs of like binary logical operators in one expression context.
// A change of operator starts a new run; unary negation does not break one.
std::vector<StructuralNode> detect_logical_sequences(std::span<const Token> expression,
                                                     const LanguageProfile& profile);

// Finds direct self-invocation sites of the unit's own method name. Indirect
// recursion across units is intentionally not detected.
std::vector<StructuralNode> detect_recursion(const MethodUnit& unit,
                                             const std::vector<MethodUnit>& file_units);

std::string structure_to_json(const MethodUnit& unit);

} // namespace cogscope
