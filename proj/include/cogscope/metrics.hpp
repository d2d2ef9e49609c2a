#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cogscope/structure.hpp"

namespace cogscope {

struct Increment {
    SourceSpan span{};
    ConstructKind kind = ConstructKind::Block;
    int base = 0;            // 0 or 1
    int nesting_penalty = 0; // node nesting depth for structural kinds
    int total = 0;           // base + nesting_penalty
};

struct MethodMetrics {
    std::string method;
    std::string signature;
    int cognitive = 0;  // >= 0
    int cyclomatic = 1; // >= 1
    int loc = 1;        // non-blank, non-comment lines
    std::vector<Increment> increments;
    SourceSpan span{};
    bool tolerant = false;
};

struct ComplexityReport {
    std::string file;
    std::vector<MethodMetrics> methods; // ordered by span
    int file_cognitive_total = 0;
    int file_max_method_cognitive = 0;
    std::vector<ScanDiagnostic> diagnostics;
    bool tolerant = false;
};

// Sum over nodes: structural kinds contribute 1 + nesting depth, flat kinds
// contribute 1, neutral and nesting-only kinds contribute 0.
int cognitive_complexity(const MethodUnit& unit);
std::vector<Increment> cognitive_increments(const MethodUnit& unit);

// 1 + decision points (if, else-if, ternary, case labels, loops, catch
// clauses and every binary logical operator occurrence).
int cyclomatic_complexity(const MethodUnit& unit);

int method_loc(const MethodUnit& unit);

ComplexityReport analyze_source(std::string_view source, const LanguageProfile& profile,
                                const std::string& file_label);

ComplexityReport analyze_file(const std::filesystem::path& path,
                              std::optional<LanguageId> language_override = std::nullopt);

// Analyzes many files with a worker pool; result order matches input order.
// thread_cap <= 0 reads the COGSCOPE_THREADS environment variable.
std::vector<ComplexityReport> analyze_files(const std::vector<std::filesystem::path>& paths,
                                            std::optional<LanguageId> language_override,
                                            int thread_cap = 0);

} // namespace cogscope
