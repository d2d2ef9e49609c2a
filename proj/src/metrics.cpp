#include "cogscope/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace cogscope {

namespace {

void collect_increments(const StructuralNode& node, std::vector<Increment>& out) {
    if (is_structural(node.kind)) {
        out.push_back({node.span, node.kind, 1, node.nesting_depth, 1 + node.nesting_depth});
    } else if (is_flat_increment(node.kind)) {
        out.push_back({node.span, node.kind, 1, 0, 1});
    }
    for (const auto& child : node.children) collect_increments(child, out);
}

int count_decision_points(const StructuralNode& node) {
    int points = 0;
    switch (node.kind) {
        case ConstructKind::If:
        case ConstructKind::ElseIf:
        case ConstructKind::Ternary:
        case ConstructKind::For:
        case ConstructKind::Foreach:
        case ConstructKind::While:
        case ConstructKind::DoWhile:
        case ConstructKind::Catch:
            points = 1;
            break;
        case ConstructKind::Block:
            if (node.detail == "case") points = 1; // 'default' labels do not count
            break;
        case ConstructKind::LogicalOperatorSequence:
            points = node.operator_count;
            break;
        default:
            break;
    }
    for (const auto& child : node.children) points += count_decision_points(child);
    return points;
}

} // namespace

std::vector<Increment> cognitive_increments(const MethodUnit& unit) {
    std::vector<Increment> increments;
    collect_increments(unit.body, increments);
    std::stable_sort(increments.begin(), increments.end(),
                     [](const Increment& a, const Increment& b) {
                         if (a.span.begin_line != b.span.begin_line)
                             return a.span.begin_line < b.span.begin_line;
                         return a.span.begin_column < b.span.begin_column;
                     });
    return increments;
}

int cognitive_complexity(const MethodUnit& unit) {
    int total = 0;
    for (const auto& inc : cognitive_increments(unit)) total += inc.total;
    return total;
}

int cyclomatic_complexity(const MethodUnit& unit) {
    return 1 + count_decision_points(unit.body);
}

int method_loc(const MethodUnit& unit) {
    std::set<int> lines;
    for (const auto& tok : unit.unit_tokens) {
        if (tok.kind == TokenKind::EndOfInput) continue;
        int line = tok.line;
        lines.insert(line);
        for (char c : tok.text)
            if (c == '\n') lines.insert(++line);
    }
    return std::max<int>(1, static_cast<int>(lines.size()));
}

ComplexityReport analyze_source(std::string_view source, const LanguageProfile& profile,
                                const std::string& file_label) {
    ComplexityReport report;
    report.file = file_label;

    ScanResult scanned = scan(source, profile);
    report.diagnostics = scanned.diagnostics;
    report.tolerant = scanned.tolerant;

    BuildResult built = build_structure(scanned.tokens, profile);
    report.diagnostics.insert(report.diagnostics.end(), built.diagnostics.begin(),
                              built.diagnostics.end());
    report.tolerant = report.tolerant || built.tolerant;

    for (const auto& unit : built.units) {
        MethodMetrics m;
        m.method = unit.qualified_name;
        m.signature = unit.parameters_signature;
        m.increments = cognitive_increments(unit);
        m.cognitive = 0;
        for (const auto& inc : m.increments) m.cognitive += inc.total;
        m.cyclomatic = cyclomatic_complexity(unit);
        m.loc = method_loc(unit);
        m.span = unit.span;
        m.tolerant = unit.tolerant || scanned.tolerant;
        report.methods.push_back(std::move(m));
    }
    std::stable_sort(report.methods.begin(), report.methods.end(),
                     [](const MethodMetrics& a, const MethodMetrics& b) {
                         if (a.span.begin_line != b.span.begin_line)
                             return a.span.begin_line < b.span.begin_line;
                         if (a.span.begin_column != b.span.begin_column)
                             return a.span.begin_column < b.span.begin_column;
                         return a.method < b.method;
                     });

    report.file_cognitive_total = 0;
    report.file_max_method_cognitive = 0;
    for (const auto& m : report.methods) {
        report.file_cognitive_total += m.cognitive;
        report.file_max_method_cognitive = std::max(report.file_max_method_cognitive, m.cognitive);
    }
    return report;
}

ComplexityReport analyze_file(const std::filesystem::path& path,
                              std::optional<LanguageId> language_override) {
    const LanguageProfile& profile = detect_language(path, language_override);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return analyze_source(buffer.str(), profile, path.generic_string());
}

int thread_cap_from_env() {
    const char* env = std::getenv("COGSCOPE_THREADS");
    if (!env) return 0;
    int v = std::atoi(env);
    return v > 0 ? v : 1;
}

std::vector<ComplexityReport> analyze_files(const std::vector<std::filesystem::path>& paths,
                                            std::optional<LanguageId> language_override,
                                            int thread_cap) {
    std::vector<ComplexityReport> reports(paths.size());
    if (paths.empty()) return reports;

    if (thread_cap <= 0) thread_cap = thread_cap_from_env();
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t workers = thread_cap > 0 ? static_cast<std::size_t>(thread_cap)
                                         : std::max(1u, hw);
    workers = std::min(workers, paths.size());

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= paths.size()) return;
            try {
                reports[i] = analyze_file(paths[i], language_override);
            } catch (const Error& e) {
                ComplexityReport failed;
                failed.file = paths[i].generic_string();
                failed.tolerant = true;
                failed.diagnostics.push_back({e.code(), e.what(), 0, 0});
                reports[i] = std::move(failed);
            } catch (const std::exception& e) {
                ComplexityReport failed;
                failed.file = paths[i].generic_string();
                failed.tolerant = true;
                failed.diagnostics.push_back({ErrorCode::IoError, e.what(), 0, 0});
                reports[i] = std::move(failed);
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return reports;
}

} // namespace cogscope
