#include "common/properties.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cogscope/correlation.hpp"
#include "cogscope/meta.hpp"
#include "cogscope/metrics.hpp"
#include "cogscope/report.hpp"
#include "cogscope/study_data.hpp"

namespace cogprops {

using namespace cogscope;
namespace fs = std::filesystem;

namespace {

int ri(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double rd(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& options) {
    return options[static_cast<std::size_t>(ri(rng, 0, static_cast<int>(options.size()) - 1))];
}

std::vector<fs::path> corpus_files() {
    std::vector<fs::path> files;
    for (const auto& entry :
         fs::directory_iterator(std::string(COGSCOPE_TEST_DATA_DIR) + "/corpus"))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// ---- random java generator ------------------------------------------------

struct JavaGen {
    std::mt19937_64& rng;
    int fresh_counter = 0;

    explicit JavaGen(std::mt19937_64& r) : rng(r) {}

    std::string fresh() { return "w" + std::to_string(fresh_counter++); }

    std::string condition() {
        switch (ri(rng, 0, 4)) {
            case 0: return "p";
            case 1: return "a > " + std::to_string(ri(rng, 0, 9));
            case 2: return "p && q";
            case 3: return "p || q && a > 1";
            default: return "!p && q";
        }
    }

    std::string indent(int depth) { return std::string(static_cast<std::size_t>(depth) * 4, ' '); }

    std::string block(int depth, int& budget) {
        std::string out = "{\n" + statements(depth + 1, budget) + indent(depth) + "}";
        return out;
    }

    std::string statement(int depth, int& budget) {
        --budget;
        std::string pad = indent(depth);
        int deep_limit = depth >= 4 ? 3 : 11;
        switch (ri(rng, 0, deep_limit)) {
            case 0: return pad + "int " + fresh() + " = " + std::to_string(ri(rng, 0, 99)) + ";\n";
            case 1: return pad + "f(" + fresh() + ");\n";
            case 2: return pad + "a = " + condition() + " ? 1 : 2;\n";
            case 3: return pad + "q = " + condition() + ";\n";
            case 4: {
                std::string out = pad + "if (" + condition() + ") " + block(depth, budget);
                if (budget > 0 && ri(rng, 0, 2) == 0)
                    out += " else if (" + condition() + ") " + block(depth, budget);
                if (budget > 0 && ri(rng, 0, 1) == 0) out += " else " + block(depth, budget);
                return out + "\n";
            }
            case 5: {
                std::string v = fresh();
                return pad + "for (int " + v + " = 0; " + v + " < " +
                       std::to_string(ri(rng, 2, 9)) + "; " + v + "++) " + block(depth, budget) +
                       "\n";
            }
            case 6: return pad + "while (" + condition() + ") " + block(depth, budget) + "\n";
            case 7: return pad + "do " + block(depth, budget) + " while (" + condition() + ");\n";
            case 8: {
                std::string out = pad + "switch (a) {\n";
                int cases = ri(rng, 1, 3);
                for (int c = 0; c < cases; ++c) {
                    out += indent(depth + 1) + "case " + std::to_string(c) + ":\n";
                    out += statements(depth + 2, budget);
                    out += indent(depth + 2) + "break;\n";
                }
                if (ri(rng, 0, 1) == 0)
                    out += indent(depth + 1) + "default:\n" + indent(depth + 2) + "break;\n";
                return out + pad + "}\n";
            }
            case 9:
                return pad + "try " + block(depth, budget) + " catch (Exception e) " +
                       block(depth, budget) + "\n";
            case 10:
                return pad + "Runnable " + fresh() + " = () -> " + block(depth, budget) + ";\n";
            default: {
                std::string label = "lp" + std::to_string(fresh_counter++);
                return pad + label + ":\n" + pad + "while (" + condition() + ") {\n" +
                       indent(depth + 1) + "if (" + condition() + ") {\n" +
                       indent(depth + 2) + "break " + label + ";\n" + indent(depth + 1) + "}\n" +
                       pad + "}\n";
            }
        }
    }

    std::string statements(int depth, int& budget) {
        std::string out;
        int count = ri(rng, 1, 3);
        for (int i = 0; i < count && budget > 0; ++i) out += statement(depth, budget);
        return out;
    }

    std::string method(int max_depth) {
        (void)max_depth;
        int budget = ri(rng, 4, 18);
        return "int m(int a, boolean p, boolean q) {\n" + statements(1, budget) +
               "    return a;\n}\n";
    }
};

MethodUnit build_first_unit(const std::string& source, LanguageId lang = LanguageId::Java) {
    const auto& profile = profile_for(lang);
    auto built = build_structure(scan(source, profile).tokens, profile);
    if (built.units.empty()) return MethodUnit{};
    return std::move(built.units.front());
}

void flatten_tree(const StructuralNode& node,
                  std::vector<std::pair<ConstructKind, int>>& out, bool include_neutral) {
    bool neutral =
        node.kind == ConstructKind::Block || node.kind == ConstructKind::MethodDecl;
    if (!neutral || include_neutral) out.emplace_back(node.kind, node.nesting_depth);
    for (const auto& child : node.children) flatten_tree(child, out, include_neutral);
}

std::vector<std::pair<ConstructKind, int>> flat_shape(const MethodUnit& unit) {
    std::vector<std::pair<ConstructKind, int>> out;
    flatten_tree(unit.body, out, false);
    return out;
}

void collect_kinds(const StructuralNode& node, std::vector<ConstructKind>& out) {
    out.push_back(node.kind);
    out.push_back(static_cast<ConstructKind>(-1)); // sentinel marking descent
    for (const auto& child : node.children) collect_kinds(child, out);
    out.push_back(static_cast<ConstructKind>(-2)); // sentinel marking ascent
}

bool depth_invariant_holds(const StructuralNode& node, std::string& detail) {
    int child_depth = node.nesting_depth + (raises_nesting(node.kind) ? 1 : 0);
    for (const auto& child : node.children) {
        if (child.nesting_depth != child_depth) {
            detail = std::string("child of ") + construct_kind_name(node.kind) + " at depth " +
                     std::to_string(node.nesting_depth) + " has depth " +
                     std::to_string(child.nesting_depth) + ", expected " +
                     std::to_string(child_depth);
            return false;
        }
        if (!depth_invariant_holds(child, detail)) return false;
    }
    return true;
}

// ---- scanner properties -----------------------------------------------

Outcome prop_idempotent_lexing() {
    Outcome outcome;
    std::mt19937_64 rng(101);
    std::vector<std::string> sources;
    for (const auto& path : corpus_files()) {
        if (path.extension() == ".js" && slurp(path).find('`') != std::string::npos)
            continue; // template chunks are not standalone-scannable
        sources.push_back(slurp(path));
    }
    for (int i = 0; i < 170; ++i) {
        JavaGen gen(rng);
        sources.push_back(gen.method(3));
    }
    for (const auto& src : sources) {
        const auto& profile = profile_for(LanguageId::Java);
        auto first = scan(src, profile);
        std::string joined;
        for (const auto& t : first.tokens) {
            if (t.kind == TokenKind::EndOfInput) continue;
            joined += t.text;
            joined += ' ';
        }
        auto second = scan(joined, profile);
        bool same = first.tokens.size() == second.tokens.size();
        if (same)
            for (std::size_t i = 0; i < first.tokens.size(); ++i)
                if (first.tokens[i].kind != second.tokens[i].kind) same = false;
        if (!same) {
            outcome.passed = false;
            outcome.detail = "rescan diverged on a source of " +
                             std::to_string(src.size()) + " bytes";
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_mutation_token_invariance() {
    Outcome outcome;
    std::mt19937_64 rng(202);
    auto files = corpus_files();
    for (int iter = 0; iter < 240; ++iter) {
        const auto& path = files[static_cast<std::size_t>(iter) % files.size()];
        const auto& profile = detect_language(path);
        std::string src = slurp(path);
        auto original = scan(src, profile);
        std::string mutated = mutate_source(src, original.tokens, rng);
        auto rescanned = scan(mutated, profile);
        bool same = original.tokens.size() == rescanned.tokens.size();
        if (same)
            for (std::size_t i = 0; i < original.tokens.size(); ++i)
                if (original.tokens[i].kind != rescanned.tokens[i].kind ||
                    original.tokens[i].text != rescanned.tokens[i].text)
                    same = false;
        if (!same) {
            outcome.passed = false;
            outcome.detail = "token stream changed for " + path.filename().string();
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_scanner_totality() {
    Outcome outcome;
    std::mt19937_64 rng(303);
    const std::string alphabet =
        "abcXYZ019 \t\n(){}[];,.+-*/%<>=!&|?:'\"`\\#@$_^~\xc3\xa9\xe2\x82\xac";
    const std::vector<LanguageId> langs = {LanguageId::Java, LanguageId::C, LanguageId::Cpp,
                                           LanguageId::CSharp, LanguageId::JavaScript};
    for (int i = 0; i < 250; ++i) {
        std::string soup;
        int len = ri(rng, 0, 400);
        for (int j = 0; j < len; ++j)
            soup += alphabet[static_cast<std::size_t>(
                ri(rng, 0, static_cast<int>(alphabet.size()) - 1))];
        for (auto lang : langs) {
            auto scanned = scan(soup, profile_for(lang));
            if (scanned.tokens.empty() ||
                scanned.tokens.back().kind != TokenKind::EndOfInput) {
                outcome.passed = false;
                outcome.detail = "missing end-of-input token";
                return outcome;
            }
            auto built = build_structure(scanned.tokens, profile_for(lang));
            for (const auto& unit : built.units) {
                if (cognitive_complexity(unit) < 0 || cyclomatic_complexity(unit) < 1) {
                    outcome.passed = false;
                    outcome.detail = "metric out of range on fuzz input";
                    return outcome;
                }
            }
        }
        ++outcome.cases;
    }
    return outcome;
}

// ---- structure properties -----------------------------------------------

Outcome prop_depth_monotonicity() {
    Outcome outcome;
    std::mt19937_64 rng(404);
    for (int i = 0; i < 220; ++i) {
        JavaGen gen(rng);
        auto unit = build_first_unit(gen.method(3));
        std::string detail;
        if (!depth_invariant_holds(unit.body, detail)) {
            outcome.passed = false;
            outcome.detail = detail;
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_wrap_in_if() {
    Outcome outcome;
    std::mt19937_64 rng(505);
    for (int i = 0; i < 220; ++i) {
        JavaGen gen(rng);
        int budget = ri(rng, 3, 14);
        std::string body = gen.statements(2, budget);
        std::string plain = "int m(int a, boolean p, boolean q) {\n" + body + "}\n";
        std::string wrapped =
            "int m(int a, boolean p, boolean q) {\nif (p) {\n" + body + "}\n}\n";
        auto flat_plain = flat_shape(build_first_unit(plain));
        auto flat_wrapped = flat_shape(build_first_unit(wrapped));

        bool ok = flat_wrapped.size() == flat_plain.size() + 1 &&
                  flat_wrapped[0] == std::pair{ConstructKind::If, 0};
        if (ok)
            for (std::size_t k = 0; k < flat_plain.size(); ++k)
                if (flat_wrapped[k + 1].first != flat_plain[k].first ||
                    flat_wrapped[k + 1].second != flat_plain[k].second + 1)
                    ok = false;
        if (!ok) {
            outcome.passed = false;
            outcome.detail = "wrapping changed more than depths (case " + std::to_string(i) + ")";
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_rename_invariance() {
    Outcome outcome;
    std::mt19937_64 rng(606);
    for (int i = 0; i < 220; ++i) {
        JavaGen gen(rng);
        std::string src = gen.method(3);
        const auto& profile = profile_for(LanguageId::Java);
        auto scanned = scan(src, profile);

        std::map<std::string, std::string> renames;
        std::string mutated;
        std::size_t prev_end = 0;
        for (const auto& t : scanned.tokens) {
            if (t.kind == TokenKind::EndOfInput) break;
            mutated += src.substr(prev_end, t.begin - prev_end);
            if (t.kind == TokenKind::Identifier) {
                auto it = renames.find(t.text);
                if (it == renames.end())
                    it = renames.emplace(t.text, "rn" + std::to_string(renames.size())).first;
                mutated += it->second;
            } else {
                mutated += t.text;
            }
            prev_end = t.end;
        }
        mutated += src.substr(prev_end);

        std::vector<ConstructKind> before, after;
        collect_kinds(build_first_unit(src).body, before);
        collect_kinds(build_first_unit(mutated).body, after);
        if (before != after) {
            outcome.passed = false;
            outcome.detail = "tree shape changed under renaming (case " + std::to_string(i) + ")";
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_snippet_wrapping() {
    Outcome outcome;
    for (const char* src : {"x = 1;", "int y = 2;", "f(a, b);", "x = 1;\ny = x + 2;\n"}) {
        const auto& profile = profile_for(LanguageId::Java);
        auto built = build_structure(scan(src, profile).tokens, profile);
        if (built.units.size() != 1 || built.units[0].qualified_name != "<snippet>" ||
            !flat_shape(built.units[0]).empty()) {
            outcome.passed = false;
            outcome.detail = std::string("snippet wrapping failed for: ") + src;
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

// ---- metrics properties -----------------------------------------------

Outcome prop_metric_ranges() {
    Outcome outcome;
    std::mt19937_64 rng(707);
    for (int i = 0; i < 220; ++i) {
        JavaGen gen(rng);
        auto unit = build_first_unit(gen.method(4));
        if (cognitive_complexity(unit) < 0 || cyclomatic_complexity(unit) < 1) {
            outcome.passed = false;
            outcome.detail = "metric out of range";
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_formatting_invariance() {
    Outcome outcome;
    std::mt19937_64 rng(808);
    for (const auto& path : corpus_files()) {
        const auto& profile = detect_language(path);
        std::string src = slurp(path);
        auto baseline = analyze_source(src, profile, "base");
        auto tokens = scan(src, profile).tokens;
        for (int i = 0; i < 100; ++i) {
            std::string mutated = mutate_source(src, tokens, rng);
            auto report = analyze_source(mutated, profile, "mut");
            bool same = report.methods.size() == baseline.methods.size();
            if (same)
                for (std::size_t k = 0; k < report.methods.size(); ++k)
                    if (report.methods[k].cognitive != baseline.methods[k].cognitive ||
                        report.methods[k].cyclomatic != baseline.methods[k].cyclomatic)
                        same = false;
            if (!same) {
                outcome.passed = false;
                outcome.detail = "metrics changed under mutation of " + path.filename().string();
                return outcome;
            }
            ++outcome.cases;
        }
    }
    return outcome;
}

Outcome prop_monotone_nesting() {
    Outcome outcome;
    std::mt19937_64 rng(909);
    const std::vector<std::string> constructs = {
        "while (p) { a = 1; }",
        "if (p && q) { f(a); }",
        "for (int i = 0; i < 3; i++) { a += i; }",
        "do { a--; } while (p);",
        "a = p ? 1 : 2;",
        "switch (a) { case 1: break; default: break; }",
    };
    for (int i = 0; i < 220; ++i) {
        const std::string& construct = pick(rng, constructs);
        int base_depth = ri(rng, 0, 3);
        std::string prefix, suffix;
        for (int d = 0; d < base_depth; ++d) {
            prefix += "while (q) { ";
            suffix += " }";
        }
        std::string nested = "int m(int a, boolean p, boolean q) { " + prefix +
                             "if (q) { " + construct + " }" + suffix + " }";
        std::string sibling = "int m(int a, boolean p, boolean q) { " + prefix +
                              "if (q) { } " + construct + suffix + " }";
        int cog_nested = cognitive_complexity(build_first_unit(nested));
        int cog_sibling = cognitive_complexity(build_first_unit(sibling));
        if (cog_nested != cog_sibling + 1) {
            outcome.passed = false;
            outcome.detail = "nested " + std::to_string(cog_nested) + " vs sibling " +
                             std::to_string(cog_sibling) + " for: " + construct;
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_flat_vs_nested_chains() {
    Outcome outcome;
    for (int k = 1; k <= 6; ++k) {
        std::string flat = "void m() { ";
        for (int i = 0; i < k; ++i) flat += "if (c" + std::to_string(i) + ") { } ";
        flat += "}";
        std::string nested = "void m() { ";
        for (int i = 0; i < k; ++i) nested += "if (c" + std::to_string(i) + ") { ";
        nested += std::string(static_cast<std::size_t>(k), '}') + " }";

        auto flat_unit = build_first_unit(flat);
        auto nested_unit = build_first_unit(nested);
        if (cognitive_complexity(flat_unit) != k ||
            cognitive_complexity(nested_unit) != k * (k + 1) / 2 ||
            cyclomatic_complexity(flat_unit) != k + 1 ||
            cyclomatic_complexity(nested_unit) != k + 1) {
            outcome.passed = false;
            outcome.detail = "chain mismatch at k=" + std::to_string(k);
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_shorthand_rule() {
    Outcome outcome;
    std::mt19937_64 rng(1010);
    for (int i = 0; i < 200; ++i) {
        JavaGen gen(rng);
        int budget = ri(rng, 3, 10);
        std::string body = gen.statements(1, budget);
        const auto& profile = profile_for(LanguageId::Java);
        auto loose = build_structure(scan(body, profile).tokens, profile);
        auto wrapped = build_structure(scan("void w() {\n" + body + "}\n", profile).tokens,
                                       profile);
        int loose_cog = 0;
        for (const auto& u : loose.units) loose_cog += cognitive_complexity(u);
        int wrapped_cog = 0;
        for (const auto& u : wrapped.units) wrapped_cog += cognitive_complexity(u);
        if (loose_cog != wrapped_cog) {
            outcome.passed = false;
            outcome.detail = "method wrapper changed cognitive from " +
                             std::to_string(loose_cog) + " to " + std::to_string(wrapped_cog);
            return outcome;
        }
        ++outcome.cases;
    }
    // null-coalescing adds nothing
    auto with = build_first_unit("class C { int F(int? x, int y) { return x ?? y ?? 3; } }",
                                 LanguageId::CSharp);
    auto without = build_first_unit("class C { int F(int? x, int y) { return y; } }",
                                    LanguageId::CSharp);
    if (cognitive_complexity(with) != cognitive_complexity(without)) {
        outcome.passed = false;
        outcome.detail = "null-coalescing operator incremented the metric";
    }
    ++outcome.cases;
    return outcome;
}

// ---- study-data properties -----------------------------------------------

std::vector<SnippetAggregate> random_aggregates(std::mt19937_64& rng, int n) {
    std::vector<SnippetAggregate> aggs;
    for (int i = 0; i < n; ++i) {
        SnippetAggregate a;
        a.dataset_id = "d";
        a.snippet_id = "s" + std::to_string(100 + i);
        a.cognitive_complexity = ri(rng, 0, 15);
        double t = rd(rng, 5.0, 300.0);
        double c = rd(rng, 0.05, 1.0);
        a.stats[VariableKind::Time] = {5, t, t};
        a.stats[VariableKind::Correctness] = {5, c, c};
        aggs.push_back(a);
    }
    return aggs;
}

Outcome prop_composite_range() {
    Outcome outcome;
    std::mt19937_64 rng(1111);
    for (int i = 0; i < 220; ++i) {
        auto aggs = random_aggregates(rng, ri(rng, 2, 20));
        double cmax = 0.0;
        for (const auto& a : aggs)
            cmax = std::max(cmax, a.stats.at(VariableKind::Correctness).mean);
        auto out = composite_timed_correctness(aggs);
        for (std::size_t k = 0; k < out.size(); ++k) {
            double composite = out[k].second;
            double c = aggs[k].stats.at(VariableKind::Correctness).mean;
            bool at_max = c == cmax;
            if (composite < 0.0 || composite >= 1.0 || (at_max != (composite == 0.0))) {
                outcome.passed = false;
                outcome.detail = "composite " + std::to_string(composite) + " out of contract";
                return outcome;
            }
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_composite_scale_invariance() {
    Outcome outcome;
    std::mt19937_64 rng(1212);
    for (int i = 0; i < 220; ++i) {
        auto aggs = random_aggregates(rng, ri(rng, 2, 15));
        auto base = composite_timed_correctness(aggs);
        double scale = rd(rng, 0.001, 1000.0);
        auto scaled_aggs = aggs;
        for (auto& a : scaled_aggs) {
            auto& t = a.stats[VariableKind::Time];
            t.mean *= scale;
            t.median *= scale;
        }
        auto scaled = composite_timed_correctness(scaled_aggs);
        for (std::size_t k = 0; k < base.size(); ++k) {
            if (std::fabs(base[k].second - scaled[k].second) > 1e-12) {
                outcome.passed = false;
                outcome.detail = "composite moved under time rescaling";
                return outcome;
            }
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_aggregate_permutation() {
    Outcome outcome;
    std::mt19937_64 rng(1313);
    for (int i = 0; i < 220; ++i) {
        std::vector<Measurement> rows;
        SnippetMetricIndex index;
        int snippets = ri(rng, 1, 6);
        for (int s = 0; s < snippets; ++s) {
            std::string sid = "s" + std::to_string(s);
            index["d"][sid] = ri(rng, 0, 9);
            int participants = ri(rng, 1, 9);
            for (int p = 0; p < participants; ++p) {
                rows.push_back({"d", sid, "p" + std::to_string(p), VariableKind::Time,
                                rd(rng, 1.0, 50.0)});
                rows.push_back({"d", sid, "p" + std::to_string(p), VariableKind::Rating,
                                static_cast<double>(ri(rng, 1, 5))});
            }
        }
        auto base = aggregate(rows, index);
        std::shuffle(rows.begin(), rows.end(), rng);
        auto shuffled = aggregate(rows, index);
        bool same = base.aggregates.size() == shuffled.aggregates.size();
        if (same)
            for (std::size_t k = 0; k < base.aggregates.size(); ++k) {
                const auto& x = base.aggregates[k];
                const auto& y = shuffled.aggregates[k];
                if (x.snippet_id != y.snippet_id) same = false;
                for (const auto& [kind, stats] : x.stats) {
                    const auto& other = y.stats.at(kind);
                    if (stats.mean != other.mean || stats.median != other.median ||
                        stats.n != other.n)
                        same = false;
                }
            }
        if (!same) {
            outcome.passed = false;
            outcome.detail = "aggregate changed under row shuffle";
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

// ---- correlation properties -----------------------------------------------

std::pair<std::vector<double>, std::vector<double>> random_vectors(std::mt19937_64& rng) {
    int n = ri(rng, 5, 40);
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        x[static_cast<std::size_t>(i)] = ri(rng, 0, 20);
        y[static_cast<std::size_t>(i)] =
            0.8 * x[static_cast<std::size_t>(i)] + rd(rng, -10.0, 10.0);
    }
    // ensure non-constant
    x[0] += 1.0;
    if (x[0] == x[1]) x[0] += 1.0;
    return {x, y};
}

Outcome prop_correlation_ranges() {
    Outcome outcome;
    std::mt19937_64 rng(1414);
    for (int i = 0; i < 220; ++i) {
        auto [x, y] = random_vectors(rng);
        auto p = pearson(x, y);
        auto k = kendall_tau_b(x, y);
        if (p.coefficient < -1.0 || p.coefficient > 1.0 || p.p_value < 0.0 ||
            p.p_value > 1.0 || k.coefficient < -1.0 || k.coefficient > 1.0 ||
            k.p_value < 0.0 || k.p_value > 1.0) {
            outcome.passed = false;
            outcome.detail = "coefficient or p outside its range";
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_pearson_affine_invariance() {
    Outcome outcome;
    std::mt19937_64 rng(1515);
    for (int i = 0; i < 220; ++i) {
        auto [x, y] = random_vectors(rng);
        double a = rd(rng, 0.2, 4.0) * (ri(rng, 0, 1) == 0 ? 1.0 : -1.0);
        double b = rd(rng, -20.0, 20.0);
        std::vector<double> tx(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) tx[k] = a * x[k] + b;
        double base = pearson(x, y).coefficient;
        double transformed = pearson(tx, y).coefficient;
        double expected = (a > 0 ? 1.0 : -1.0) * base;
        if (std::fabs(transformed - expected) > 1e-12) {
            outcome.passed = false;
            outcome.detail = "affine invariance violated by " +
                             std::to_string(std::fabs(transformed - expected));
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_kendall_monotone_invariance() {
    Outcome outcome;
    std::mt19937_64 rng(1616);
    for (int i = 0; i < 220; ++i) {
        auto [x, y] = random_vectors(rng);
        std::vector<double> fx(x.size());
        int which = ri(rng, 0, 2);
        double a = rd(rng, 0.5, 3.0);
        double b = rd(rng, -10.0, 10.0);
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (which == 0) fx[k] = a * x[k] + b;
            else if (which == 1) fx[k] = x[k] * x[k] * x[k];
            else fx[k] = 2.0 * x[k] + 100.0;
        }
        auto base = kendall_tau_b(x, y);
        auto mapped = kendall_tau_b(fx, y);
        if (base.coefficient != mapped.coefficient || base.p_value != mapped.p_value) {
            outcome.passed = false;
            outcome.detail = "kendall changed under a strictly increasing map";
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_correlation_symmetry() {
    Outcome outcome;
    std::mt19937_64 rng(1717);
    for (int i = 0; i < 220; ++i) {
        auto [x, y] = random_vectors(rng);
        if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) continue;
        auto p1 = pearson(x, y);
        auto p2 = pearson(y, x);
        auto k1 = kendall_tau_b(x, y);
        auto k2 = kendall_tau_b(y, x);
        if (std::fabs(p1.coefficient - p2.coefficient) > 1e-14 ||
            std::fabs(k1.coefficient - k2.coefficient) > 1e-14 ||
            std::fabs(p1.p_value - p2.p_value) > 1e-12 ||
            std::fabs(k1.p_value - k2.p_value) > 1e-12) {
            outcome.passed = false;
            outcome.detail = "corr(x,y) != corr(y,x)";
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_fisher_round_trip() {
    Outcome outcome;
    std::mt19937_64 rng(1818);
    for (int i = 0; i < 220; ++i) {
        double r = rd(rng, -0.999, 0.999);
        double back = std::tanh(std::atanh(r));
        if (std::fabs(back - r) > 1e-12) {
            outcome.passed = false;
            outcome.detail = "round trip drifted at r=" + std::to_string(r);
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

// ---- meta properties -----------------------------------------------

std::vector<PooledStudyEffect> random_studies(std::mt19937_64& rng, int k) {
    std::vector<PooledStudyEffect> studies;
    for (int i = 0; i < k; ++i) {
        PooledStudyEffect s;
        char id[24];
        std::snprintf(id, sizeof(id), "d%02d", i);
        s.dataset_id = id;
        s.variable = "time";
        s.z = rd(rng, -1.0, 1.0);
        s.var_z = rd(rng, 0.01, 0.3);
        s.n = ri(rng, 5, 50);
        studies.push_back(s);
    }
    return studies;
}

Outcome prop_meta_weights_normalized() {
    Outcome outcome;
    std::mt19937_64 rng(1919);
    for (int i = 0; i < 220; ++i) {
        auto studies = random_studies(rng, ri(rng, 2, 10));
        auto result = random_effects(studies);
        double sum = 0.0;
        for (const auto& w : result.weights) sum += w.weight;
        if (std::fabs(sum - 1.0) > 1e-9) {
            outcome.passed = false;
            outcome.detail = "weights sum to " + std::to_string(sum);
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_meta_boundedness() {
    Outcome outcome;
    std::mt19937_64 rng(2020);
    for (int i = 0; i < 220; ++i) {
        auto studies = random_studies(rng, ri(rng, 2, 10));
        auto result = random_effects(studies);
        double lo = 1.0, hi = -1.0;
        for (const auto& s : studies) {
            lo = std::min(lo, std::tanh(s.z));
            hi = std::max(hi, std::tanh(s.z));
        }
        if (result.summary_r < lo - 1e-12 || result.summary_r > hi + 1e-12) {
            outcome.passed = false;
            outcome.detail = "summary left the convex hull of inputs";
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_meta_permutation_invariance() {
    Outcome outcome;
    std::mt19937_64 rng(2121);
    for (int i = 0; i < 220; ++i) {
        auto studies = random_studies(rng, ri(rng, 2, 10));
        auto base = random_effects(studies);
        std::shuffle(studies.begin(), studies.end(), rng);
        auto shuffled = random_effects(studies);
        if (base.summary_z != shuffled.summary_z || base.tau2 != shuffled.tau2 ||
            base.q != shuffled.q || base.i2 != shuffled.i2 ||
            base.ci_low_r != shuffled.ci_low_r || base.ci_high_r != shuffled.ci_high_r) {
            outcome.passed = false;
            outcome.detail = "meta result changed under input permutation";
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_meta_degenerate_reduction() {
    Outcome outcome;
    std::mt19937_64 rng(2222);
    for (int i = 0; i < 220; ++i) {
        int k = ri(rng, 2, 10);
        double common = rd(rng, -0.9, 0.9);
        auto studies = random_studies(rng, k);
        for (auto& s : studies) s.z = common;
        auto result = random_effects(studies);

        // fixed-effect pooling by hand
        double sw = 0.0, swz = 0.0;
        for (const auto& s : studies) {
            sw += 1.0 / s.var_z;
            swz += s.z / s.var_z;
        }
        double fixed = swz / sw;
        if (result.tau2 != 0.0 || std::fabs(result.summary_z - fixed) > 1e-12) {
            outcome.passed = false;
            outcome.detail = "identical effects did not reduce to fixed-effect pooling";
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_meta_self_consistency() {
    Outcome outcome;
    std::mt19937_64 rng(2323);
    for (int i = 0; i < 220; ++i) {
        // Homogeneous inputs (tau2 = 0): adding a study equal to the current
        // summary must leave the summary in place.
        int k = ri(rng, 2, 8);
        double common = rd(rng, -0.8, 0.8);
        auto studies = random_studies(rng, k);
        for (auto& s : studies) s.z = common;
        auto before = random_effects(studies);

        PooledStudyEffect extra;
        extra.dataset_id = "zz-extra";
        extra.variable = "time";
        extra.z = before.summary_z;
        extra.var_z = rd(rng, 0.01, 0.3);
        extra.n = 20;
        studies.push_back(extra);
        auto after = random_effects(studies);
        if (std::fabs(after.summary_z - before.summary_z) > 1e-9) {
            outcome.passed = false;
            outcome.detail = "summary moved by " +
                             std::to_string(std::fabs(after.summary_z - before.summary_z));
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

// ---- reporting properties -----------------------------------------------

Outcome prop_report_determinism() {
    Outcome outcome;
    std::mt19937_64 rng(2424);
    for (int i = 0; i < 60; ++i) {
        auto studies = random_studies(rng, ri(rng, 2, 8));
        auto meta = random_effects(studies);
        auto spec = make_forest_spec(meta, studies);
        if (render_forest_svg(spec) != render_forest_svg(spec) ||
            render_forest_ascii(spec) != render_forest_ascii(spec) ||
            meta_to_csv({meta}) != meta_to_csv({meta})) {
            outcome.passed = false;
            outcome.detail = "non-deterministic rendering";
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

Outcome prop_plots_encode_identical_numbers() {
    Outcome outcome;
    std::mt19937_64 rng(2525);
    for (int i = 0; i < 60; ++i) {
        auto studies = random_studies(rng, ri(rng, 2, 8));
        auto meta = random_effects(studies);
        auto spec = make_forest_spec(meta, studies);
        std::string ascii = render_forest_ascii(spec);
        std::string svg = render_forest_svg(spec);
        bool ok = true;
        for (const auto& row : spec.rows) {
            for (const std::string& v :
                 {format_real(row.r), format_real(row.ci_low), format_real(row.ci_high)}) {
                if (ascii.find(v) == std::string::npos || svg.find(v) == std::string::npos)
                    ok = false;
            }
        }
        std::string summary = format_real(meta.summary_r);
        if (ascii.find(summary) == std::string::npos || svg.find(summary) == std::string::npos)
            ok = false;
        if (meta_to_csv({meta}).find(summary) == std::string::npos) ok = false;
        if (!ok) {
            outcome.passed = false;
            outcome.detail = "plot representations disagree on the numbers";
            return outcome;
        }
        ++outcome.cases;
    }
    return outcome;
}

} // namespace

std::string mutate_source(const std::string& source, const std::vector<Token>& tokens,
                          std::mt19937_64& rng) {
    static const std::vector<std::string> separators = {
        " ", "  ", "\n", "\n\n", "\t", " /* zz */ ", " // zz\n", "\n    ",
    };
    std::string out;
    std::size_t prev_end = 0;
    for (const auto& t : tokens) {
        if (t.kind == TokenKind::EndOfInput) break;
        std::string gap = source.substr(prev_end, t.begin - prev_end);
        bool fragile = gap.find('#') != std::string::npos ||
                       gap.find('\\') != std::string::npos;
        if (!fragile && ri(rng, 0, 9) < 4) {
            out += pick(rng, separators);
        } else {
            out += gap;
        }
        out += source.substr(t.begin, t.end - t.begin);
        prev_end = t.end;
    }
    out += source.substr(prev_end);
    return out;
}

std::string generate_java_method(std::mt19937_64& rng, int max_depth) {
    JavaGen gen(rng);
    return gen.method(max_depth);
}

const std::vector<Property>& all_properties() {
    static const std::vector<Property> properties = {
        {"lexical-scanner", "idempotent lexing", prop_idempotent_lexing},
        {"lexical-scanner", "comment/whitespace mutation invariance",
         prop_mutation_token_invariance},
        {"lexical-scanner", "totality on arbitrary text", prop_scanner_totality},
        {"structure-builder", "depth monotonicity", prop_depth_monotonicity},
        {"structure-builder", "wrap-in-if depth shift", prop_wrap_in_if},
        {"structure-builder", "identifier renaming invariance", prop_rename_invariance},
        {"structure-builder", "snippet wrapping", prop_snippet_wrapping},
        {"complexity-metrics", "metric ranges", prop_metric_ranges},
        {"complexity-metrics", "formatting invariance", prop_formatting_invariance},
        {"complexity-metrics", "monotone nesting", prop_monotone_nesting},
        {"complexity-metrics", "flat vs nested chains", prop_flat_vs_nested_chains},
        {"complexity-metrics", "shorthand structures add nothing", prop_shorthand_rule},
        {"study-data", "composite range and zeros", prop_composite_range},
        {"study-data", "composite time-scale invariance", prop_composite_scale_invariance},
        {"study-data", "aggregation permutation invariance", prop_aggregate_permutation},
        {"correlation-engine", "coefficient and p ranges", prop_correlation_ranges},
        {"correlation-engine", "pearson affine invariance", prop_pearson_affine_invariance},
        {"correlation-engine", "kendall monotone invariance",
         prop_kendall_monotone_invariance},
        {"correlation-engine", "symmetry", prop_correlation_symmetry},
        {"correlation-engine", "fisher round trip", prop_fisher_round_trip},
        {"meta-synthesis", "weights normalized", prop_meta_weights_normalized},
        {"meta-synthesis", "summary boundedness", prop_meta_boundedness},
        {"meta-synthesis", "permutation invariance", prop_meta_permutation_invariance},
        {"meta-synthesis", "degenerate reduction to fixed effect",
         prop_meta_degenerate_reduction},
        {"meta-synthesis", "summary-consistent study is neutral", prop_meta_self_consistency},
        {"reporting-cli", "deterministic rendering", prop_report_determinism},
        {"reporting-cli", "plots encode identical numbers",
         prop_plots_encode_identical_numbers},
    };
    return properties;
}

} // namespace cogprops
