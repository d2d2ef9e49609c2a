#include "cogscope/structure.hpp"

#include <algorithm>
#include <optional>

#include <json.hpp>

namespace cogscope {

const char* construct_kind_name(ConstructKind kind) {
    switch (kind) {
        case ConstructKind::MethodDecl: return "method-decl";
        case ConstructKind::If: return "if";
        case ConstructKind::ElseIf: return "else-if";
        case ConstructKind::Else: return "else";
        case ConstructKind::Ternary: return "ternary";
        case ConstructKind::Switch: return "switch";
        case ConstructKind::For: return "for";
        case ConstructKind::Foreach: return "foreach";
        case ConstructKind::While: return "while";
        case ConstructKind::DoWhile: return "do-while";
        case ConstructKind::Catch: return "catch";
        case ConstructKind::GotoLabelJump: return "goto-label-jump";
        case ConstructKind::BreakLabeled: return "break-labeled";
        case ConstructKind::ContinueLabeled: return "continue-labeled";
        case ConstructKind::Lambda: return "lambda";
        case ConstructKind::LogicalOperatorSequence: return "logical-operator-sequence";
        case ConstructKind::RecursiveCall: return "recursive-call";
        case ConstructKind::Block: return "block";
    }
    return "unknown";
}

bool is_structural(ConstructKind kind) {
    switch (kind) {
        case ConstructKind::If:
        case ConstructKind::Ternary:
        case ConstructKind::Switch:
        case ConstructKind::For:
        case ConstructKind::Foreach:
        case ConstructKind::While:
        case ConstructKind::DoWhile:
        case ConstructKind::Catch:
            return true;
        default:
            return false;
    }
}

bool is_flat_increment(ConstructKind kind) {
    switch (kind) {
        case ConstructKind::ElseIf:
        case ConstructKind::Else:
        case ConstructKind::GotoLabelJump:
        case ConstructKind::BreakLabeled:
        case ConstructKind::ContinueLabeled:
        case ConstructKind::LogicalOperatorSequence:
        case ConstructKind::RecursiveCall:
            return true;
        default:
            return false;
    }
}

bool raises_nesting(ConstructKind kind) {
    if (is_structural(kind)) return true;
    switch (kind) {
        case ConstructKind::ElseIf:
        case ConstructKind::Else:
        case ConstructKind::Lambda:
            return true;
        default:
            return false;
    }
}

namespace {

constexpr std::size_t kNpos = static_cast<std::size_t>(-1);

std::pair<int, int> token_end_pos(const Token& tok) {
    int nl = 0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < tok.text.size(); ++i) {
        if (tok.text[i] == '\n') {
            ++nl;
            last = i + 1;
        }
    }
    if (nl == 0) return {tok.line, tok.column + static_cast<int>(tok.text.size())};
    return {tok.line + nl, static_cast<int>(tok.text.size() - last) + 1};
}

void span_begin_at(SourceSpan& span, const Token& tok) {
    span.begin_line = tok.line;
    span.begin_column = tok.column;
}

void span_end_at(SourceSpan& span, const Token& tok) {
    auto [l, c] = token_end_pos(tok);
    span.end_line = l;
    span.end_column = c;
}

void assign_depths(StructuralNode& node, int depth) {
    node.nesting_depth = depth;
    int child_depth = depth + (raises_nesting(node.kind) ? 1 : 0);
    for (auto& child : node.children) assign_depths(child, child_depth);
}

void sort_children_by_span(StructuralNode& node) {
    std::stable_sort(node.children.begin(), node.children.end(),
                     [](const StructuralNode& a, const StructuralNode& b) {
                         if (a.span.begin_line != b.span.begin_line)
                             return a.span.begin_line < b.span.begin_line;
                         return a.span.begin_column < b.span.begin_column;
                     });
    for (auto& child : node.children) sort_children_by_span(child);
}

std::string simple_name(const std::string& qualified) {
    std::size_t pos = qualified.find_last_of(".:");
    return pos == std::string::npos ? qualified : qualified.substr(pos + 1);
}

bool is_self_call_site(const std::vector<Token>& toks, std::size_t i, std::size_t lo,
                       const std::string& name) {
    if (toks[i].kind != TokenKind::Identifier || toks[i].text != name) return false;
    if (i + 1 >= toks.size() || toks[i + 1].text != "(") return false;
    if (i > lo) {
        const std::string& prev = toks[i - 1].text;
        if (prev == "." || prev == "->" || prev == "?." || prev == "::")
            return i >= lo + 2 && toks[i - 2].text == "this";
        if (prev == "new") return false;
    }
    return true;
}

struct HeaderMatch {
    std::string name;
    std::size_t params_open = 0;
    std::size_t params_close = 0;
    std::size_t body_open = 0;
    bool expression_body = false;
};

class Parser {
public:
    Parser(const std::vector<Token>& tokens, const LanguageProfile& profile, BuildResult& out)
        : t_(tokens), prof_(profile), out_(out), eoi_(tokens.empty() ? 0 : tokens.size() - 1) {}

    void run() {
        while (p_ < eoi_) {
            std::size_t before = p_;
            parse_top_level();
            if (p_ == before) ++p_;
        }
        finish_snippet_unit();
        for (auto& unit : out_.units) {
            assign_depths(unit.body, 0);
            sort_children_by_span(unit.body);
        }
        std::stable_sort(out_.units.begin(), out_.units.end(),
                         [](const MethodUnit& a, const MethodUnit& b) {
                             if (a.span.begin_line != b.span.begin_line)
                                 return a.span.begin_line < b.span.begin_line;
                             return a.span.begin_column < b.span.begin_column;
                         });
    }

private:
    const std::vector<Token>& t_;
    const LanguageProfile& prof_;
    BuildResult& out_;
    std::size_t eoi_;
    std::size_t p_ = 0;
    std::vector<std::string> scopes_;
    std::string current_method_;

    StructuralNode snippet_root_{ConstructKind::MethodDecl, {}, 0, {}, "", 0};
    std::vector<Token> snippet_tokens_;
    bool snippet_tolerant_ = false;

    // ---- token helpers -------------------------------------------------

    const Token& tok(std::size_t i) const { return t_[std::min(i, eoi_)]; }
    const std::string& txt(std::size_t i) const { return tok(i).text; }
    bool is(std::size_t i, const char* s) const { return txt(i) == s; }
    bool iskw(std::size_t i, const char* s) const {
        return tok(i).kind == TokenKind::Keyword && txt(i) == s;
    }
    bool is_ident(std::size_t i) const { return tok(i).kind == TokenKind::Identifier; }

    void diagnose(ErrorCode code, const std::string& msg, std::size_t at) {
        out_.diagnostics.push_back({code, msg, tok(at).line, tok(at).column});
        out_.tolerant = true;
    }

    // Index of the token matching the opener at 'open' (one of ( [ {), or
    // kNpos when unbalanced.
    std::size_t find_matching(std::size_t open) const {
        const std::string& o = txt(open);
        const char* c = o == "(" ? ")" : o == "[" ? "]" : "}";
        int depth = 0;
        for (std::size_t i = open; i < eoi_; ++i) {
            const std::string& x = txt(i);
            if (x == "(" || x == "[" || x == "{") ++depth;
            else if (x == ")" || x == "]" || x == "}") {
                --depth;
                if (depth == 0) return x == c ? i : kNpos;
                if (depth < 0) return kNpos;
            }
        }
        return kNpos;
    }

    // End of an expression statement starting at 'from': the terminating ';'
    // at group depth zero, or the '}' / ')' / ']' closing the enclosing scope.
    std::size_t statement_end(std::size_t from) const {
        int depth = 0;
        for (std::size_t i = from; i < eoi_; ++i) {
            const std::string& x = txt(i);
            if (x == "(" || x == "[" || x == "{") ++depth;
            else if (x == ")" || x == "]" || x == "}") {
                if (depth == 0) return i;
                --depth;
            } else if (x == ";" && depth == 0) {
                return i;
            }
        }
        return eoi_;
    }

    // ---- top level ------------------------------------------------------

    enum class TypeLikeShape { Body, Call, Other };

    TypeLikeShape classify_type_like() const {
        for (std::size_t i = p_, n = 0; i < eoi_ && n < 100; ++i, ++n) {
            const std::string& x = txt(i);
            if (x == "{") return TypeLikeShape::Body;
            if (x == "(") return TypeLikeShape::Call;
            if (x == ";" || x == "=" || x == "}") return TypeLikeShape::Other;
        }
        return TypeLikeShape::Other;
    }

    bool is_type_intro(std::size_t i) const {
        if (tok(i).kind != TokenKind::Keyword) return false;
        const std::string& x = txt(i);
        switch (prof_.id) {
            case LanguageId::Java:
                return x == "class" || x == "interface" || x == "enum" || x == "record";
            case LanguageId::C:
                return x == "struct" || x == "union" || x == "enum";
            case LanguageId::Cpp:
                return x == "class" || x == "struct" || x == "union" || x == "enum" ||
                       x == "namespace";
            case LanguageId::CSharp:
                return x == "class" || x == "struct" || x == "interface" || x == "enum" ||
                       x == "namespace";
            case LanguageId::JavaScript:
                return x == "class";
        }
        return false;
    }

    void skip_to_semicolon() {
        while (p_ < eoi_ && !is(p_, ";")) ++p_;
        if (is(p_, ";")) ++p_;
    }

    void skip_annotation() { // java '@Name' or '@Name(...)'
        ++p_;
        if (is_ident(p_)) ++p_;
        if (is(p_, "(")) {
            std::size_t close = find_matching(p_);
            p_ = close == kNpos ? eoi_ : close + 1;
        }
    }

    void skip_angles() { // generic/template argument lists
        int depth = 0;
        while (p_ < eoi_) {
            const std::string& x = txt(p_);
            if (x == "<") ++depth;
            else if (x == ">") --depth;
            else if (x == ">>") depth -= 2;
            ++p_;
            if (depth <= 0) return;
        }
    }

    void parse_top_level() {
        if (tok(p_).kind == TokenKind::EndOfInput) return;

        if (prof_.id == LanguageId::JavaScript) {
            if (iskw(p_, "export")) { ++p_; return; }
            if (iskw(p_, "import")) { skip_to_semicolon(); return; }
            if (iskw(p_, "function")) { parse_js_function_decl(); return; }
            if (try_parse_js_named_function()) return;
        }
        if (prof_.id == LanguageId::Java) {
            if (iskw(p_, "package") || iskw(p_, "import")) { skip_to_semicolon(); return; }
            if (is(p_, "@")) { skip_annotation(); return; }
        }
        if (prof_.id == LanguageId::CSharp || prof_.id == LanguageId::Cpp) {
            if (iskw(p_, "using")) { skip_to_semicolon(); return; }
        }
        if (prof_.id == LanguageId::Cpp && iskw(p_, "template")) {
            ++p_;
            if (is(p_, "<")) skip_angles();
            return;
        }
        if (prof_.id == LanguageId::CSharp && is(p_, "[")) {
            std::size_t close = find_matching(p_);
            p_ = close == kNpos ? p_ + 1 : close + 1;
            return;
        }
        if (is_type_intro(p_)) {
            TypeLikeShape shape = classify_type_like();
            if (shape == TypeLikeShape::Body) { parse_type_decl(); return; }
            if (shape == TypeLikeShape::Other) { skip_to_semicolon(); return; }
            // falls through: type keyword followed by '(' is a return type
        }
        if (is(p_, "}")) {
            diagnose(ErrorCode::UnbalancedBraces, "unmatched '}' at file scope", p_);
            ++p_;
            return;
        }
        if (auto header = try_match_method_header()) {
            parse_method(*header);
            return;
        }
        parse_snippet_statement();
    }

    void parse_snippet_statement() {
        std::size_t start = p_;
        std::string saved = current_method_;
        current_method_ = "<snippet>";
        std::size_t diag_before = out_.diagnostics.size();
        parse_statement(snippet_root_);
        current_method_ = saved;
        if (out_.diagnostics.size() != diag_before) snippet_tolerant_ = true;
        for (std::size_t i = start; i < p_ && i < eoi_; ++i) snippet_tokens_.push_back(t_[i]);
    }

    void finish_snippet_unit() {
        if (snippet_tokens_.empty()) return;
        MethodUnit unit;
        unit.qualified_name = "<snippet>";
        unit.parameters_signature = "";
        unit.body = std::move(snippet_root_);
        unit.body.kind = ConstructKind::MethodDecl;
        span_begin_at(unit.span, snippet_tokens_.front());
        span_end_at(unit.span, snippet_tokens_.back());
        unit.body.span = unit.span;
        unit.tolerant = snippet_tolerant_;
        unit.unit_tokens = std::move(snippet_tokens_);
        unit.body_token_offset = 0;
        out_.units.push_back(std::move(unit));
    }

    // ---- types ----------------------------------------------------------

    void parse_type_decl() {
        while (is_type_intro(p_)) ++p_;
        std::string name = "<anon>";
        if (is_ident(p_)) {
            name = txt(p_);
            ++p_;
            while (is(p_, "::") && is_ident(p_ + 1)) {
                name += "::" + txt(p_ + 1);
                p_ += 2;
            }
        }
        if (is(p_, "<")) skip_angles();
        // heritage / modifiers up to the body
        std::size_t guard = 0;
        while (p_ < eoi_ && !is(p_, "{") && !is(p_, ";") && guard++ < 200) ++p_;
        if (is(p_, ";")) { ++p_; return; }
        if (!is(p_, "{")) return;
        ++p_;
        scopes_.push_back(name);
        while (p_ < eoi_ && !is(p_, "}")) {
            std::size_t before = p_;
            parse_type_member();
            if (p_ == before) ++p_;
        }
        scopes_.pop_back();
        if (is(p_, "}")) ++p_;
        if (is(p_, ";")) ++p_;
    }

    void parse_type_member() {
        if (prof_.id == LanguageId::Java && is(p_, "@")) { skip_annotation(); return; }
        if (prof_.id == LanguageId::CSharp && is(p_, "[")) {
            std::size_t close = find_matching(p_);
            p_ = close == kNpos ? p_ + 1 : close + 1;
            return;
        }
        if (prof_.id == LanguageId::Cpp &&
            (iskw(p_, "public") || iskw(p_, "private") || iskw(p_, "protected")) &&
            is(p_ + 1, ":")) {
            p_ += 2;
            return;
        }
        if (prof_.id == LanguageId::Cpp && iskw(p_, "template")) {
            ++p_;
            if (is(p_, "<")) skip_angles();
            return;
        }
        if (prof_.id == LanguageId::JavaScript && try_parse_js_named_function()) return;
        if (is_type_intro(p_) && classify_type_like() == TypeLikeShape::Body) {
            parse_type_decl();
            return;
        }
        if (auto header = try_match_method_header()) {
            parse_method(*header);
            return;
        }
        skip_member();
    }

    // Skips a non-method member: runs to the ';' at depth zero, treating any
    // balanced brace group (initializer, property body) as one unit.
    void skip_member() {
        while (p_ < eoi_) {
            const std::string& x = txt(p_);
            if (x == ";") { ++p_; return; }
            if (x == "}") return; // enclosing type closes
            if (x == "{" || x == "(" || x == "[") {
                std::size_t close = find_matching(p_);
                if (close == kNpos) { p_ = eoi_; return; }
                p_ = close + 1;
                if (x == "{") {
                    if (is(p_, ";")) ++p_;
                    return;
                }
                continue;
            }
            ++p_;
        }
    }

    // ---- method headers ---------------------------------------------------

    std::optional<HeaderMatch> try_match_method_header() const {
        std::size_t limit = std::min(p_ + 400, eoi_);
        std::size_t open = kNpos;
        for (std::size_t i = p_; i < limit; ++i) {
            const std::string& x = txt(i);
            if (x == ";" || x == "{" || x == "}" || x == "=" || x == "=>") return std::nullopt;
            if (tok(i).kind == TokenKind::EndOfInput) return std::nullopt;
            if (x == "(") {
                if (i > p_ && is_ident(i - 1)) { open = i; break; }
                if (prof_.id == LanguageId::Cpp && i >= p_ + 2 &&
                    tok(i - 1).kind == TokenKind::Operator && iskw(i - 2, "operator")) {
                    open = i; // operator overload such as operator==
                    break;
                }
                return std::nullopt;
            }
        }
        if (open == kNpos) return std::nullopt;

        std::size_t close = find_matching(open);
        if (close == kNpos) return std::nullopt;

        HeaderMatch m;
        m.params_open = open;
        m.params_close = close;
        m.name = txt(open - 1);
        if (tok(open - 1).kind == TokenKind::Operator && open >= p_ + 2 &&
            iskw(open - 2, "operator"))
            m.name = "operator" + txt(open - 1);
        if (prof_.id == LanguageId::Cpp) {
            std::size_t j = open - 1;
            while (j >= p_ + 2 && is(j - 1, "::") && is_ident(j - 2)) {
                m.name = txt(j - 2) + "::" + m.name;
                j -= 2;
            }
        }

        bool in_init_list = false;
        std::size_t k = close + 1;
        std::size_t guard = 0;
        if (prof_.id == LanguageId::CSharp && is(k, "=>")) {
            m.body_open = k;
            m.expression_body = true;
            return m;
        }
        while (k < eoi_ && guard++ < 400) {
            const std::string& x = txt(k);
            if (x == "{") { m.body_open = k; return m; }
            if (x == ";" || x == "=" || x == "}") return std::nullopt;
            if (x == ":") { in_init_list = true; ++k; continue; }
            if (x == "(") {
                bool after_spec = k > 0 && (iskw(k - 1, "noexcept") || iskw(k - 1, "throw") ||
                                            iskw(k - 1, "requires") || iskw(k - 1, "when"));
                if (!in_init_list && !after_spec) return std::nullopt;
                std::size_t c2 = find_matching(k);
                if (c2 == kNpos) return std::nullopt;
                k = c2 + 1;
                continue;
            }
            ++k;
        }
        return std::nullopt;
    }

    void parse_method(const HeaderMatch& header) {
        MethodUnit unit;
        std::size_t start = p_;
        std::size_t diag_before = out_.diagnostics.size();

        std::string qualifier;
        const char* sep = prof_.id == LanguageId::Cpp || prof_.id == LanguageId::C ? "::" : ".";
        for (const auto& scope : scopes_) qualifier += scope + sep;
        unit.qualified_name = qualifier + header.name;

        std::string params;
        for (std::size_t i = header.params_open; i <= header.params_close; ++i) {
            if (!params.empty() && !txt(i).empty()) params += ' ';
            params += txt(i);
        }
        unit.parameters_signature = params;

        unit.body.kind = ConstructKind::MethodDecl;
        span_begin_at(unit.span, tok(start));
        span_begin_at(unit.body.span, tok(start));

        std::string saved = current_method_;
        current_method_ = simple_name(header.name);

        p_ = header.body_open;
        if (header.expression_body) {
            ++p_; // '=>'
            std::size_t end = statement_end(p_);
            scan_expression(p_, end, unit.body);
            p_ = end;
            if (is(p_, ";")) ++p_;
        } else {
            ++p_; // '{'
            parse_statements(unit.body);
        }
        current_method_ = saved;

        std::size_t last = p_ > start ? p_ - 1 : start;
        span_end_at(unit.span, tok(last));
        unit.body.span = unit.span;
        unit.tolerant = out_.diagnostics.size() != diag_before;
        unit.unit_tokens.assign(t_.begin() + static_cast<std::ptrdiff_t>(start),
                                t_.begin() + static_cast<std::ptrdiff_t>(std::min(p_, eoi_)));
        unit.body_token_offset = header.body_open - start;
        out_.units.push_back(std::move(unit));
    }

    // ---- javascript function forms ---------------------------------------

    void parse_js_function_decl() {
        MethodUnit unit;
        std::size_t start = p_;
        std::size_t diag_before = out_.diagnostics.size();
        ++p_; // 'function'
        std::string name = "<anonymous>";
        if (is_ident(p_)) { name = txt(p_); ++p_; }
        std::string params;
        if (is(p_, "(")) {
            std::size_t close = find_matching(p_);
            if (close != kNpos) {
                for (std::size_t i = p_; i <= close; ++i) {
                    if (!params.empty()) params += ' ';
                    params += txt(i);
                }
                p_ = close + 1;
            } else {
                ++p_;
            }
        }
        unit.qualified_name = name;
        unit.parameters_signature = params;
        unit.body.kind = ConstructKind::MethodDecl;
        span_begin_at(unit.span, tok(start));

        std::string saved = current_method_;
        current_method_ = name;
        std::size_t body_open = p_;
        if (is(p_, "{")) {
            ++p_;
            parse_statements(unit.body);
        }
        current_method_ = saved;

        std::size_t last = p_ > start ? p_ - 1 : start;
        span_end_at(unit.span, tok(last));
        unit.body.span = unit.span;
        unit.tolerant = out_.diagnostics.size() != diag_before;
        unit.unit_tokens.assign(t_.begin() + static_cast<std::ptrdiff_t>(start),
                                t_.begin() + static_cast<std::ptrdiff_t>(std::min(p_, eoi_)));
        unit.body_token_offset = body_open - start;
        out_.units.push_back(std::move(unit));
    }

    // Matches `const name = (args) => ...`, `let name = x => ...` and
    // `var name = function (...) {...}` at file scope.
    bool try_parse_js_named_function() {
        std::size_t q = p_;
        if (iskw(q, "const") || iskw(q, "let") || iskw(q, "var")) ++q;
        else return false;
        if (!is_ident(q)) return false;
        std::string name = txt(q);
        ++q;
        if (!is(q, "=")) return false;
        ++q;
        if (iskw(q, "async")) ++q;

        std::size_t arrow = kNpos;
        std::size_t fn_kw = kNpos;
        if (is(q, "(")) {
            std::size_t close = find_matching(q);
            if (close != kNpos && is(close + 1, "=>")) arrow = close + 1;
        } else if (is_ident(q) && is(q + 1, "=>")) {
            arrow = q + 1;
        } else if (iskw(q, "function")) {
            fn_kw = q;
        }
        if (arrow == kNpos && fn_kw == kNpos) return false;

        MethodUnit unit;
        std::size_t start = p_;
        std::size_t diag_before = out_.diagnostics.size();
        unit.qualified_name = name;
        unit.body.kind = ConstructKind::MethodDecl;
        span_begin_at(unit.span, tok(start));

        std::string saved = current_method_;
        current_method_ = name;
        std::size_t body_open;
        if (arrow != kNpos) {
            body_open = arrow;
            p_ = arrow + 1;
            if (is(p_, "{")) {
                ++p_;
                parse_statements(unit.body);
                if (is(p_, ";")) ++p_;
            } else {
                std::size_t end = statement_end(p_);
                scan_expression(p_, end, unit.body);
                p_ = end;
                if (is(p_, ";")) ++p_;
            }
        } else {
            p_ = fn_kw + 1;
            if (is_ident(p_)) ++p_;
            if (is(p_, "(")) {
                std::size_t close = find_matching(p_);
                p_ = close == kNpos ? p_ + 1 : close + 1;
            }
            body_open = p_;
            if (is(p_, "{")) {
                ++p_;
                parse_statements(unit.body);
                if (is(p_, ";")) ++p_;
            }
        }
        current_method_ = saved;

        std::size_t last = p_ > start ? p_ - 1 : start;
        span_end_at(unit.span, tok(last));
        unit.body.span = unit.span;
        unit.tolerant = out_.diagnostics.size() != diag_before;
        unit.unit_tokens.assign(t_.begin() + static_cast<std::ptrdiff_t>(start),
                                t_.begin() + static_cast<std::ptrdiff_t>(std::min(p_, eoi_)));
        unit.body_token_offset = body_open - start;
        out_.units.push_back(std::move(unit));
        return true;
    }

    // ---- statements -------------------------------------------------------

    void parse_statements(StructuralNode& parent) {
        while (p_ < eoi_ && !is(p_, "}")) {
            std::size_t before = p_;
            parse_statement(parent);
            if (p_ == before) ++p_;
        }
        if (is(p_, "}")) ++p_;
        else diagnose(ErrorCode::UnbalancedBraces, "scope not closed before end of input", p_);
    }

    // A construct body: either a braced statement list or one statement.
    void parse_construct_body(StructuralNode& node) {
        if (is(p_, "{")) {
            ++p_;
            parse_statements(node);
        } else if (p_ < eoi_) {
            parse_statement(node);
        }
    }

    void parse_statement(StructuralNode& parent) {
        if (p_ >= eoi_) return;
        const Token& tk = tok(p_);

        if (is(p_, "{")) {
            StructuralNode block{ConstructKind::Block, {}, 0, {}, "", 0};
            span_begin_at(block.span, tk);
            ++p_;
            parse_statements(block);
            span_end_at(block.span, tok(p_ > 0 ? p_ - 1 : 0));
            parent.children.push_back(std::move(block));
            return;
        }
        if (is(p_, ";")) { ++p_; return; }

        if (tk.kind == TokenKind::Keyword) {
            const std::string& x = tk.text;
            if (x == "if") { parse_if(parent, ConstructKind::If, p_); return; }
            if (x == "else") {
                std::size_t else_tok = p_;
                ++p_;
                parse_else_branch(parent, else_tok);
                return;
            }
            if (x == "for") { parse_for(parent); return; }
            if (x == "foreach") { parse_loop(parent, ConstructKind::Foreach); return; }
            if (x == "while") { parse_loop(parent, ConstructKind::While); return; }
            if (x == "do") { parse_do(parent); return; }
            if (x == "switch") { parse_switch(parent); return; }
            if (x == "try") { parse_try(parent); return; }
            if (x == "goto" && prof_.supports_goto) {
                StructuralNode node{ConstructKind::GotoLabelJump, {}, 0, {}, "", 0};
                span_begin_at(node.span, tk);
                ++p_;
                if (p_ < eoi_ && !is(p_, ";")) node.detail = txt(p_);
                while (p_ < eoi_ && !is(p_, ";")) ++p_;
                if (is(p_, ";")) ++p_;
                span_end_at(node.span, tok(p_ > 0 ? p_ - 1 : 0));
                parent.children.push_back(std::move(node));
                return;
            }
            if (x == "break" || x == "continue") {
                std::size_t kw_tok = p_;
                ++p_;
                if (is_ident(p_)) {
                    StructuralNode node{x == "break" ? ConstructKind::BreakLabeled
                                                     : ConstructKind::ContinueLabeled,
                                        {}, 0, {}, txt(p_), 0};
                    span_begin_at(node.span, tok(kw_tok));
                    span_end_at(node.span, tok(p_));
                    ++p_;
                    parent.children.push_back(std::move(node));
                }
                if (is(p_, ";")) ++p_;
                return;
            }
            if (x == "return" || x == "throw" || x == "yield" || x == "co_return" ||
                x == "co_yield" || x == "await") {
                ++p_;
                std::size_t end = statement_end(p_);
                scan_expression(p_, end, parent);
                p_ = end;
                if (is(p_, ";")) ++p_;
                return;
            }
            if (x == "function" && prof_.id == LanguageId::JavaScript) {
                parse_nested_function(parent);
                return;
            }
        }

        // `label:` before a statement
        if (is_ident(p_) && is(p_ + 1, ":")) {
            p_ += 2;
            return;
        }

        std::size_t end = statement_end(p_);
        scan_expression(p_, end, parent);
        p_ = end;
        if (is(p_, ";")) ++p_;
    }

    void parse_else_branch(StructuralNode& parent, std::size_t else_tok) {
        if (iskw(p_, "if")) {
            parse_if(parent, ConstructKind::ElseIf, else_tok);
            return;
        }
        StructuralNode node{ConstructKind::Else, {}, 0, {}, "", 0};
        span_begin_at(node.span, tok(else_tok));
        parse_construct_body(node);
        span_end_at(node.span, tok(p_ > 0 ? p_ - 1 : 0));
        parent.children.push_back(std::move(node));
    }

    void parse_if(StructuralNode& parent, ConstructKind kind, std::size_t start_tok) {
        StructuralNode node{kind, {}, 0, {}, "", 0};
        span_begin_at(node.span, tok(start_tok));
        ++p_; // 'if'
        if (is(p_, "(")) {
            std::size_t close = find_matching(p_);
            if (close != kNpos) {
                scan_expression(p_ + 1, close, node);
                p_ = close + 1;
            } else {
                diagnose(ErrorCode::UnbalancedBraces, "condition not closed", p_);
                ++p_;
            }
        }
        parse_construct_body(node);
        span_end_at(node.span, tok(p_ > 0 ? p_ - 1 : 0));
        parent.children.push_back(std::move(node));
        if (iskw(p_, "else")) {
            std::size_t else_tok = p_;
            ++p_;
            parse_else_branch(parent, else_tok);
        }
    }

    void parse_for(StructuralNode& parent) {
        StructuralNode node{ConstructKind::For, {}, 0, {}, "", 0};
        span_begin_at(node.span, tok(p_));
        ++p_; // 'for'
        if (iskw(p_, "await")) ++p_;
        if (is(p_, "(")) {
            std::size_t close = find_matching(p_);
            if (close != kNpos) {
                bool has_semi = false, has_iter = false;
                int depth = 0;
                for (std::size_t i = p_ + 1; i < close; ++i) {
                    const std::string& x = txt(i);
                    if (x == "(" || x == "[" || x == "{") ++depth;
                    else if (x == ")" || x == "]" || x == "}") --depth;
                    else if (depth == 0) {
                        if (x == ";") { has_semi = true; break; }
                        if (x == ":" || iskw(i, "in") || iskw(i, "of")) has_iter = true;
                    }
                }
                if (!has_semi && has_iter) node.kind = ConstructKind::Foreach;
                scan_expression(p_ + 1, close, node);
                p_ = close + 1;
            } else {
                diagnose(ErrorCode::UnbalancedBraces, "loop header not closed", p_);
                ++p_;
            }
        }
        parse_construct_body(node);
        span_end_at(node.span, tok(p_ > 0 ? p_ - 1 : 0));
        parent.children.push_back(std::move(node));
    }

    void parse_loop(StructuralNode& parent, ConstructKind kind) {
        StructuralNode node{kind, {}, 0, {}, "", 0};
        span_begin_at(node.span, tok(p_));
        ++p_; // 'while' / 'foreach'
        if (is(p_, "(")) {
            std::size_t close = find_matching(p_);
            if (close != kNpos) {
                scan_expression(p_ + 1, close, node);
                p_ = close + 1;
            } else {
                diagnose(ErrorCode::UnbalancedBraces, "loop header not closed", p_);
                ++p_;
            }
        }
        parse_construct_body(node);
        span_end_at(node.span, tok(p_ > 0 ? p_ - 1 : 0));
        parent.children.push_back(std::move(node));
    }

    void parse_do(StructuralNode& parent) {
        StructuralNode node{ConstructKind::DoWhile, {}, 0, {}, "", 0};
        span_begin_at(node.span, tok(p_));
        ++p_; // 'do'
        parse_construct_body(node);
        if (iskw(p_, "while")) {
            ++p_;
            if (is(p_, "(")) {
                std::size_t close = find_matching(p_);
                if (close != kNpos) {
                    scan_expression(p_ + 1, close, node);
                    p_ = close + 1;
                } else {
                    ++p_;
                }
            }
            if (is(p_, ";")) ++p_;
        } else {
            diagnose(ErrorCode::UnbalancedBraces, "do without trailing while", p_);
        }
        span_end_at(node.span, tok(p_ > 0 ? p_ - 1 : 0));
        parent.children.push_back(std::move(node));
    }

    void parse_switch(StructuralNode& parent) {
        StructuralNode node{ConstructKind::Switch, {}, 0, {}, "", 0};
        span_begin_at(node.span, tok(p_));
        ++p_; // 'switch'
        if (is(p_, "(")) {
            std::size_t close = find_matching(p_);
            if (close != kNpos) {
                scan_expression(p_ + 1, close, node);
                p_ = close + 1;
            } else {
                ++p_;
            }
        }
        if (is(p_, "{")) {
            ++p_;
            std::size_t active = kNpos;
            while (p_ < eoi_ && !is(p_, "}")) {
                std::size_t before = p_;
                if (iskw(p_, "case")) {
                    StructuralNode blk{ConstructKind::Block, {}, 0, {}, "case", 0};
                    span_begin_at(blk.span, tok(p_));
                    ++p_;
                    int depth = 0;
                    while (p_ < eoi_) {
                        const std::string& x = txt(p_);
                        if (x == "(" || x == "[") ++depth;
                        else if (x == ")" || x == "]") --depth;
                        else if (x == ":" && depth == 0) { ++p_; break; }
                        else if (x == "{" || x == "}" || x == ";") break;
                        ++p_;
                    }
                    span_end_at(blk.span, tok(p_ > 0 ? p_ - 1 : 0));
                    node.children.push_back(std::move(blk));
                    active = node.children.size() - 1;
                } else if (iskw(p_, "default") && is(p_ + 1, ":")) {
                    StructuralNode blk{ConstructKind::Block, {}, 0, {}, "default", 0};
                    span_begin_at(blk.span, tok(p_));
                    span_end_at(blk.span, tok(p_ + 1));
                    p_ += 2;
                    node.children.push_back(std::move(blk));
                    active = node.children.size() - 1;
                } else if (active != kNpos) {
                    parse_statement(node.children[active]);
                    span_end_at(node.children[active].span, tok(p_ > 0 ? p_ - 1 : 0));
                } else {
                    parse_statement(node);
                }
                if (p_ == before) ++p_;
            }
            if (is(p_, "}")) ++p_;
            else diagnose(ErrorCode::UnbalancedBraces, "switch body not closed", p_);
        }
        span_end_at(node.span, tok(p_ > 0 ? p_ - 1 : 0));
        parent.children.push_back(std::move(node));
    }

    void parse_try(StructuralNode& parent) {
        StructuralNode blk{ConstructKind::Block, {}, 0, {}, "try", 0};
        span_begin_at(blk.span, tok(p_));
        ++p_; // 'try'
        if (is(p_, "(")) { // try-with-resources header; declarations only
            std::size_t close = find_matching(p_);
            p_ = close == kNpos ? p_ + 1 : close + 1;
        }
        parse_construct_body(blk);
        span_end_at(blk.span, tok(p_ > 0 ? p_ - 1 : 0));
        parent.children.push_back(std::move(blk));

        while (iskw(p_, "catch")) {
            StructuralNode node{ConstructKind::Catch, {}, 0, {}, "", 0};
            span_begin_at(node.span, tok(p_));
            ++p_;
            if (is(p_, "(")) { // exception declaration, not an expression
                std::size_t close = find_matching(p_);
                p_ = close == kNpos ? p_ + 1 : close + 1;
            }
            if (iskw(p_, "when") && is(p_ + 1, "(")) {
                std::size_t close = find_matching(p_ + 1);
                if (close != kNpos) {
                    scan_expression(p_ + 2, close, node);
                    p_ = close + 1;
                } else {
                    ++p_;
                }
            }
            parse_construct_body(node);
            span_end_at(node.span, tok(p_ > 0 ? p_ - 1 : 0));
            parent.children.push_back(std::move(node));
        }
        if (iskw(p_, "finally")) {
            StructuralNode fin{ConstructKind::Block, {}, 0, {}, "finally", 0};
            span_begin_at(fin.span, tok(p_));
            ++p_;
            parse_construct_body(fin);
            span_end_at(fin.span, tok(p_ > 0 ? p_ - 1 : 0));
            parent.children.push_back(std::move(fin));
        }
    }

    void parse_nested_function(StructuralNode& parent) {
        StructuralNode node{ConstructKind::Lambda, {}, 0, {}, "", 0};
        span_begin_at(node.span, tok(p_));
        ++p_; // 'function'
        if (is_ident(p_)) { node.detail = txt(p_); ++p_; }
        if (is(p_, "(")) {
            std::size_t close = find_matching(p_);
            p_ = close == kNpos ? p_ + 1 : close + 1;
        }
        if (is(p_, "{")) {
            ++p_;
            parse_statements(node);
        }
        span_end_at(node.span, tok(p_ > 0 ? p_ - 1 : 0));
        parent.children.push_back(std::move(node));
    }

    // ---- expressions ------------------------------------------------------

    // Finds the ':' belonging to a '?' at group depth zero, skipping nested
    // conditional pairs. Returns kNpos when there is none (nullable types,
    // generics wildcards).
    std::size_t find_ternary_colon(std::size_t from, std::size_t to) const {
        int depth = 0, cond = 0;
        for (std::size_t i = from; i < to; ++i) {
            const std::string& x = txt(i);
            if (x == "(" || x == "[" || x == "{") ++depth;
            else if (x == ")" || x == "]" || x == "}") {
                --depth;
                if (depth < 0) return kNpos;
            } else if (depth == 0) {
                if (x == "?") ++cond;
                else if (x == ";") return kNpos;
                else if (x == ":") {
                    if (cond == 0) return i;
                    --cond;
                }
            }
        }
        return kNpos;
    }

    // End of the subexpression starting at 'from': next ',' or ';' at group
    // depth zero, else the region end.
    std::size_t find_subexpr_end(std::size_t from, std::size_t to) const {
        int depth = 0;
        for (std::size_t i = from; i < to; ++i) {
            const std::string& x = txt(i);
            if (x == "(" || x == "[" || x == "{") ++depth;
            else if (x == ")" || x == "]" || x == "}") {
                --depth;
                if (depth < 0) return i;
            } else if (depth == 0 && (x == "," || x == ";")) {
                return i;
            }
        }
        return to;
    }

    void parse_statements_range(std::size_t from, std::size_t close_brace, StructuralNode& node) {
        std::size_t save = p_;
        p_ = from;
        while (p_ < close_brace && !is(p_, "}")) {
            std::size_t before = p_;
            parse_statement(node);
            if (p_ == before) ++p_;
        }
        p_ = save;
    }

    struct RunState {
        std::string op;
        int count = 0;
        std::size_t first = 0;
    };

    void flush_run(RunState& run, StructuralNode& parent) {
        if (run.count == 0) return;
        StructuralNode node{ConstructKind::LogicalOperatorSequence, {}, 0, {}, run.op, run.count};
        span_begin_at(node.span, tok(run.first));
        span_end_at(node.span, tok(run.first));
        parent.children.push_back(std::move(node));
        run = RunState{};
    }

    void scan_expression(std::size_t from, std::size_t to, StructuralNode& parent) {
        RunState run;
        std::size_t i = from;
        while (i < to && i < eoi_) {
            const Token& tk = tok(i);
            const std::string& x = tk.text;

            if ((tk.kind == TokenKind::Operator || tk.kind == TokenKind::Keyword) &&
                prof_.logical_operators.count(x)) {
                if (run.count > 0 && run.op == x) {
                    ++run.count;
                } else {
                    flush_run(run, parent);
                    run.op = x;
                    run.count = 1;
                    run.first = i;
                }
                ++i;
                continue;
            }

            if (x == "?") {
                std::size_t colon = find_ternary_colon(i + 1, to);
                if (colon != kNpos) {
                    flush_run(run, parent);
                    StructuralNode node{ConstructKind::Ternary, {}, 0, {}, "", 0};
                    span_begin_at(node.span, tk);
                    std::size_t tern_end = find_subexpr_end(colon + 1, to);
                    scan_expression(i + 1, colon, node);
                    scan_expression(colon + 1, tern_end, node);
                    span_end_at(node.span, tok(tern_end > i ? tern_end - 1 : i));
                    parent.children.push_back(std::move(node));
                    i = tern_end;
                    continue;
                }
                flush_run(run, parent);
                ++i;
                continue;
            }

            if (x == "," || x == ";" || x == ":") {
                flush_run(run, parent);
                ++i;
                continue;
            }

            if ((prof_.id == LanguageId::Java && x == "->") ||
                ((prof_.id == LanguageId::CSharp || prof_.id == LanguageId::JavaScript) &&
                 x == "=>")) {
                flush_run(run, parent);
                i = scan_arrow_lambda(i, to, parent);
                continue;
            }
            if (prof_.id == LanguageId::JavaScript && tk.kind == TokenKind::Keyword &&
                x == "function") {
                flush_run(run, parent);
                i = scan_function_expression(i, to, parent);
                continue;
            }
            if (prof_.id == LanguageId::CSharp && tk.kind == TokenKind::Keyword &&
                x == "delegate") {
                flush_run(run, parent);
                i = scan_delegate_expression(i, to, parent);
                continue;
            }
            if (prof_.id == LanguageId::Cpp && x == "[") {
                std::size_t next = try_scan_cpp_lambda(i, to, run, parent);
                if (next != kNpos) {
                    i = next;
                    continue;
                }
            }

            if (tk.kind == TokenKind::Identifier && !current_method_.empty() &&
                x == current_method_ && i + 1 < to && is(i + 1, "(")) {
                bool self_call = true;
                if (i > from) {
                    const std::string& prev = txt(i - 1);
                    if (prev == "." || prev == "->" || prev == "?." || prev == "::")
                        self_call = i >= from + 2 && is(i - 2, "this");
                    else if (prev == "new")
                        self_call = false;
                }
                if (self_call) {
                    StructuralNode node{ConstructKind::RecursiveCall, {}, 0, {}, x, 0};
                    span_begin_at(node.span, tk);
                    span_end_at(node.span, tk);
                    parent.children.push_back(std::move(node));
                }
                ++i;
                continue;
            }

            ++i;
        }
        flush_run(run, parent);
    }

    // '->' / '=>' lambda: index of the arrow token; returns next scan index.
    std::size_t scan_arrow_lambda(std::size_t arrow, std::size_t to, StructuralNode& parent) {
        StructuralNode node{ConstructKind::Lambda, {}, 0, {}, "", 0};
        span_begin_at(node.span, tok(arrow));
        std::size_t k = arrow + 1;
        if (is(k, "{")) {
            std::size_t close = find_matching(k);
            if (close == kNpos || close > to) {
                parent.children.push_back(std::move(node));
                return k + 1;
            }
            parse_statements_range(k + 1, close, node);
            span_end_at(node.span, tok(close));
            parent.children.push_back(std::move(node));
            return close + 1;
        }
        std::size_t end = find_subexpr_end(k, to);
        scan_expression(k, end, node);
        span_end_at(node.span, tok(end > arrow ? end - 1 : arrow));
        parent.children.push_back(std::move(node));
        return end;
    }

    std::size_t scan_function_expression(std::size_t fn, std::size_t to, StructuralNode& parent) {
        StructuralNode node{ConstructKind::Lambda, {}, 0, {}, "", 0};
        span_begin_at(node.span, tok(fn));
        std::size_t k = fn + 1;
        if (is_ident(k)) { node.detail = txt(k); ++k; }
        if (is(k, "(")) {
            std::size_t close = find_matching(k);
            k = close == kNpos ? k + 1 : close + 1;
        }
        if (is(k, "{")) {
            std::size_t close = find_matching(k);
            if (close != kNpos && close <= to) {
                parse_statements_range(k + 1, close, node);
                span_end_at(node.span, tok(close));
                parent.children.push_back(std::move(node));
                return close + 1;
            }
        }
        parent.children.push_back(std::move(node));
        return k;
    }

    std::size_t scan_delegate_expression(std::size_t kw, std::size_t to, StructuralNode& parent) {
        StructuralNode node{ConstructKind::Lambda, {}, 0, {}, "", 0};
        span_begin_at(node.span, tok(kw));
        std::size_t k = kw + 1;
        if (is(k, "(")) {
            std::size_t close = find_matching(k);
            k = close == kNpos ? k + 1 : close + 1;
        }
        if (is(k, "{")) {
            std::size_t close = find_matching(k);
            if (close != kNpos && close <= to) {
                parse_statements_range(k + 1, close, node);
                span_end_at(node.span, tok(close));
                parent.children.push_back(std::move(node));
                return close + 1;
            }
        }
        parent.children.push_back(std::move(node));
        return k;
    }

    // C++ lambda introducer probe at '['. Returns kNpos when the bracket is a
    // plain subscript.
    std::size_t try_scan_cpp_lambda(std::size_t open, std::size_t to, RunState& run,
                                    StructuralNode& parent) {
        bool ok_context = open == eoi_ ? false : true;
        if (open > 0) {
            const Token& prev = tok(open - 1);
            if (prev.kind == TokenKind::Identifier || prev.kind == TokenKind::Literal ||
                prev.text == ")" || prev.text == "]")
                ok_context = false;
        }
        if (!ok_context) return kNpos;
        std::size_t close_b = find_matching(open);
        if (close_b == kNpos || close_b >= to) return kNpos;
        std::size_t k = close_b + 1;
        if (is(k, "(")) {
            std::size_t close_p = find_matching(k);
            if (close_p == kNpos) return kNpos;
            k = close_p + 1;
        }
        std::size_t guard = 0;
        while (k < to && guard++ < 64 && !is(k, "{")) {
            const std::string& x = txt(k);
            if (x == ";" || x == "," || x == ")" || x == "]" || x == "=") return kNpos;
            if (x == "(") { // noexcept(...) and similar
                std::size_t c = find_matching(k);
                if (c == kNpos) return kNpos;
                k = c + 1;
                continue;
            }
            ++k;
        }
        if (!is(k, "{")) return kNpos;
        std::size_t close = find_matching(k);
        if (close == kNpos || close > to) return kNpos;

        flush_run(run, parent);
        StructuralNode node{ConstructKind::Lambda, {}, 0, {}, "", 0};
        span_begin_at(node.span, tok(open));
        parse_statements_range(k + 1, close, node);
        span_end_at(node.span, tok(close));
        parent.children.push_back(std::move(node));
        return close + 1;
    }
};

nlohmann::ordered_json node_to_json(const StructuralNode& node) {
    nlohmann::ordered_json j;
    j["kind"] = construct_kind_name(node.kind);
    j["nesting_depth"] = node.nesting_depth;
    j["span"] = {{"begin_line", node.span.begin_line},
                 {"begin_column", node.span.begin_column},
                 {"end_line", node.span.end_line},
                 {"end_column", node.span.end_column}};
    if (!node.detail.empty()) j["detail"] = node.detail;
    if (node.operator_count > 0) j["operator_count"] = node.operator_count;
    auto children = nlohmann::ordered_json::array();
    for (const auto& child : node.children) children.push_back(node_to_json(child));
    j["children"] = std::move(children);
    return j;
}

} // namespace

BuildResult build_structure(const std::vector<Token>& tokens, const LanguageProfile& profile) {
    BuildResult result;
    if (tokens.empty()) return result;
    Parser parser(tokens, profile, result);
    parser.run();
    return result;
}

std::vector<StructuralNode> detect_logical_sequences(std::span<const Token> expression,
                                                     const LanguageProfile& profile) {
    std::vector<StructuralNode> runs;
    std::string op;
    int count = 0;
    std::size_t first = 0;
    auto flush = [&] {
        if (count == 0) return;
        StructuralNode node{ConstructKind::LogicalOperatorSequence, {}, 0, {}, op, count};
        span_begin_at(node.span, expression[first]);
        span_end_at(node.span, expression[first]);
        runs.push_back(std::move(node));
        count = 0;
    };
    for (std::size_t i = 0; i < expression.size(); ++i) {
        const Token& tk = expression[i];
        if (tk.kind == TokenKind::EndOfInput) break;
        const std::string& x = tk.text;
        if ((tk.kind == TokenKind::Operator || tk.kind == TokenKind::Keyword) &&
            profile.logical_operators.count(x)) {
            if (count > 0 && op == x) {
                ++count;
            } else {
                flush();
                op = x;
                count = 1;
                first = i;
            }
            continue;
        }
        if (x == "," || x == ";" || x == "?" || x == ":") flush();
    }
    flush();
    return runs;
}

std::vector<StructuralNode> detect_recursion(const MethodUnit& unit,
                                             const std::vector<MethodUnit>& file_units) {
    (void)file_units; // matching is against the unit's own name only
    std::vector<StructuralNode> sites;
    const std::string name = simple_name(unit.qualified_name);
    if (name.empty() || name == "<snippet>" || name == "<anonymous>") return sites;
    const auto& toks = unit.unit_tokens;
    for (std::size_t i = unit.body_token_offset; i + 1 < toks.size(); ++i) {
        if (is_self_call_site(toks, i, unit.body_token_offset, name)) {
            StructuralNode node{ConstructKind::RecursiveCall, {}, 0, {}, name, 0};
            span_begin_at(node.span, toks[i]);
            span_end_at(node.span, toks[i]);
            sites.push_back(std::move(node));
        }
    }
    return sites;
}

std::string structure_to_json(const MethodUnit& unit) {
    nlohmann::ordered_json j;
    j["method"] = unit.qualified_name;
    j["signature"] = unit.parameters_signature;
    j["file"] = unit.source_file;
    j["tolerant"] = unit.tolerant;
    j["tree"] = node_to_json(unit.body);
    return j.dump(2);
}

} // namespace cogscope
