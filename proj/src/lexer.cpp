#include "cogscope/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace cogscope {

namespace {

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool is_ident_part(char c) {
    return is_ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

constexpr std::array<std::string_view, 1> kOps4 = {">>>="};
constexpr std::array<std::string_view, 10> kOps3 = {"<<=", ">>=", ">>>", "...", "===", "!==",
                                                    "**=", "<=>", "->*", "?\?="};
constexpr std::array<std::string_view, 23> kOps2 = {"==", "!=", "<=", ">=", "&&", "||", "++", "--",
                                                    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
                                                    "<<", ">>", "->", "=>", "::", "?\?", "?."};

bool is_punctuator(char c) {
    switch (c) {
        case '(': case ')': case '{': case '}': case '[': case ']': case ';': case ',':
            return true;
        default:
            return false;
    }
}

class Scanner {
public:
    Scanner(std::string_view source, const LanguageProfile& profile, ScanResult& out)
        : src_(source), profile_(profile), out_(out) {}

    void run() {
        scan_stream(false);
        Token eoi;
        eoi.kind = TokenKind::EndOfInput;
        eoi.line = line_;
        eoi.column = col_;
        eoi.begin = pos_;
        eoi.end = pos_;
        out_.tokens.push_back(std::move(eoi));
    }

private:
    std::string_view src_;
    const LanguageProfile& profile_;
    ScanResult& out_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    bool at_line_start_ = true;

    bool eof() const { return pos_ >= src_.size(); }
    char cur() const { return src_[pos_]; }
    char peek(std::size_t k = 1) const {
        return pos_ + k < src_.size() ? src_[pos_ + k] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
            at_line_start_ = true;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void advance_n(std::size_t n) {
        for (std::size_t k = 0; k < n && !eof(); ++k) advance();
    }

    void diagnose(ErrorCode code, const std::string& msg, int at_line, int at_col) {
        out_.diagnostics.push_back({code, msg, at_line, at_col});
        out_.tolerant = true;
    }

    void emit(TokenKind kind, std::size_t begin, int tline, int tcol) {
        Token t;
        t.kind = kind;
        t.text.assign(src_.substr(begin, pos_ - begin));
        t.line = tline;
        t.column = tcol;
        t.begin = begin;
        t.end = pos_;
        out_.tokens.push_back(std::move(t));
        at_line_start_ = false;
    }

    // Consumes whitespace, comments and preprocessor lines; stops at the
    // start of the next token or end of input.
    void skip_trivia() {
        while (!eof()) {
            char c = cur();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
                advance();
                continue;
            }
            if (c == '#' && at_line_start_ && profile_.supports_preprocessor) {
                skip_preprocessor_line();
                continue;
            }
            if (c == '/' && peek() == '/') {
                while (!eof() && cur() != '\n') advance();
                continue;
            }
            if (c == '/' && peek() == '*') {
                int bl = line_, bc = col_;
                advance_n(2);
                bool closed = false;
                while (!eof()) {
                    if (cur() == '*' && peek() == '/') {
                        advance_n(2);
                        closed = true;
                        break;
                    }
                    advance();
                }
                if (!closed) diagnose(ErrorCode::UnterminatedComment, "block comment not closed", bl, bc);
                continue;
            }
            break;
        }
    }

    void skip_preprocessor_line() {
        while (!eof()) {
            if (cur() == '\n') {
                // Backslash-newline continues the directive.
                std::size_t back = pos_;
                bool continued = false;
                while (back > 0) {
                    char b = src_[back - 1];
                    if (b == '\r') { --back; continue; }
                    continued = (b == '\\');
                    break;
                }
                advance();
                if (!continued) return;
            } else {
                advance();
            }
        }
    }

    // Scans tokens until end of input; when stop_at_unmatched_rbrace is set,
    // stops (without consuming) at a '}' that closes no brace opened within
    // this call. Used for expressions embedded in template literals.
    void scan_stream(bool stop_at_unmatched_rbrace) {
        int brace_depth = 0;
        while (true) {
            skip_trivia();
            if (eof()) return;
            char c = cur();
            if (stop_at_unmatched_rbrace && c == '}' && brace_depth == 0) return;

            std::size_t begin = pos_;
            int tline = line_, tcol = col_;

            if (c == '"') {
                if (profile_.id == LanguageId::Java && peek(1) == '"' && peek(2) == '"') {
                    scan_text_block(begin, tline, tcol);
                } else {
                    scan_quoted('"', begin, tline, tcol);
                }
                continue;
            }
            if (c == '\'') {
                scan_quoted('\'', begin, tline, tcol);
                continue;
            }
            if (c == '`' && profile_.id == LanguageId::JavaScript) {
                scan_template(begin, tline, tcol);
                continue;
            }
            if (c == '@' && profile_.id == LanguageId::CSharp && peek() == '"') {
                scan_verbatim_string(begin, tline, tcol);
                continue;
            }
            if (c == 'R' && profile_.id == LanguageId::Cpp && peek() == '"' && scan_raw_string(begin, tline, tcol)) {
                continue;
            }
            if (is_digit(c) || (c == '.' && is_digit(peek()))) {
                scan_number(begin, tline, tcol);
                continue;
            }
            if (is_ident_start(c)) {
                while (!eof() && is_ident_part(cur())) advance();
                std::string text(src_.substr(begin, pos_ - begin));
                emit(profile_.keywords.count(text) ? TokenKind::Keyword : TokenKind::Identifier,
                     begin, tline, tcol);
                continue;
            }

            // Operators and punctuators, longest match first.
            std::string_view rest = src_.substr(pos_);
            std::string_view matched;
            for (auto op : kOps4)
                if (rest.substr(0, op.size()) == op) { matched = op; break; }
            if (matched.empty())
                for (auto op : kOps3)
                    if (rest.substr(0, op.size()) == op) { matched = op; break; }
            if (matched.empty())
                for (auto op : kOps2)
                    if (rest.substr(0, op.size()) == op) { matched = op; break; }
            std::size_t len = matched.empty() ? 1 : matched.size();
            if (c == '{') ++brace_depth;
            if (c == '}') --brace_depth;
            advance_n(len);
            emit(len == 1 && is_punctuator(c) ? TokenKind::Punctuator : TokenKind::Operator,
                 begin, tline, tcol);
        }
    }

    void scan_quoted(char quote, std::size_t begin, int tline, int tcol) {
        advance(); // opening quote
        bool closed = false;
        while (!eof()) {
            char c = cur();
            if (c == '\\') {
                advance();
                if (!eof()) advance();
                continue;
            }
            if (c == quote) {
                advance();
                closed = true;
                break;
            }
            if (c == '\n') break; // plain literals do not span lines
            advance();
        }
        if (!closed)
            diagnose(ErrorCode::UnterminatedLiteral, "literal not closed", tline, tcol);
        emit(TokenKind::Literal, begin, tline, tcol);
    }

    void scan_text_block(std::size_t begin, int tline, int tcol) {
        advance_n(3);
        bool closed = false;
        while (!eof()) {
            if (cur() == '"' && peek(1) == '"' && peek(2) == '"') {
                advance_n(3);
                closed = true;
                break;
            }
            if (cur() == '\\') { advance(); if (!eof()) advance(); continue; }
            advance();
        }
        if (!closed)
            diagnose(ErrorCode::UnterminatedLiteral, "text block not closed", tline, tcol);
        emit(TokenKind::Literal, begin, tline, tcol);
    }

    void scan_verbatim_string(std::size_t begin, int tline, int tcol) {
        advance_n(2); // @"
        bool closed = false;
        while (!eof()) {
            if (cur() == '"') {
                if (peek() == '"') { advance_n(2); continue; } // "" escapes a quote
                advance();
                closed = true;
                break;
            }
            advance();
        }
        if (!closed)
            diagnose(ErrorCode::UnterminatedLiteral, "verbatim string not closed", tline, tcol);
        emit(TokenKind::Literal, begin, tline, tcol);
    }

    // Returns false when the 'R"' prefix is not a well-formed raw string
    // introducer; the caller then lexes 'R' as an identifier.
    bool scan_raw_string(std::size_t begin, int tline, int tcol) {
        std::size_t d = pos_ + 2;
        std::size_t dend = d;
        while (dend < src_.size() && dend - d <= 16 && src_[dend] != '(' &&
               src_[dend] != ')' && src_[dend] != '\\' && src_[dend] != ' ' && src_[dend] != '\n')
            ++dend;
        if (dend >= src_.size() || src_[dend] != '(') return false;
        std::string closer = ")" + std::string(src_.substr(d, dend - d)) + "\"";
        advance_n(dend - pos_ + 1);
        bool closed = false;
        while (!eof()) {
            if (src_.compare(pos_, closer.size(), closer) == 0) {
                advance_n(closer.size());
                closed = true;
                break;
            }
            advance();
        }
        if (!closed)
            diagnose(ErrorCode::UnterminatedLiteral, "raw string not closed", tline, tcol);
        emit(TokenKind::Literal, begin, tline, tcol);
        return true;
    }

    void scan_number(std::size_t begin, int tline, int tcol) {
        while (!eof()) {
            char c = cur();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
                char lowered = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                advance();
                if ((lowered == 'e' || lowered == 'p') && !eof() && (cur() == '+' || cur() == '-'))
                    advance();
                continue;
            }
            if (c == '\'' && pos_ > begin && pos_ + 1 < src_.size() &&
                std::isalnum(static_cast<unsigned char>(src_[pos_ - 1])) &&
                std::isalnum(static_cast<unsigned char>(src_[pos_ + 1]))) {
                advance(); // C++ digit separator
                continue;
            }
            break;
        }
        emit(TokenKind::Literal, begin, tline, tcol);
    }

    // Template literal: raw chunks (including the backtick/${/} delimiters)
    // become literal tokens; embedded ${...} expressions are tokenized so
    // control flow inside them is visible downstream.
    void scan_template(std::size_t begin, int tline, int tcol) {
        std::size_t chunk_begin = begin;
        int cline = tline, ccol = tcol;
        advance(); // opening backtick
        while (true) {
            if (eof()) {
                diagnose(ErrorCode::UnterminatedLiteral, "template literal not closed", tline, tcol);
                if (pos_ > chunk_begin) emit(TokenKind::Literal, chunk_begin, cline, ccol);
                return;
            }
            char c = cur();
            if (c == '\\') {
                advance();
                if (!eof()) advance();
                continue;
            }
            if (c == '`') {
                advance();
                emit(TokenKind::Literal, chunk_begin, cline, ccol);
                return;
            }
            if (c == '$' && peek() == '{') {
                advance_n(2);
                emit(TokenKind::Literal, chunk_begin, cline, ccol);
                scan_stream(true);
                if (eof()) {
                    diagnose(ErrorCode::UnterminatedLiteral, "template expression not closed",
                             tline, tcol);
                    return;
                }
                chunk_begin = pos_; // the '}' starts the next raw chunk
                cline = line_;
                ccol = col_;
                advance();
                continue;
            }
            advance();
        }
    }
};

LanguageProfile make_profile(LanguageId id) {
    LanguageProfile p;
    p.id = id;
    p.logical_operators = {"&&", "||"};
    switch (id) {
        case LanguageId::Java: {
            p.name = "java";
            static const char* kw[] = {
                "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char",
                "class", "const", "continue", "default", "do", "double", "else", "enum",
                "extends", "final", "finally", "float", "for", "goto", "if", "implements",
                "import", "instanceof", "int", "interface", "long", "native", "new", "package",
                "private", "protected", "public", "record", "return", "short", "static",
                "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
                "transient", "try", "var", "void", "volatile", "while", "yield"};
            for (auto k : kw) p.keywords.insert(k);
            break;
        }
        case LanguageId::C: {
            p.name = "c";
            static const char* kw[] = {
                "auto", "break", "case", "char", "const", "continue", "default", "do", "double",
                "else", "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long",
                "register", "restrict", "return", "short", "signed", "sizeof", "static",
                "struct", "switch", "typedef", "union", "unsigned", "void", "volatile", "while",
                "_Bool", "_Complex", "_Imaginary"};
            for (auto k : kw) p.keywords.insert(k);
            p.supports_goto = true;
            p.supports_preprocessor = true;
            break;
        }
        case LanguageId::Cpp: {
            p.name = "cpp";
            static const char* kw[] = {
                "alignas", "alignof", "and", "and_eq", "asm", "auto", "bitand", "bitor", "bool",
                "break", "case", "catch", "char", "char16_t", "char32_t", "char8_t", "class",
                "co_await", "co_return", "co_yield", "compl", "concept", "const", "const_cast",
                "consteval", "constexpr", "constinit", "continue", "decltype", "default",
                "delete", "do", "double", "dynamic_cast", "else", "enum", "explicit", "export",
                "extern", "false", "float", "for", "friend", "goto", "if", "inline", "int",
                "long", "mutable", "namespace", "new", "noexcept", "not", "not_eq", "nullptr",
                "operator", "or", "or_eq", "private", "protected", "public", "register",
                "reinterpret_cast", "requires", "return", "short", "signed", "sizeof", "static",
                "static_assert", "static_cast", "struct", "switch", "template", "this",
                "thread_local", "throw", "true", "try", "typedef", "typeid", "typename",
                "union", "unsigned", "using", "virtual", "void", "volatile", "wchar_t", "while",
                "xor", "xor_eq"};
            for (auto k : kw) p.keywords.insert(k);
            p.logical_operators = {"&&", "||", "and", "or"};
            p.supports_goto = true;
            p.supports_preprocessor = true;
            break;
        }
        case LanguageId::CSharp: {
            p.name = "csharp";
            static const char* kw[] = {
                "abstract", "as", "base", "bool", "break", "byte", "case", "catch", "char",
                "checked", "class", "const", "continue", "decimal", "default", "delegate", "do",
                "double", "else", "enum", "event", "explicit", "extern", "false", "finally",
                "fixed", "float", "for", "foreach", "goto", "if", "implicit", "in", "int",
                "interface", "internal", "is", "lock", "long", "namespace", "new", "null",
                "object", "operator", "out", "override", "params", "private", "protected",
                "public", "readonly", "ref", "return", "sbyte", "sealed", "short", "sizeof",
                "stackalloc", "static", "string", "struct", "switch", "this", "throw", "true",
                "try", "typeof", "uint", "ulong", "unchecked", "unsafe", "ushort", "using",
                "var", "virtual", "void", "volatile", "when", "where", "while"};
            for (auto k : kw) p.keywords.insert(k);
            p.supports_goto = true;
            p.supports_preprocessor = true;
            p.supports_null_coalescing = true;
            break;
        }
        case LanguageId::JavaScript: {
            p.name = "javascript";
            static const char* kw[] = {
                "async", "await", "break", "case", "catch", "class", "const", "continue",
                "debugger", "default", "delete", "do", "else", "export", "extends", "false",
                "finally", "for", "function", "if", "import", "in", "instanceof", "let", "new",
                "null", "of", "return", "static", "super", "switch", "this", "throw", "true",
                "try", "typeof", "undefined", "var", "void", "while", "with", "yield"};
            for (auto k : kw) p.keywords.insert(k);
            p.supports_null_coalescing = true;
            break;
        }
    }
    return p;
}

} // namespace

const LanguageProfile& profile_for(LanguageId id) {
    static const LanguageProfile java = make_profile(LanguageId::Java);
    static const LanguageProfile c = make_profile(LanguageId::C);
    static const LanguageProfile cpp = make_profile(LanguageId::Cpp);
    static const LanguageProfile csharp = make_profile(LanguageId::CSharp);
    static const LanguageProfile js = make_profile(LanguageId::JavaScript);
    switch (id) {
        case LanguageId::Java: return java;
        case LanguageId::C: return c;
        case LanguageId::Cpp: return cpp;
        case LanguageId::CSharp: return csharp;
        case LanguageId::JavaScript: return js;
    }
    return java;
}

std::optional<LanguageId> language_from_name(std::string_view name) {
    if (name == "java") return LanguageId::Java;
    if (name == "c") return LanguageId::C;
    if (name == "cpp" || name == "c++") return LanguageId::Cpp;
    if (name == "csharp" || name == "cs") return LanguageId::CSharp;
    if (name == "javascript" || name == "js") return LanguageId::JavaScript;
    return std::nullopt;
}

const char* language_name(LanguageId id) { return profile_for(id).name.c_str(); }

ScanResult scan(std::string_view source, const LanguageProfile& profile) {
    ScanResult result;
    Scanner scanner(source, profile, result);
    scanner.run();
    return result;
}

const LanguageProfile& detect_language(const std::filesystem::path& path,
                                       std::optional<LanguageId> override) {
    if (override) return profile_for(*override);
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".java") return profile_for(LanguageId::Java);
    if (ext == ".c" || ext == ".h") return profile_for(LanguageId::C);
    if (ext == ".cc" || ext == ".cpp" || ext == ".hpp") return profile_for(LanguageId::Cpp);
    if (ext == ".cs") return profile_for(LanguageId::CSharp);
    if (ext == ".js") return profile_for(LanguageId::JavaScript);
    throw Error(ErrorCode::UnknownLanguage,
                "cannot infer language for '" + path.string() + "' (extension '" + ext + "')");
}

} // namespace cogscope
