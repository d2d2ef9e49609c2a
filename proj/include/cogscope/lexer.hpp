#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cogscope/errors.hpp"

namespace cogscope {

enum class LanguageId { Java, C, Cpp, CSharp, JavaScript };

enum class TokenKind { Keyword, Identifier, Punctuator, Operator, Literal, EndOfInput };

struct Token {
    TokenKind kind = TokenKind::EndOfInput;
    std::string text;
    int line = 1;   // 1-based
    int column = 1; // 1-based
    std::size_t begin = 0; // byte offset of first lexeme byte
    std::size_t end = 0;   // byte offset one past the last lexeme byte
};

struct LanguageProfile {
    LanguageId id;
    std::string name;
    std::unordered_set<std::string> keywords;
    std::unordered_set<std::string> logical_operators;
    bool supports_goto = false;
    bool supports_preprocessor = false;
    bool supports_null_coalescing = false;
};

const LanguageProfile& profile_for(LanguageId id);
std::optional<LanguageId> language_from_name(std::string_view name);
const char* language_name(LanguageId id);

struct ScanDiagnostic {
    ErrorCode code;
    std::string message;
    int line = 0;
    int column = 0;
};

struct ScanResult {
    std::vector<Token> tokens; // always terminated by one EndOfInput token
    std::vector<ScanDiagnostic> diagnostics;
    bool tolerant = false; // true when recovery was needed
};

// Tokenizes source text. Comments, literal bodies and (where the profile
// says so) preprocessor lines never produce structural tokens. Recovers
// from unterminated literals/comments by closing at end of input.
ScanResult scan(std::string_view source, const LanguageProfile& profile);

// Maps a file extension to a language profile; an explicit override wins.
// Throws Error{UnknownLanguage} when neither resolves.
const LanguageProfile& detect_language(const std::filesystem::path& path,
                                       std::optional<LanguageId> override = std::nullopt);

} // namespace cogscope
