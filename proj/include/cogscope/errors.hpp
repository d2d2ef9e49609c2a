#pragma once

#include <stdexcept>
#include <string>

namespace cogscope {

enum class ErrorCode {
    UnknownLanguage,
    UnterminatedLiteral,
    UnterminatedComment,
    UnbalancedBraces,
    SchemaError,
    ValueError,
    MissingSnippet,
    MissingVariable,
    DegenerateDataset,
    ConstantInput,
    AllTied,
    OutOfRangeN,
    NTooSmall,
    PerfectCorrelation,
    MixedStudies,
    TooFewStudies,
    ConfigError,
    IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace cogscope
