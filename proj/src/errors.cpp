#include "cogscope/errors.hpp"

namespace cogscope {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownLanguage: return "UnknownLanguage";
        case ErrorCode::UnterminatedLiteral: return "UnterminatedLiteral";
        case ErrorCode::UnterminatedComment: return "UnterminatedComment";
        case ErrorCode::UnbalancedBraces: return "UnbalancedBraces";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::ValueError: return "ValueError";
        case ErrorCode::MissingSnippet: return "MissingSnippet";
        case ErrorCode::MissingVariable: return "MissingVariable";
        case ErrorCode::DegenerateDataset: return "DegenerateDataset";
        case ErrorCode::ConstantInput: return "ConstantInput";
        case ErrorCode::AllTied: return "AllTied";
        case ErrorCode::OutOfRangeN: return "OutOfRangeN";
        case ErrorCode::NTooSmall: return "NTooSmall";
        case ErrorCode::PerfectCorrelation: return "PerfectCorrelation";
        case ErrorCode::MixedStudies: return "MixedStudies";
        case ErrorCode::TooFewStudies: return "TooFewStudies";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

} // namespace cogscope
