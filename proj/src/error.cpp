#include "sinai/error.hpp"

namespace sinai {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedSpec: return "MalformedSpec";
        case ErrorCode::InvalidWindow: return "InvalidWindow";
        case ErrorCode::NTooSmall: return "NTooSmall";
        case ErrorCode::WindowTooNarrow: return "WindowTooNarrow";
        case ErrorCode::NoValley: return "NoValley";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::WindowExit: return "WindowExit";
        case ErrorCode::DegenerateInterval: return "DegenerateInterval";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::TruncationNotConverged: return "TruncationNotConverged";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace sinai
