#include "minstrel/error.hpp"

namespace minstrel {

std::string_view code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingRole: return "MissingRole";
        case ErrorCode::DuplicateModule: return "DuplicateModule";
        case ErrorCode::MalformedHeading: return "MalformedHeading";
        case ErrorCode::EmptySlot: return "EmptySlot";
        case ErrorCode::AmbiguousSlot: return "AmbiguousSlot";
        case ErrorCode::NoActions: return "NoActions";
        case ErrorCode::InvalidElement: return "InvalidElement";
        case ErrorCode::Transport: return "Transport";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::RetriesExhausted: return "RetriesExhausted";
        case ErrorCode::EmptyCompletion: return "EmptyCompletion";
        case ErrorCode::AmbiguousFixture: return "AmbiguousFixture";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InvalidRequest: return "InvalidRequest";
        case ErrorCode::SchemaViolation: return "SchemaViolation";
        case ErrorCode::UnknownModuleName: return "UnknownModuleName";
        case ErrorCode::WrongModuleKind: return "WrongModuleKind";
        case ErrorCode::StanceMultisetViolation: return "StanceMultisetViolation";
        case ErrorCode::PreconditionViolation: return "PreconditionViolation";
        case ErrorCode::InvalidState: return "InvalidState";
        case ErrorCode::SessionNotAwaitingInput: return "SessionNotAwaitingInput";
        case ErrorCode::NotFinalized: return "NotFinalized";
        case ErrorCode::LintErrors: return "LintErrors";
        case ErrorCode::VersionConflict: return "VersionConflict";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::Io: return "Io";
        case ErrorCode::Validation: return "Validation";
    }
    return "Unknown";
}

}  // namespace minstrel
