#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gqw {

/// Machine-readable failure categories shared by the library, the CLI and the HTTP API.
enum class ErrorCode {
    ParseError,
    DanglingEndpoint,
    DuplicateId,
    InvalidValue,
    InvalidQuery,
    EmptyQuery,
    LabelConflict,
    InstanceTooLarge,
    Validation,
    Authentication,
    Network,
    Capability,
    RemoteQuery,
    Timeout,
    ReadOnlyViolation,
    JobInProgress,
    NotFound,
    ExportFailure,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::ParseError: return "parse_error";
    case ErrorCode::DanglingEndpoint: return "dangling_endpoint";
    case ErrorCode::DuplicateId: return "duplicate_id";
    case ErrorCode::InvalidValue: return "invalid_value";
    case ErrorCode::InvalidQuery: return "invalid_query";
    case ErrorCode::EmptyQuery: return "empty_query";
    case ErrorCode::LabelConflict: return "label_conflict";
    case ErrorCode::InstanceTooLarge: return "instance_too_large";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::Authentication: return "authentication";
    case ErrorCode::Network: return "network";
    case ErrorCode::Capability: return "capability";
    case ErrorCode::RemoteQuery: return "remote_query";
    case ErrorCode::Timeout: return "timeout";
    case ErrorCode::ReadOnlyViolation: return "read_only_violation";
    case ErrorCode::JobInProgress: return "job_in_progress";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::ExportFailure: return "export_failure";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace gqw
