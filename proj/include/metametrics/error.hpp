// Copyright 2026 The metametrics Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef METAMETRICS_ERROR_HPP
#define METAMETRICS_ERROR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace metametrics {

// Every failure the library reports carries one of these codes. The string
// names are part of the JSON report schema, so they are stable.
enum class ErrorCode {
    // history model
    EmptyInput,
    DuplicateRevision,
    GapInHistory,
    OutOfRange,
    InvalidRecord,
    // metrics engine
    InvalidGateOrder,
    MissingIndicator,
    MissingSituation,
    UndefinedMtbtf,
    NoSuccessfulRevisions,
    // ingestion
    ParseError,
    SchemaViolation,
    IoError,
    // reporting
    EmptyPolicy,
    InvalidPolicy,
    NoArtifacts,
    NoSelectors,
    // synthesis
    InvalidConfig,
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyInput: return "empty_input";
        case ErrorCode::DuplicateRevision: return "duplicate_revision";
        case ErrorCode::GapInHistory: return "gap_in_history";
        case ErrorCode::OutOfRange: return "out_of_range";
        case ErrorCode::InvalidRecord: return "invalid_record";
        case ErrorCode::InvalidGateOrder: return "invalid_gate_order";
        case ErrorCode::MissingIndicator: return "missing_indicator";
        case ErrorCode::MissingSituation: return "missing_situation";
        case ErrorCode::UndefinedMtbtf: return "undefined_mtbtf";
        case ErrorCode::NoSuccessfulRevisions: return "no_successful_revisions";
        case ErrorCode::ParseError: return "parse_error";
        case ErrorCode::SchemaViolation: return "schema_violation";
        case ErrorCode::IoError: return "io_error";
        case ErrorCode::EmptyPolicy: return "empty_policy";
        case ErrorCode::InvalidPolicy: return "invalid_policy";
        case ErrorCode::NoArtifacts: return "no_artifacts";
        case ErrorCode::NoSelectors: return "no_selectors";
        case ErrorCode::InvalidConfig: return "invalid_config";
    }
    return "unknown";
}

inline ErrorCode error_code_from_name(const std::string& name) {
    static constexpr ErrorCode all[] = {
        ErrorCode::EmptyInput,      ErrorCode::DuplicateRevision,
        ErrorCode::GapInHistory,    ErrorCode::OutOfRange,
        ErrorCode::InvalidRecord,   ErrorCode::InvalidGateOrder,
        ErrorCode::MissingIndicator, ErrorCode::MissingSituation,
        ErrorCode::UndefinedMtbtf,  ErrorCode::NoSuccessfulRevisions,
        ErrorCode::ParseError,      ErrorCode::SchemaViolation,
        ErrorCode::IoError,         ErrorCode::EmptyPolicy,
        ErrorCode::InvalidPolicy,   ErrorCode::NoArtifacts,
        ErrorCode::NoSelectors,     ErrorCode::InvalidConfig,
    };
    for (ErrorCode code : all) {
        if (name == error_code_name(code)) return code;
    }
    throw std::invalid_argument("unknown error code name '" + name + "'");
}

/// Exception type for the whole library. `subject` and `revisions` carry
/// structured context (the indicator/situation/field at fault and the
/// offending revision indices) so callers can do better than string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    Error(ErrorCode code, std::string message, std::string subject,
          std::vector<std::uint32_t> revisions = {})
        : std::runtime_error(std::move(message)),
          code_(code),
          subject_(std::move(subject)),
          revisions_(std::move(revisions)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& subject() const noexcept { return subject_; }
    const std::vector<std::uint32_t>& revisions() const noexcept { return revisions_; }

private:
    ErrorCode code_;
    std::string subject_;
    std::vector<std::uint32_t> revisions_;
};

}  // namespace metametrics

#endif  // METAMETRICS_ERROR_HPP
