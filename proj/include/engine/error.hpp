#pragma once

#include <stdexcept>
#include <string>

namespace engine {

enum class ErrorCode {
    DimensionMismatch,
    EmptyIdentifier,
    NonFiniteValue,
    ZeroVector,
    UnknownJob,
    EmptyDocument,
    EmptyHistory,
    NonPositiveDecay,
    ColdStartUser,
    MissingEmbedding,
    ValidationFailed,
    DegenerateTable,
    InsufficientSample,
    EmptyArm,
    InvalidParams,
};

const char* error_code_name(ErrorCode code);

// Domain error carrying a machine-readable code and the offending field.
class EngineError : public std::runtime_error {
public:
    EngineError(ErrorCode code, std::string field, const std::string& message)
        : std::runtime_error(message), code_(code), field_(std::move(field)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& field() const noexcept { return field_; }

private:
    ErrorCode code_;
    std::string field_;
};

}  // namespace engine
