#include "engine/core.hpp"

#include <chrono>
#include <cmath>

namespace engine {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::EmptyIdentifier: return "EmptyIdentifier";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::UnknownJob: return "UnknownJob";
        case ErrorCode::EmptyDocument: return "EmptyDocument";
        case ErrorCode::EmptyHistory: return "EmptyHistory";
        case ErrorCode::NonPositiveDecay: return "NonPositiveDecay";
        case ErrorCode::ColdStartUser: return "ColdStartUser";
        case ErrorCode::MissingEmbedding: return "MissingEmbedding";
        case ErrorCode::ValidationFailed: return "ValidationFailed";
        case ErrorCode::DegenerateTable: return "DegenerateTable";
        case ErrorCode::InsufficientSample: return "InsufficientSample";
        case ErrorCode::EmptyArm: return "EmptyArm";
        case ErrorCode::InvalidParams: return "InvalidParams";
    }
    return "Unknown";
}

const char* interaction_kind_name(InteractionKind kind) {
    switch (kind) {
        case InteractionKind::view: return "view";
        case InteractionKind::click: return "click";
        case InteractionKind::apply: return "apply";
    }
    return "view";
}

std::optional<InteractionKind> parse_interaction_kind(const std::string& s) {
    if (s == "view") return InteractionKind::view;
    if (s == "click") return InteractionKind::click;
    if (s == "apply") return InteractionKind::apply;
    return std::nullopt;
}

const char* surface_name(Surface s) {
    return s == Surface::similar_jobs ? "similar_jobs" : "homepage";
}

std::optional<Surface> parse_surface(const std::string& s) {
    if (s == "similar_jobs") return Surface::similar_jobs;
    if (s == "homepage") return Surface::homepage;
    return std::nullopt;
}

ValidationResult validate_job(const JobPosting& job, std::size_t dim,
                              const EmbeddingVector* embedding) {
    if (job.job_id.empty()) {
        return ValidationResult::reject(ErrorCode::EmptyIdentifier, "job_id",
                                        "job_id must be non-empty");
    }
    if (job.description.empty() && embedding == nullptr) {
        return ValidationResult::reject(ErrorCode::EmptyDocument, "description",
                                        "description may be empty only with an external embedding");
    }
    if (embedding != nullptr) {
        if (embedding->size() != dim) {
            return ValidationResult::reject(
                ErrorCode::DimensionMismatch, "embedding",
                "embedding length " + std::to_string(embedding->size()) +
                    " does not match configured dimension " + std::to_string(dim));
        }
        for (double v : *embedding) {
            if (!std::isfinite(v)) {
                return ValidationResult::reject(ErrorCode::NonFiniteValue, "embedding",
                                                "embedding contains a non-finite entry");
            }
        }
    }
    return ValidationResult::accept();
}

ValidationResult validate_interaction(const Interaction& interaction) {
    if (interaction.user_id.empty()) {
        return ValidationResult::reject(ErrorCode::EmptyIdentifier, "user_id",
                                        "user_id must be non-empty");
    }
    if (interaction.job_id.empty()) {
        return ValidationResult::reject(ErrorCode::EmptyIdentifier, "job_id",
                                        "job_id must be non-empty");
    }
    if (interaction.timestamp <= 0) {
        return ValidationResult::reject(ErrorCode::ValidationFailed, "timestamp",
                                        "timestamp must be positive");
    }
    return ValidationResult::accept();
}

UnixSeconds RealClock::now_seconds() const {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace engine
