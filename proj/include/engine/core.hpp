#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "engine/error.hpp"

namespace engine {

using UnixSeconds = std::int64_t;
using EmbeddingVector = std::vector<double>;

enum class InteractionKind { view, click, apply };

const char* interaction_kind_name(InteractionKind kind);
std::optional<InteractionKind> parse_interaction_kind(const std::string& s);

struct JobPosting {
    std::string job_id;
    std::string title;
    std::string description;
    bool active = true;
    UnixSeconds created_at = 0;
};

struct Interaction {
    std::string user_id;
    std::string job_id;
    std::string session_id;
    UnixSeconds timestamp = 0;
    InteractionKind kind = InteractionKind::view;
};

enum class Surface { similar_jobs, homepage };

const char* surface_name(Surface s);
std::optional<Surface> parse_surface(const std::string& s);

struct SlateRequest {
    Surface surface = Surface::similar_jobs;
    std::string user_id;
    std::string session_id;
    std::optional<std::string> anchor_job_id;  // required for similar_jobs
    UnixSeconds requested_at = 0;              // TS_ref for profile building
};

struct ValidationResult {
    bool ok = true;
    ErrorCode code = ErrorCode::ValidationFailed;
    std::string field;
    std::string message;

    static ValidationResult accept() { return {}; }
    static ValidationResult reject(ErrorCode code, std::string field, std::string message) {
        return {false, code, std::move(field), std::move(message)};
    }
};

ValidationResult validate_job(const JobPosting& job, std::size_t dim,
                              const EmbeddingVector* embedding = nullptr);
ValidationResult validate_interaction(const Interaction& interaction);

// view and click both count as "interacted with" for BLL and session filtering;
// only click/apply count as engagement for CTR.
inline bool is_engagement(InteractionKind kind) {
    return kind == InteractionKind::click || kind == InteractionKind::apply;
}

// Clock abstraction so the replay simulator and BLL tests are deterministic.
class Clock {
public:
    virtual ~Clock() = default;
    virtual UnixSeconds now_seconds() const = 0;
};

class RealClock final : public Clock {
public:
    UnixSeconds now_seconds() const override;
};

class ReplayClock final : public Clock {
public:
    explicit ReplayClock(UnixSeconds start = 0) : now_(start) {}
    UnixSeconds now_seconds() const override { return now_; }
    void set(UnixSeconds t) { now_ = t; }
    void advance(UnixSeconds delta) { now_ += delta; }

private:
    UnixSeconds now_;
};

}  // namespace engine
