#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "engine/core.hpp"

namespace engine {

// Append-only interaction log with per-user histories, per-session seen sets
// and a trailing-window popularity table.
class InteractionStore {
public:
    explicit InteractionStore(int window_days = 14);

    // Records the event; if session_id is empty, assigns a synthetic session
    // that rolls over after 30 minutes of user inactivity. Returns the stored
    // interaction (with the resolved session_id).
    Interaction record(Interaction interaction);

    const std::vector<Interaction>& history(const std::string& user_id) const;
    std::size_t total_events() const { return total_events_; }
    std::size_t user_count() const { return histories_.size(); }

    std::unordered_set<std::string> session_seen(const std::string& user_id,
                                                 const std::string& session_id) const;

    // All job_ids the user ever interacted with (the CF item set source).
    std::unordered_set<std::string> user_items(const std::string& user_id) const;

    // Top-k active jobs by interaction count within the trailing window ending
    // at `now`; ties broken by ascending job_id. `is_active` filters jobs.
    std::vector<std::string> most_popular(
        std::size_t k, const std::unordered_set<std::string>& exclude, UnixSeconds now,
        const std::function<bool(const std::string&)>& is_active = nullptr) const;

    int window_days() const { return window_days_; }

private:
    struct PopEvent {
        UnixSeconds timestamp;
        std::string job_id;
    };

    int window_days_;
    std::size_t total_events_ = 0;
    std::unordered_map<std::string, std::vector<Interaction>> histories_;
    std::unordered_map<std::string, std::unordered_set<std::string>> session_jobs_;

    // popularity events sorted by timestamp; window advance is lazy
    mutable std::vector<PopEvent> pop_events_;
    mutable std::size_t pop_start_ = 0;
    mutable std::unordered_map<std::string, std::int64_t> pop_counts_;
    mutable UnixSeconds last_window_start_ = 0;

    struct SessionState {
        UnixSeconds last_seen = 0;
        std::uint64_t counter = 0;
    };
    std::unordered_map<std::string, SessionState> auto_sessions_;

    void advance_window(UnixSeconds now) const;
};

}  // namespace engine
