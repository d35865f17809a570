#include "engine/interaction_store.hpp"

#include <algorithm>

#include "engine/vector_index.hpp"

namespace engine {

namespace {
constexpr UnixSeconds kSessionGapSeconds = 30 * 60;
}

InteractionStore::InteractionStore(int window_days) : window_days_(window_days) {
    if (window_days <= 0) {
        throw EngineError(ErrorCode::InvalidParams, "window_days",
                          "popularity window must be positive");
    }
}

Interaction InteractionStore::record(Interaction interaction) {
    if (interaction.session_id.empty()) {
        auto& state = auto_sessions_[interaction.user_id];
        if (state.counter == 0 || interaction.timestamp - state.last_seen > kSessionGapSeconds) {
            state.counter += 1;
        }
        state.last_seen = interaction.timestamp;
        interaction.session_id =
            "auto:" + interaction.user_id + ":" + std::to_string(state.counter);
    }
    auto result = validate_interaction(interaction);
    if (!result.ok) {
        throw EngineError(result.code == ErrorCode::ValidationFailed ? ErrorCode::ValidationFailed
                                                                     : result.code,
                          result.field, result.message);
    }

    auto& events = histories_[interaction.user_id];
    // keep timestamp-ascending order, stable for equal timestamps
    auto pos = std::upper_bound(events.begin(), events.end(), interaction.timestamp,
                                [](UnixSeconds t, const Interaction& e) { return t < e.timestamp; });
    events.insert(pos, interaction);
    total_events_ += 1;

    session_jobs_[interaction.user_id + "\x1f" + interaction.session_id].insert(
        interaction.job_id);

    // invariant: pop_counts_ covers events with timestamp >= last_window_start_,
    // pop_start_ is the index of the first such event
    auto ppos = std::upper_bound(
        pop_events_.begin(), pop_events_.end(), interaction.timestamp,
        [](UnixSeconds t, const PopEvent& e) { return t < e.timestamp; });
    if (interaction.timestamp >= last_window_start_) {
        pop_counts_[interaction.job_id] += 1;
    } else {
        pop_start_ += 1;
    }
    pop_events_.insert(ppos, {interaction.timestamp, interaction.job_id});

    return interaction;
}

const std::vector<Interaction>& InteractionStore::history(const std::string& user_id) const {
    static const std::vector<Interaction> empty;
    auto it = histories_.find(user_id);
    return it == histories_.end() ? empty : it->second;
}

std::unordered_set<std::string> InteractionStore::session_seen(
    const std::string& user_id, const std::string& session_id) const {
    auto it = session_jobs_.find(user_id + "\x1f" + session_id);
    return it == session_jobs_.end() ? std::unordered_set<std::string>{} : it->second;
}

std::unordered_set<std::string> InteractionStore::user_items(const std::string& user_id) const {
    std::unordered_set<std::string> items;
    for (const auto& e : history(user_id)) items.insert(e.job_id);
    return items;
}

void InteractionStore::advance_window(UnixSeconds now) const {
    const UnixSeconds window_start =
        now - static_cast<UnixSeconds>(window_days_) * 24 * 3600;
    if (window_start < last_window_start_) {
        // clock moved backwards: recount from scratch
        pop_counts_.clear();
        pop_start_ = 0;
        for (std::size_t i = 0; i < pop_events_.size(); ++i) {
            if (pop_events_[i].timestamp < window_start) {
                pop_start_ = i + 1;
            } else {
                pop_counts_[pop_events_[i].job_id] += 1;
            }
        }
    } else {
        while (pop_start_ < pop_events_.size() &&
               pop_events_[pop_start_].timestamp < window_start) {
            auto it = pop_counts_.find(pop_events_[pop_start_].job_id);
            if (it != pop_counts_.end() && --it->second <= 0) pop_counts_.erase(it);
            ++pop_start_;
        }
    }
    last_window_start_ = window_start;
}

std::vector<std::string> InteractionStore::most_popular(
    std::size_t k, const std::unordered_set<std::string>& exclude, UnixSeconds now,
    const std::function<bool(const std::string&)>& is_active) const {
    advance_window(now);
    std::vector<ScoredJob> scored;
    scored.reserve(pop_counts_.size());
    for (const auto& [job_id, count] : pop_counts_) {
        if (count <= 0 || exclude.count(job_id)) continue;
        if (is_active && !is_active(job_id)) continue;
        scored.push_back({job_id, static_cast<double>(count)});
    }
    auto top = take_top_k(std::move(scored), k);
    std::vector<std::string> result;
    result.reserve(top.size());
    for (auto& s : top) result.push_back(std::move(s.job_id));
    return result;
}

}  // namespace engine
