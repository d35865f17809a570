#include "engine/cf.hpp"

#include <algorithm>
#include <cmath>

namespace engine {

void CfIndex::record(const std::string& user_id, const std::string& job_id) {
    if (user_id.empty() || job_id.empty()) {
        throw EngineError(ErrorCode::EmptyIdentifier, user_id.empty() ? "user_id" : "job_id",
                          "identifier must be non-empty");
    }
    user_items_[user_id].insert(job_id);
    item_users_[job_id].insert(user_id);
}

const std::unordered_set<std::string>& CfIndex::items_of(const std::string& user_id) const {
    static const std::unordered_set<std::string> empty;
    auto it = user_items_.find(user_id);
    return it == user_items_.end() ? empty : it->second;
}

const std::unordered_set<std::string>& CfIndex::users_of(const std::string& job_id) const {
    static const std::unordered_set<std::string> empty;
    auto it = item_users_.find(job_id);
    return it == item_users_.end() ? empty : it->second;
}

std::vector<ScoredUser> CfIndex::neighbors(const std::string& user_id, std::size_t k_n) const {
    const auto& own = items_of(user_id);
    if (own.empty()) {
        throw EngineError(ErrorCode::ColdStartUser, "user_id",
                          "user has no interactions: " + user_id);
    }

    // candidates share at least one item, gathered via the inverted index
    std::unordered_map<std::string, std::size_t> overlap;
    for (const auto& job_id : own) {
        for (const auto& other : users_of(job_id)) {
            if (other != user_id) overlap[other] += 1;
        }
    }

    std::vector<ScoredUser> scored;
    scored.reserve(overlap.size());
    const double own_sqrt = std::sqrt(static_cast<double>(own.size()));
    for (const auto& [other, shared] : overlap) {
        const double other_sqrt =
            std::sqrt(static_cast<double>(user_items_.at(other).size()));
        scored.push_back({other, static_cast<double>(shared) / (own_sqrt * other_sqrt)});
    }
    std::sort(scored.begin(), scored.end(), [](const ScoredUser& a, const ScoredUser& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.user_id < b.user_id;
    });
    if (scored.size() > k_n) scored.resize(k_n);
    return scored;
}

std::vector<ScoredJob> CfIndex::recommend(const std::string& user_id, std::size_t k,
                                          const std::unordered_set<std::string>& exclude,
                                          std::size_t k_n) const {
    const auto nbrs = neighbors(user_id, k_n);
    const auto& own = items_of(user_id);

    std::unordered_map<std::string, double> scores;
    for (const auto& nbr : nbrs) {
        for (const auto& job_id : user_items_.at(nbr.user_id)) {
            if (own.count(job_id) || exclude.count(job_id)) continue;
            scores[job_id] += nbr.similarity;
        }
    }

    std::vector<ScoredJob> scored;
    scored.reserve(scores.size());
    for (auto& [job_id, s] : scores) scored.push_back({job_id, s});
    return take_top_k(std::move(scored), k);
}

}  // namespace engine
