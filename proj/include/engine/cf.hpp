#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "engine/core.hpp"
#include "engine/vector_index.hpp"

namespace engine {

struct ScoredUser {
    std::string user_id;
    double similarity = 0.0;
};

// User-based CF over an item -> users inverted index; binary item sets,
// cosine similarity |A∩B| / (sqrt|A| * sqrt|B|).
class CfIndex {
public:
    void record(const std::string& user_id, const std::string& job_id);

    bool has_user(const std::string& user_id) const { return user_items_.count(user_id) > 0; }
    const std::unordered_set<std::string>& items_of(const std::string& user_id) const;
    const std::unordered_set<std::string>& users_of(const std::string& job_id) const;

    std::vector<ScoredUser> neighbors(const std::string& user_id, std::size_t k_n) const;

    std::vector<ScoredJob> recommend(const std::string& user_id, std::size_t k,
                                     const std::unordered_set<std::string>& exclude = {},
                                     std::size_t k_n = 10) const;

private:
    std::unordered_map<std::string, std::unordered_set<std::string>> user_items_;
    std::unordered_map<std::string, std::unordered_set<std::string>> item_users_;
};

}  // namespace engine
