#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "engine/core.hpp"

namespace engine {

struct ScoredJob {
    std::string job_id;
    double score = 0.0;

    friend bool operator==(const ScoredJob&, const ScoredJob&) = default;
};

double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// Exact flat-scan cosine top-k over unit-normalized vectors. Inactive jobs
// are tombstoned (kept resolvable for profile building, hidden from queries).
class VectorStore {
public:
    explicit VectorStore(std::size_t dimension);

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return entries_.size(); }

    void upsert(const std::string& job_id, const EmbeddingVector& vector);
    void set_active(const std::string& job_id, bool active);

    bool contains(const std::string& job_id) const;
    // Returns the stored unit-normalized vector, or nullptr when absent.
    const EmbeddingVector* find(const std::string& job_id) const;

    std::vector<ScoredJob> top_k(const EmbeddingVector& reference, std::size_t k,
                                 const std::unordered_set<std::string>& exclude = {}) const;

private:
    std::size_t dimension_;
    std::unordered_map<std::string, EmbeddingVector> entries_;
    std::unordered_set<std::string> tombstones_;
};

// Shared ordering for scored result lists: descending score, ties by
// ascending job_id, truncated to k.
std::vector<ScoredJob> take_top_k(std::vector<ScoredJob> scored, std::size_t k);

}  // namespace engine
