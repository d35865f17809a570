#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "engine/cf.hpp"
#include "engine/core.hpp"
#include "engine/experiment.hpp"
#include "engine/interaction_store.hpp"
#include "engine/profile.hpp"
#include "engine/text_index.hpp"
#include "engine/vector_index.hpp"

namespace engine {

struct EngineConfig {
    std::size_t dimension = 100;
    double bll_decay = 0.5;
    std::size_t cf_neighbors = 10;
    int popularity_window_days = 14;
    std::string listen_address = "127.0.0.1:8080";
    std::vector<ExperimentConfig> experiments;
};

struct Slate {
    Surface surface = Surface::similar_jobs;
    std::vector<std::string> items;
    StrategyId strategy = StrategyId::CBF;
    double latency_ms = 0.0;
    bool fallback_used = false;
};

constexpr std::size_t kSimilarSlateSize = 3;
constexpr std::size_t kHomepageSlateSize = 25;
constexpr std::size_t kHomepagePersonalizedSlots = 5;

// Interleaves a (first) and b alternately, skipping already-emitted items,
// draining the non-exhausted list, truncated to k.
std::vector<std::string> round_robin(const std::vector<std::string>& a,
                                     const std::vector<std::string>& b, std::size_t k);

// Single-process recommendation engine: catalog, embedding store, text index,
// interaction log and CF index behind one read/write lock.
class Engine {
public:
    explicit Engine(EngineConfig config);

    const EngineConfig& config() const { return config_; }

    void add_job(const JobPosting& job, const EmbeddingVector* embedding = nullptr);
    void upsert_embedding(const std::string& job_id, const EmbeddingVector& vector);
    Interaction record_interaction(const Interaction& interaction);

    bool has_job(const std::string& job_id) const;
    bool is_active(const std::string& job_id) const;
    std::size_t job_count() const;
    std::size_t interaction_count() const;
    std::size_t embedding_count() const;

    Slate recommend(const SlateRequest& req, StrategyId strategy,
                    std::optional<double> bll_decay = std::nullopt) const;

    // direct store access for tests and the replay harness (read paths)
    const VectorStore& vectors() const { return vectors_; }
    const TfIdfIndex& texts() const { return texts_; }
    const InteractionStore& interactions() const { return interactions_; }
    const CfIndex& cf() const { return cf_; }

private:
    Slate recommend_similar(const SlateRequest& req, StrategyId strategy, double d) const;
    Slate recommend_homepage(const SlateRequest& req, StrategyId strategy, double d) const;

    std::vector<std::string> personalized_homepage(const SlateRequest& req, StrategyId strategy,
                                                   double d,
                                                   const std::unordered_set<std::string>& seen,
                                                   bool& fallback_used) const;

    // lock-free check; callers already hold the engine lock
    bool active_in_catalog(const std::string& job_id) const;

    std::vector<std::string> popular(std::size_t k,
                                     const std::unordered_set<std::string>& exclude,
                                     UnixSeconds now) const;
    // reference vector for LAST: most recent interacted job with an embedding,
    // falling back to the anchor
    const EmbeddingVector* last_reference(const std::string& user_id,
                                          const std::string& anchor_job_id) const;
    std::unordered_set<std::string> with_inactive(std::unordered_set<std::string> exclude) const;

    EngineConfig config_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, JobPosting> catalog_;
    std::unordered_set<std::string> inactive_;
    VectorStore vectors_;
    TfIdfIndex texts_;
    InteractionStore interactions_;
    CfIndex cf_;
    // active jobs ordered by descending created_at, ties by ascending job_id;
    // rebuilt lazily under recency_mutex_ (dirty flips only under the write lock)
    mutable std::mutex recency_mutex_;
    mutable std::vector<std::string> recency_order_;
    mutable bool recency_dirty_ = true;
    const std::vector<std::string>& recency_order() const;
};

}  // namespace engine
