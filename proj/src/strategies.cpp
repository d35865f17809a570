#include "engine/strategies.hpp"

#include <algorithm>
#include <chrono>

namespace engine {

std::vector<std::string> round_robin(const std::vector<std::string>& a,
                                     const std::vector<std::string>& b, std::size_t k) {
    std::vector<std::string> out;
    std::unordered_set<std::string> emitted;
    std::size_t ia = 0;
    std::size_t ib = 0;
    bool from_a = true;
    while (out.size() < k && (ia < a.size() || ib < b.size())) {
        const std::vector<std::string>& src = from_a ? a : b;
        std::size_t& idx = from_a ? ia : ib;
        while (idx < src.size() && emitted.count(src[idx])) ++idx;
        if (idx < src.size()) {
            out.push_back(src[idx]);
            emitted.insert(src[idx]);
            ++idx;
        }
        // only alternate while the other source still has items
        if ((from_a ? ib < b.size() : ia < a.size())) from_a = !from_a;
    }
    return out;
}

Engine::Engine(EngineConfig config)
    : config_(std::move(config)),
      vectors_(config_.dimension),
      interactions_(config_.popularity_window_days) {}

void Engine::add_job(const JobPosting& job, const EmbeddingVector* embedding) {
    auto result = validate_job(job, config_.dimension, embedding);
    if (!result.ok) throw EngineError(result.code, result.field, result.message);

    std::unique_lock lock(mutex_);
    catalog_[job.job_id] = job;
    if (job.active) {
        inactive_.erase(job.job_id);
    } else {
        inactive_.insert(job.job_id);
    }
    vectors_.set_active(job.job_id, job.active);
    if (embedding != nullptr) vectors_.upsert(job.job_id, *embedding);
    if (!tokenize(job.description).empty()) {
        texts_.index_job(job.job_id, job.description);
    }
    recency_dirty_ = true;
}

void Engine::upsert_embedding(const std::string& job_id, const EmbeddingVector& vector) {
    std::unique_lock lock(mutex_);
    vectors_.upsert(job_id, vector);
}

Interaction Engine::record_interaction(const Interaction& interaction) {
    std::unique_lock lock(mutex_);
    Interaction stored = interactions_.record(interaction);
    cf_.record(stored.user_id, stored.job_id);
    return stored;
}

bool Engine::has_job(const std::string& job_id) const {
    std::shared_lock lock(mutex_);
    return catalog_.count(job_id) > 0;
}

bool Engine::is_active(const std::string& job_id) const {
    std::shared_lock lock(mutex_);
    auto it = catalog_.find(job_id);
    return it != catalog_.end() && it->second.active;
}

std::size_t Engine::job_count() const {
    std::shared_lock lock(mutex_);
    return catalog_.size();
}

std::size_t Engine::interaction_count() const {
    std::shared_lock lock(mutex_);
    return interactions_.total_events();
}

std::size_t Engine::embedding_count() const {
    std::shared_lock lock(mutex_);
    return vectors_.size();
}

const std::vector<std::string>& Engine::recency_order() const {
    std::lock_guard guard(recency_mutex_);
    if (recency_dirty_) {
        recency_order_.clear();
        recency_order_.reserve(catalog_.size());
        for (const auto& [job_id, job] : catalog_) {
            if (job.active) recency_order_.push_back(job_id);
        }
        std::sort(recency_order_.begin(), recency_order_.end(),
                  [this](const std::string& x, const std::string& y) {
                      const auto cx = catalog_.at(x).created_at;
                      const auto cy = catalog_.at(y).created_at;
                      if (cx != cy) return cx > cy;
                      return x < y;
                  });
        recency_dirty_ = false;
    }
    return recency_order_;
}

bool Engine::active_in_catalog(const std::string& job_id) const {
    auto it = catalog_.find(job_id);
    return it != catalog_.end() && it->second.active;
}

std::unordered_set<std::string> Engine::with_inactive(
    std::unordered_set<std::string> exclude) const {
    for (const auto& job_id : inactive_) exclude.insert(job_id);
    return exclude;
}

std::vector<std::string> Engine::popular(std::size_t k,
                                         const std::unordered_set<std::string>& exclude,
                                         UnixSeconds now) const {
    return interactions_.most_popular(k, exclude, now, [this](const std::string& job_id) {
        auto it = catalog_.find(job_id);
        return it != catalog_.end() && it->second.active;
    });
}

const EmbeddingVector* Engine::last_reference(const std::string& user_id,
                                              const std::string& anchor_job_id) const {
    const auto& events = interactions_.history(user_id);
    for (auto it = events.rbegin(); it != events.rend(); ++it) {
        if (const EmbeddingVector* v = vectors_.find(it->job_id)) return v;
    }
    return vectors_.find(anchor_job_id);
}

Slate Engine::recommend(const SlateRequest& req, StrategyId strategy,
                        std::optional<double> bll_decay) const {
    const auto start = std::chrono::steady_clock::now();
    std::shared_lock lock(mutex_);
    const double d = bll_decay.value_or(config_.bll_decay);
    Slate slate = req.surface == Surface::similar_jobs
                      ? recommend_similar(req, strategy, d)
                      : recommend_homepage(req, strategy, d);
    slate.latency_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    return slate;
}

Slate Engine::recommend_similar(const SlateRequest& req, StrategyId strategy, double d) const {
    if (!req.anchor_job_id || req.anchor_job_id->empty()) {
        throw EngineError(ErrorCode::InvalidParams, "anchor_job_id",
                          "similar_jobs requests require an anchor job");
    }
    const std::string& anchor = *req.anchor_job_id;
    if (catalog_.count(anchor) == 0) {
        throw EngineError(ErrorCode::UnknownJob, "anchor_job_id",
                          "unknown anchor job: " + anchor);
    }

    auto exclude = interactions_.session_seen(req.user_id, req.session_id);
    exclude.insert(anchor);

    Slate slate;
    slate.surface = Surface::similar_jobs;
    slate.strategy = strategy;

    std::vector<ScoredJob> ranked;
    switch (strategy) {
        case StrategyId::CBF: {
            if (!texts_.contains(anchor)) {
                throw EngineError(ErrorCode::UnknownJob, "anchor_job_id",
                                  "anchor has no indexed description: " + anchor);
            }
            ranked = texts_.similar_to(anchor, kSimilarSlateSize, with_inactive(exclude));
            break;
        }
        case StrategyId::LAST: {
            const EmbeddingVector* ref = last_reference(req.user_id, anchor);
            if (ref == nullptr) {
                throw EngineError(ErrorCode::MissingEmbedding, "anchor_job_id",
                                  "no embedding resolves for LAST reference");
            }
            ranked = vectors_.top_k(*ref, kSimilarSlateSize, exclude);
            break;
        }
        case StrategyId::BLL: {
            EmbeddingVector reference;
            try {
                reference =
                    build_profile(interactions_.history(req.user_id), vectors_,
                                  req.requested_at, d)
                        .reference;
            } catch (const EngineError&) {
                // no history resolves to an embedding: anchor on the viewed job
                const EmbeddingVector* v = vectors_.find(anchor);
                if (v == nullptr) {
                    throw EngineError(ErrorCode::MissingEmbedding, "anchor_job_id",
                                      "no embedding resolves for BLL reference");
                }
                reference = *v;
            }
            ranked = vectors_.top_k(reference, kSimilarSlateSize, exclude);
            break;
        }
        default:
            throw EngineError(ErrorCode::InvalidParams, "strategy",
                              "similar_jobs supports CBF, LAST and BLL");
    }
    for (auto& s : ranked) {
        if (slate.items.size() >= kSimilarSlateSize) break;
        auto it = catalog_.find(s.job_id);
        if (it == catalog_.end() || !it->second.active) continue;
        slate.items.push_back(std::move(s.job_id));
    }

    if (slate.items.size() < kSimilarSlateSize) {
        auto pad_exclude = exclude;
        for (const auto& j : slate.items) pad_exclude.insert(j);
        for (auto& j : popular(kSimilarSlateSize - slate.items.size(), pad_exclude,
                               req.requested_at)) {
            slate.items.push_back(std::move(j));
            slate.fallback_used = true;
        }
    }
    return slate;
}

std::vector<std::string> Engine::personalized_homepage(
    const SlateRequest& req, StrategyId strategy, double d,
    const std::unordered_set<std::string>& seen, bool& fallback_used) const {
    std::vector<std::string> picks;
    auto append_ranked = [&](const std::vector<ScoredJob>& ranked) {
        for (const auto& s : ranked) {
            if (picks.size() >= kHomepagePersonalizedSlots) break;
            auto it = catalog_.find(s.job_id);
            if (it == catalog_.end() || !it->second.active) continue;
            picks.push_back(s.job_id);
        }
    };

    try {
        switch (strategy) {
            case StrategyId::CF:
                append_ranked(cf_.recommend(req.user_id, kHomepagePersonalizedSlots,
                                            seen, config_.cf_neighbors));
                break;
            case StrategyId::BLL: {
                auto profile =
                    build_profile(interactions_.history(req.user_id), vectors_,
                                  req.requested_at, d);
                append_ranked(vectors_.top_k(profile.reference, kHomepagePersonalizedSlots, seen));
                break;
            }
            case StrategyId::HYB_BLL: {
                auto profile =
                    build_profile(interactions_.history(req.user_id), vectors_,
                                  req.requested_at, d);
                std::vector<std::string> bll_items;
                for (const auto& s : vectors_.top_k(profile.reference,
                                                    kHomepagePersonalizedSlots, seen)) {
                    if (active_in_catalog(s.job_id)) bll_items.push_back(s.job_id);
                }
                std::vector<std::string> cf_items;
                try {
                    for (const auto& s : cf_.recommend(req.user_id, kHomepagePersonalizedSlots,
                                                       seen, config_.cf_neighbors)) {
                        if (active_in_catalog(s.job_id)) cf_items.push_back(s.job_id);
                    }
                } catch (const EngineError&) {
                    // CF side cold: BLL carries the slate alone
                }
                picks = round_robin(bll_items, cf_items, kHomepagePersonalizedSlots);
                break;
            }
            case StrategyId::POP:
                picks = popular(kHomepagePersonalizedSlots, seen, req.requested_at);
                break;
            default:
                throw EngineError(ErrorCode::InvalidParams, "strategy",
                                  "homepage supports CF, BLL, HYB_BLL and POP");
        }
    } catch (const EngineError& e) {
        if (e.code() == ErrorCode::InvalidParams) throw;
        // cold start: fall back to popularity
        picks.clear();
    }

    if (picks.size() < kHomepagePersonalizedSlots) {
        auto pad_exclude = seen;
        for (const auto& j : picks) pad_exclude.insert(j);
        for (auto& j : popular(kHomepagePersonalizedSlots - picks.size(), pad_exclude,
                               req.requested_at)) {
            picks.push_back(std::move(j));
            if (strategy != StrategyId::POP) fallback_used = true;
        }
    }
    return picks;
}

Slate Engine::recommend_homepage(const SlateRequest& req, StrategyId strategy, double d) const {
    Slate slate;
    slate.surface = Surface::homepage;
    slate.strategy = strategy;
    if (catalog_.empty()) return slate;

    const auto seen = interactions_.session_seen(req.user_id, req.session_id);
    slate.items = personalized_homepage(req, strategy, d, seen, slate.fallback_used);

    std::unordered_set<std::string> taken(slate.items.begin(), slate.items.end());
    for (const auto& job_id : recency_order()) {
        if (slate.items.size() >= kHomepageSlateSize) break;
        if (taken.count(job_id) || seen.count(job_id)) continue;
        slate.items.push_back(job_id);
    }
    return slate;
}

}  // namespace engine
