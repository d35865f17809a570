#include "engine/profile.hpp"

#include <algorithm>
#include <cmath>

namespace engine {

double bll_value(const std::vector<UnixSeconds>& timestamps, UnixSeconds ts_ref, double d) {
    if (timestamps.empty()) {
        throw EngineError(ErrorCode::EmptyHistory, "timestamps", "no interactions to score");
    }
    if (d <= 0.0) {
        throw EngineError(ErrorCode::NonPositiveDecay, "d", "decay exponent must be positive");
    }
    double sum = 0.0;
    for (UnixSeconds ts : timestamps) {
        const double delta =
            std::max<double>(static_cast<double>(ts_ref - ts), 1.0);
        sum += std::pow(delta, -d);
    }
    return std::log(sum);
}

BllProfile build_profile(const std::vector<Interaction>& history, const VectorStore& embeddings,
                         UnixSeconds ts_ref, double d) {
    BllProfile profile;
    profile.d = d;
    if (!history.empty()) profile.user_id = history.front().user_id;

    std::map<std::string, std::vector<UnixSeconds>> by_job;
    for (const auto& e : history) by_job[e.job_id].push_back(e.timestamp);

    // jobs without a stored embedding are skipped before the softmax
    std::map<std::string, double> scores;
    for (const auto& [job_id, timestamps] : by_job) {
        if (embeddings.find(job_id) == nullptr) continue;
        scores[job_id] = bll_value(timestamps, ts_ref, d);
    }
    if (scores.empty()) {
        throw EngineError(ErrorCode::EmptyHistory, "history",
                          "no interaction resolves to a stored embedding");
    }
    profile.values = scores;

    double max_score = scores.begin()->second;
    for (const auto& [job_id, s] : scores) max_score = std::max(max_score, s);

    double denom = 0.0;
    for (const auto& [job_id, s] : scores) denom += std::exp(s - max_score);

    profile.reference.assign(embeddings.dimension(), 0.0);
    for (const auto& [job_id, s] : scores) {
        const double w = std::exp(s - max_score) / denom;
        profile.weights[job_id] = w;
        const EmbeddingVector& v = *embeddings.find(job_id);
        for (std::size_t i = 0; i < v.size(); ++i) profile.reference[i] += w * v[i];
    }
    return profile;
}

}  // namespace engine
