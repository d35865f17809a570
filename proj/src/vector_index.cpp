#include "engine/vector_index.hpp"

#include <algorithm>
#include <cmath>

namespace engine {

namespace {

double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const EmbeddingVector& v) { return std::sqrt(dot(v, v)); }

}  // namespace

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.size() != b.size()) {
        throw EngineError(ErrorCode::DimensionMismatch, "vector",
                          "cosine over vectors of unequal dimension");
    }
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) {
        throw EngineError(ErrorCode::ZeroVector, "vector", "cosine of a zero vector");
    }
    return dot(a, b) / (na * nb);
}

std::vector<ScoredJob> take_top_k(std::vector<ScoredJob> scored, std::size_t k) {
    const auto better = [](const ScoredJob& x, const ScoredJob& y) {
        if (x.score != y.score) return x.score > y.score;
        return x.job_id < y.job_id;
    };
    if (scored.size() > k) {
        std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k),
                          scored.end(), better);
        scored.resize(k);
    } else {
        std::sort(scored.begin(), scored.end(), better);
    }
    return scored;
}

VectorStore::VectorStore(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) {
        throw EngineError(ErrorCode::InvalidParams, "dimension", "dimension must be positive");
    }
}

void VectorStore::upsert(const std::string& job_id, const EmbeddingVector& vector) {
    if (job_id.empty()) {
        throw EngineError(ErrorCode::EmptyIdentifier, "job_id", "job_id must be non-empty");
    }
    if (vector.size() != dimension_) {
        throw EngineError(ErrorCode::DimensionMismatch, "vector",
                          "vector length " + std::to_string(vector.size()) +
                              " does not match store dimension " + std::to_string(dimension_));
    }
    for (double v : vector) {
        if (!std::isfinite(v)) {
            throw EngineError(ErrorCode::NonFiniteValue, "vector",
                              "vector contains a non-finite entry");
        }
    }
    const double n = norm(vector);
    if (n == 0.0) {
        throw EngineError(ErrorCode::ZeroVector, "vector", "cannot index a zero vector");
    }
    EmbeddingVector unit(vector.size());
    for (std::size_t i = 0; i < vector.size(); ++i) unit[i] = vector[i] / n;
    entries_[job_id] = std::move(unit);
}

void VectorStore::set_active(const std::string& job_id, bool active) {
    if (active) {
        tombstones_.erase(job_id);
    } else {
        tombstones_.insert(job_id);
    }
}

bool VectorStore::contains(const std::string& job_id) const {
    return entries_.count(job_id) > 0;
}

const EmbeddingVector* VectorStore::find(const std::string& job_id) const {
    auto it = entries_.find(job_id);
    return it == entries_.end() ? nullptr : &it->second;
}

std::vector<ScoredJob> VectorStore::top_k(const EmbeddingVector& reference, std::size_t k,
                                          const std::unordered_set<std::string>& exclude) const {
    if (reference.size() != dimension_) {
        throw EngineError(ErrorCode::DimensionMismatch, "reference",
                          "reference dimension does not match store");
    }
    const double n = norm(reference);
    if (n == 0.0) {
        throw EngineError(ErrorCode::ZeroVector, "reference", "zero reference vector");
    }
    // score without copying ids; only the selected k are materialized
    std::vector<std::pair<double, const std::string*>> scored;
    scored.reserve(entries_.size());
    for (const auto& [job_id, unit] : entries_) {
        if (tombstones_.count(job_id) || exclude.count(job_id)) continue;
        // stored vectors are unit-normalized, so dot/n is the cosine
        scored.emplace_back(dot(reference, unit) / n, &job_id);
    }
    const auto better = [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first > y.first;
        return *x.second < *y.second;
    };
    if (scored.size() > k) {
        std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k),
                          scored.end(), better);
        scored.resize(k);
    } else {
        std::sort(scored.begin(), scored.end(), better);
    }
    std::vector<ScoredJob> out;
    out.reserve(scored.size());
    for (const auto& [score, id] : scored) out.push_back({*id, score});
    return out;
}

}  // namespace engine
