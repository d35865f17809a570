#pragma once

#include <map>
#include <mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "engine/core.hpp"
#include "engine/vector_index.hpp"

namespace engine {

// Lowercase, split on non-alphanumeric runs, drop terms shorter than 2.
std::vector<std::string> tokenize(const std::string& text);

// TF-IDF inverted index over job descriptions.
// weight(t,d) = tf(t,d) * idf(t), idf(t) = ln((1 + N) / (1 + df(t))) + 1.
class TfIdfIndex {
public:
    void index_job(const std::string& job_id, const std::string& description);
    void remove_job(const std::string& job_id);

    std::size_t doc_count() const { return doc_terms_.size(); }
    bool contains(const std::string& job_id) const { return doc_terms_.count(job_id) > 0; }

    std::vector<ScoredJob> similar_to(const std::string& anchor_job_id, std::size_t k,
                                      const std::unordered_set<std::string>& exclude = {}) const;

    // Cosine between two indexed documents; anchor exclusion does not apply.
    double pair_score(const std::string& a, const std::string& b) const;

private:
    std::unordered_map<std::string, double> tfidf_weights(const std::string& job_id) const;
    double idf(const std::string& term) const;
    double doc_norm(const std::unordered_map<std::string, double>& weights) const;
    const std::unordered_map<std::string, double>& cached_norms() const;

    // term -> (job_id -> raw term frequency)
    std::unordered_map<std::string, std::unordered_map<std::string, int>> postings_;
    // job_id -> (term -> raw term frequency)
    std::unordered_map<std::string, std::unordered_map<std::string, int>> doc_terms_;

    // doc norms depend on every idf, so the cache is rebuilt lazily after any
    // corpus change; norm_mutex_ makes the rebuild safe under concurrent reads
    std::uint64_t revision_ = 0;
    mutable std::mutex norm_mutex_;
    mutable std::uint64_t norms_revision_ = ~std::uint64_t{0};
    mutable std::unordered_map<std::string, double> norms_;
};

}  // namespace engine
