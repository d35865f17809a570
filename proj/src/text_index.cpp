#include "engine/text_index.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace engine {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> terms;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            if (current.size() >= 2) terms.push_back(current);
            current.clear();
        }
    }
    if (current.size() >= 2) terms.push_back(current);
    return terms;
}

void TfIdfIndex::index_job(const std::string& job_id, const std::string& description) {
    auto terms = tokenize(description);
    if (terms.empty()) {
        throw EngineError(ErrorCode::EmptyDocument, "description",
                          "description tokenizes to no indexable terms");
    }
    remove_job(job_id);
    auto& counts = doc_terms_[job_id];
    for (auto& t : terms) counts[t] += 1;
    for (const auto& [term, tf] : counts) postings_[term][job_id] = tf;
    ++revision_;
}

void TfIdfIndex::remove_job(const std::string& job_id) {
    auto it = doc_terms_.find(job_id);
    if (it == doc_terms_.end()) return;
    ++revision_;
    for (const auto& [term, tf] : it->second) {
        auto pit = postings_.find(term);
        if (pit == postings_.end()) continue;
        pit->second.erase(job_id);
        if (pit->second.empty()) postings_.erase(pit);
    }
    doc_terms_.erase(it);
}

double TfIdfIndex::idf(const std::string& term) const {
    const auto it = postings_.find(term);
    const std::size_t df = it == postings_.end() ? 0 : it->second.size();
    return std::log((1.0 + static_cast<double>(doc_terms_.size())) /
                    (1.0 + static_cast<double>(df))) +
           1.0;
}

std::unordered_map<std::string, double> TfIdfIndex::tfidf_weights(
    const std::string& job_id) const {
    std::unordered_map<std::string, double> weights;
    const auto& counts = doc_terms_.at(job_id);
    weights.reserve(counts.size());
    for (const auto& [term, tf] : counts) {
        weights[term] = static_cast<double>(tf) * idf(term);
    }
    return weights;
}

double TfIdfIndex::doc_norm(const std::unordered_map<std::string, double>& weights) const {
    double s = 0.0;
    for (const auto& [term, w] : weights) s += w * w;
    return std::sqrt(s);
}

const std::unordered_map<std::string, double>& TfIdfIndex::cached_norms() const {
    std::lock_guard<std::mutex> guard(norm_mutex_);
    if (norms_revision_ != revision_) {
        norms_.clear();
        norms_.reserve(doc_terms_.size());
        for (const auto& [doc, counts] : doc_terms_) {
            double s = 0.0;
            for (const auto& [term, tf] : counts) {
                const double w = static_cast<double>(tf) * idf(term);
                s += w * w;
            }
            norms_[doc] = std::sqrt(s);
        }
        norms_revision_ = revision_;
    }
    return norms_;
}

std::vector<ScoredJob> TfIdfIndex::similar_to(
    const std::string& anchor_job_id, std::size_t k,
    const std::unordered_set<std::string>& exclude) const {
    if (!contains(anchor_job_id)) {
        throw EngineError(ErrorCode::UnknownJob, "anchor_job_id",
                          "anchor job is not indexed: " + anchor_job_id);
    }
    const auto anchor = tfidf_weights(anchor_job_id);
    const auto& norms = cached_norms();
    const double anchor_norm = norms.at(anchor_job_id);

    std::unordered_map<std::string, double> dots;
    for (const auto& [term, w_anchor] : anchor) {
        const auto pit = postings_.find(term);
        if (pit == postings_.end()) continue;
        const double idf_t = idf(term);
        for (const auto& [doc, tf] : pit->second) {
            if (doc == anchor_job_id || exclude.count(doc)) continue;
            dots[doc] += w_anchor * static_cast<double>(tf) * idf_t;
        }
    }

    std::vector<ScoredJob> scored;
    scored.reserve(dots.size());
    for (const auto& [doc, d] : dots) {
        scored.push_back({doc, d / (anchor_norm * norms.at(doc))});
    }
    if (scored.size() < k) {
        // docs sharing no term score 0 but are still ranked, as a dense scan would
        for (const auto& [doc, counts] : doc_terms_) {
            if (doc == anchor_job_id || exclude.count(doc) || dots.count(doc)) continue;
            scored.push_back({doc, 0.0});
        }
    }
    return take_top_k(std::move(scored), k);
}

double TfIdfIndex::pair_score(const std::string& a, const std::string& b) const {
    if (!contains(a) || !contains(b)) {
        throw EngineError(ErrorCode::UnknownJob, "job_id", "document not indexed");
    }
    const auto wa = tfidf_weights(a);
    const auto wb = tfidf_weights(b);
    double d = 0.0;
    for (const auto& [term, w] : wa) {
        auto it = wb.find(term);
        if (it != wb.end()) d += w * it->second;
    }
    return d / (doc_norm(wa) * doc_norm(wb));
}

}  // namespace engine
