#pragma once

#include <map>
#include <string>
#include <vector>

#include "engine/core.hpp"
#include "engine/interaction_store.hpp"
#include "engine/vector_index.hpp"

namespace engine {

struct BllProfile {
    std::string user_id;
    double d = 0.5;
    std::map<std::string, double> values;   // job_id -> BLL value
    std::map<std::string, double> weights;  // job_id -> softmax weight
    EmbeddingVector reference;              // weighted sum of job embeddings
};

// ln(sum_i max(ts_ref - ts_i, 1)^{-d}); deltas clamped below at 1 second.
double bll_value(const std::vector<UnixSeconds>& timestamps, UnixSeconds ts_ref, double d);

// Groups the history by job, scores each distinct job with bll_value, softmax
// normalizes (max-subtracted) over jobs that resolve to a stored embedding and
// combines those embeddings into the reference vector.
BllProfile build_profile(const std::vector<Interaction>& history, const VectorStore& embeddings,
                         UnixSeconds ts_ref, double d);

}  // namespace engine
