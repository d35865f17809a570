#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "engine/text_index.hpp"

using namespace engine;

namespace {

// dense brute-force TF-IDF cosine oracle with the same idf definition
struct DenseOracle {
    std::map<std::string, std::map<std::string, int>> docs;

    void add(const std::string& id, const std::string& text) {
        auto terms = tokenize(text);
        auto& counts = docs[id];
        counts.clear();
        for (auto& t : terms) counts[t] += 1;
    }

    double idf(const std::string& term) const {
        std::size_t df = 0;
        for (const auto& [id, counts] : docs) df += counts.count(term);
        return std::log((1.0 + docs.size()) / (1.0 + df)) + 1.0;
    }

    std::map<std::string, double> weights(const std::string& id) const {
        std::map<std::string, double> w;
        for (const auto& [t, tf] : docs.at(id)) w[t] = tf * idf(t);
        return w;
    }

    double score(const std::string& a, const std::string& b) const {
        auto wa = weights(a);
        auto wb = weights(b);
        double dot = 0, na = 0, nb = 0;
        for (const auto& [t, w] : wa) {
            na += w * w;
            auto it = wb.find(t);
            if (it != wb.end()) dot += w * it->second;
        }
        for (const auto& [t, w] : wb) nb += w * w;
        return dot / (std::sqrt(na) * std::sqrt(nb));
    }

    std::vector<ScoredJob> similar_to(const std::string& anchor, std::size_t k) const {
        std::vector<ScoredJob> scored;
        for (const auto& [id, counts] : docs) {
            if (id == anchor) continue;
            scored.push_back({id, score(anchor, id)});
        }
        return take_top_k(std::move(scored), k);
    }
};

}  // namespace

TEST_CASE("tokenize rules") {
    CHECK(tokenize("Java Developer (m/w)") == std::vector<std::string>{"java", "developer"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("C++ C++").empty());  // "c" dropped by length
    CHECK(tokenize("Abc-def_123") == std::vector<std::string>{"abc", "def", "123"});
}

TEST_CASE("index_job counts and upsert semantics") {
    TfIdfIndex idx;
    idx.index_job("d1", "alpha beta");
    idx.index_job("d2", "alpha gamma");
    idx.index_job("d3", "delta");
    CHECK(idx.doc_count() == 3);
    idx.index_job("d1", "alpha alpha beta");
    CHECK(idx.doc_count() == 3);
    CHECK_THROWS_AS(idx.index_job("d4", "()"), EngineError);
}

TEST_CASE("identical documents score 1") {
    TfIdfIndex idx;
    idx.index_job("d1", "senior java engineer spring");
    idx.index_job("d2", "senior java engineer spring");
    idx.index_job("d3", "bakery sales assistant");
    idx.index_job("d4", "warehouse logistics helper");
    auto r = idx.similar_to("d1", 1);
    REQUIRE(r.size() == 1);
    CHECK(r[0].job_id == "d2");
    CHECK(r[0].score == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("three-document worked example") {
    TfIdfIndex idx;
    idx.index_job("d1", "alpha beta");
    idx.index_job("d2", "alpha gamma");
    idx.index_job("d3", "delta");
    auto r = idx.similar_to("d1", 2);
    REQUIRE(r.size() == 2);
    CHECK(r[0].job_id == "d2");
    CHECK(r[0].score > 0.0);
    CHECK(r[1].job_id == "d3");
    CHECK(r[1].score == doctest::Approx(0.0));

    DenseOracle oracle;
    oracle.add("d1", "alpha beta");
    oracle.add("d2", "alpha gamma");
    oracle.add("d3", "delta");
    CHECK(r[0].score == doctest::Approx(oracle.score("d1", "d2")).epsilon(1e-9));
}

TEST_CASE("unknown anchor") {
    TfIdfIndex idx;
    idx.index_job("d1", "alpha beta");
    CHECK_THROWS_AS(idx.similar_to("missing", 3), EngineError);
}

TEST_CASE("self-similarity and symmetry") {
    TfIdfIndex idx;
    idx.index_job("d1", "alpha beta beta gamma");
    idx.index_job("d2", "alpha delta gamma gamma");
    idx.index_job("d3", "epsilon zeta");
    CHECK(idx.pair_score("d1", "d1") == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(idx.pair_score("d1", "d2") ==
          doctest::Approx(idx.pair_score("d2", "d1")).epsilon(1e-9));
}

TEST_CASE("oracle equivalence on random corpora") {
    std::mt19937 rng(23);
    const std::vector<std::string> vocab = {"alpha", "beta",  "gamma", "delta", "epsilon",
                                            "zeta",  "eta",   "theta", "iota",  "kappa",
                                            "lambda", "mu",   "nu",    "xi",    "omicron"};
    std::uniform_int_distribution<int> n_docs(3, 60);
    std::uniform_int_distribution<int> n_words(1, 12);
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);

    for (int trial = 0; trial < 20; ++trial) {
        TfIdfIndex idx;
        DenseOracle oracle;
        const int n = n_docs(rng);
        for (int i = 0; i < n; ++i) {
            std::string text;
            const int w = n_words(rng);
            for (int k = 0; k < w; ++k) text += vocab[pick(rng)] + " ";
            const std::string id = "d" + std::to_string(i);
            idx.index_job(id, text);
            oracle.add(id, text);
        }
        const std::string anchor = "d" + std::to_string(rng() % n);
        for (std::size_t k : {std::size_t(1), std::size_t(5), std::size_t(100)}) {
            auto got = idx.similar_to(anchor, k);
            auto want = oracle.similar_to(anchor, k);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i].job_id == want[i].job_id);
                CHECK(got[i].score == doctest::Approx(want[i].score).epsilon(1e-9));
            }
        }
    }
}
