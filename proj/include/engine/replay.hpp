#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "engine/experiment.hpp"
#include "engine/jsonl.hpp"
#include "engine/strategies.hpp"

namespace engine::replay {

struct WorldParams {
    std::uint64_t seed = 1;
    std::size_t job_count = 1000;
    std::size_t user_count = 200;
    std::size_t topic_count = 8;
    std::size_t dimension = 100;
    double embedding_noise = 0.35;
    std::size_t words_per_description = 30;
    std::size_t seed_interactions_per_user = 6;
    UnixSeconds start_time = 1'600'000'000;
    int history_days = 7;
    // click model
    std::vector<double> position_bias = {0.10, 0.07, 0.05, 0.04, 0.03};
    double affinity_weight = 0.8;
};

struct SyntheticWorld {
    WorldParams params;
    std::vector<jsonl::JobRecord> jobs;
    std::vector<Interaction> interactions;
    std::vector<std::size_t> job_topic;                // job index -> topic
    std::vector<std::vector<double>> user_affinity;   // user index -> topic distribution
    UnixSeconds end_of_history = 0;

    std::string user_name(std::size_t i) const { return "u" + std::to_string(i); }
    std::string job_name(std::size_t i) const { return "j" + std::to_string(i); }
    double affinity(const std::string& user_id, const std::string& job_id) const;
};

SyntheticWorld generate_world(const WorldParams& params);

// Serializes every record through the JSONL dump/parse pair while loading,
// so replay exercises the same parsing path the service uses.
void materialize(const SyntheticWorld& world, Engine& engine);

void write_world_files(const SyntheticWorld& world, const std::string& jobs_path,
                       const std::string& embeddings_path, const std::string& interactions_path);

struct RunOptions {
    std::size_t requests = 10'000;
    UnixSeconds seconds_between_requests = 30;
    std::uint64_t seed = 1;
    // invoked for every served slate (invariant checks, logging)
    std::function<void(const SlateRequest&, const Slate&)> observer;
};

struct RunResult {
    ExperimentReport report;
    std::vector<OutcomeRecord> outcomes;
};

RunResult run_experiment(const SyntheticWorld& world, Engine& engine,
                         const ExperimentConfig& config, const RunOptions& options);

struct LatencyPercentiles {
    StrategyId strategy = StrategyId::CBF;
    Surface surface = Surface::similar_jobs;
    double p50_ms = 0.0;
    double p95_ms = 0.0;
    double p99_ms = 0.0;
};

// Serves `requests` slates per strategy on both surfaces and reports latency
// percentiles from the engine's own per-slate measurements.
std::vector<LatencyPercentiles> bench_strategies(const SyntheticWorld& world, Engine& engine,
                                                 std::size_t requests, std::uint64_t seed = 1);

}  // namespace engine::replay
