#include "engine/replay.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace engine::replay {

namespace {

EmbeddingVector random_unit(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    EmbeddingVector v(dim);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (auto& x : v) {
            x = gauss(rng);
            norm += x * x;
        }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    return v;
}

}  // namespace

double SyntheticWorld::affinity(const std::string& user_id, const std::string& job_id) const {
    if (user_id.size() < 2 || job_id.size() < 2) return 0.0;
    const std::size_t u = std::stoul(user_id.substr(1));
    const std::size_t j = std::stoul(job_id.substr(1));
    if (u >= user_affinity.size() || j >= job_topic.size()) return 0.0;
    return user_affinity[u][job_topic[j]];
}

SyntheticWorld generate_world(const WorldParams& params) {
    if (params.job_count == 0 || params.topic_count == 0 ||
        params.topic_count > params.job_count || params.dimension == 0) {
        throw EngineError(ErrorCode::InvalidParams, "params",
                          "counts must be positive and topic_count <= job_count");
    }
    SyntheticWorld world;
    world.params = params;
    std::mt19937_64 rng(params.seed);

    // topic centroids and topic vocabularies
    std::vector<EmbeddingVector> centroids;
    centroids.reserve(params.topic_count);
    for (std::size_t t = 0; t < params.topic_count; ++t) {
        centroids.push_back(random_unit(rng, params.dimension));
    }
    const std::size_t vocab_per_topic = 40;
    auto topic_word = [](std::size_t topic, std::size_t w) {
        return "topic" + std::to_string(topic) + "word" + std::to_string(w);
    };

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> word_pick(0, vocab_per_topic - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    world.jobs.reserve(params.job_count);
    world.job_topic.reserve(params.job_count);
    for (std::size_t i = 0; i < params.job_count; ++i) {
        const std::size_t topic = i % params.topic_count;
        world.job_topic.push_back(topic);

        jsonl::JobRecord rec;
        rec.job.job_id = world.job_name(i);
        rec.job.title = "Job " + std::to_string(i);
        rec.job.active = true;
        rec.job.created_at =
            params.start_time - static_cast<UnixSeconds>(rng() % (params.history_days * 86400ULL));

        std::ostringstream desc;
        for (std::size_t w = 0; w < params.words_per_description; ++w) {
            // 20% of words come from a random other topic, blurring boundaries
            const std::size_t src =
                unit(rng) < 0.8 ? topic : rng() % params.topic_count;
            desc << topic_word(src, word_pick(rng)) << ' ';
        }
        rec.job.description = desc.str();

        EmbeddingVector emb = centroids[topic];
        // noise magnitude is relative to the unit-norm centroid, independent of dimension
        const double noise_scale =
            params.embedding_noise / std::sqrt(static_cast<double>(params.dimension));
        double norm = 0.0;
        for (auto& x : emb) {
            x += noise_scale * gauss(rng);
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (auto& x : emb) x /= norm;
        rec.embedding = std::move(emb);
        world.jobs.push_back(std::move(rec));
    }

    // user topic affinities: sharpened random weights summing to 1
    world.user_affinity.reserve(params.user_count);
    for (std::size_t u = 0; u < params.user_count; ++u) {
        std::vector<double> aff(params.topic_count);
        double sum = 0.0;
        for (auto& a : aff) {
            const double g = unit(rng);
            a = g * g * g;  // skew mass toward a few topics
            sum += a;
        }
        if (sum == 0.0) {
            aff[rng() % params.topic_count] = 1.0;
        } else {
            for (auto& a : aff) a /= sum;
        }
        world.user_affinity.push_back(std::move(aff));
    }

    // affinity-biased seed histories with sessions
    world.end_of_history = params.start_time;
    for (std::size_t u = 0; u < params.user_count; ++u) {
        UnixSeconds t = params.start_time -
                        static_cast<UnixSeconds>(params.history_days) * 86400 +
                        static_cast<UnixSeconds>(rng() % 86400);
        std::size_t session_no = 0;
        for (std::size_t i = 0; i < params.seed_interactions_per_user; ++i) {
            if (i % 3 == 0) {
                session_no += 1;
                t += 3600 + static_cast<UnixSeconds>(rng() % (6 * 3600));
            } else {
                t += 10 + static_cast<UnixSeconds>(rng() % 300);
            }
            // sample a topic by affinity, then a job within it
            const double r = unit(rng);
            double acc = 0.0;
            std::size_t topic = 0;
            for (std::size_t k = 0; k < params.topic_count; ++k) {
                acc += world.user_affinity[u][k];
                if (r <= acc) {
                    topic = k;
                    break;
                }
            }
            const std::size_t jobs_in_topic =
                (params.job_count - topic + params.topic_count - 1) / params.topic_count;
            const std::size_t j = topic + params.topic_count * (rng() % jobs_in_topic);
            Interaction e;
            e.user_id = world.user_name(u);
            e.job_id = world.job_name(j);
            e.session_id = "seed" + std::to_string(u) + "_" + std::to_string(session_no);
            e.timestamp = std::min(t, params.start_time - 1);
            e.kind = InteractionKind::view;
            world.interactions.push_back(std::move(e));
        }
    }
    std::stable_sort(world.interactions.begin(), world.interactions.end(),
                     [](const Interaction& a, const Interaction& b) {
                         return a.timestamp < b.timestamp;
                     });
    return world;
}

void materialize(const SyntheticWorld& world, Engine& engine) {
    for (const auto& rec : world.jobs) {
        const auto parsed = jsonl::parse_job(jsonl::dump_job(rec), 0);
        engine.add_job(parsed.job, parsed.embedding ? &*parsed.embedding : nullptr);
    }
    for (const auto& e : world.interactions) {
        engine.record_interaction(jsonl::parse_interaction(jsonl::dump_interaction(e), 0));
    }
}

void write_world_files(const SyntheticWorld& world, const std::string& jobs_path,
                       const std::string& embeddings_path,
                       const std::string& interactions_path) {
    std::ofstream jobs(jobs_path);
    std::ofstream embeddings(embeddings_path);
    std::ofstream interactions(interactions_path);
    if (!jobs || !embeddings || !interactions) {
        throw EngineError(ErrorCode::InvalidParams, "path", "cannot open output file");
    }
    for (const auto& rec : world.jobs) {
        jsonl::JobRecord without_embedding = rec;
        without_embedding.embedding.reset();
        jobs << jsonl::dump_job(without_embedding) << '\n';
        if (rec.embedding) {
            embeddings << jsonl::dump_embedding({rec.job.job_id, *rec.embedding}) << '\n';
        }
    }
    for (const auto& e : world.interactions) {
        interactions << jsonl::dump_interaction(e) << '\n';
    }
}

RunResult run_experiment(const SyntheticWorld& world, Engine& engine,
                         const ExperimentConfig& config, const RunOptions& options) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const std::size_t users = world.user_affinity.size();
    if (users == 0) {
        throw EngineError(ErrorCode::InvalidParams, "world", "no users to simulate");
    }

    RunResult result;
    result.outcomes.reserve(options.requests);
    UnixSeconds now = world.end_of_history;
    std::vector<std::size_t> session_counter(users, 0);
    std::vector<UnixSeconds> last_seen(users, 0);

    for (std::size_t r = 0; r < options.requests; ++r) {
        now += options.seconds_between_requests;
        const std::size_t u = rng() % users;
        const std::string user_id = world.user_name(u);
        // new session after 30 minutes of that user's inactivity
        if (session_counter[u] == 0 || now - last_seen[u] > 30 * 60) {
            session_counter[u] += 1;
        }
        last_seen[u] = now;
        const std::string session_id =
            "live" + std::to_string(u) + "_" + std::to_string(session_counter[u]);

        SlateRequest req;
        req.surface = config.surface;
        req.user_id = user_id;
        req.session_id = session_id;
        req.requested_at = now;

        if (config.surface == Surface::similar_jobs) {
            // the user is viewing some job: their latest interaction, else a random one
            const auto& hist = engine.interactions().history(user_id);
            std::string anchor = hist.empty()
                                     ? world.job_name(rng() % world.jobs.size())
                                     : hist.back().job_id;
            req.anchor_job_id = anchor;
            Interaction view{user_id, anchor, session_id, now, InteractionKind::view};
            engine.record_interaction(view);
        }

        const Arm arm = assign(user_id, config.salt);
        const StrategyId strategy = arm == Arm::A ? config.arm_a : config.arm_b;
        const double decay = arm == Arm::A ? config.bll_decay_a : config.bll_decay_b;

        Slate slate = engine.recommend(req, strategy, decay);
        if (options.observer) options.observer(req, slate);

        OutcomeRecord outcome;
        outcome.experiment_id = config.experiment_id;
        outcome.arm = arm;
        outcome.user_id = user_id;
        outcome.items = slate.items;
        outcome.served_at = now;
        outcome.latency_ms = slate.latency_ms;

        const auto& bias = world.params.position_bias;
        for (std::size_t rank = 0; rank < slate.items.size(); ++rank) {
            const double pos =
                bias.empty() ? 0.0 : bias[std::min(rank, bias.size() - 1)];
            const double aff = world.affinity(user_id, slate.items[rank]);
            const double w = world.params.affinity_weight;
            const double p = pos * ((1.0 - w) + w * aff * world.params.position_bias.size());
            if (unit(rng) < std::clamp(p, 0.0, 1.0)) {
                outcome.clicked_items.push_back(slate.items[rank]);
                Interaction click{user_id, slate.items[rank], session_id, now,
                                  InteractionKind::click};
                engine.record_interaction(click);
            }
        }
        result.outcomes.push_back(std::move(outcome));
    }

    result.report = report(config, result.outcomes);
    return result;
}

std::vector<LatencyPercentiles> bench_strategies(const SyntheticWorld& world, Engine& engine,
                                                 std::size_t requests, std::uint64_t seed) {
    struct Case {
        Surface surface;
        StrategyId strategy;
    };
    const Case cases[] = {
        {Surface::similar_jobs, StrategyId::CBF},
        {Surface::similar_jobs, StrategyId::LAST},
        {Surface::similar_jobs, StrategyId::BLL},
        {Surface::homepage, StrategyId::CF},
        {Surface::homepage, StrategyId::BLL},
        {Surface::homepage, StrategyId::HYB_BLL},
        {Surface::homepage, StrategyId::POP},
    };

    std::mt19937_64 rng(seed);
    const std::size_t users = world.user_affinity.size();
    std::vector<LatencyPercentiles> out;
    for (const Case& c : cases) {
        std::vector<double> latencies;
        latencies.reserve(requests);
        for (std::size_t r = 0; r < requests; ++r) {
            const std::size_t u = users == 0 ? 0 : rng() % users;
            SlateRequest req;
            req.surface = c.surface;
            req.user_id = users == 0 ? "bench_user" : world.user_name(u);
            req.session_id = "bench" + std::to_string(r);
            req.requested_at = world.end_of_history + static_cast<UnixSeconds>(r);
            if (c.surface == Surface::similar_jobs) {
                req.anchor_job_id = world.job_name(rng() % world.jobs.size());
            }
            latencies.push_back(engine.recommend(req, c.strategy).latency_ms);
        }
        std::sort(latencies.begin(), latencies.end());
        auto pct = [&latencies](double q) {
            if (latencies.empty()) return 0.0;
            const std::size_t idx = static_cast<std::size_t>(
                q * static_cast<double>(latencies.size() - 1) + 0.5);
            return latencies[std::min(idx, latencies.size() - 1)];
        };
        out.push_back({c.strategy, c.surface, pct(0.50), pct(0.95), pct(0.99)});
    }
    return out;
}

}  // namespace engine::replay
