#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "engine/jsonl.hpp"
#include "engine/replay.hpp"
#include "engine/service.hpp"
#include "engine/strategies.hpp"

namespace {

using namespace engine;
using nlohmann::json;

std::size_t load_file(Engine& eng, const std::string& path,
                      const std::function<void(const std::string&, std::size_t)>& apply) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return jsonl::for_each_line(in, apply);
}

void load_into_engine(Engine& eng, const std::string& jobs_path,
                      const std::string& embeddings_path,
                      const std::string& interactions_path) {
    if (!jobs_path.empty()) {
        const std::size_t n =
            load_file(eng, jobs_path, [&eng](const std::string& line, std::size_t line_no) {
                const auto rec = jsonl::parse_job(line, line_no);
                eng.add_job(rec.job, rec.embedding ? &*rec.embedding : nullptr);
            });
        std::cout << "loaded " << n << " jobs from " << jobs_path << "\n";
    }
    if (!embeddings_path.empty()) {
        const std::size_t n = load_file(
            eng, embeddings_path, [&eng](const std::string& line, std::size_t line_no) {
                const auto rec = jsonl::parse_embedding(line, line_no);
                eng.upsert_embedding(rec.job_id, rec.vector);
            });
        std::cout << "loaded " << n << " embeddings from " << embeddings_path << "\n";
    }
    if (!interactions_path.empty()) {
        const std::size_t n = load_file(
            eng, interactions_path, [&eng](const std::string& line, std::size_t line_no) {
                eng.record_interaction(jsonl::parse_interaction(line, line_no));
            });
        std::cout << "loaded " << n << " interactions from " << interactions_path << "\n";
    }
}

json report_to_json(const ExperimentReport& rep) {
    auto arm = [](const ArmSummary& s) {
        json daily = json::array();
        for (const auto& [day, c] : s.daily_ctr) daily.push_back({{"day", day}, {"ctr", c}});
        return json{{"strategy", strategy_name(s.strategy)},
                    {"user_count", s.user_count},
                    {"slate_count", s.slate_count},
                    {"item_count", s.item_count},
                    {"click_count", s.click_count},
                    {"ctr", s.ctr},
                    {"mean_runtime_ms", s.mean_runtime_ms},
                    {"daily_ctr", daily}};
    };
    return json{{"experiment_id", rep.experiment_id},
                {"arm_a", arm(rep.arm_a)},
                {"arm_b", arm(rep.arm_b)},
                {"relative_ctr_increase", rep.relative_ctr_increase},
                {"relative_runtime_decrease", rep.relative_runtime_decrease},
                {"chi2_statistic", rep.chi2_statistic},
                {"chi2_p_value", rep.chi2_p_value},
                {"ttest_statistic", rep.ttest_statistic},
                {"ttest_p_value", rep.ttest_p_value},
                {"ctr_significance", rep.ctr_significance},
                {"runtime_significance", rep.runtime_significance}};
}

void write_daily_csv(const ExperimentReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file: " + path);
    out << "day,arm,strategy,ctr\n";
    for (const ArmSummary* s : {&rep.arm_a, &rep.arm_b}) {
        const char* arm = s == &rep.arm_a ? "A" : "B";
        for (const auto& [day, c] : s->daily_ctr) {
            out << day << ',' << arm << ',' << strategy_name(s->strategy) << ',' << c << '\n';
        }
    }
}

StrategyId strategy_or_die(const std::string& name) {
    const auto s = parse_strategy(name);
    if (!s) throw std::runtime_error("unknown strategy: " + name);
    return *s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"real-time job recommendation engine"};
    app.require_subcommand(1);

    // serve
    auto* serve = app.add_subcommand("serve", "start the HTTP API");
    std::string config_path;
    std::string jobs_path, embeddings_path, interactions_path;
    serve->add_option("--config", config_path, "engine config (JSON)")->required();
    serve->add_option("--jobs", jobs_path, "jobs JSONL to preload");
    serve->add_option("--embeddings", embeddings_path, "embeddings JSONL to preload");
    serve->add_option("--interactions", interactions_path, "interactions JSONL to preload");

    // load
    auto* load = app.add_subcommand("load", "validate and ingest JSONL files");
    std::string l_jobs, l_embeddings, l_interactions;
    std::size_t l_dim = 100;
    load->add_option("--jobs", l_jobs, "jobs JSONL");
    load->add_option("--embeddings", l_embeddings, "embeddings JSONL");
    load->add_option("--interactions", l_interactions, "interactions JSONL");
    load->add_option("--dim", l_dim, "embedding dimension");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run a synthetic A/B experiment");
    std::uint64_t seed = 7;
    std::size_t sim_jobs = 2000, sim_users = 500, sim_topics = 8, sim_dim = 100,
                sim_requests = 10000;
    std::string sim_surface = "homepage", sim_arm_a = "BLL", sim_arm_b = "CF",
                sim_salt = "sim";
    double decay_a = 0.5, decay_b = 0.5, affinity_weight = 0.8;
    std::string report_out, daily_csv, world_dir;
    simulate->add_option("--seed", seed, "world + traffic seed");
    simulate->add_option("--jobs", sim_jobs, "catalog size");
    simulate->add_option("--users", sim_users, "user count");
    simulate->add_option("--topics", sim_topics, "topic count");
    simulate->add_option("--dim", sim_dim, "embedding dimension");
    simulate->add_option("--requests", sim_requests, "simulated requests");
    simulate->add_option("--surface", sim_surface, "similar_jobs or homepage");
    simulate->add_option("--arm-a", sim_arm_a, "strategy for arm A");
    simulate->add_option("--arm-b", sim_arm_b, "strategy for arm B");
    simulate->add_option("--decay-a", decay_a, "BLL decay for arm A");
    simulate->add_option("--decay-b", decay_b, "BLL decay for arm B");
    simulate->add_option("--affinity-weight", affinity_weight, "click model affinity weight");
    simulate->add_option("--salt", sim_salt, "assignment salt");
    std::string sim_outcomes;
    simulate->add_option("--out", report_out, "report JSON output path");
    simulate->add_option("--outcomes", sim_outcomes, "outcome log JSONL output path");
    simulate->add_option("--daily-csv", daily_csv, "per-day CTR CSV output path");
    simulate->add_option("--world-dir", world_dir, "directory for generated JSONL files");

    // report
    auto* rep_cmd = app.add_subcommand("report", "recompute a report from an outcome log");
    std::string outcomes_path, r_surface = "homepage", r_arm_a = "BLL", r_arm_b = "CF",
                r_experiment = "exp";
    std::string r_out;
    rep_cmd->add_option("--outcomes", outcomes_path, "outcome JSONL")->required();
    rep_cmd->add_option("--surface", r_surface, "similar_jobs or homepage");
    rep_cmd->add_option("--arm-a", r_arm_a, "strategy for arm A");
    rep_cmd->add_option("--arm-b", r_arm_b, "strategy for arm B");
    rep_cmd->add_option("--experiment-id", r_experiment, "experiment id");
    rep_cmd->add_option("--out", r_out, "report JSON output path");

    // bench
    auto* bench = app.add_subcommand("bench", "latency benchmark per strategy");
    std::size_t b_jobs = 10000, b_users = 5000, b_dim = 100, b_requests = 200,
                b_topics = 16;
    std::uint64_t b_seed = 1;
    bench->add_option("--jobs", b_jobs, "catalog size");
    bench->add_option("--users", b_users, "user count");
    bench->add_option("--dim", b_dim, "embedding dimension");
    bench->add_option("--topics", b_topics, "topic count");
    bench->add_option("--requests", b_requests, "requests per strategy");
    bench->add_option("--seed", b_seed, "seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve) {
            const EngineConfig cfg = load_engine_config(config_path);
            Engine eng(cfg);
            load_into_engine(eng, jobs_path, embeddings_path, interactions_path);
            RealClock clock;
            Service service(eng, clock);
            httplib::Server server;
            service.attach(server);
            std::string host = cfg.listen_address;
            int port = 8080;
            if (auto colon = host.rfind(':'); colon != std::string::npos) {
                port = std::stoi(host.substr(colon + 1));
                host = host.substr(0, colon);
            }
            std::cout << "listening on " << host << ":" << port << "\n";
            if (!server.listen(host, port)) {
                std::cerr << "failed to bind " << host << ":" << port << "\n";
                return 1;
            }
        } else if (*load) {
            EngineConfig cfg;
            cfg.dimension = l_dim;
            Engine eng(cfg);
            load_into_engine(eng, l_jobs, l_embeddings, l_interactions);
        } else if (*simulate) {
            replay::WorldParams params;
            params.seed = seed;
            params.job_count = sim_jobs;
            params.user_count = sim_users;
            params.topic_count = sim_topics;
            params.dimension = sim_dim;
            params.affinity_weight = affinity_weight;
            const auto world = replay::generate_world(params);
            if (!world_dir.empty()) {
                std::filesystem::create_directories(world_dir);
                replay::write_world_files(world, world_dir + "/jobs.jsonl",
                                          world_dir + "/embeddings.jsonl",
                                          world_dir + "/interactions.jsonl");
            }
            EngineConfig cfg;
            cfg.dimension = sim_dim;
            Engine eng(cfg);
            replay::materialize(world, eng);

            ExperimentConfig exp;
            exp.experiment_id = "sim";
            const auto surface = parse_surface(sim_surface);
            if (!surface) throw std::runtime_error("unknown surface: " + sim_surface);
            exp.surface = *surface;
            exp.arm_a = strategy_or_die(sim_arm_a);
            exp.arm_b = strategy_or_die(sim_arm_b);
            exp.bll_decay_a = decay_a;
            exp.bll_decay_b = decay_b;
            exp.salt = sim_salt;

            replay::RunOptions opts;
            opts.requests = sim_requests;
            opts.seed = seed;
            const auto result = replay::run_experiment(world, eng, exp, opts);
            std::cout << render_report(result.report);
            if (!report_out.empty()) {
                std::ofstream out(report_out);
                if (!out) throw std::runtime_error("cannot open file: " + report_out);
                out << report_to_json(result.report).dump(2) << "\n";
            }
            if (!daily_csv.empty()) write_daily_csv(result.report, daily_csv);
            if (!sim_outcomes.empty()) {
                std::ofstream out(sim_outcomes);
                if (!out) throw std::runtime_error("cannot open file: " + sim_outcomes);
                for (const auto& o : result.outcomes) out << jsonl::dump_outcome(o) << "\n";
            }
        } else if (*rep_cmd) {
            std::ifstream in(outcomes_path);
            if (!in) throw std::runtime_error("cannot open file: " + outcomes_path);
            std::vector<OutcomeRecord> records;
            jsonl::for_each_line(in, [&records](const std::string& line, std::size_t line_no) {
                records.push_back(jsonl::parse_outcome(line, line_no));
            });
            ExperimentConfig exp;
            exp.experiment_id = r_experiment;
            const auto surface = parse_surface(r_surface);
            if (!surface) throw std::runtime_error("unknown surface: " + r_surface);
            exp.surface = *surface;
            exp.arm_a = strategy_or_die(r_arm_a);
            exp.arm_b = strategy_or_die(r_arm_b);
            const auto rep = report(exp, records);
            std::cout << render_report(rep);
            if (!r_out.empty()) {
                std::ofstream out(r_out);
                if (!out) throw std::runtime_error("cannot open file: " + r_out);
                out << report_to_json(rep).dump(2) << "\n";
            }
        } else if (*bench) {
            replay::WorldParams params;
            params.seed = b_seed;
            params.job_count = b_jobs;
            params.user_count = b_users;
            params.topic_count = b_topics;
            params.dimension = b_dim;
            const auto world = replay::generate_world(params);
            EngineConfig cfg;
            cfg.dimension = b_dim;
            Engine eng(cfg);
            replay::materialize(world, eng);
            std::cout << "catalog=" << b_jobs << " dim=" << b_dim << " users=" << b_users
                      << " requests/strategy=" << b_requests << "\n";
            std::cout << std::left << std::setw(14) << "surface" << std::setw(10)
                      << "strategy" << std::right << std::setw(10) << "p50_ms"
                      << std::setw(10) << "p95_ms" << std::setw(10) << "p99_ms" << "\n";
            for (const auto& row : replay::bench_strategies(world, eng, b_requests, b_seed)) {
                std::cout << std::left << std::setw(14) << surface_name(row.surface)
                          << std::setw(10) << strategy_name(row.strategy) << std::right
                          << std::fixed << std::setprecision(3) << std::setw(10)
                          << row.p50_ms << std::setw(10) << row.p95_ms << std::setw(10)
                          << row.p99_ms << "\n";
            }
        }
    } catch (const jsonl::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
