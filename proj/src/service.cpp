#include "engine/service.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "engine/jsonl.hpp"

namespace engine {

using nlohmann::json;

namespace {

json error_body(const std::string& code, const std::string& field, const std::string& message) {
    return json{{"code", code}, {"field", field}, {"message", message}};
}

json error_body(const EngineError& e) {
    return error_body(error_code_name(e.code()), e.field(), e.what());
}

int status_for(const EngineError& e) {
    switch (e.code()) {
        case ErrorCode::UnknownJob: return 404;
        case ErrorCode::InvalidParams: return 400;
        default: return 422;
    }
}

ExperimentConfig parse_experiment(const json& j) {
    ExperimentConfig cfg;
    cfg.experiment_id = j.at("experiment_id").get<std::string>();
    const auto surface = parse_surface(j.at("surface").get<std::string>());
    if (!surface) throw EngineError(ErrorCode::InvalidParams, "surface", "unknown surface");
    cfg.surface = *surface;
    const auto arm_a = parse_strategy(j.at("arm_a").get<std::string>());
    const auto arm_b = parse_strategy(j.at("arm_b").get<std::string>());
    if (!arm_a || !arm_b) {
        throw EngineError(ErrorCode::InvalidParams, "arm", "unknown strategy id");
    }
    cfg.arm_a = *arm_a;
    cfg.arm_b = *arm_b;
    cfg.salt = j.value("salt", cfg.experiment_id);
    cfg.start = j.value("start", static_cast<UnixSeconds>(0));
    cfg.end = j.value("end", static_cast<UnixSeconds>(0));
    cfg.bll_decay_a = j.value("bll_decay_a", 0.5);
    cfg.bll_decay_b = j.value("bll_decay_b", 0.5);
    return cfg;
}

}  // namespace

EngineConfig parse_engine_config(const std::string& json_text) {
    json j = json::parse(json_text);
    EngineConfig cfg;
    cfg.dimension = j.value("dimension", static_cast<std::size_t>(100));
    cfg.bll_decay = j.value("bll_decay", 0.5);
    cfg.cf_neighbors = j.value("cf_neighbors", static_cast<std::size_t>(10));
    cfg.popularity_window_days = j.value("popularity_window_days", 14);
    cfg.listen_address = j.value("listen", std::string("127.0.0.1:8080"));
    if (cfg.dimension == 0 || cfg.bll_decay <= 0.0) {
        throw EngineError(ErrorCode::InvalidParams, "config",
                          "dimension and bll_decay must be positive");
    }
    for (const auto& e : j.value("experiments", json::array())) {
        auto exp = parse_experiment(e);
        if (exp.arm_a == exp.arm_b && exp.bll_decay_a == exp.bll_decay_b) {
            throw EngineError(ErrorCode::InvalidParams, "experiments",
                              "arms must differ (strategy or decay)");
        }
        cfg.experiments.push_back(std::move(exp));
    }
    return cfg;
}

EngineConfig load_engine_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw EngineError(ErrorCode::InvalidParams, "config", "cannot open config: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_engine_config(buf.str());
}

Service::Service(Engine& engine, const Clock& clock) : engine_(engine), clock_(clock) {}

const ExperimentConfig* Service::experiment_for(Surface surface) const {
    for (const auto& exp : engine_.config().experiments) {
        if (exp.surface == surface) return &exp;
    }
    return nullptr;
}

Service::ServedSlate Service::serve(const SlateRequest& req) {
    ServedSlate served;
    StrategyId strategy =
        req.surface == Surface::similar_jobs ? StrategyId::LAST : StrategyId::HYB_BLL;
    std::optional<double> decay;
    served.arm = "-";

    if (const ExperimentConfig* exp = experiment_for(req.surface)) {
        const Arm arm = assign(req.user_id, exp->salt);
        strategy = arm == Arm::A ? exp->arm_a : exp->arm_b;
        decay = arm == Arm::A ? exp->bll_decay_a : exp->bll_decay_b;
        served.arm = arm_name(arm);
        served.experiment_id = exp->experiment_id;
    }

    served.slate = engine_.recommend(req, strategy, decay);
    served.slate_id = "s" + std::to_string(next_slate_id_.fetch_add(1));

    OutcomeRecord outcome;
    outcome.experiment_id = served.experiment_id;
    outcome.arm = served.arm == "B" ? Arm::B : Arm::A;
    outcome.user_id = req.user_id;
    outcome.items = served.slate.items;
    outcome.served_at = req.requested_at;
    outcome.latency_ms = served.slate.latency_ms;

    std::lock_guard lock(mutex_);
    auto& log = outcomes_[served.experiment_id];
    slate_locator_[served.slate_id] = {served.experiment_id, log.size()};
    log.push_back(std::move(outcome));
    return served;
}

bool Service::record_outcome_clicks(const std::string& slate_id,
                                    const std::vector<std::string>& clicked_items) {
    std::lock_guard lock(mutex_);
    auto it = slate_locator_.find(slate_id);
    if (it == slate_locator_.end()) return false;
    auto& record = outcomes_[it->second.first][it->second.second];
    for (const auto& item : clicked_items) {
        // only items that were actually on the slate count
        if (std::find(record.items.begin(), record.items.end(), item) != record.items.end() &&
            std::find(record.clicked_items.begin(), record.clicked_items.end(), item) ==
                record.clicked_items.end()) {
            record.clicked_items.push_back(item);
        }
    }
    return true;
}

std::vector<OutcomeRecord> Service::outcomes(const std::string& experiment_id) const {
    std::lock_guard lock(mutex_);
    auto it = outcomes_.find(experiment_id);
    return it == outcomes_.end() ? std::vector<OutcomeRecord>{} : it->second;
}

ExperimentReport Service::experiment_report(const std::string& experiment_id) const {
    const ExperimentConfig* found = nullptr;
    for (const auto& exp : engine_.config().experiments) {
        if (exp.experiment_id == experiment_id) found = &exp;
    }
    if (found == nullptr) {
        throw EngineError(ErrorCode::UnknownJob, "experiment_id",
                          "unknown experiment: " + experiment_id);
    }
    return report(*found, outcomes(experiment_id));
}

void Service::dump_outcomes(const std::string& experiment_id, std::ostream& out) const {
    for (const auto& record : outcomes(experiment_id)) {
        out << jsonl::dump_outcome(record) << '\n';
    }
}

void Service::attach(httplib::Server& server) {
    auto respond_error = [](httplib::Response& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    };

    server.Post("/jobs", [this, respond_error](const httplib::Request& req,
                                               httplib::Response& res) {
        try {
            const auto rec = jsonl::parse_job(req.body, 1);
            engine_.add_job(rec.job, rec.embedding ? &*rec.embedding : nullptr);
            res.set_content(json{{"status", "ok"}, {"job_id", rec.job.job_id}}.dump(),
                            "application/json");
        } catch (const jsonl::ParseError& e) {
            respond_error(res, 422, error_body("ParseError", "body", e.what()));
        } catch (const EngineError& e) {
            respond_error(res, 422, error_body(e));
        }
    });

    server.Post("/embeddings", [this, respond_error](const httplib::Request& req,
                                                     httplib::Response& res) {
        std::istringstream in(req.body);
        std::size_t accepted = 0;
        std::size_t rejected = 0;
        jsonl::for_each_line(in, [&](const std::string& line, std::size_t line_no) {
            try {
                const auto rec = jsonl::parse_embedding(line, line_no);
                engine_.upsert_embedding(rec.job_id, rec.vector);
                ++accepted;
            } catch (const std::exception&) {
                ++rejected;
            }
        });
        res.set_content(json{{"accepted", accepted}, {"rejected", rejected}}.dump(),
                        "application/json");
    });

    server.Post("/interactions", [this, respond_error](const httplib::Request& req,
                                                       httplib::Response& res) {
        std::istringstream in(req.body);
        std::size_t accepted = 0;
        try {
            jsonl::for_each_line(in, [&](const std::string& line, std::size_t line_no) {
                engine_.record_interaction(jsonl::parse_interaction(line, line_no));
                ++accepted;
            });
        } catch (const jsonl::ParseError& e) {
            respond_error(res, 422, error_body("ParseError", "body", e.what()));
            return;
        } catch (const EngineError& e) {
            respond_error(res, 422, error_body(e));
            return;
        }
        res.set_content(json{{"accepted", accepted}}.dump(), "application/json");
    });

    auto serve_slate = [this, respond_error](Surface surface, const httplib::Request& req,
                                             httplib::Response& res) {
        SlateRequest sreq;
        sreq.surface = surface;
        sreq.user_id = req.get_param_value("user_id");
        sreq.session_id = req.get_param_value("session_id");
        if (surface == Surface::similar_jobs) {
            if (!req.has_param("job_id")) {
                respond_error(res, 400,
                              error_body("InvalidParams", "job_id", "job_id is required"));
                return;
            }
            sreq.anchor_job_id = req.get_param_value("job_id");
        }
        sreq.requested_at = clock_.now_seconds();
        try {
            const auto served = serve(sreq);
            res.set_content(json{{"slate_id", served.slate_id},
                                 {"experiment_id", served.experiment_id},
                                 {"arm", served.arm},
                                 {"strategy", strategy_name(served.slate.strategy)},
                                 {"items", served.slate.items},
                                 {"latency_ms", served.slate.latency_ms},
                                 {"fallback_used", served.slate.fallback_used}}
                                .dump(),
                            "application/json");
        } catch (const EngineError& e) {
            respond_error(res, status_for(e), error_body(e));
        }
    };

    server.Get("/recommend/similar",
               [serve_slate](const httplib::Request& req, httplib::Response& res) {
                   serve_slate(Surface::similar_jobs, req, res);
               });
    server.Get("/recommend/homepage",
               [serve_slate](const httplib::Request& req, httplib::Response& res) {
                   serve_slate(Surface::homepage, req, res);
               });

    server.Post("/outcomes", [this, respond_error](const httplib::Request& req,
                                                   httplib::Response& res) {
        try {
            const json j = json::parse(req.body);
            const std::string slate_id = j.at("slate_id").get<std::string>();
            const auto clicked = j.value("clicked_items", std::vector<std::string>{});
            if (!record_outcome_clicks(slate_id, clicked)) {
                respond_error(res, 404,
                              error_body("UnknownSlate", "slate_id",
                                         "unknown slate: " + slate_id));
                return;
            }
            res.set_content(json{{"status", "ok"}}.dump(), "application/json");
        } catch (const json::exception& e) {
            respond_error(res, 422, error_body("ParseError", "body", e.what()));
        }
    });

    server.Get(R"(/experiments/([^/]+)/report)",
               [this, respond_error](const httplib::Request& req, httplib::Response& res) {
                   try {
                       const auto rep = experiment_report(req.matches[1].str());
                       json arms = json::array();
                       for (const ArmSummary* s : {&rep.arm_a, &rep.arm_b}) {
                           json daily = json::array();
                           for (const auto& [day, c] : s->daily_ctr) {
                               daily.push_back(json{{"day", day}, {"ctr", c}});
                           }
                           arms.push_back(json{{"strategy", strategy_name(s->strategy)},
                                               {"user_count", s->user_count},
                                               {"slate_count", s->slate_count},
                                               {"item_count", s->item_count},
                                               {"click_count", s->click_count},
                                               {"ctr", s->ctr},
                                               {"mean_runtime_ms", s->mean_runtime_ms},
                                               {"daily_ctr", daily}});
                       }
                       res.set_content(
                           json{{"experiment_id", rep.experiment_id},
                                {"arms", arms},
                                {"relative_ctr_increase", rep.relative_ctr_increase},
                                {"relative_runtime_decrease", rep.relative_runtime_decrease},
                                {"chi2_statistic", rep.chi2_statistic},
                                {"chi2_p_value", rep.chi2_p_value},
                                {"ttest_statistic", rep.ttest_statistic},
                                {"ttest_p_value", rep.ttest_p_value},
                                {"ctr_significance", rep.ctr_significance},
                                {"runtime_significance", rep.runtime_significance}}
                               .dump(),
                           "application/json");
                   } catch (const EngineError& e) {
                       respond_error(res, status_for(e), error_body(e));
                   }
               });

    server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
        res.set_content(json{{"jobs", engine_.job_count()},
                             {"embeddings", engine_.embedding_count()},
                             {"interactions", engine_.interaction_count()},
                             {"version", "1.0.0"}}
                            .dump(),
                        "application/json");
    });
}

}  // namespace engine
