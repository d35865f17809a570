#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "engine/service.hpp"

using namespace engine;
using nlohmann::json;

namespace {

struct TestServer {
    Engine engine;
    ReplayClock clock{100000};
    Service service;
    httplib::Server server;
    std::thread thread;
    int port = 0;

    explicit TestServer(EngineConfig cfg = make_config())
        : engine(std::move(cfg)), service(engine, clock) {
        service.attach(server);
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~TestServer() {
        server.stop();
        thread.join();
    }

    static EngineConfig make_config() {
        EngineConfig cfg;
        cfg.dimension = 4;
        ExperimentConfig exp;
        exp.experiment_id = "exp1";
        exp.surface = Surface::similar_jobs;
        exp.arm_a = StrategyId::CBF;
        exp.arm_b = StrategyId::LAST;
        exp.salt = "svc";
        cfg.experiments.push_back(exp);
        return cfg;
    }

    httplib::Client client() { return httplib::Client("127.0.0.1", port); }
};

void seed_catalog(Engine& eng, int n = 12) {
    for (int i = 0; i < n; ++i) {
        EmbeddingVector v{1.0, 0.07 * i, 0.01 * i, 0};
        eng.add_job({"j" + std::to_string(i), "Job " + std::to_string(i),
                     "shared text plus word" + std::to_string(i % 4), true,
                     static_cast<UnixSeconds>(100 + i)},
                    &v);
    }
}

}  // namespace

TEST_CASE("engine config parsing") {
    const auto cfg = parse_engine_config(R"({
        "dimension": 32,
        "bll_decay": 0.6,
        "cf_neighbors": 5,
        "popularity_window_days": 7,
        "listen": "0.0.0.0:9999",
        "experiments": [
            {"experiment_id": "e1", "surface": "homepage",
             "arm_a": "BLL", "arm_b": "CF", "salt": "x"}
        ]
    })");
    CHECK(cfg.dimension == 32);
    CHECK(cfg.bll_decay == doctest::Approx(0.6));
    CHECK(cfg.cf_neighbors == 5);
    REQUIRE(cfg.experiments.size() == 1);
    CHECK(cfg.experiments[0].arm_a == StrategyId::BLL);

    CHECK_THROWS_AS(parse_engine_config(R"({"dimension": 0})"), EngineError);
    CHECK_THROWS_AS(parse_engine_config(R"({"experiments":[
        {"experiment_id":"e","surface":"homepage","arm_a":"CF","arm_b":"CF"}]})"),
                    EngineError);
}

TEST_CASE("job upsert, validation errors, and health") {
    TestServer ts;
    auto client = ts.client();

    auto ok = client.Post("/jobs",
                          R"({"job_id":"j1","title":"T","description":"alpha beta",)"
                          R"("active":true,"created_at":10,"embedding":[1,0,0,0]})",
                          "application/json");
    REQUIRE(ok);
    CHECK(ok->status == 200);

    auto bad = client.Post("/jobs",
                           R"({"job_id":"j2","description":"x","embedding":[1,0]})",
                           "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 422);
    const auto body = json::parse(bad->body);
    CHECK(body["code"] == "DimensionMismatch");
    CHECK(body["field"] == "embedding");

    auto health = client.Get("/health");
    REQUIRE(health);
    const auto h = json::parse(health->body);
    CHECK(h["jobs"] == 1);
    CHECK(h["embeddings"] == 1);
}

TEST_CASE("bulk embeddings count accepted and rejected lines") {
    TestServer ts;
    seed_catalog(ts.engine, 3);
    auto client = ts.client();
    const std::string lines =
        R"({"job_id":"j0","vector":[0,1,0,0]})" "\n"
        R"({"job_id":"j1","vector":[0,0]})" "\n"
        "garbage\n";
    auto res = client.Post("/embeddings", lines, "application/x-ndjson");
    REQUIRE(res);
    const auto body = json::parse(res->body);
    CHECK(body["accepted"] == 1);
    CHECK(body["rejected"] == 2);
}

TEST_CASE("interactions recorded before a request shape that request") {
    TestServer ts;
    seed_catalog(ts.engine);
    auto client = ts.client();

    // user views j1 in session s1, then asks for similar jobs to j0
    auto rec = client.Post(
        "/interactions",
        R"({"user_id":"u1","job_id":"j1","session_id":"s1","timestamp":99000,"kind":"view"})",
        "application/x-ndjson");
    REQUIRE(rec);
    CHECK(rec->status == 200);

    auto res = client.Get("/recommend/similar?job_id=j0&user_id=u1&session_id=s1");
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto body = json::parse(res->body);
    CHECK(body.contains("latency_ms"));
    CHECK(body["arm"].get<std::string>() != "-");
    for (const auto& item : body["items"]) {
        CHECK(item != "j0");
        CHECK(item != "j1");  // session-seen
    }
}

TEST_CASE("unknown anchor job maps to 404") {
    TestServer ts;
    seed_catalog(ts.engine);
    auto client = ts.client();
    auto res = client.Get("/recommend/similar?job_id=ghost&user_id=u1&session_id=s1");
    REQUIRE(res);
    CHECK(res->status == 404);
    CHECK(json::parse(res->body)["code"] == "UnknownJob");
}

TEST_CASE("homepage cold start uses the popularity fallback") {
    TestServer ts;
    seed_catalog(ts.engine);
    for (int i = 0; i < 4; ++i) {
        ts.engine.record_interaction({"other" + std::to_string(i), "j3", "s", 99000,
                                      InteractionKind::view});
    }
    auto client = ts.client();
    auto res = client.Get("/recommend/homepage?user_id=nobody&session_id=s1");
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto body = json::parse(res->body);
    CHECK(body["fallback_used"] == true);
    REQUIRE(!body["items"].empty());
    CHECK(body["items"][0] == "j3");
}

TEST_CASE("outcome feedback and experiment report") {
    TestServer ts;
    seed_catalog(ts.engine);
    auto client = ts.client();

    // unknown slate id
    auto missing = client.Post("/outcomes", R"({"slate_id":"nope","clicked_items":[]})",
                               "application/json");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    // serve slates for users landing in both arms, then click some items
    for (int i = 0; i < 30; ++i) {
        const std::string user = "user" + std::to_string(i);
        auto res = client.Get("/recommend/similar?job_id=j0&user_id=" + user +
                              "&session_id=s1");
        REQUIRE(res);
        REQUIRE(res->status == 200);
        const auto body = json::parse(res->body);
        if (i % 3 == 0 && !body["items"].empty()) {
            const json clickBody{{"slate_id", body["slate_id"]},
                                 {"clicked_items", {body["items"][0]}}};
            auto fb = client.Post("/outcomes", clickBody.dump(), "application/json");
            REQUIRE(fb);
            CHECK(fb->status == 200);
        }
    }

    auto rep = client.Get("/experiments/exp1/report");
    REQUIRE(rep);
    REQUIRE(rep->status == 200);
    const auto body = json::parse(rep->body);
    CHECK(body["experiment_id"] == "exp1");
    REQUIRE(body["arms"].size() == 2);
    const auto items_total = body["arms"][0]["item_count"].get<int>() +
                             body["arms"][1]["item_count"].get<int>();
    CHECK(items_total == 30 * 3);
    CHECK(body.contains("chi2_p_value"));

    auto rep404 = client.Get("/experiments/ghost/report");
    REQUIRE(rep404);
    CHECK(rep404->status == 404);
}

TEST_CASE("clicks outside the served slate are ignored") {
    TestServer ts;
    seed_catalog(ts.engine);
    SlateRequest req;
    req.surface = Surface::similar_jobs;
    req.user_id = "u77";
    req.session_id = "s";
    req.anchor_job_id = "j0";
    req.requested_at = 100000;
    const auto served = ts.service.serve(req);
    CHECK(ts.service.record_outcome_clicks(served.slate_id, {"not_on_slate"}));
    const auto outs = ts.service.outcomes(served.experiment_id);
    REQUIRE(!outs.empty());
    CHECK(outs.back().clicked_items.empty());
}
