#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "engine/interaction_store.hpp"

using namespace engine;

namespace {

Interaction ev(const std::string& u, const std::string& j, const std::string& s,
               UnixSeconds t, InteractionKind k = InteractionKind::view) {
    return {u, j, s, t, k};
}

}  // namespace

TEST_CASE("record then read-your-writes") {
    InteractionStore store;
    store.record(ev("u1", "j1", "s1", 10));
    REQUIRE(store.history("u1").size() == 1);
    CHECK(store.history("u1")[0].job_id == "j1");
}

TEST_CASE("history ordered by timestamp even with out-of-order appends") {
    InteractionStore store;
    store.record(ev("u1", "j1", "s1", 10));
    store.record(ev("u1", "j2", "s1", 5));
    const auto& h = store.history("u1");
    REQUIRE(h.size() == 2);
    CHECK(h[0].timestamp == 5);
    CHECK(h[1].timestamp == 10);
}

TEST_CASE("stable order for equal timestamps") {
    InteractionStore store;
    store.record(ev("u1", "ja", "s1", 10));
    store.record(ev("u1", "jb", "s1", 10));
    store.record(ev("u1", "jc", "s1", 10));
    const auto& h = store.history("u1");
    CHECK(h[0].job_id == "ja");
    CHECK(h[1].job_id == "jb");
    CHECK(h[2].job_id == "jc");
}

TEST_CASE("record rejects invalid interactions") {
    InteractionStore store;
    CHECK_THROWS_AS(store.record(ev("", "j1", "s1", 10)), EngineError);
    CHECK_THROWS_AS(store.record(ev("u1", "", "s1", 10)), EngineError);
    CHECK_THROWS_AS(store.record(ev("u1", "j1", "s1", 0)), EngineError);
}

TEST_CASE("session_seen set semantics") {
    InteractionStore store;
    CHECK(store.session_seen("u1", "s1").empty());
    store.record(ev("u1", "j1", "s1", 10));
    store.record(ev("u1", "j2", "s1", 20));
    store.record(ev("u1", "j3", "s2", 30));
    store.record(ev("u1", "j1", "s1", 40));
    auto seen = store.session_seen("u1", "s1");
    CHECK(seen == std::unordered_set<std::string>{"j1", "j2"});
    CHECK(store.session_seen("u1", "s2") == std::unordered_set<std::string>{"j3"});
}

TEST_CASE("empty session_id assigns sessions by 30-minute inactivity gaps") {
    InteractionStore store;
    auto a = store.record(ev("u1", "j1", "", 1000));
    auto b = store.record(ev("u1", "j2", "", 1000 + 29 * 60));
    auto c = store.record(ev("u1", "j3", "", 1000 + 29 * 60 + 31 * 60));
    CHECK(a.session_id == b.session_id);
    CHECK(b.session_id != c.session_id);
}

TEST_CASE("most_popular ordering with ties and exclusion") {
    InteractionStore store;
    const UnixSeconds now = 1'000'000;
    auto hit = [&](const std::string& j, int n) {
        for (int i = 0; i < n; ++i)
            store.record(ev("u" + std::to_string(i), j, "s", now - 100 - i));
    };
    hit("j1", 5);
    hit("j2", 3);
    hit("j3", 5);
    CHECK(store.most_popular(2, {}, now) == std::vector<std::string>{"j1", "j3"});
    CHECK(store.most_popular(2, {"j1"}, now) == std::vector<std::string>{"j3", "j2"});
    InteractionStore empty_store;
    CHECK(empty_store.most_popular(2, {}, now).empty());
}

TEST_CASE("popularity matches a recount oracle over the trailing window") {
    std::mt19937 rng(5);
    InteractionStore store(14);
    std::vector<Interaction> log;
    const UnixSeconds base = 2'000'000'000;
    for (int i = 0; i < 400; ++i) {
        Interaction e = ev("u" + std::to_string(rng() % 20), "j" + std::to_string(rng() % 15),
                           "s", base - static_cast<UnixSeconds>(rng() % (30 * 86400)));
        log.push_back(e);
        store.record(e);
    }
    for (UnixSeconds now : {base - 20 * 86400, base - 10 * 86400, base, base + 86400}) {
        // recount oracle
        std::map<std::string, int> counts;
        for (const auto& e : log) {
            if (e.timestamp >= now - 14 * 86400) counts[e.job_id] += 1;
        }
        std::vector<std::pair<int, std::string>> ranked;
        for (const auto& [j, c] : counts) ranked.push_back({-c, j});
        std::sort(ranked.begin(), ranked.end());
        std::vector<std::string> want;
        for (std::size_t i = 0; i < std::min<std::size_t>(8, ranked.size()); ++i)
            want.push_back(ranked[i].second);
        CHECK(store.most_popular(8, {}, now) == want);
    }
}

TEST_CASE("session_seen is monotone within a session") {
    InteractionStore store;
    std::size_t prev = 0;
    for (int i = 0; i < 50; ++i) {
        store.record(ev("u1", "j" + std::to_string(i % 7), "s1", 100 + i));
        const auto seen = store.session_seen("u1", "s1");
        CHECK(seen.size() >= prev);
        prev = seen.size();
    }
}

TEST_CASE("history length counts every append, no dedup") {
    InteractionStore store;
    for (int i = 0; i < 10; ++i) store.record(ev("u1", "j1", "s1", 100));
    CHECK(store.history("u1").size() == 10);
}

TEST_CASE("inactive jobs filtered from popularity by predicate") {
    InteractionStore store;
    const UnixSeconds now = 1'000'000;
    store.record(ev("u1", "j1", "s", now - 10));
    store.record(ev("u2", "j1", "s", now - 10));
    store.record(ev("u1", "j2", "s", now - 10));
    auto active = [](const std::string& j) { return j != "j1"; };
    CHECK(store.most_popular(5, {}, now, active) == std::vector<std::string>{"j2"});
}
