#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "engine/experiment.hpp"

using namespace engine;

namespace {

OutcomeRecord outcome(Arm arm, const std::string& user, std::size_t items,
                      std::size_t clicks, double latency, UnixSeconds served_at = 1000) {
    OutcomeRecord r;
    r.experiment_id = "e1";
    r.arm = arm;
    r.user_id = user;
    for (std::size_t i = 0; i < items; ++i) r.items.push_back("j" + std::to_string(i));
    for (std::size_t i = 0; i < clicks; ++i) r.clicked_items.push_back("j" + std::to_string(i));
    r.latency_ms = latency;
    r.served_at = served_at;
    return r;
}

}  // namespace

TEST_CASE("assignment is deterministic and salt-sensitive") {
    CHECK(assign("user42", "salt1") == assign("user42", "salt1"));
    bool any_diff = false;
    for (int i = 0; i < 200; ++i) {
        const std::string u = "user" + std::to_string(i);
        if (assign(u, "salt1") != assign(u, "salt2")) any_diff = true;
    }
    CHECK(any_diff);
}

TEST_CASE("assignment splits a large population near 50/50") {
    std::mt19937_64 rng(99);
    std::size_t a = 0;
    const std::size_t n = 100'000;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string u = "user" + std::to_string(rng());
        if (assign(u, "split") == Arm::A) ++a;
    }
    const double frac = static_cast<double>(a) / n;
    CHECK(frac > 0.49);
    CHECK(frac < 0.51);
}

TEST_CASE("assignment partitions users into exactly two disjoint groups") {
    std::set<std::string> grp_a, grp_b;
    for (int i = 0; i < 1000; ++i) {
        const std::string u = "user" + std::to_string(i);
        (assign(u, "part") == Arm::A ? grp_a : grp_b).insert(u);
    }
    CHECK(grp_a.size() + grp_b.size() == 1000);
    for (const auto& u : grp_a) CHECK(grp_b.count(u) == 0);
}

TEST_CASE("ctr definition") {
    CHECK(ctr({}) == 0.0);
    CHECK(ctr({outcome(Arm::A, "u1", 3, 0, 10)}) == 0.0);
    std::vector<OutcomeRecord> recs;
    for (int i = 0; i < 500; ++i) recs.push_back(outcome(Arm::A, "u", 2, 0, 10));
    // 1000 items total, mark 23 clicked
    for (int i = 0; i < 23; ++i) recs[i].clicked_items = {recs[i].items[0]};
    CHECK(ctr(recs) == doctest::Approx(0.023));
}

TEST_CASE("published relative deltas for the similar-jobs embedding test") {
    CHECK(relative_increase(0.0229, 0.0194) * 100 == doctest::Approx(18.04).epsilon(5e-4));
    CHECK(relative_decrease(51, 39) * 100 == doctest::Approx(23.53).epsilon(5e-4));
}

TEST_CASE("chi-squared worked example 30/1000 vs 20/1000") {
    auto [stat, p] = chi_squared_2x2(30, 1000, 20, 1000);
    CHECK(stat == doctest::Approx(2.0513).epsilon(1e-3));
    CHECK(p == doctest::Approx(0.152).epsilon(5e-2));
    CHECK(std::abs(p - 0.152) < 5e-3);
}

TEST_CASE("chi-squared identical arms") {
    auto [stat, p] = chi_squared_2x2(30, 1000, 30, 1000);
    CHECK(stat == doctest::Approx(0.0));
    CHECK(p == doctest::Approx(1.0));
}

TEST_CASE("chi-squared df-1 quantile") {
    CHECK(chi2_sf_df1(3.841459) == doctest::Approx(0.05).epsilon(1e-4));
}

TEST_CASE("chi-squared symmetry under arm swap") {
    auto ab = chi_squared_2x2(33, 1200, 21, 900);
    auto ba = chi_squared_2x2(21, 900, 33, 1200);
    CHECK(ab.statistic == doctest::Approx(ba.statistic).epsilon(1e-12));
    CHECK(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-12));
}

TEST_CASE("chi-squared degenerate tables") {
    CHECK_THROWS_AS(chi_squared_2x2(0, 1000, 0, 1000), EngineError);
    CHECK_THROWS_AS(chi_squared_2x2(1000, 1000, 1000, 1000), EngineError);
    CHECK_THROWS_AS(chi_squared_2x2(5, 0, 3, 100), EngineError);
}

TEST_CASE("welch worked example") {
    auto [t, p] = welch_t_test({1, 2, 3}, {4, 5, 6});
    CHECK(std::abs(t) == doctest::Approx(3.6742).epsilon(1e-3));
    CHECK(p == doctest::Approx(0.0213).epsilon(5e-2));
    CHECK(std::abs(p - 0.0213) < 1e-3);
}

TEST_CASE("welch identical samples") {
    auto [t, p] = welch_t_test({5, 6, 7, 8}, {5, 6, 7, 8});
    CHECK(t == doctest::Approx(0.0));
    CHECK(p == doctest::Approx(1.0));
}

TEST_CASE("welch insufficient sample") {
    CHECK_THROWS_AS(welch_t_test({1}, {2, 3}), EngineError);
    CHECK_THROWS_AS(welch_t_test({1, 2}, {}), EngineError);
}

TEST_CASE("p-values stay in [0,1] and statistics non-negative") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 200; ++i) {
        const std::int64_t na = 100 + rng() % 2000;
        const std::int64_t nb = 100 + rng() % 2000;
        const std::int64_t ca = 1 + rng() % (na / 2);
        const std::int64_t cb = 1 + rng() % (nb / 2);
        auto [stat, p] = chi_squared_2x2(ca, na, cb, nb);
        CHECK(stat >= 0.0);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("daily series groups by UTC day") {
    std::vector<OutcomeRecord> recs;
    recs.push_back(outcome(Arm::A, "u1", 2, 1, 10, 86400 * 10 + 5));
    recs.push_back(outcome(Arm::A, "u1", 2, 0, 10, 86400 * 10 + 500));
    recs.push_back(outcome(Arm::A, "u1", 2, 2, 10, 86400 * 11 + 5));
    auto daily = daily_ctr(recs);
    REQUIRE(daily.size() == 2);
    CHECK(daily.at(10) == doctest::Approx(0.25));
    CHECK(daily.at(11) == doctest::Approx(1.0));
}

TEST_CASE("report aggregates both arms") {
    ExperimentConfig cfg;
    cfg.experiment_id = "e1";
    cfg.arm_a = StrategyId::CBF;
    cfg.arm_b = StrategyId::LAST;
    std::vector<OutcomeRecord> recs;
    std::mt19937_64 rng(5);
    for (int i = 0; i < 400; ++i) {
        recs.push_back(outcome(Arm::A, "ua" + std::to_string(i % 40), 3, rng() % 10 == 0, 50.0 + i % 7));
        recs.push_back(outcome(Arm::B, "ub" + std::to_string(i % 40), 3, rng() % 5 == 0, 39.0 + i % 5));
    }
    auto rep = report(cfg, recs);
    CHECK(rep.arm_a.user_count == 40);
    CHECK(rep.arm_b.user_count == 40);
    CHECK(rep.arm_a.slate_count == 400);
    CHECK(rep.arm_a.item_count == 1200);
    CHECK(rep.arm_b.ctr > rep.arm_a.ctr);
    CHECK(rep.relative_ctr_increase ==
          doctest::Approx(relative_increase(rep.arm_b.ctr, rep.arm_a.ctr)));
    CHECK(rep.relative_runtime_decrease ==
          doctest::Approx(relative_decrease(rep.arm_a.mean_runtime_ms,
                                            rep.arm_b.mean_runtime_ms)));
    CHECK_THROWS_AS(report(cfg, std::vector<OutcomeRecord>(1, outcome(Arm::A, "u", 3, 0, 5))),
                    EngineError);
}

TEST_CASE("significance marks") {
    CHECK(significance_mark(0.2) == "");
    CHECK(significance_mark(0.04) == "*");
    CHECK(significance_mark(0.0004) == "**");
}
