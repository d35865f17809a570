#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "engine/core.hpp"

namespace engine {

enum class StrategyId { CBF, LAST, BLL, CF, HYB_BLL, POP };

const char* strategy_name(StrategyId id);
std::optional<StrategyId> parse_strategy(const std::string& s);

enum class Arm { A, B };

inline const char* arm_name(Arm arm) { return arm == Arm::A ? "A" : "B"; }

struct ExperimentConfig {
    std::string experiment_id;
    Surface surface = Surface::similar_jobs;
    StrategyId arm_a = StrategyId::CBF;
    StrategyId arm_b = StrategyId::LAST;
    UnixSeconds start = 0;
    UnixSeconds end = 0;
    std::string salt;
    double bll_decay_a = 0.5;  // per-arm decay so d=0.4 vs d=0.6 tests are configurable
    double bll_decay_b = 0.5;
};

struct OutcomeRecord {
    std::string experiment_id;
    Arm arm = Arm::A;
    std::string user_id;
    std::vector<std::string> items;
    UnixSeconds served_at = 0;
    double latency_ms = 0.0;
    std::vector<std::string> clicked_items;
};

struct ArmSummary {
    StrategyId strategy = StrategyId::CBF;
    std::size_t user_count = 0;
    std::size_t slate_count = 0;
    std::size_t item_count = 0;
    std::size_t click_count = 0;
    double ctr = 0.0;
    double mean_runtime_ms = 0.0;
    std::map<std::int64_t, double> daily_ctr;  // UTC day index -> CTR
};

struct ExperimentReport {
    std::string experiment_id;
    ArmSummary arm_a;
    ArmSummary arm_b;
    double relative_ctr_increase = 0.0;     // (best - other) / other
    double relative_runtime_decrease = 0.0; // (slow - fast) / slow
    double chi2_statistic = 0.0;
    double chi2_p_value = 1.0;
    double ttest_statistic = 0.0;
    double ttest_p_value = 1.0;
    std::string ctr_significance;      // "", "*", "**"
    std::string runtime_significance;  // "", "*", "**"
};

// 64-bit FNV-1a over salt ‖ user_id; arm A iff the hash is even.
std::uint64_t stable_hash(const std::string& salt, const std::string& user_id);
Arm assign(const std::string& user_id, const std::string& salt);

// Item-level CTR: clicked items over served items; 0 on empty input.
double ctr(const std::vector<OutcomeRecord>& records);
std::map<std::int64_t, double> daily_ctr(const std::vector<OutcomeRecord>& records);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Pearson chi-squared on the 2x2 engaged/not-engaged table, no continuity
// correction; p from the df-1 chi-square upper tail.
TestResult chi_squared_2x2(std::int64_t clicks_a, std::int64_t n_a, std::int64_t clicks_b,
                           std::int64_t n_b);

// Welch's unequal-variance t-test, two-sided, Welch-Satterthwaite df.
TestResult welch_t_test(const std::vector<double>& latencies_a,
                        const std::vector<double>& latencies_b);

double chi2_sf_df1(double statistic);
double student_t_sf_two_sided(double t, double df);

// Significance marks at the published thresholds.
std::string significance_mark(double p_value);

ExperimentReport report(const ExperimentConfig& config,
                        const std::vector<OutcomeRecord>& records);

// Table-style relative deltas shared by report and its tests.
double relative_increase(double best, double other);
double relative_decrease(double slow, double fast);

std::string render_report(const ExperimentReport& rep);

}  // namespace engine
