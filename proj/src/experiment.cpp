#include "engine/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace engine {

const char* strategy_name(StrategyId id) {
    switch (id) {
        case StrategyId::CBF: return "CBF";
        case StrategyId::LAST: return "LAST";
        case StrategyId::BLL: return "BLL";
        case StrategyId::CF: return "CF";
        case StrategyId::HYB_BLL: return "HYB_BLL";
        case StrategyId::POP: return "POP";
    }
    return "CBF";
}

std::optional<StrategyId> parse_strategy(const std::string& s) {
    if (s == "CBF") return StrategyId::CBF;
    if (s == "LAST") return StrategyId::LAST;
    if (s == "BLL") return StrategyId::BLL;
    if (s == "CF") return StrategyId::CF;
    if (s == "HYB_BLL") return StrategyId::HYB_BLL;
    if (s == "POP") return StrategyId::POP;
    return std::nullopt;
}

std::uint64_t stable_hash(const std::string& salt, const std::string& user_id) {
    // FNV-1a, 64-bit
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    };
    mix(salt);
    mix(user_id);
    return h;
}

Arm assign(const std::string& user_id, const std::string& salt) {
    return (stable_hash(salt, user_id) & 1ULL) == 0 ? Arm::A : Arm::B;
}

double ctr(const std::vector<OutcomeRecord>& records) {
    std::size_t items = 0;
    std::size_t clicks = 0;
    for (const auto& r : records) {
        items += r.items.size();
        clicks += r.clicked_items.size();
    }
    return items == 0 ? 0.0 : static_cast<double>(clicks) / static_cast<double>(items);
}

std::map<std::int64_t, double> daily_ctr(const std::vector<OutcomeRecord>& records) {
    std::map<std::int64_t, std::pair<std::size_t, std::size_t>> per_day;  // items, clicks
    for (const auto& r : records) {
        auto& [items, clicks] = per_day[r.served_at / 86400];
        items += r.items.size();
        clicks += r.clicked_items.size();
    }
    std::map<std::int64_t, double> out;
    for (const auto& [day, counts] : per_day) {
        out[day] = counts.first == 0
                       ? 0.0
                       : static_cast<double>(counts.second) / static_cast<double>(counts.first);
    }
    return out;
}

double chi2_sf_df1(double statistic) {
    // upper tail of chi-square with 1 df: Q(1/2, x/2) = erfc(sqrt(x/2))
    if (statistic <= 0.0) return 1.0;
    return std::erfc(std::sqrt(statistic / 2.0));
}

namespace {

// regularized incomplete beta via Lentz continued fraction
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

double reg_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_sf_two_sided(double t, double df) {
    const double x = df / (df + t * t);
    return reg_incomplete_beta(df / 2.0, 0.5, x);
}

TestResult chi_squared_2x2(std::int64_t clicks_a, std::int64_t n_a, std::int64_t clicks_b,
                           std::int64_t n_b) {
    const std::int64_t miss_a = n_a - clicks_a;
    const std::int64_t miss_b = n_b - clicks_b;
    const std::int64_t total = n_a + n_b;
    const std::int64_t clicks = clicks_a + clicks_b;
    const std::int64_t misses = miss_a + miss_b;
    if (n_a <= 0 || n_b <= 0 || clicks <= 0 || misses <= 0 || miss_a < 0 || miss_b < 0) {
        throw EngineError(ErrorCode::DegenerateTable, "table",
                          "chi-squared table has a zero row or column total");
    }
    const double observed[4] = {static_cast<double>(clicks_a), static_cast<double>(miss_a),
                                static_cast<double>(clicks_b), static_cast<double>(miss_b)};
    const double expected[4] = {
        static_cast<double>(n_a) * clicks / total, static_cast<double>(n_a) * misses / total,
        static_cast<double>(n_b) * clicks / total, static_cast<double>(n_b) * misses / total};
    double stat = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double d = observed[i] - expected[i];
        stat += d * d / expected[i];
    }
    return {stat, chi2_sf_df1(stat)};
}

TestResult welch_t_test(const std::vector<double>& latencies_a,
                        const std::vector<double>& latencies_b) {
    const std::size_t na = latencies_a.size();
    const std::size_t nb = latencies_b.size();
    if (na < 2 || nb < 2) {
        throw EngineError(ErrorCode::InsufficientSample, "latencies",
                          "each sample needs at least 2 points");
    }
    auto mean_var = [](const std::vector<double>& xs) {
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var /= static_cast<double>(xs.size() - 1);
        return std::pair{mean, var};
    };
    const auto [ma, va] = mean_var(latencies_a);
    const auto [mb, vb] = mean_var(latencies_b);
    const double sa = va / static_cast<double>(na);
    const double sb = vb / static_cast<double>(nb);
    if (sa + sb == 0.0) {
        // both samples constant: no variance to test against
        if (ma == mb) return {0.0, 1.0};
        throw EngineError(ErrorCode::InsufficientSample, "latencies",
                          "zero variance with unequal means");
    }
    const double t = (ma - mb) / std::sqrt(sa + sb);
    const double df = (sa + sb) * (sa + sb) /
                      (sa * sa / static_cast<double>(na - 1) +
                       sb * sb / static_cast<double>(nb - 1));
    return {t, student_t_sf_two_sided(t, df)};
}

std::string significance_mark(double p_value) {
    if (p_value < 0.0005) return "**";
    if (p_value < 0.05) return "*";
    return "";
}

double relative_increase(double best, double other) {
    return (best - other) / other;
}

double relative_decrease(double slow, double fast) {
    return (slow - fast) / slow;
}

ExperimentReport report(const ExperimentConfig& config,
                        const std::vector<OutcomeRecord>& records) {
    ExperimentReport rep;
    rep.experiment_id = config.experiment_id;
    rep.arm_a.strategy = config.arm_a;
    rep.arm_b.strategy = config.arm_b;

    std::vector<OutcomeRecord> recs_a;
    std::vector<OutcomeRecord> recs_b;
    std::vector<double> lat_a;
    std::vector<double> lat_b;
    std::unordered_map<std::string, Arm> users;
    for (const auto& r : records) {
        (r.arm == Arm::A ? recs_a : recs_b).push_back(r);
        (r.arm == Arm::A ? lat_a : lat_b).push_back(r.latency_ms);
        users.emplace(r.user_id, r.arm);
    }
    if (recs_a.empty() || recs_b.empty()) {
        throw EngineError(ErrorCode::EmptyArm, "records",
                          "report needs outcomes from both arms");
    }

    auto summarize = [&users](ArmSummary& s, const std::vector<OutcomeRecord>& recs,
                              const std::vector<double>& lats, Arm arm) {
        for (const auto& [user, a] : users) {
            if (a == arm) s.user_count += 1;
        }
        s.slate_count = recs.size();
        for (const auto& r : recs) {
            s.item_count += r.items.size();
            s.click_count += r.clicked_items.size();
        }
        s.ctr = ctr(recs);
        double sum = 0.0;
        for (double l : lats) sum += l;
        s.mean_runtime_ms = lats.empty() ? 0.0 : sum / static_cast<double>(lats.size());
        s.daily_ctr = daily_ctr(recs);
    };
    summarize(rep.arm_a, recs_a, lat_a, Arm::A);
    summarize(rep.arm_b, recs_b, lat_b, Arm::B);

    const double best_ctr = std::max(rep.arm_a.ctr, rep.arm_b.ctr);
    const double other_ctr = std::min(rep.arm_a.ctr, rep.arm_b.ctr);
    rep.relative_ctr_increase = other_ctr > 0.0 ? relative_increase(best_ctr, other_ctr) : 0.0;

    const double slow = std::max(rep.arm_a.mean_runtime_ms, rep.arm_b.mean_runtime_ms);
    const double fast = std::min(rep.arm_a.mean_runtime_ms, rep.arm_b.mean_runtime_ms);
    rep.relative_runtime_decrease = slow > 0.0 ? relative_decrease(slow, fast) : 0.0;

    try {
        auto chi = chi_squared_2x2(static_cast<std::int64_t>(rep.arm_a.click_count),
                                   static_cast<std::int64_t>(rep.arm_a.item_count),
                                   static_cast<std::int64_t>(rep.arm_b.click_count),
                                   static_cast<std::int64_t>(rep.arm_b.item_count));
        rep.chi2_statistic = chi.statistic;
        rep.chi2_p_value = chi.p_value;
    } catch (const EngineError&) {
        rep.chi2_statistic = 0.0;
        rep.chi2_p_value = 1.0;
    }
    try {
        auto tt = welch_t_test(lat_a, lat_b);
        rep.ttest_statistic = tt.statistic;
        rep.ttest_p_value = tt.p_value;
    } catch (const EngineError&) {
        rep.ttest_statistic = 0.0;
        rep.ttest_p_value = 1.0;
    }
    rep.ctr_significance = significance_mark(rep.chi2_p_value);
    rep.runtime_significance = significance_mark(rep.ttest_p_value);
    return rep;
}

std::string render_report(const ExperimentReport& rep) {
    std::ostringstream out;
    auto arm_line = [&out](const char* label, const ArmSummary& s) {
        out << "  " << label << " " << strategy_name(s.strategy)
            << "  users=" << s.user_count << "  slates=" << s.slate_count
            << "  items=" << s.item_count << "  clicks=" << s.click_count
            << "  CTR=" << s.ctr << "  runtime_ms=" << s.mean_runtime_ms << "\n";
    };
    out << "experiment " << rep.experiment_id << "\n";
    arm_line("A:", rep.arm_a);
    arm_line("B:", rep.arm_b);
    out << "  CTR increase: " << rep.relative_ctr_increase * 100.0 << "%"
        << rep.ctr_significance << "  (chi2=" << rep.chi2_statistic
        << ", p=" << rep.chi2_p_value << ")\n";
    out << "  runtime decrease: " << rep.relative_runtime_decrease * 100.0 << "%"
        << rep.runtime_significance << "  (t=" << rep.ttest_statistic
        << ", p=" << rep.ttest_p_value << ")\n";
    return out.str();
}

}  // namespace engine
