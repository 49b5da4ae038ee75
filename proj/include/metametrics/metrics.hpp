// Copyright 2026 The metametrics Authors
// SPDX-License-Identifier: Apache-2.0
//
// The metrics engine: pure functions over an ArtifactHistory prefix.
//
//   r_succeeded(n)  = sum of res(i) for i in 1..n;  r_failed = n - r_succeeded
//   R+(n)           = r_succeeded(n) / n;  R-(n) = 1 - R+(n)
//   q1(n1, n2)      = R+(n2) - R+(n1)
//   last_failed(n)  = max { i <= n : res(i) = 0 }, 0 when no failure exists
//   neg_age(n)      = n - last_failed(n)
//   q2(n1, n2)      = neg_age(n2) - neg_age(n1), n1 < n2 strictly
//   r_failures(n)   = number of i in 1..n-1 with res(i) = 0 and res(i+1) = 1
//                     (a trailing failure streak is not counted)
//   q3 (MTBTF)      = r_succeeded(n) / r_failures(n), undefined when 0 failures
//   q4(n1, n2, f)   = avg over 1..n1 of f(i)/sloc(i) - same avg over 1..n2
//   q5(n1, n2)      = mean duration over passes in 1..n1 - same mean over 1..n2
//   q6(n1, n2, s)   = v(n1, s) - v(n2, s), v = population stddev of acting(s)
//
// Counts are exact integers; ratios and Q values are doubles. Verdicts use
// the exact sign of the value, no epsilon band.

#ifndef METAMETRICS_METRICS_HPP
#define METAMETRICS_METRICS_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "metametrics/error.hpp"
#include "metametrics/history.hpp"

namespace metametrics {

enum class Verdict { Improved, NotDecreased, Decreased, Undefined };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Improved: return "improved";
        case Verdict::NotDecreased: return "not_decreased";
        case Verdict::Decreased: return "decreased";
        case Verdict::Undefined: return "undefined";
    }
    return "undefined";
}

enum class QMetric { Q1, Q2, Q3, Q4, Q5, Q6 };

/// Sign interpretation per metric, in one place.
inline Verdict classify(QMetric metric, double value) {
    switch (metric) {
        case QMetric::Q1:
        case QMetric::Q2:
        case QMetric::Q6:
            return value >= 0.0 ? Verdict::NotDecreased : Verdict::Decreased;
        case QMetric::Q4:
        case QMetric::Q5:
            return value >= 0.0 ? Verdict::Improved : Verdict::Decreased;
        case QMetric::Q3:
            return Verdict::Undefined;  // MTBTF carries no sign interpretation
    }
    return Verdict::Undefined;
}

/// Indicator selectable as f in q4.
enum class IndicatorKind { MisraWarnings, Mccabe, Uncovered };

inline const char* indicator_name(IndicatorKind kind) {
    switch (kind) {
        case IndicatorKind::MisraWarnings: return "misra_warnings";
        case IndicatorKind::Mccabe: return "mccabe";
        case IndicatorKind::Uncovered: return "uncovered";
    }
    return "?";
}

inline IndicatorKind indicator_from_name(std::string_view name) {
    if (name == "misra_warnings") return IndicatorKind::MisraWarnings;
    if (name == "mccabe") return IndicatorKind::Mccabe;
    if (name == "uncovered") return IndicatorKind::Uncovered;
    throw Error(ErrorCode::MissingIndicator,
                "unknown indicator '" + std::string(name) +
                    "' (expected misra_warnings, mccabe or uncovered)",
                std::string(name));
}

inline std::optional<std::int64_t> indicator_value(const IndicatorSample& sample,
                                                   IndicatorKind kind) {
    switch (kind) {
        case IndicatorKind::MisraWarnings: return sample.misra_warnings;
        case IndicatorKind::Mccabe: return sample.mccabe;
        case IndicatorKind::Uncovered: return sample.uncovered;
    }
    return std::nullopt;
}

/// How the squared-deviation sum of the acting-time stddev treats failing
/// revisions. PassesOnly sums deviations over passing revisions; StrictAllZero
/// also adds (0 - mean)^2 for every failing revision. Both divide by
/// r_succeeded.
enum class VarianceMode { PassesOnly, StrictAllZero };

namespace detail {

inline void check_prefix(const ArtifactHistory& h, Revision n) {
    if (n < 1 || n > h.size()) {
        throw Error(ErrorCode::OutOfRange,
                    "gate " + std::to_string(n) + " out of range for artifact '" +
                        h.artifact().str() + "' (N = " + std::to_string(h.size()) + ")");
    }
}

// Range first, then order. Mirrored by the oracle.
inline void check_gate_pair(const ArtifactHistory& h, Revision n1, Revision n2,
                            bool strict_order) {
    check_prefix(h, n1);
    check_prefix(h, n2);
    if (n1 > n2 || (strict_order && n1 == n2)) {
        throw Error(ErrorCode::InvalidGateOrder,
                    "gate pair (" + std::to_string(n1) + ", " + std::to_string(n2) +
                        ") must satisfy n1 " + (strict_order ? "<" : "<=") + " n2");
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Base figures
// ---------------------------------------------------------------------------

inline std::uint64_t r_succeeded(const ArtifactHistory& h, Revision n) {
    detail::check_prefix(h, n);
    std::uint64_t count = 0;
    for (Revision i = 1; i <= n; ++i) count += static_cast<std::uint64_t>(res(h.outcome_at(i)));
    return count;
}

inline std::uint64_t r_failed(const ArtifactHistory& h, Revision n) {
    return n - r_succeeded(h, n);
}

struct SuccessRatio {
    double r_plus = 0.0;
    double r_minus = 1.0;
};

inline SuccessRatio success_ratio(const ArtifactHistory& h, Revision n) {
    const double plus = static_cast<double>(r_succeeded(h, n)) / static_cast<double>(n);
    return SuccessRatio{plus, 1.0 - plus};
}

/// Last failing revision in 1..n, or 0 when the artifact never failed.
inline Revision last_failed(const ArtifactHistory& h, Revision n) {
    detail::check_prefix(h, n);
    for (Revision i = n; i >= 1; --i) {
        if (h.outcome_at(i) == TestOutcome::Fail) return i;
    }
    return 0;
}

inline Revision neg_age(const ArtifactHistory& h, Revision n) {
    return n - last_failed(h, n);
}

/// Distinct failure episodes resolved within 1..n: fail->pass transitions.
inline std::uint64_t r_failures(const ArtifactHistory& h, Revision n) {
    detail::check_prefix(h, n);
    std::uint64_t count = 0;
    for (Revision i = 1; i + 1 <= n; ++i) {
        if (h.outcome_at(i) == TestOutcome::Fail && h.outcome_at(i + 1) == TestOutcome::Pass) {
            ++count;
        }
    }
    return count;
}

inline double q3_mtbtf(const ArtifactHistory& h, Revision n) {
    const std::uint64_t failures = r_failures(h, n);
    if (failures == 0) {
        throw Error(ErrorCode::UndefinedMtbtf,
                    "MTBTF undefined for artifact '" + h.artifact().str() + "' at gate " +
                        std::to_string(n) + ": no resolved failure episode");
    }
    return static_cast<double>(r_succeeded(h, n)) / static_cast<double>(failures);
}

// ---------------------------------------------------------------------------
// Gate-pair metrics
// ---------------------------------------------------------------------------

inline double q1(const ArtifactHistory& h, Revision n1, Revision n2) {
    detail::check_gate_pair(h, n1, n2, /*strict_order=*/false);
    return success_ratio(h, n2).r_plus - success_ratio(h, n1).r_plus;
}

inline double q2(const ArtifactHistory& h, Revision n1, Revision n2) {
    detail::check_gate_pair(h, n1, n2, /*strict_order=*/true);
    return static_cast<double>(neg_age(h, n2)) - static_cast<double>(neg_age(h, n1));
}

inline double q4(const ArtifactHistory& h, Revision n1, Revision n2, IndicatorKind kind) {
    detail::check_gate_pair(h, n1, n2, /*strict_order=*/false);
    // Availability first: the chosen indicator, then sloc, over all of 1..n2.
    std::vector<Revision> missing;
    for (Revision i = 1; i <= n2; ++i) {
        if (!indicator_value(h.at(i).indicators, kind)) missing.push_back(i);
    }
    if (!missing.empty()) {
        throw Error(ErrorCode::MissingIndicator,
                    std::string(indicator_name(kind)) + " missing at " +
                        std::to_string(missing.size()) + " revision(s) of artifact '" +
                        h.artifact().str() + "'",
                    indicator_name(kind), std::move(missing));
    }
    for (Revision i = 1; i <= n2; ++i) {
        if (!h.at(i).indicators.sloc) missing.push_back(i);
    }
    if (!missing.empty()) {
        throw Error(ErrorCode::MissingIndicator,
                    "sloc missing at " + std::to_string(missing.size()) +
                        " revision(s) of artifact '" + h.artifact().str() + "'",
                    "sloc", std::move(missing));
    }
    double sum = 0.0;
    double sum_n1 = 0.0;
    for (Revision i = 1; i <= n2; ++i) {
        const IndicatorSample& ind = h.at(i).indicators;
        sum += static_cast<double>(*indicator_value(ind, kind)) /
               static_cast<double>(*ind.sloc);
        if (i == n1) sum_n1 = sum;
    }
    return sum_n1 / static_cast<double>(n1) - sum / static_cast<double>(n2);
}

inline double q5(const ArtifactHistory& h, Revision n1, Revision n2) {
    detail::check_gate_pair(h, n1, n2, /*strict_order=*/false);
    if (r_succeeded(h, n1) == 0) {
        throw Error(ErrorCode::NoSuccessfulRevisions,
                    "no successful revision in 1.." + std::to_string(n1) + " of artifact '" +
                        h.artifact().str() + "'");
    }
    std::vector<Revision> missing;
    for (Revision i = 1; i <= n2; ++i) {
        const RevisionRecord& rec = h.at(i);
        if (rec.outcome == TestOutcome::Pass && !rec.indicators.duration_s) {
            missing.push_back(i);
        }
    }
    if (!missing.empty()) {
        throw Error(ErrorCode::MissingIndicator,
                    "duration_s missing at " + std::to_string(missing.size()) +
                        " passing revision(s) of artifact '" + h.artifact().str() + "'",
                    "duration_s", std::move(missing));
    }
    double sum = 0.0;
    std::uint64_t passes = 0;
    double mean_n1 = 0.0;
    for (Revision i = 1; i <= n2; ++i) {
        const RevisionRecord& rec = h.at(i);
        if (rec.outcome == TestOutcome::Pass) {
            sum += *rec.indicators.duration_s;
            ++passes;
        }
        if (i == n1) mean_n1 = sum / static_cast<double>(passes);
    }
    return mean_n1 - sum / static_cast<double>(passes);
}

struct ActingStats {
    double mean_s = 0.0;
    double stddev_s = 0.0;  // population stddev, always >= 0
};

inline ActingStats acting_stddev(const ArtifactHistory& h, Revision n,
                                 std::string_view situation,
                                 VarianceMode mode = VarianceMode::PassesOnly) {
    detail::check_prefix(h, n);
    const std::uint64_t passes = r_succeeded(h, n);
    if (passes == 0) {
        throw Error(ErrorCode::NoSuccessfulRevisions,
                    "no successful revision in 1.." + std::to_string(n) + " of artifact '" +
                        h.artifact().str() + "'");
    }
    const std::string key(situation);
    std::vector<Revision> missing;
    for (Revision i = 1; i <= n; ++i) {
        const RevisionRecord& rec = h.at(i);
        if (rec.outcome == TestOutcome::Pass && !rec.indicators.acting_s.contains(key)) {
            missing.push_back(i);
        }
    }
    if (!missing.empty()) {
        throw Error(ErrorCode::MissingSituation,
                    "situation '" + key + "' missing at " + std::to_string(missing.size()) +
                        " passing revision(s) of artifact '" + h.artifact().str() + "'",
                    key, std::move(missing));
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (Revision i = 1; i <= n; ++i) {
        const RevisionRecord& rec = h.at(i);
        if (rec.outcome != TestOutcome::Pass) continue;
        const double x = rec.indicators.acting_s.at(key);
        sum += x;
        sum_sq += x * x;
    }
    const double np = static_cast<double>(passes);
    const double mean = sum / np;
    // Var over passes = E[x^2] - mean^2; strict mode adds mean^2 per failing
    // revision (acting contributes 0 there) to the deviation sum.
    double variance = sum_sq / np - mean * mean;
    if (mode == VarianceMode::StrictAllZero) {
        const double fails = static_cast<double>(n - passes);
        variance += fails * mean * mean / np;
    }
    if (variance < 0.0) variance = 0.0;  // guard tiny negative round-off
    return ActingStats{mean, std::sqrt(variance)};
}

inline double q6(const ArtifactHistory& h, Revision n1, Revision n2,
                 std::string_view situation, VarianceMode mode = VarianceMode::PassesOnly) {
    detail::check_gate_pair(h, n1, n2, /*strict_order=*/false);
    const ActingStats earlier = acting_stddev(h, n1, situation, mode);
    const ActingStats later = acting_stddev(h, n2, situation, mode);
    return earlier.stddev_s - later.stddev_s;
}

// ---------------------------------------------------------------------------
// Aggregated report
// ---------------------------------------------------------------------------

/// One metric result: either a value (with its verdict, when the metric has a
/// sign interpretation) or the error that made it undefined.
struct MetricSlot {
    std::optional<double> value;
    std::optional<Verdict> verdict;  // nullopt: defined but no interpretation (MTBTF)
    std::optional<ErrorCode> error;
    std::string detail;

    bool defined() const noexcept { return value.has_value(); }

    static MetricSlot of(QMetric metric, double value) {
        MetricSlot slot;
        slot.value = value;
        if (metric != QMetric::Q3) slot.verdict = classify(metric, value);
        return slot;
    }

    static MetricSlot undefined(const Error& err) {
        MetricSlot slot;
        slot.verdict = Verdict::Undefined;
        slot.error = err.code();
        slot.detail = err.what();
        return slot;
    }

    bool operator==(const MetricSlot&) const = default;
};

/// Base figures at one gate (cumulative prefix 1..gate).
struct GateFigures {
    Revision gate = 0;
    std::uint64_t r_succeeded = 0;
    std::uint64_t r_failed = 0;
    double r_plus = 0.0;
    double r_minus = 0.0;
    Revision last_failed = 0;
    Revision neg_age = 0;
    std::uint64_t r_failures = 0;
    MetricSlot mtbtf;  // defined iff r_failures >= 1

    bool operator==(const GateFigures&) const = default;
};

/// Q-metrics for one consecutive gate pair (n1, n2).
struct GatePairFigures {
    Revision n1 = 0;
    Revision n2 = 0;
    MetricSlot q1;
    MetricSlot q2;
    MetricSlot q5;
    std::map<std::string, MetricSlot> q4;  // indicator name -> slot
    std::map<std::string, MetricSlot> q6;  // situation id -> slot

    bool operator==(const GatePairFigures&) const = default;
};

struct MetricsReport {
    ArtifactId artifact;
    std::vector<GateFigures> gates;
    std::vector<GatePairFigures> pairs;

    const GateFigures* gate(Revision n) const {
        for (const GateFigures& g : gates) {
            if (g.gate == n) return &g;
        }
        return nullptr;
    }

    const GatePairFigures* pair_ending_at(Revision n2) const {
        for (const GatePairFigures& p : pairs) {
            if (p.n2 == n2) return &p;
        }
        return nullptr;
    }

    bool operator==(const MetricsReport&) const = default;
};

struct ComputeOptions {
    std::vector<std::string> indicators;  // q4 targets, e.g. "mccabe"
    std::vector<std::string> situations;  // q6 targets
    VarianceMode variance_mode = VarianceMode::PassesOnly;
};

namespace detail {

template <typename Fn>
MetricSlot try_slot(QMetric metric, Fn&& fn) {
    try {
        return MetricSlot::of(metric, fn());
    } catch (const Error& err) {
        return MetricSlot::undefined(err);
    }
}

inline void check_gate_list(const ArtifactHistory& h, std::span<const Revision> gates) {
    if (gates.empty()) {
        throw Error(ErrorCode::OutOfRange, "at least one gate is required");
    }
    Revision prev = 0;
    for (Revision g : gates) {
        check_prefix(h, g);
        if (g <= prev) {
            throw Error(ErrorCode::InvalidGateOrder, "gates must be strictly increasing");
        }
        prev = g;
    }
}

}  // namespace detail

/// Evaluates every base figure at each gate and every Q-metric for each
/// consecutive gate pair. Gates must be strictly increasing and <= N.
/// Per-metric failures become undefined slots; they never abort the report.
inline MetricsReport compute_report(const ArtifactHistory& h, std::span<const Revision> gates,
                                    const ComputeOptions& options = {}) {
    detail::check_gate_list(h, gates);
    MetricsReport report{h.artifact(), {}, {}};
    for (Revision g : gates) {
        GateFigures fig;
        fig.gate = g;
        fig.r_succeeded = r_succeeded(h, g);
        fig.r_failed = g - fig.r_succeeded;
        const SuccessRatio ratio = success_ratio(h, g);
        fig.r_plus = ratio.r_plus;
        fig.r_minus = ratio.r_minus;
        fig.last_failed = last_failed(h, g);
        fig.neg_age = g - fig.last_failed;
        fig.r_failures = r_failures(h, g);
        fig.mtbtf = detail::try_slot(QMetric::Q3, [&] { return q3_mtbtf(h, g); });
        report.gates.push_back(std::move(fig));
    }
    for (std::size_t k = 0; k + 1 < gates.size(); ++k) {
        const Revision n1 = gates[k];
        const Revision n2 = gates[k + 1];
        GatePairFigures pair;
        pair.n1 = n1;
        pair.n2 = n2;
        pair.q1 = detail::try_slot(QMetric::Q1, [&] { return q1(h, n1, n2); });
        pair.q2 = detail::try_slot(QMetric::Q2, [&] { return q2(h, n1, n2); });
        pair.q5 = detail::try_slot(QMetric::Q5, [&] { return q5(h, n1, n2); });
        for (const std::string& name : options.indicators) {
            pair.q4[name] = detail::try_slot(QMetric::Q4, [&] {
                return q4(h, n1, n2, indicator_from_name(name));
            });
        }
        for (const std::string& situation : options.situations) {
            pair.q6[situation] = detail::try_slot(QMetric::Q6, [&] {
                return q6(h, n1, n2, situation, options.variance_mode);
            });
        }
        report.pairs.push_back(std::move(pair));
    }
    return report;
}

namespace detail {

/// Runs fn(index) for index in [0, count) on up to `threads` workers
/// (0 = hardware concurrency). Exceptions are rethrown for the lowest index.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += threads) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (std::thread& t : workers) t.join();
    for (const std::exception_ptr& err : errors) {
        if (err) std::rethrow_exception(err);
    }
}

}  // namespace detail

/// Reports for every artifact of a set, ordered by artifact id. Evaluation may
/// run in parallel; the result is identical to the serial one.
inline std::vector<MetricsReport> compute_reports(const HistorySet& set,
                                                  std::span<const Revision> gates,
                                                  const ComputeOptions& options = {},
                                                  unsigned threads = 1) {
    std::vector<const ArtifactHistory*> histories;
    histories.reserve(set.size());
    for (const auto& [id, h] : set) histories.push_back(&h);
    std::vector<std::optional<MetricsReport>> slots(histories.size());
    detail::parallel_for(histories.size(), threads, [&](std::size_t i) {
        slots[i] = compute_report(*histories[i], gates, options);
    });
    std::vector<MetricsReport> reports;
    reports.reserve(slots.size());
    for (std::optional<MetricsReport>& slot : slots) reports.push_back(std::move(*slot));
    return reports;
}

}  // namespace metametrics

#endif  // METAMETRICS_METRICS_HPP
