#pragma once

// Rolling minimisation / out-of-sample test procedure and its aggregate
// report.
//
// Each window fits the minimum-eigenvalue basket on D consecutive days at
// step Delta, then evaluates the same weights on the S days that follow.
// The window start advances one day at a time.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "basketminer/lagcorr.hpp"
#include "basketminer/marketdata.hpp"
#include "basketminer/report.hpp"
#include "basketminer/stats.hpp"

namespace bm {

enum class BoundaryMode { skip, concat };

[[nodiscard]] std::string_view to_string(BoundaryMode m) noexcept;
[[nodiscard]] BoundaryMode parse_boundary_mode(std::string_view s);

[[nodiscard]] std::vector<int> default_deltas();

struct PipelineConfig {
    Index minimization_days = 10;
    std::vector<Index> test_days{1, 5};
    std::vector<int> deltas = default_deltas();
    Index lag = 1;
    BoundaryMode boundary = BoundaryMode::skip;
    std::size_t threads = 0;  // 0: thread_count()
};

struct TestResult {
    Index days = 0;
    std::vector<std::string> dates;
    Index n = 0;
    double rho = 0.0;         // day boundaries handled per BoundaryMode
    double rho_concat = 0.0;  // plain concatenation
    double ci = 0.0;
    bool significant = false;  // rho < -ci
    std::optional<HurstEstimate<double>> hurst;
};

enum class WindowStatus { ok, skipped };

struct WindowResult {
    int delta = 0;
    Index window_index = 0;
    Index start_day = 0;
    std::vector<int> symbols;
    std::vector<std::string> minimization_days;
    WindowStatus status = WindowStatus::ok;
    std::string skip_reason;

    BasketWeights<double> weights;
    double lambda_min = 0.0;
    Index n_min = 0;
    double rho_min = 0.0;
    double rho_min_concat = 0.0;
    std::optional<HurstEstimate<double>> hurst;  // weights applied to the finest-step panel
    std::vector<TestResult> tests;               // ascending in S
    std::vector<Index> missing_tests;            // S values past the end of the data
    Eigen::MatrixXd c_hat;

    [[nodiscard]] const TestResult* test(Index S) const;
};

/// One window on `panel` (step Delta). `hurst_panel` carries the same days
/// at the finest available step.
[[nodiscard]] WindowResult run_window(const IncrementPanel& panel, const IncrementPanel& hurst_panel, Index start_day,
                                      const PipelineConfig& config);

[[nodiscard]] Index window_count(Index n_days, Index minimization_days, std::span<const Index> test_days);

/// Every window for every configured step, ordered by (Delta, window index).
/// `base` is the finest-step panel; coarser steps are aggregated from it.
[[nodiscard]] std::vector<WindowResult> run_rolling(const IncrementPanel& base, const PipelineConfig& config);

struct ReportConfig {
    double corr_bin = 0.01;
    double weight_bin = 0.02;
    double hurst_bin = 0.02;
};

struct TestSummary {
    Index count = 0;
    double mean_rho = 0.0;
    double frac_significant = 0.0;
    Histogram rho;
};

struct ScaleSummary {
    int delta = 0;
    Index windows = 0;  // status ok
    Index skipped = 0;
    double mean_rho_min = 0.0;
    double mean_hurst = 0.0;
    Histogram rho_min;
    Histogram hurst;
    Histogram weights;
    Histogram c_hat;
    std::map<Index, TestSummary> tests;
};

struct RunReport {
    std::vector<ScaleSummary> scales;  // ascending Delta
};

[[nodiscard]] RunReport aggregate(std::span<const WindowResult> results, const ReportConfig& config = {});

/// summary.csv plus per-Delta histogram CSVs under `dir`.
void write_report(const RunReport& report, const std::filesystem::path& dir);
void write_summary_csv(std::ostream& out, const RunReport& report);

void write_results_jsonl(std::ostream& out, std::span<const WindowResult> results, bool include_matrices);
[[nodiscard]] std::vector<WindowResult> read_results_jsonl(std::istream& in);

}  // namespace bm
