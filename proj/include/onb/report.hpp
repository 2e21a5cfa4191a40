#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "onb/eval.hpp"

namespace onb {

struct ComparisonRow {
    Index function_id;
    std::string role;   // "highest" | "lowest"
    std::string model;  // "deeponet" | "fcn" | "cnn"
    MetricRecord metrics;
};

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricRecord>& records,
                       const std::string& config_hash);
std::vector<MetricRecord> read_metrics_csv(const std::filesystem::path& path);

nlohmann::json summary_to_json(const SummaryStats& stats);
void write_summary_json(const std::filesystem::path& path,
                        const SummaryStats& stats,
                        const std::string& config_hash);

/// Fixed-bin histogram used for the metric-distribution panels.
struct Histogram {
    double lo = 0, hi = 1;
    std::vector<Index> counts;
};
Histogram make_histogram(const std::vector<double>& values, int bins);
void write_histogram_svg(const std::filesystem::path& path,
                         const Histogram& h, const std::string& title,
                         const std::string& config_hash);

void write_comparison_csv(const std::filesystem::path& path,
                          const std::vector<ComparisonRow>& rows,
                          const std::string& config_hash);

/// metrics.csv + summary.json + hist_<metric>.svg per metric, and
/// comparison.csv when comparison rows are given.
void emit_report(const std::filesystem::path& dir,
                 const std::vector<MetricRecord>& records,
                 const SummaryStats& stats,
                 const std::vector<ComparisonRow>& comparisons,
                 const std::string& config_hash);

}  // namespace onb
