#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "onb/dataset.hpp"
#include "onb/solvers/grid.hpp"

namespace onb {

/// Coefficient of determination. Throws DegenerateError for constant targets.
double r2(const Vector& pred, const Vector& target);

double rmse_mae_ratio(const Vector& pred, const Vector& target);

struct MetricRecord {
    Index function_id = 0;
    double r2 = 0.0;
    bool r2_defined = true;  // false for constant-target functions
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    double rmse_mae_ratio = 0.0;
};

MetricRecord compute_record(Index function_id, const Vector& pred,
                            const Vector& target);

struct MetricSummary {
    double mean = 0, std = 0, min = 0, max = 0;
};

struct SummaryStats {
    MetricSummary r2, mse, rmse, mae, rmse_mae_ratio;
    Index argmax_r2_id = -1;  // best function by r2
    Index argmin_r2_id = -1;  // worst function by r2
    Index n_records = 0;
    Index n_r2_defined = 0;
};

SummaryStats summarize(const std::vector<MetricRecord>& records);

/// Per-function metrics over each function's own query points, plus the
/// summary. predict_fn receives (function index, sensor row, query matrix).
using PredictFn =
    std::function<Vector(Index, const Vector&, const Matrix&)>;
std::pair<std::vector<MetricRecord>, SummaryStats> evaluate_model(
    const PredictFn& predict_fn, const OperatorDataset& test);

/// Pipe-erosion screening: threshold speed Ve = C / sqrt(rho); worst point
/// is the argmax of the squared residual between predicted and simulated
/// speed fields.
struct ErosionAssessment {
    double erosion_velocity = 0;
    double max_speed_true = 0;
    double max_speed_pred = 0;
    double worst_x = 0, worst_t = 0;
    double true_speed_at_worst = 0;
    double pred_speed_at_worst = 0;
    double risk_ratio = 0;  // |pred| / |true| at the worst point
};

ErosionAssessment erosion_assessment(const Grid2D& sim, const Grid2D& pred,
                                     double C = 240.0, double rho = 1000.0);

}  // namespace onb
