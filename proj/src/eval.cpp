#include "onb/eval.hpp"

#include <cmath>
#include <limits>

namespace onb {

double r2(const Vector& pred, const Vector& target) {
    if (pred.size() < 2 || pred.size() != target.size())
        throw ShapeError("r2: need >= 2 points and equal lengths");
    const double mean = target.mean();
    const double ss_tot = (target.array() - mean).matrix().squaredNorm();
    if (ss_tot == 0.0)
        throw DegenerateError("r2: constant target has no variance");
    const double ss_res = (target - pred).squaredNorm();
    return 1.0 - ss_res / ss_tot;
}

double rmse_mae_ratio(const Vector& pred, const Vector& target) {
    if (pred.size() == 0 || pred.size() != target.size())
        throw ShapeError("rmse_mae_ratio: empty or mismatched inputs");
    const Vector r = pred - target;
    const double mae = r.cwiseAbs().mean();
    if (mae == 0.0)
        throw DegenerateError("rmse_mae_ratio: zero MAE");
    const double rmse = std::sqrt(r.squaredNorm() / static_cast<double>(r.size()));
    return rmse / mae;
}

MetricRecord compute_record(Index function_id, const Vector& pred,
                            const Vector& target) {
    MetricRecord rec;
    rec.function_id = function_id;
    const Vector r = pred - target;
    const double n = static_cast<double>(r.size());
    rec.mse = r.squaredNorm() / n;
    rec.rmse = std::sqrt(rec.mse);
    rec.mae = r.cwiseAbs().mean();
    rec.rmse_mae_ratio = rec.mae > 0.0 ? rec.rmse / rec.mae : 1.0;
    try {
        rec.r2 = r2(pred, target);
    } catch (const DegenerateError&) {
        rec.r2 = std::numeric_limits<double>::quiet_NaN();
        rec.r2_defined = false;
    }
    return rec;
}

namespace {

MetricSummary summarize_values(const std::vector<double>& v) {
    MetricSummary s;
    if (v.empty()) return s;
    double acc = 0, mn = v[0], mx = v[0];
    for (double x : v) {
        acc += x;
        mn = std::min(mn, x);
        mx = std::max(mx, x);
    }
    s.mean = acc / static_cast<double>(v.size());
    double var = 0;
    for (double x : v) var += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(var / static_cast<double>(v.size()));
    s.min = mn;
    s.max = mx;
    return s;
}

}  // namespace

SummaryStats summarize(const std::vector<MetricRecord>& records) {
    SummaryStats s;
    s.n_records = static_cast<Index>(records.size());
    std::vector<double> r2s, mses, rmses, maes, ratios;
    double best = -std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& rec : records) {
        mses.push_back(rec.mse);
        rmses.push_back(rec.rmse);
        maes.push_back(rec.mae);
        ratios.push_back(rec.rmse_mae_ratio);
        if (!rec.r2_defined) continue;
        r2s.push_back(rec.r2);
        if (rec.r2 > best) {
            best = rec.r2;
            s.argmax_r2_id = rec.function_id;
        }
        if (rec.r2 < worst) {
            worst = rec.r2;
            s.argmin_r2_id = rec.function_id;
        }
    }
    s.n_r2_defined = static_cast<Index>(r2s.size());
    s.r2 = summarize_values(r2s);
    s.mse = summarize_values(mses);
    s.rmse = summarize_values(rmses);
    s.mae = summarize_values(maes);
    s.rmse_mae_ratio = summarize_values(ratios);
    return s;
}

std::pair<std::vector<MetricRecord>, SummaryStats> evaluate_model(
    const PredictFn& predict_fn, const OperatorDataset& test) {
    const Index nf = test.n_functions();
    if (nf == 0) throw ShapeError("evaluate_model: empty dataset");
    std::vector<MetricRecord> records(nf);
    parallel_for_chunks(nf, 16, [&](Index, Index b, Index e) {
        for (Index f = b; f < e; ++f) {
            const Vector pred = predict_fn(f, test.inputs.values.row(f),
                                           test.queries[f]);
            records[f] = compute_record(f, pred, test.targets[f]);
        }
    });
    SummaryStats stats = summarize(records);
    return {std::move(records), std::move(stats)};
}

ErosionAssessment erosion_assessment(const Grid2D& sim, const Grid2D& pred,
                                     double C, double rho) {
    if (sim.nx != pred.nx || sim.nt != pred.nt)
        throw ShapeError("erosion_assessment: grids are not congruent");
    ErosionAssessment a;
    a.erosion_velocity = C / std::sqrt(rho);
    a.max_speed_true = sim.values.cwiseAbs().maxCoeff();
    a.max_speed_pred = pred.values.cwiseAbs().maxCoeff();

    Index wi = 0, wj = 0;
    double worst = -1.0;
    for (Index i = 0; i < sim.nx; ++i)
        for (Index j = 0; j < sim.nt; ++j) {
            const double d = pred.values(i, j) - sim.values(i, j);
            if (d * d > worst) {
                worst = d * d;
                wi = i;
                wj = j;
            }
        }
    a.worst_x = sim.xs()(wi);
    a.worst_t = sim.ts()(wj);
    a.true_speed_at_worst = std::abs(sim.values(wi, wj));
    a.pred_speed_at_worst = std::abs(pred.values(wi, wj));
    a.risk_ratio = a.true_speed_at_worst > 0.0
                       ? a.pred_speed_at_worst / a.true_speed_at_worst
                       : std::numeric_limits<double>::infinity();
    return a;
}

}  // namespace onb
