#include "onb/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "onb/io.hpp"

namespace onb {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

GrfConfig make_grf(const ExperimentConfig& cfg) {
    GrfConfig g;
    g.n_sensors = cfg.n_sensors;
    g.jitter = cfg.grf_jitter;
    g.length_scale = cfg.grf_length_scale;
    g.kernel = grf_kernel_from_string(cfg.grf_kernel);
    if (cfg.problem == "burgers") {
        g.domain_lo = 0.0;
        g.domain_hi = 10.0;
    } else {
        g.domain_lo = 0.0;
        g.domain_hi = 1.0;
    }
    return g;
}

DiffusionConfig make_diffusion(const ExperimentConfig& cfg) {
    DiffusionConfig c;
    c.diffusivity = cfg.diffusion_d;
    c.reaction_rate = cfg.diffusion_k;
    c.out_nx = cfg.out_nx;
    c.out_nt = cfg.out_nt;
    return c;
}

BurgersConfig make_burgers(const ExperimentConfig& cfg) {
    BurgersConfig c;
    c.nu = cfg.burgers_nu;
    c.internal_n = cfg.burgers_internal_n;
    c.out_nx = cfg.out_nx;
    c.out_nt = cfg.out_nt;
    return c;
}

Index effective_n_train(const ExperimentConfig& cfg) {
    if (cfg.problem == "diffusion" && cfg.full_scale) return cfg.full_n_train;
    return cfg.n_train;
}

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<TrainHistoryRow>& rows,
                       const std::string& hash) {
    std::ostringstream out;
    out << "# config_hash=" << hash << "\n";
    out << "iteration,train_loss,test_loss,test_metric\n";
    for (const auto& r : rows)
        out << r.iteration << ',' << fmt(r.train_loss) << ','
            << fmt(r.test_loss) << ',' << fmt(r.test_metric) << '\n';
    atomic_write_file(path, out.str());
}

void write_epoch_history_csv(const std::filesystem::path& path,
                             const std::vector<double>& losses,
                             const std::string& hash) {
    std::ostringstream out;
    out << "# config_hash=" << hash << "\n";
    out << "epoch,train_loss\n";
    for (std::size_t e = 0; e < losses.size(); ++e)
        out << e << ',' << fmt(losses[e]) << '\n';
    atomic_write_file(path, out.str());
}

// Batched evaluation: one branch pass per function, one trunk pass per
// query set. Same numbers as deeponet_forward, just not point-by-point.
std::pair<std::vector<MetricRecord>, SummaryStats> evaluate_deeponet(
    const DeepONetParams& params, const OperatorDataset& test) {
    const std::vector<Vector> preds = predict_dataset(params, test);
    std::vector<MetricRecord> records(preds.size());
    for (Index f = 0; f < static_cast<Index>(preds.size()); ++f)
        records[f] = compute_record(f, preds[f], test.targets[f]);
    SummaryStats stats = summarize(records);
    return {std::move(records), std::move(stats)};
}

}  // namespace

ExperimentConfig resolve_defaults(ExperimentConfig cfg) {
    const bool ode = cfg.problem == "ode";
    const bool diffusion = cfg.problem == "diffusion";
    const bool burgers = cfg.problem == "burgers";
    if (!ode && !diffusion && !burgers)
        throw Error("unknown problem: " + cfg.problem);

    if (cfg.n_train < 0) cfg.n_train = diffusion ? 1000 : 150;
    if (cfg.n_test < 0) cfg.n_test = 1000;
    if (cfg.iterations < 0) cfg.iterations = burgers ? 50000 : 10000;
    if (cfg.metric.empty()) cfg.metric = diffusion ? "mse" : "l2rel";
    if (cfg.grf_length_scale < 0) cfg.grf_length_scale = burgers ? 1.0 : 0.2;
    if (cfg.grf_kernel.empty())
        cfg.grf_kernel = burgers ? "periodic_rbf" : "rbf";
    if (cfg.branch_sizes.empty()) cfg.branch_sizes = {cfg.n_sensors, 40, 40};
    if (cfg.trunk_sizes.empty())
        cfg.trunk_sizes = {ode ? Index{1} : Index{2}, 40, 40};
    if (cfg.baseline_points < 0) cfg.baseline_points = ode ? 50 : 100;

    // Parsing checks; throw early on bad names.
    loss_kind_from_string(cfg.loss);
    loss_kind_from_string(cfg.metric);
    grf_kernel_from_string(cfg.grf_kernel);
    return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["problem"] = cfg.problem;
    j["seed"] = cfg.seed;
    j["full_scale"] = cfg.full_scale;
    j["dataset"] = {{"n_train", cfg.n_train},
                    {"n_test", cfg.n_test},
                    {"n_queries", cfg.n_queries},
                    {"n_sensors", cfg.n_sensors},
                    {"full_n_train", cfg.full_n_train}};
    j["grf"] = {{"length_scale", cfg.grf_length_scale},
                {"kernel", cfg.grf_kernel},
                {"jitter", cfg.grf_jitter}};
    j["solver"] = {{"ode_steps", cfg.ode_steps},
                   {"diffusion_d", cfg.diffusion_d},
                   {"diffusion_k", cfg.diffusion_k},
                   {"burgers_nu", cfg.burgers_nu},
                   {"burgers_internal_n", cfg.burgers_internal_n},
                   {"out_nx", cfg.out_nx},
                   {"out_nt", cfg.out_nt}};
    j["model"] = {{"branch", cfg.branch_sizes},
                  {"trunk", cfg.trunk_sizes},
                  {"stacked", cfg.stacked},
                  {"output_bias", cfg.output_bias}};
    j["train"] = {{"loss", cfg.loss},
                  {"metric", cfg.metric},
                  {"iterations", cfg.iterations},
                  {"lr", cfg.lr},
                  {"log_every", cfg.log_every}};
    j["baselines"] = {{"points", cfg.baseline_points},
                      {"epochs", cfg.baseline_epochs},
                      {"fcn_batch", cfg.fcn_batch},
                      {"cnn_batch", cfg.cnn_batch}};
    j["sweep"] = {{"widths", cfg.sweep_widths},
                  {"iterations", cfg.sweep_iterations}};
    return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string canon = config_to_json(cfg).dump();
    return sha256_hex(canon);
}

ExperimentPaths experiment_paths(const ExperimentConfig& cfg) {
    ExperimentPaths p;
    p.train_data = cfg.out_dir / "data" / "train.opds";
    p.test_data = cfg.out_dir / "data" / "test.opds";
    p.deeponet_ckpt = cfg.out_dir / "ckpt" / "deeponet.ckpt";
    p.history_csv = cfg.out_dir / "history.csv";
    p.report_dir = cfg.out_dir / "report";
    p.sweep_csv = cfg.out_dir / "sweep.csv";
    return p;
}

Index problem_query_dim(const ExperimentConfig& cfg) {
    return cfg.problem == "ode" ? 1 : 2;
}

DeepONetArch make_arch(const ExperimentConfig& cfg) {
    DeepONetArch arch;
    arch.branch_sizes = cfg.branch_sizes;
    arch.trunk_sizes = cfg.trunk_sizes;
    arch.stacked = cfg.stacked;
    arch.use_output_bias = cfg.output_bias;
    arch.activation = Activation::ReLU;
    return arch;
}

TrainConfig make_train_config(const ExperimentConfig& cfg) {
    TrainConfig t;
    t.loss = loss_kind_from_string(cfg.loss);
    t.metric = loss_kind_from_string(cfg.metric);
    t.iterations = cfg.iterations;
    t.lr = cfg.lr;
    t.seed = Rng(cfg.seed).derive(0x7a).next_u64();
    t.log_every = cfg.log_every;
    return t;
}

void cmd_generate(const ExperimentConfig& cfg) {
    set_max_threads(cfg.threads);
    const auto paths = experiment_paths(cfg);
    const std::uint64_t data_seed = Rng(cfg.seed).derive(0xda).next_u64();

    OperatorDataset train, test;
    if (cfg.problem == "ode") {
        OdeDatasetConfig d;
        d.n_train = cfg.n_train;
        d.n_test = cfg.n_test;
        d.n_queries = cfg.n_queries;
        d.ode_steps = cfg.ode_steps;
        d.grf = make_grf(cfg);
        std::tie(train, test) = build_ode_dataset(d, data_seed);
    } else if (cfg.problem == "diffusion") {
        DiffusionDatasetConfig d;
        d.n_train = effective_n_train(cfg);
        d.n_test = cfg.n_test;
        d.n_queries = cfg.n_queries;
        d.solver = make_diffusion(cfg);
        d.grf = make_grf(cfg);
        std::tie(train, test) = build_diffusion_dataset(d, data_seed);
    } else {
        BurgersDatasetConfig d;
        d.n_train = cfg.n_train;
        d.n_test = cfg.n_test;
        d.n_queries = cfg.n_queries;
        d.solver = make_burgers(cfg);
        d.grf = make_grf(cfg);
        std::tie(train, test) = build_burgers_dataset(d, data_seed);
    }
    save_dataset(train, paths.train_data);
    save_dataset(test, paths.test_data);
}

void cmd_train(const ExperimentConfig& cfg, const std::string& model,
               Index function_id) {
    set_max_threads(cfg.threads);
    const auto paths = experiment_paths(cfg);
    const std::string hash = config_hash(cfg);
    std::filesystem::create_directories(paths.deeponet_ckpt.parent_path());

    if (model == "deeponet") {
        const OperatorDataset train = load_dataset(paths.train_data);
        const OperatorDataset test = load_dataset(paths.test_data);
        std::vector<TrainHistoryRow> sink;
        try {
            TrainResult r = train_deeponet(train, &test, make_arch(cfg),
                                           make_train_config(cfg), &sink);
            write_history_csv(paths.history_csv, r.history, hash);
            save_deeponet_checkpoint(
                paths.deeponet_ckpt, r.params,
                {{"config_hash", hash},
                 {"problem", cfg.problem},
                 {"seed", make_train_config(cfg).seed},
                 {"step_count", cfg.iterations}});
        } catch (const DivergenceError&) {
            write_history_csv(paths.history_csv, sink, hash);
            throw;
        }
        return;
    }

    if (model != "fcn" && model != "cnn")
        throw Error("unknown model: " + model);
    if (function_id < 0)
        throw Error("baseline training needs --function-id");
    const OperatorDataset test = load_dataset(paths.test_data);
    const std::uint64_t bseed =
        Rng(cfg.seed).derive(0xba5e, static_cast<std::uint64_t>(function_id))
            .next_u64();
    const BaselineDataset data =
        resample_for_baseline(test, function_id, cfg.baseline_points, bseed);
    BaselineTrainConfig bcfg;
    bcfg.lr = cfg.lr;
    bcfg.epochs = cfg.baseline_epochs;
    bcfg.seed = bseed;
    const std::string tag = model + "_" + std::to_string(function_id);
    if (model == "fcn") {
        bcfg.batch_size = cfg.fcn_batch;
        const FcnTrainResult r = train_fcn(data, bcfg);
        save_fcn_checkpoint(cfg.out_dir / "ckpt" / (tag + ".ckpt"), r.model,
                            {{"config_hash", hash},
                             {"problem", cfg.problem},
                             {"function_id", function_id},
                             {"seed", bcfg.seed},
                             {"step_count", cfg.baseline_epochs}});
        write_epoch_history_csv(cfg.out_dir / ("history_" + tag + ".csv"),
                                r.epoch_loss, hash);
    } else {
        bcfg.batch_size = cfg.cnn_batch;
        const CnnTrainResult r = train_cnn(data, bcfg);
        save_cnn_checkpoint(cfg.out_dir / "ckpt" / (tag + ".ckpt"), r.model,
                            {{"config_hash", hash},
                             {"problem", cfg.problem},
                             {"function_id", function_id},
                             {"seed", bcfg.seed},
                             {"step_count", cfg.baseline_epochs}});
        write_epoch_history_csv(cfg.out_dir / ("history_" + tag + ".csv"),
                                r.epoch_loss, hash);
    }
}

SummaryStats cmd_evaluate(const ExperimentConfig& cfg) {
    set_max_threads(cfg.threads);
    const auto paths = experiment_paths(cfg);
    const OperatorDataset test = load_dataset(paths.test_data);
    const DeepONetParams params = load_deeponet_checkpoint(paths.deeponet_ckpt);
    auto [records, stats] = evaluate_deeponet(params, test);
    emit_report(paths.report_dir, records, stats, {}, config_hash(cfg));
    return stats;
}

void cmd_sweep(const ExperimentConfig& cfg) {
    set_max_threads(cfg.threads);
    const auto paths = experiment_paths(cfg);
    const std::string hash = config_hash(cfg);
    const OperatorDataset train = load_dataset(paths.train_data);
    const OperatorDataset test = load_dataset(paths.test_data);

    std::ostringstream out;
    out << "# config_hash=" << hash << "\n";
    if (!cfg.sweep_iterations.empty()) {
        // Iteration sweep: one training run, snapshots along the way.
        TrainConfig tc = make_train_config(cfg);
        tc.snapshot_iterations = cfg.sweep_iterations;
        tc.iterations = *std::max_element(cfg.sweep_iterations.begin(),
                                          cfg.sweep_iterations.end());
        const TrainResult r = train_deeponet(train, &test, make_arch(cfg), tc);
        out << "iteration,test_loss,test_metric,r2_mean,mse_mean,rmse_mean,"
               "mae_mean,rmse_mae_ratio_mean\n";
        for (const auto& [iter, params] : r.snapshots) {
            auto [records, stats] = evaluate_deeponet(params, test);
            double test_loss = 0, test_metric = 0;
            for (const auto& row : r.history)
                if (row.iteration == iter) {
                    test_loss = row.test_loss;
                    test_metric = row.test_metric;
                }
            out << iter << ',' << fmt(test_loss) << ',' << fmt(test_metric)
                << ',' << fmt(stats.r2.mean) << ',' << fmt(stats.mse.mean)
                << ',' << fmt(stats.rmse.mean) << ',' << fmt(stats.mae.mean)
                << ',' << fmt(stats.rmse_mae_ratio.mean) << '\n';
        }
        write_history_csv(paths.history_csv, r.history, hash);
    } else {
        out << "trunk_width,r2_mean,mse_mean,rmse_mean,mae_mean,"
               "rmse_mae_ratio_mean\n";
        for (Index width : cfg.sweep_widths) {
            ExperimentConfig wcfg = cfg;
            wcfg.trunk_sizes[1] = width;
            const TrainResult r = train_deeponet(
                train, &test, make_arch(wcfg), make_train_config(wcfg));
            auto [records, stats] = evaluate_deeponet(r.params, test);
            out << width << ',' << fmt(stats.r2.mean) << ','
                << fmt(stats.mse.mean) << ',' << fmt(stats.rmse.mean) << ','
                << fmt(stats.mae.mean) << ','
                << fmt(stats.rmse_mae_ratio.mean) << '\n';
        }
    }
    atomic_write_file(paths.sweep_csv, out.str());
}

void cmd_compare(const ExperimentConfig& cfg) {
    set_max_threads(cfg.threads);
    const auto paths = experiment_paths(cfg);
    const std::string hash = config_hash(cfg);
    const OperatorDataset test = load_dataset(paths.test_data);
    const DeepONetParams params = load_deeponet_checkpoint(paths.deeponet_ckpt);

    auto [records, stats] = evaluate_deeponet(params, test);
    if (stats.argmax_r2_id < 0 || stats.argmin_r2_id < 0)
        throw DegenerateError("cmd_compare: no defined r2 records");

    std::vector<ComparisonRow> rows;
    for (const auto& [role, fid] :
         std::vector<std::pair<std::string, Index>>{
             {"highest", stats.argmax_r2_id}, {"lowest", stats.argmin_r2_id}}) {
        const std::uint64_t bseed =
            Rng(cfg.seed).derive(0xba5e, static_cast<std::uint64_t>(fid))
                .next_u64();
        const BaselineDataset data =
            resample_for_baseline(test, fid, cfg.baseline_points, bseed);

        rows.push_back({fid, role, "deeponet", records[fid]});

        BaselineTrainConfig bcfg;
        bcfg.lr = cfg.lr;
        bcfg.epochs = cfg.baseline_epochs;
        bcfg.seed = bseed;
        bcfg.batch_size = cfg.fcn_batch;
        const FcnTrainResult fcn = train_fcn(data, bcfg);
        save_fcn_checkpoint(
            cfg.out_dir / "ckpt" / ("fcn_" + std::to_string(fid) + ".ckpt"),
            fcn.model,
            {{"config_hash", hash}, {"problem", cfg.problem},
             {"function_id", fid}, {"seed", bcfg.seed},
             {"step_count", cfg.baseline_epochs}});
        rows.push_back({fid, role, "fcn",
                        compute_record(fid, predict_batch(fcn.model, data.test_points),
                                       data.test_values)});

        bcfg.batch_size = cfg.cnn_batch;
        const CnnTrainResult cnn = train_cnn(data, bcfg);
        save_cnn_checkpoint(
            cfg.out_dir / "ckpt" / ("cnn_" + std::to_string(fid) + ".ckpt"),
            cnn.model,
            {{"config_hash", hash}, {"problem", cfg.problem},
             {"function_id", fid}, {"seed", bcfg.seed},
             {"step_count", cfg.baseline_epochs}});
        rows.push_back({fid, role, "cnn",
                        compute_record(fid, predict_batch(cnn.model, data.test_points),
                                       data.test_values)});
    }
    std::filesystem::create_directories(paths.report_dir);
    write_comparison_csv(paths.report_dir / "comparison.csv", rows, hash);
}

void cmd_report(const ExperimentConfig& cfg) {
    const auto paths = experiment_paths(cfg);
    const std::vector<MetricRecord> records =
        read_metrics_csv(paths.report_dir / "metrics.csv");
    const SummaryStats stats = summarize(records);
    emit_report(paths.report_dir, records, stats, {}, config_hash(cfg));
}

}  // namespace onb
