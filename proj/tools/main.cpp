// Command-line front end: generate / train / evaluate / sweep / compare /
// report, driven by a config file with flag overrides.
//
// Exit codes: 0 success, 1 usage error, 2 numeric or divergence error,
// 3 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "onb/experiment.hpp"

namespace {

struct CliOptions {
    onb::ExperimentConfig cfg;
    std::string model = "deeponet";
    long long function_id = -1;
    std::string out_dir;
    std::vector<long long> branch, trunk, widths, sweep_iters;
};

void add_common_options(CLI::App* sub, CliOptions& o) {
    sub->set_config("--config", "", "Config file (INI sections)");
    sub->add_option("--problem", o.cfg.problem, "ode | diffusion | burgers");
    sub->add_option("--seed", o.cfg.seed, "Master seed");
    sub->add_option("--threads", o.cfg.threads, "Worker thread cap (0 = auto)");
    sub->add_option("--out", o.out_dir, "Output directory");
    sub->add_flag("--full", o.cfg.full_scale,
                  "Diffusion: use the full-scale training set");
    sub->add_option("--dataset.n_train", o.cfg.n_train);
    sub->add_option("--dataset.n_test", o.cfg.n_test);
    sub->add_option("--dataset.n_queries", o.cfg.n_queries);
    sub->add_option("--dataset.n_sensors", o.cfg.n_sensors);
    sub->add_option("--dataset.full_n_train", o.cfg.full_n_train);
    sub->add_option("--grf.length_scale", o.cfg.grf_length_scale);
    sub->add_option("--grf.kernel", o.cfg.grf_kernel);
    sub->add_option("--grf.jitter", o.cfg.grf_jitter);
    sub->add_option("--solver.ode_steps", o.cfg.ode_steps);
    sub->add_option("--solver.diffusion_d", o.cfg.diffusion_d);
    sub->add_option("--solver.diffusion_k", o.cfg.diffusion_k);
    sub->add_option("--solver.burgers_nu", o.cfg.burgers_nu);
    sub->add_option("--solver.burgers_internal_n", o.cfg.burgers_internal_n);
    sub->add_option("--solver.out_nx", o.cfg.out_nx);
    sub->add_option("--solver.out_nt", o.cfg.out_nt);
    sub->add_option("--model.branch", o.branch, "Branch layer sizes");
    sub->add_option("--model.trunk", o.trunk, "Trunk layer sizes");
    sub->add_flag("--model.stacked", o.cfg.stacked);
    sub->add_flag("--model.output_bias", o.cfg.output_bias);
    sub->add_option("--train.loss", o.cfg.loss, "mse | l2rel");
    sub->add_option("--train.metric", o.cfg.metric, "mse | l2rel");
    sub->add_option("--iterations,--train.iterations", o.cfg.iterations);
    sub->add_option("--train.lr", o.cfg.lr);
    sub->add_option("--train.log_every", o.cfg.log_every);
    sub->add_option("--baselines.points", o.cfg.baseline_points);
    sub->add_option("--baselines.epochs", o.cfg.baseline_epochs);
    sub->add_option("--baselines.fcn_batch", o.cfg.fcn_batch);
    sub->add_option("--baselines.cnn_batch", o.cfg.cnn_batch);
    sub->add_option("--sweep.widths", o.widths);
    sub->add_option("--sweep.iterations", o.sweep_iters);
}

onb::ExperimentConfig finalize(CliOptions& o) {
    if (!o.out_dir.empty()) o.cfg.out_dir = o.out_dir;
    if (!o.branch.empty())
        o.cfg.branch_sizes.assign(o.branch.begin(), o.branch.end());
    if (!o.trunk.empty())
        o.cfg.trunk_sizes.assign(o.trunk.begin(), o.trunk.end());
    if (!o.widths.empty())
        o.cfg.sweep_widths.assign(o.widths.begin(), o.widths.end());
    if (!o.sweep_iters.empty()) o.cfg.sweep_iterations = o.sweep_iters;
    return onb::resolve_defaults(o.cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Operator-network workbench: data generation, training, "
                 "evaluation, sweeps, and baseline comparisons"};
    app.require_subcommand(1);

    CliOptions o;
    auto* gen = app.add_subcommand("generate", "Build and save datasets");
    auto* train = app.add_subcommand("train", "Train a model");
    auto* eval = app.add_subcommand("evaluate", "Evaluate the trained model");
    auto* sweep = app.add_subcommand("sweep", "Trunk-width or iteration sweep");
    auto* compare =
        app.add_subcommand("compare", "Best/worst-case baseline comparison");
    auto* report = app.add_subcommand("report", "Re-derive report files");
    for (auto* sub : {gen, train, eval, sweep, compare, report})
        add_common_options(sub, o);
    train->add_option("--model", o.model, "deeponet | fcn | cnn");
    train->add_option("--function-id", o.function_id,
                      "Test function for baseline training");

    try {
        app.parse(argc, argv);
        const onb::ExperimentConfig cfg = finalize(o);
        if (gen->parsed()) onb::cmd_generate(cfg);
        if (train->parsed())
            onb::cmd_train(cfg, o.model, static_cast<onb::Index>(o.function_id));
        if (eval->parsed()) {
            const onb::SummaryStats stats = onb::cmd_evaluate(cfg);
            std::printf("evaluated %lld functions: mean r2 %.6g, mean mse %.6g\n",
                        static_cast<long long>(stats.n_records), stats.r2.mean,
                        stats.mse.mean);
        }
        if (sweep->parsed()) onb::cmd_sweep(cfg);
        if (compare->parsed()) onb::cmd_compare(cfg);
        if (report->parsed()) onb::cmd_report(cfg);
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const onb::DivergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const onb::NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const onb::DegenerateError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const onb::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
