// posteval: generate synthetic events, emit reference predictions, and score
// predictions with the CRPS / spectrum chi2 / conformal calibration protocol.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "posteval/io.hpp"
#include "posteval/pipeline.hpp"
#include "posteval/synthetic.hpp"

namespace {

using namespace posteval;

struct AlphaGridArg {
    double lo = 0.01, hi = 0.99, step = 0.01;
};

AlphaGridArg parse_alpha_grid(const std::string& text) {
    AlphaGridArg grid;
    const auto a = text.find(':');
    const auto b = text.find(':', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos)
        throw CLI::ValidationError("--alpha-grid", "expected lo:hi:step");
    try {
        grid.lo = std::stod(text.substr(0, a));
        grid.hi = std::stod(text.substr(a + 1, b - a - 1));
        grid.step = std::stod(text.substr(b + 1));
    } catch (const std::exception&) {
        throw CLI::ValidationError("--alpha-grid", "expected lo:hi:step");
    }
    return grid;
}

SyntheticConfig synthetic_config(double a, double sigma_eps, std::int64_t grid_points, std::uint64_t seed) {
    SyntheticConfig c;
    c.a = a;
    c.sigma_eps = sigma_eps;
    c.grid_points = grid_points;
    c.seed = seed;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributional evaluation of inverse-problem predictors"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    // generate
    auto* gen = app.add_subcommand("generate", "Sample synthetic events x = z^2 + eps, z ~ U(-a, a)");
    std::int64_t gen_n = 10000;
    double gen_a = 5.0, gen_sigma = 0.5;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    gen->add_option("--n", gen_n, "Number of events")->required()->check(CLI::PositiveNumber);
    gen->add_option("--a", gen_a, "Prior half-width")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--sigma-eps", gen_sigma, "Noise standard deviation")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
    gen->add_option("--out", gen_out, "Output events CSV")->required();

    // predict
    auto* pred = app.add_subcommand("predict", "Write reference predictions for every event");
    std::string pred_method, pred_events, pred_out;
    std::uint64_t pred_seed = 0;
    double pred_a = 5.0, pred_sigma = 0.5;
    std::int64_t pred_grid = 2001;
    int pred_threads = 1;
    pred->add_option("--method", pred_method, "point-mean | gaussian | mixture2 | exact")
        ->required()
        ->check(CLI::IsMember({"point-mean", "gaussian", "mixture2", "exact"}));
    pred->add_option("--events", pred_events, "Events CSV")->required()->check(CLI::ExistingFile);
    pred->add_option("--out", pred_out, "Output predictions JSONL")->required();
    pred->add_option("--seed", pred_seed, "Accepted for interface symmetry; reference predictions are analytic")
        ->capture_default_str();
    pred->add_option("--a", pred_a, "Prior half-width")->capture_default_str()->check(CLI::PositiveNumber);
    pred->add_option("--sigma-eps", pred_sigma, "Noise standard deviation")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    pred->add_option("--grid-points", pred_grid, "Posterior grid resolution (odd)")->capture_default_str();
    pred->add_option("--threads", pred_threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Score predictions: RMSE, CRPS, spectrum chi2, EMD, calibration");
    EvaluationOptions opts;
    std::string eval_events, eval_preds, eval_out, eval_plot, alpha_text = "0.01:0.99:0.01";
    std::vector<double> range{-5.0, 5.0};
    std::uint64_t split_seed = 0;
    eval->add_option("--events", eval_events, "Events CSV")->required()->check(CLI::ExistingFile);
    eval->add_option("--preds", eval_preds, "Predictions JSONL")->required()->check(CLI::ExistingFile);
    eval->add_option("--bins", opts.bins, "Histogram bins")->capture_default_str()->check(CLI::PositiveNumber);
    eval->add_option("--range", range, "Histogram and prediction-set range (lo hi)")
        ->expected(2)
        ->capture_default_str()
        ->allow_extra_args(false);
    eval->add_option("--n-samples", opts.n_samples, "Samples per event for CRPS")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    eval->add_option("--n-cal", opts.n_cal, "Calibration split size")->capture_default_str()->check(CLI::PositiveNumber);
    eval->add_option("--alpha-grid", alpha_text, "Miscoverage grid lo:hi:step")->capture_default_str();
    eval->add_option("--set-grid-points", opts.set_grid_points, "Prediction-set grid points")->capture_default_str();
    eval->add_option("--seed", opts.seed, "Sampling seed")->capture_default_str();
    auto* split_opt = eval->add_option("--split-seed", split_seed, "Shuffle events before the calibration split");
    eval->add_option("--method-name", opts.method_name, "Name recorded in the report")->capture_default_str();
    eval->add_option("--out", eval_out, "Output report JSON")->required();
    eval->add_option("--plot-data", eval_plot, "Directory for plot-data CSVs");
    eval->add_option("--threads", opts.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    // sweep-crps
    auto* sweep = app.add_subcommand("sweep-crps", "Mean CRPS as a function of ensemble size");
    std::vector<std::int64_t> sweep_sizes{10, 50, 100, 500};
    std::string sweep_events, sweep_method, sweep_out;
    std::uint64_t sweep_seed = 0;
    double sweep_a = 5.0, sweep_sigma = 0.5;
    std::int64_t sweep_grid = 2001;
    int sweep_threads = 1;
    sweep->add_option("--sizes", sweep_sizes, "Ensemble sizes")
        ->delimiter(',')
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sweep->add_option("--events", sweep_events, "Events CSV")->required()->check(CLI::ExistingFile);
    sweep->add_option("--method", sweep_method, "gaussian | mixture2 | exact")
        ->required()
        ->check(CLI::IsMember({"gaussian", "mixture2", "exact"}));
    sweep->add_option("--seed", sweep_seed, "Sampling seed")->capture_default_str();
    sweep->add_option("--out", sweep_out, "Output CSV")->required();
    sweep->add_option("--a", sweep_a, "Prior half-width")->capture_default_str()->check(CLI::PositiveNumber);
    sweep->add_option("--sigma-eps", sweep_sigma, "Noise standard deviation")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sweep->add_option("--grid-points", sweep_grid, "Posterior grid resolution (odd)")->capture_default_str();
    sweep->add_option("--threads", sweep_threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            auto config = synthetic_config(gen_a, gen_sigma, 2001, gen_seed);
            const auto events = generate_events(config, gen_n);
            write_events(gen_out, events,
                         {{"a", format_real(gen_a)},
                          {"generator", std::string("posteval ") + kToolVersion},
                          {"n", std::to_string(gen_n)},
                          {"seed", std::to_string(gen_seed)},
                          {"sigma_eps", format_real(gen_sigma)}});
            std::cout << "generated n=" << gen_n << " a=" << gen_a << " sigma_eps=" << gen_sigma
                      << " seed=" << gen_seed << " -> " << gen_out << "\n";
        } else if (*pred) {
            const auto events = read_events(pred_events);
            const ReferencePredictor predictor(parse_predictor_kind(pred_method),
                                               synthetic_config(pred_a, pred_sigma, pred_grid, pred_seed));
            const auto dists = predict_all(predictor, events, pred_threads);
            write_predictions(pred_out, events, dists);
            std::cout << "predicted " << events.size() << " events with method " << pred_method << " -> "
                      << pred_out << "\n";
        } else if (*eval) {
            opts.range_lo = range.at(0);
            opts.range_hi = range.at(1);
            const auto grid = parse_alpha_grid(alpha_text);
            opts.alpha_lo = grid.lo;
            opts.alpha_hi = grid.hi;
            opts.alpha_step = grid.step;
            if (split_opt->count() > 0) opts.split_seed = split_seed;
            if (opts.method_name == "model") opts.method_name = std::filesystem::path(eval_preds).stem().string();

            const auto file = read_events_file(eval_events);
            const auto predictions = read_predictions(eval_preds);
            auto result = evaluate_dataset(file.events, predictions, opts);
            if (auto it = file.metadata.find("seed"); it != file.metadata.end())
                result.report.provenance.dataset_seed = std::stoull(it->second);

            write_report(result.report, eval_out);
            if (!eval_plot.empty()) write_plot_data(result.plot, eval_plot);

            const auto& m = result.report.methods.front();
            std::cout << summary_header() << "\n" << summary_row(m) << "\n";
            if (m.metrics.underflow + m.metrics.overflow > 0)
                std::cout << "note: " << m.metrics.underflow << " underflow / " << m.metrics.overflow
                          << " overflow predicted values outside the histogram range\n";
        } else if (*sweep) {
            const auto events = read_events(sweep_events);
            const ReferencePredictor predictor(parse_predictor_kind(sweep_method),
                                               synthetic_config(sweep_a, sweep_sigma, sweep_grid, 0));
            const auto rows = crps_convergence_sweep(events, predictor, sweep_sizes, sweep_seed, sweep_threads);
            std::string csv = "size,mean_crps\n";
            for (const auto& r : rows) {
                csv += std::to_string(r.size) + "," + format_real(r.mean_crps) + "\n";
                std::cout << "M=" << r.size << " mean_crps=" << r.mean_crps << "\n";
            }
            write_file_atomic(sweep_out, csv);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
