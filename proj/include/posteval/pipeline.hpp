#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "posteval/calibration.hpp"
#include "posteval/io.hpp"
#include "posteval/synthetic.hpp"
#include "posteval/types.hpp"

namespace posteval {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct EvaluationOptions {
    std::string method_name = "model";
    std::int64_t bins = 50;
    double range_lo = -5.0;
    double range_hi = 5.0;
    std::int64_t n_samples = 500;
    std::uint64_t seed = 0;
    double alpha_lo = 0.01;
    double alpha_hi = 0.99;
    double alpha_step = 0.01;
    std::int64_t n_cal = 1000;
    std::optional<std::uint64_t> split_seed;  // reshuffle before the calibration split
    std::int64_t set_grid_points = 1000;
    double conditional_alpha = 0.1;
    std::int64_t conditional_bins = 10;
    int threads = 1;

    nlohmann::ordered_json to_json() const;
};

struct MetricsBlock {
    double rmse = 0.0;
    double mae = 0.0;
    double mean_crps = 0.0;
    double chi2 = 0.0;
    std::int64_t ndf = 0;
    std::int64_t underflow = 0;
    std::int64_t overflow = 0;
    double emd = 0.0;
};

struct CalibrationBlock {
    double deviance = 0.0;
    std::vector<double> alpha_grid;
    std::vector<double> empirical;
    std::vector<double> thresholds;  // +inf where the rank exceeds n_cal
    std::int64_t n_cal = 0;
    std::int64_t n_eval = 0;
    std::vector<double> mean_set_size;  // per alpha, over the evaluation split
    double set_grid_lo = 0.0;
    double set_grid_hi = 0.0;
    std::int64_t set_grid_points = 0;
};

struct ConditionalCoverageBlock {
    double alpha = 0.1;
    double threshold = 0.0;
    std::vector<CoverageBin> bins;
};

struct MethodReport {
    std::string method_name;
    std::int64_t n_events = 0;
    std::optional<std::int64_t> crps_n_samples;  // absent for point predictions (exact CRPS)
    /// RMSE/MAE use one random draw per event (the same draw that fills the
    /// chi2 histogram); for point predictions the point itself.
    MetricsBlock metrics;
    /// The same metrics with each prediction collapsed to its ensemble mean.
    std::optional<MetricsBlock> posterior_mean;
    std::optional<CalibrationBlock> calibration;
    std::optional<ConditionalCoverageBlock> conditional_coverage;
};

struct Provenance {
    std::string tool_version = kToolVersion;
    std::uint64_t sampling_seed = 0;
    std::optional<std::uint64_t> dataset_seed;
    std::string dataset_hash;
    std::int64_t n_events = 0;
    nlohmann::ordered_json config;
};

struct EvaluationReport {
    int schema_version = kReportSchemaVersion;
    Provenance provenance;
    std::vector<MethodReport> methods;
};

struct PosteriorCurve {
    std::int64_t event_id = 0;
    double x = 0.0;
    double z_true = 0.0;
    std::vector<double> z;
    std::vector<double> density;
};

/// Tables behind the figure panels; not part of the report JSON.
struct PlotData {
    std::string method_name;
    Histogram truth_hist;
    Histogram pred_hist;
    std::optional<Histogram> posterior_mean_hist;
    std::optional<CoverageCurve> coverage;
    std::vector<double> mean_set_size;
    std::optional<ConditionalCoverageBlock> conditional_coverage;
    std::vector<PosteriorCurve> posterior_curves;
};

struct Evaluation {
    EvaluationReport report;
    PlotData plot;
};

/// Runs the three-axis protocol (CRPS, spectrum chi2/EMD, conformal
/// calibration) over aligned events and predictions. Events are processed in
/// ascending event_id order; results do not depend on options.threads.
Evaluation evaluate_dataset(std::span<const EventRecord> events, std::span<const PredictiveDistribution> dists,
                            const EvaluationOptions& options);

/// Same, with predictions keyed by event_id. Fails listing missing ids.
Evaluation evaluate_dataset(std::span<const EventRecord> events, const PredictionMap& predictions,
                            const EvaluationOptions& options);

/// Aligns a prediction map to events; throws listing the missing ids.
std::vector<PredictiveDistribution> align_predictions(std::span<const EventRecord> events,
                                                      const PredictionMap& predictions);

struct SweepRow {
    std::int64_t size = 0;
    double mean_crps = 0.0;
};

/// Mean CRPS for each ensemble size. One stream of max(sizes) draws per event;
/// the size-M ensemble is its first M draws, and the stream is the one
/// evaluate_dataset uses for the CRPS ensemble under the same seed.
std::vector<SweepRow> crps_convergence_sweep(std::span<const EventRecord> events,
                                             std::span<const PredictiveDistribution> dists,
                                             std::span<const std::int64_t> sizes, std::uint64_t seed,
                                             int threads = 1);

std::vector<SweepRow> crps_convergence_sweep(std::span<const EventRecord> events, const ReferencePredictor& predictor,
                                             std::span<const std::int64_t> sizes, std::uint64_t seed,
                                             int threads = 1);

/// Predictions of a reference predictor for every event.
std::vector<PredictiveDistribution> predict_all(const ReferencePredictor& predictor,
                                                std::span<const EventRecord> events, int threads = 1);

nlohmann::ordered_json report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const nlohmann::ordered_json& j);

/// Serialized report, two-space indented, trailing newline.
std::string report_to_string(const EvaluationReport& report);

void write_report(const EvaluationReport& report, const std::filesystem::path& path);
EvaluationReport read_report(const std::filesystem::path& path);

/// Writes the figure tables as CSV files into `dir` (created if needed):
/// marginal_histograms.csv, posterior_curves.csv and, when calibration ran,
/// coverage_curve.csv, set_sizes.csv, conditional_coverage.csv.
void write_plot_data(const PlotData& plot, const std::filesystem::path& dir);

/// One human-readable table row: method, RMSE, CRPS, chi2/ndf, deviance ("---" if absent).
std::string summary_row(const MethodReport& method);
std::string summary_header();

/// Runs fn(i) for i in [0, n) on `threads` workers; fn must only write slot i.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace posteval
