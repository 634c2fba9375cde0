#include "posteval/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "posteval/random.hpp"
#include "posteval/sampling.hpp"
#include "posteval/scoring.hpp"

namespace posteval {

using json = nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCurveTargets[] = {0.0, 1.0, 4.0, 9.0, 16.0};

struct PerEvent {
    double crps = 0.0;
    double single_draw = 0.0;
    double ensemble_mean = 0.0;
    double score = 0.0;  // NLL; only meaningful when every prediction has a density
};

std::vector<std::size_t> order_by_event_id(std::span<const EventRecord> events) {
    std::vector<std::size_t> order(events.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return events[a].event_id < events[b].event_id; });
    return order;
}

MetricsBlock point_metrics(std::span<const EventRecord> events, std::span<const double> points,
                           std::span<const double> crps_values, const Histogram& truth_hist, Histogram& pred_hist) {
    MetricsBlock m;
    m.rmse = rmse(events, points);
    m.mae = mae(events, points);
    m.mean_crps = std::accumulate(crps_values.begin(), crps_values.end(), 0.0) / static_cast<double>(crps_values.size());
    pred_hist = build_histogram(points, truth_hist.edges);
    const auto chi = spectrum_chi2(pred_hist, truth_hist);
    m.chi2 = chi.chi2;
    m.ndf = chi.ndf;
    m.underflow = pred_hist.underflow;
    m.overflow = pred_hist.overflow;
    m.emd = pred_hist.in_range() > 0 ? emd_1d(pred_hist, truth_hist) : std::numeric_limits<double>::quiet_NaN();
    return m;
}

std::vector<double> decile_edges(std::vector<double> xs, std::int64_t bins) {
    std::sort(xs.begin(), xs.end());
    std::vector<double> edges;
    const auto n = xs.size();
    for (std::int64_t k = 0; k <= bins; ++k) {
        const auto idx = std::min(n - 1, static_cast<std::size_t>(std::llround(static_cast<double>(k) *
                                                                               static_cast<double>(n - 1) /
                                                                               static_cast<double>(bins))));
        const double e = xs[idx];
        if (edges.empty() || e > edges.back()) edges.push_back(e);
    }
    if (edges.size() < 2) edges.push_back(edges.back() + 1.0);
    return edges;
}

json real_or_inf(double v) { return std::isinf(v) ? json("inf") : json(v); }

double real_from(const json& j) {
    if (j.is_string() && j.get<std::string>() == "inf") return kInf;
    return j.get<double>();
}

json metrics_to_json(const MetricsBlock& m) {
    json j;
    j["rmse"] = m.rmse;
    j["mae"] = m.mae;
    j["mean_crps"] = m.mean_crps;
    j["chi2"] = m.chi2;
    j["ndf"] = m.ndf;
    j["underflow"] = m.underflow;
    j["overflow"] = m.overflow;
    j["emd"] = std::isfinite(m.emd) ? json(m.emd) : json(nullptr);
    return j;
}

MetricsBlock metrics_from_json(const json& j) {
    MetricsBlock m;
    m.rmse = j.at("rmse").get<double>();
    m.mae = j.at("mae").get<double>();
    m.mean_crps = j.at("mean_crps").get<double>();
    m.chi2 = j.at("chi2").get<double>();
    m.ndf = j.at("ndf").get<std::int64_t>();
    m.underflow = j.at("underflow").get<std::int64_t>();
    m.overflow = j.at("overflow").get<std::int64_t>();
    m.emd = j.at("emd").is_null() ? std::numeric_limits<double>::quiet_NaN() : j.at("emd").get<double>();
    return m;
}

json coverage_bins_to_json(const std::vector<CoverageBin>& bins) {
    json arr = json::array();
    for (const auto& b : bins) {
        json jb;
        jb["x_lo"] = b.x_lo;
        jb["x_hi"] = b.x_hi;
        jb["count"] = b.count;
        jb["coverage"] = b.coverage ? json(*b.coverage) : json(nullptr);
        jb["binom_se"] = b.binom_se ? json(*b.binom_se) : json(nullptr);
        arr.push_back(std::move(jb));
    }
    return arr;
}

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
    j[key] = v ? json(*v) : json(nullptr);
}

}  // namespace

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

nlohmann::ordered_json EvaluationOptions::to_json() const {
    json j;
    j["bins"] = bins;
    j["range"] = {range_lo, range_hi};
    j["n_samples"] = n_samples;
    j["seed"] = seed;
    j["alpha_grid"] = {{"lo", alpha_lo}, {"hi", alpha_hi}, {"step", alpha_step}};
    j["n_cal"] = n_cal;
    put_optional(j, "split_seed", split_seed);
    j["set_grid_points"] = set_grid_points;
    j["conditional_alpha"] = conditional_alpha;
    j["conditional_bins"] = conditional_bins;
    return j;
}

std::vector<PredictiveDistribution> align_predictions(std::span<const EventRecord> events,
                                                      const PredictionMap& predictions) {
    std::vector<PredictiveDistribution> out;
    out.reserve(events.size());
    std::vector<std::int64_t> missing;
    for (const auto& e : events) {
        auto it = predictions.find(e.event_id);
        if (it == predictions.end()) {
            missing.push_back(e.event_id);
            continue;
        }
        out.push_back(it->second);
    }
    if (!missing.empty()) {
        std::string msg = "missing predictions for " + std::to_string(missing.size()) + " event(s): ";
        for (std::size_t k = 0; k < std::min<std::size_t>(missing.size(), 20); ++k)
            msg += (k ? "," : "") + std::to_string(missing[k]);
        if (missing.size() > 20) msg += ",...";
        throw Error(msg);
    }
    return out;
}

Evaluation evaluate_dataset(std::span<const EventRecord> events, const PredictionMap& predictions,
                            const EvaluationOptions& options) {
    const auto dists = align_predictions(events, predictions);
    return evaluate_dataset(events, dists, options);
}

Evaluation evaluate_dataset(std::span<const EventRecord> input_events, std::span<const PredictiveDistribution> input_dists,
                            const EvaluationOptions& options) {
    if (input_events.size() != input_dists.size())
        throw Error("events and predictions differ in length");
    if (input_events.empty()) throw Error("no events to evaluate");
    validate_events(input_events);
    if (options.n_samples < 1) throw Error("n_samples must be at least 1");
    if (options.bins < 1 || !(options.range_lo < options.range_hi)) throw Error("invalid histogram binning");

    // work in ascending event_id order throughout
    const auto order = order_by_event_id(input_events);
    std::vector<EventRecord> events;
    std::vector<const PredictiveDistribution*> dists;
    events.reserve(order.size());
    for (auto i : order) {
        events.push_back(input_events[i]);
        dists.push_back(&input_dists[i]);
    }
    const std::size_t n = events.size();

    const bool all_points = std::all_of(dists.begin(), dists.end(),
                                        [](const auto* d) { return std::holds_alternative<Point>(*d); });
    const bool all_density = std::all_of(dists.begin(), dists.end(), [](const auto* d) { return has_density(*d); });

    if (all_density && options.n_cal >= static_cast<std::int64_t>(n))
        throw Error("n_cal (" + std::to_string(options.n_cal) + ") must be smaller than the number of events (" +
                    std::to_string(n) + ")");
    if (all_density && options.n_cal < 1) throw Error("n_cal must be at least 1");

    const auto n_samples = static_cast<std::size_t>(options.n_samples);
    std::vector<PerEvent> per(n);
    parallel_for(n, options.threads, [&](std::size_t i) {
        const auto& dist = *dists[i];
        const auto id = static_cast<std::uint64_t>(events[i].event_id);
        const double z = events[i].z_true;
        PerEvent& p = per[i];
        if (const auto* pt = std::get_if<Point>(&dist)) {
            p.crps = crps_point(pt->value, z);
            p.single_draw = pt->value;
            p.ensemble_mean = pt->value;
        } else {
            RandomStream ens_rng(options.seed, stream_id(StreamTag::CrpsEnsemble, id));
            if (const auto* e = std::get_if<SampleEnsemble>(&dist)) {
                p.crps = crps_empirical(*e, z);
                p.ensemble_mean = e->mean();
            } else {
                const SampleEnsemble ens(draw_samples(dist, n_samples, ens_rng));
                p.crps = crps_empirical(ens, z);
                p.ensemble_mean = ens.mean();
            }
            RandomStream draw_rng(options.seed, stream_id(StreamTag::SingleDraw, id));
            p.single_draw = draw_samples(dist, 1, draw_rng).front();
        }
        if (all_density) p.score = nll_score(dist, z);
    });

    const auto edges = uniform_edges(options.range_lo, options.range_hi, static_cast<std::size_t>(options.bins));
    std::vector<double> truths(n), draws(n), means(n), crps_values(n), mean_crps_values(n);
    for (std::size_t i = 0; i < n; ++i) {
        truths[i] = events[i].z_true;
        draws[i] = per[i].single_draw;
        means[i] = per[i].ensemble_mean;
        crps_values[i] = per[i].crps;
        mean_crps_values[i] = std::abs(per[i].ensemble_mean - events[i].z_true);
    }

    Evaluation out;
    PlotData& plot = out.plot;
    plot.method_name = options.method_name;
    plot.truth_hist = build_histogram(truths, edges);

    MethodReport method;
    method.method_name = options.method_name;
    method.n_events = static_cast<std::int64_t>(n);
    method.metrics = point_metrics(events, draws, crps_values, plot.truth_hist, plot.pred_hist);
    if (!all_points) {
        method.crps_n_samples = options.n_samples;
        Histogram mean_hist;
        method.posterior_mean = point_metrics(events, means, mean_crps_values, plot.truth_hist, mean_hist);
        plot.posterior_mean_hist = std::move(mean_hist);
    }

    if (all_density) {
        // calibration split: first n_cal events by id, optionally after a seeded shuffle
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        if (options.split_seed) {
            RandomStream rng(*options.split_seed, stream_id(StreamTag::Shuffle, 0));
            for (std::size_t i = n - 1; i > 0; --i) {
                const auto j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
                std::swap(perm[i], perm[j]);
            }
        }
        const auto n_cal = static_cast<std::size_t>(options.n_cal);
        std::vector<double> cal_scores, eval_scores;
        std::vector<EventRecord> eval_events;
        std::vector<std::size_t> eval_index;
        for (std::size_t k = 0; k < n; ++k) {
            const auto i = perm[k];
            if (k < n_cal) {
                cal_scores.push_back(per[i].score);
            } else {
                eval_scores.push_back(per[i].score);
                eval_events.push_back(events[i]);
                eval_index.push_back(i);
            }
        }

        CalibrationBlock cal;
        cal.alpha_grid = alpha_grid(options.alpha_lo, options.alpha_hi, options.alpha_step);
        const ConformalCalibrator calibrator(cal_scores, cal.alpha_grid);
        const auto curve = coverage_curve(cal_scores, eval_scores, cal.alpha_grid);
        cal.deviance = calibration_deviance(curve).value;
        cal.empirical = curve.empirical;
        cal.thresholds = calibrator.thresholds;
        cal.n_cal = static_cast<std::int64_t>(n_cal);
        cal.n_eval = static_cast<std::int64_t>(eval_scores.size());
        cal.set_grid_lo = options.range_lo;
        cal.set_grid_hi = options.range_hi;
        cal.set_grid_points = options.set_grid_points;

        // per-event sorted grid scores give the set size at every alpha by bisection
        const double spacing = (options.range_hi - options.range_lo) /
                               static_cast<double>(options.set_grid_points - 1);
        const std::size_t m = cal.alpha_grid.size();
        std::vector<std::vector<double>> sizes(eval_index.size(), std::vector<double>(m));
        parallel_for(eval_index.size(), options.threads, [&](std::size_t k) {
            auto scores = nll_on_grid(*dists[eval_index[k]], options.range_lo, options.range_hi,
                                      options.set_grid_points);
            std::sort(scores.begin(), scores.end());
            for (std::size_t a = 0; a < m; ++a) {
                const double q = cal.thresholds[a];
                if (std::isinf(q)) {
                    sizes[k][a] = options.range_hi - options.range_lo;
                    continue;
                }
                const auto inside = std::upper_bound(scores.begin(), scores.end(), q) - scores.begin();
                sizes[k][a] = static_cast<double>(inside) * spacing;
            }
        });
        cal.mean_set_size.assign(m, 0.0);
        for (const auto& row : sizes)
            for (std::size_t a = 0; a < m; ++a) cal.mean_set_size[a] += row[a];
        for (auto& s : cal.mean_set_size) s /= static_cast<double>(sizes.size());

        ConditionalCoverageBlock cond;
        cond.alpha = options.conditional_alpha;
        cond.threshold = conformal_threshold(cal_scores, options.conditional_alpha);
        std::vector<double> xs;
        xs.reserve(eval_events.size());
        for (const auto& e : eval_events) xs.push_back(e.x);
        const auto x_edges = decile_edges(xs, options.conditional_bins);
        cond.bins = conditional_coverage(eval_events, eval_scores, cond.threshold, x_edges);

        plot.coverage = curve;
        plot.mean_set_size = cal.mean_set_size;
        plot.conditional_coverage = cond;
        method.calibration = std::move(cal);
        method.conditional_coverage = std::move(cond);
    }

    // posterior curves at events nearest a few reference observations
    std::vector<std::size_t> picked;
    for (double target : kCurveTargets) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(events[i].x - target) < std::abs(events[best].x - target)) best = i;
        if (std::find(picked.begin(), picked.end(), best) != picked.end() || !has_density(*dists[best])) continue;
        picked.push_back(best);
        PosteriorCurve c;
        c.event_id = events[best].event_id;
        c.x = events[best].x;
        c.z_true = events[best].z_true;
        const auto scores = nll_on_grid(*dists[best], options.range_lo, options.range_hi, options.set_grid_points);
        for (std::int64_t g = 0; g < options.set_grid_points; ++g) {
            const double zg = options.range_lo + (options.range_hi - options.range_lo) * static_cast<double>(g) /
                                                     static_cast<double>(options.set_grid_points - 1);
            c.z.push_back(zg);
            c.density.push_back(std::exp(-scores[static_cast<std::size_t>(g)]));
        }
        plot.posterior_curves.push_back(std::move(c));
    }

    auto& prov = out.report.provenance;
    prov.sampling_seed = options.seed;
    prov.dataset_hash = dataset_hash(events);
    prov.n_events = static_cast<std::int64_t>(n);
    prov.config = options.to_json();
    out.report.methods.push_back(std::move(method));
    return out;
}

std::vector<SweepRow> crps_convergence_sweep(std::span<const EventRecord> events,
                                             std::span<const PredictiveDistribution> dists,
                                             std::span<const std::int64_t> sizes, std::uint64_t seed, int threads) {
    if (events.size() != dists.size()) throw Error("events and predictions differ in length");
    if (events.empty()) throw Error("no events");
    if (sizes.empty()) throw Error("no ensemble sizes given");
    for (auto s : sizes)
        if (s < 1) throw Error("ensemble sizes must be at least 1");
    for (const auto& d : dists)
        if (std::holds_alternative<Point>(d)) throw Error("CRPS sweep needs a distributional predictor, got point");
    const auto max_size = static_cast<std::size_t>(*std::max_element(sizes.begin(), sizes.end()));

    const auto order = order_by_event_id(events);
    std::vector<std::vector<double>> per(order.size(), std::vector<double>(sizes.size()));
    parallel_for(order.size(), threads, [&](std::size_t k) {
        const auto i = order[k];
        RandomStream rng(seed, stream_id(StreamTag::CrpsEnsemble, static_cast<std::uint64_t>(events[i].event_id)));
        const auto draws = draw_samples(dists[i], max_size, rng);
        for (std::size_t s = 0; s < sizes.size(); ++s) {
            const SampleEnsemble ens(
                std::vector<double>(draws.begin(), draws.begin() + static_cast<std::ptrdiff_t>(sizes[s])));
            per[k][s] = crps_empirical(ens, events[i].z_true);
        }
    });
    std::vector<SweepRow> rows(sizes.size());
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        rows[s].size = sizes[s];
        double sum = 0.0;
        for (const auto& row : per) sum += row[s];
        rows[s].mean_crps = sum / static_cast<double>(per.size());
    }
    return rows;
}

std::vector<PredictiveDistribution> predict_all(const ReferencePredictor& predictor,
                                                std::span<const EventRecord> events, int threads) {
    std::vector<std::optional<PredictiveDistribution>> slots(events.size());
    parallel_for(events.size(), threads, [&](std::size_t i) { slots[i] = predictor.predict(events[i].x); });
    std::vector<PredictiveDistribution> out;
    out.reserve(events.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

std::vector<SweepRow> crps_convergence_sweep(std::span<const EventRecord> events, const ReferencePredictor& predictor,
                                             std::span<const std::int64_t> sizes, std::uint64_t seed, int threads) {
    if (predictor.kind() == PredictorKind::ConditionalMean)
        throw Error("CRPS sweep needs a distributional predictor, got point-mean");
    return crps_convergence_sweep(events, predict_all(predictor, events, threads), sizes, seed, threads);
}

// --------------------------------------------------------------------------
// report JSON

nlohmann::ordered_json report_to_json(const EvaluationReport& report) {
    json j;
    j["schema_version"] = report.schema_version;
    const auto& p = report.provenance;
    json prov;
    prov["tool_version"] = p.tool_version;
    prov["seeds"] = {{"sampling", p.sampling_seed}};
    put_optional(prov["seeds"], "dataset", p.dataset_seed);
    prov["dataset_hash"] = p.dataset_hash;
    prov["n_events"] = p.n_events;
    prov["config"] = p.config;
    j["provenance"] = std::move(prov);

    json methods = json::array();
    for (const auto& m : report.methods) {
        json jm;
        jm["method_name"] = m.method_name;
        jm["n_events"] = m.n_events;
        const auto metrics = metrics_to_json(m.metrics);
        for (const auto& [k, v] : metrics.items()) {
            jm[k] = v;
            if (k == "mean_crps") put_optional(jm, "crps_n_samples", m.crps_n_samples);
        }
        jm["posterior_mean"] = m.posterior_mean ? metrics_to_json(*m.posterior_mean) : json(nullptr);
        if (m.calibration) {
            const auto& c = *m.calibration;
            json jc;
            jc["deviance"] = c.deviance;
            jc["alpha_grid"] = c.alpha_grid;
            jc["n_cal"] = c.n_cal;
            jc["n_eval"] = c.n_eval;
            jc["empirical_coverage"] = c.empirical;
            json th = json::array();
            for (double t : c.thresholds) th.push_back(real_or_inf(t));
            jc["thresholds"] = std::move(th);
            json sizes;
            for (std::size_t a = 0; a < c.alpha_grid.size(); ++a) sizes[format_real(c.alpha_grid[a])] = c.mean_set_size[a];
            jc["mean_set_size_at"] = std::move(sizes);
            jc["set_grid"] = {{"lo", c.set_grid_lo}, {"hi", c.set_grid_hi}, {"points", c.set_grid_points}};
            jm["calibration"] = std::move(jc);
        } else {
            jm["calibration"] = nullptr;
        }
        if (m.conditional_coverage) {
            json jc;
            jc["alpha"] = m.conditional_coverage->alpha;
            jc["threshold"] = real_or_inf(m.conditional_coverage->threshold);
            jc["bins"] = coverage_bins_to_json(m.conditional_coverage->bins);
            jm["conditional_coverage"] = std::move(jc);
        } else {
            jm["conditional_coverage"] = nullptr;
        }
        methods.push_back(std::move(jm));
    }
    j["methods"] = std::move(methods);
    return j;
}

EvaluationReport report_from_json(const json& j) {
    try {
        EvaluationReport r;
        r.schema_version = j.at("schema_version").get<int>();
        if (r.schema_version != kReportSchemaVersion)
            throw Error("unsupported report schema_version " + std::to_string(r.schema_version));
        const auto& prov = j.at("provenance");
        r.provenance.tool_version = prov.at("tool_version").get<std::string>();
        r.provenance.sampling_seed = prov.at("seeds").at("sampling").get<std::uint64_t>();
        if (!prov.at("seeds").at("dataset").is_null())
            r.provenance.dataset_seed = prov.at("seeds").at("dataset").get<std::uint64_t>();
        r.provenance.dataset_hash = prov.at("dataset_hash").get<std::string>();
        r.provenance.n_events = prov.at("n_events").get<std::int64_t>();
        r.provenance.config = prov.at("config");

        for (const auto& jm : j.at("methods")) {
            MethodReport m;
            m.method_name = jm.at("method_name").get<std::string>();
            m.n_events = jm.at("n_events").get<std::int64_t>();
            m.metrics = metrics_from_json(jm);
            if (!jm.at("crps_n_samples").is_null()) m.crps_n_samples = jm.at("crps_n_samples").get<std::int64_t>();
            if (!jm.at("posterior_mean").is_null()) m.posterior_mean = metrics_from_json(jm.at("posterior_mean"));
            if (const auto& jc = jm.at("calibration"); !jc.is_null()) {
                CalibrationBlock c;
                c.deviance = jc.at("deviance").get<double>();
                c.alpha_grid = jc.at("alpha_grid").get<std::vector<double>>();
                c.n_cal = jc.at("n_cal").get<std::int64_t>();
                c.n_eval = jc.at("n_eval").get<std::int64_t>();
                c.empirical = jc.at("empirical_coverage").get<std::vector<double>>();
                for (const auto& t : jc.at("thresholds")) c.thresholds.push_back(real_from(t));
                for (double a : c.alpha_grid) c.mean_set_size.push_back(jc.at("mean_set_size_at").at(format_real(a)).get<double>());
                c.set_grid_lo = jc.at("set_grid").at("lo").get<double>();
                c.set_grid_hi = jc.at("set_grid").at("hi").get<double>();
                c.set_grid_points = jc.at("set_grid").at("points").get<std::int64_t>();
                m.calibration = std::move(c);
            }
            if (const auto& jc = jm.at("conditional_coverage"); !jc.is_null()) {
                ConditionalCoverageBlock c;
                c.alpha = jc.at("alpha").get<double>();
                c.threshold = real_from(jc.at("threshold"));
                for (const auto& jb : jc.at("bins")) {
                    CoverageBin b;
                    b.x_lo = jb.at("x_lo").get<double>();
                    b.x_hi = jb.at("x_hi").get<double>();
                    b.count = jb.at("count").get<std::int64_t>();
                    if (!jb.at("coverage").is_null()) b.coverage = jb.at("coverage").get<double>();
                    if (!jb.at("binom_se").is_null()) b.binom_se = jb.at("binom_se").get<double>();
                    c.bins.push_back(b);
                }
                m.conditional_coverage = std::move(c);
            }
            r.methods.push_back(std::move(m));
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed report: ") + e.what());
    }
}

std::string report_to_string(const EvaluationReport& report) { return report_to_json(report).dump(2) + "\n"; }

void write_report(const EvaluationReport& report, const std::filesystem::path& path) {
    write_file_atomic(path, report_to_string(report));
}

EvaluationReport read_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    try {
        return report_from_json(json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw Error(path.string() + ": invalid JSON: " + e.what());
    }
}

// --------------------------------------------------------------------------
// plot data

namespace {

std::string opt_real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

}  // namespace

void write_plot_data(const PlotData& plot, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create " + dir.string());

    {
        std::string s = "bin_lo,bin_hi,truth,pred,pred_posterior_mean\n";
        for (std::size_t b = 0; b < plot.truth_hist.bins(); ++b) {
            s += format_real(plot.truth_hist.edges[b]) + "," + format_real(plot.truth_hist.edges[b + 1]) + "," +
                 std::to_string(plot.truth_hist.counts[b]) + "," + std::to_string(plot.pred_hist.counts[b]) + "," +
                 (plot.posterior_mean_hist ? std::to_string(plot.posterior_mean_hist->counts[b]) : std::string()) +
                 "\n";
        }
        write_file_atomic(dir / "marginal_histograms.csv", s);
    }
    {
        std::string s = "event_id,x,z_true,z,density\n";
        for (const auto& c : plot.posterior_curves)
            for (std::size_t g = 0; g < c.z.size(); ++g)
                s += std::to_string(c.event_id) + "," + format_real(c.x) + "," + format_real(c.z_true) + "," +
                     format_real(c.z[g]) + "," + format_real(c.density[g]) + "\n";
        write_file_atomic(dir / "posterior_curves.csv", s);
    }
    if (plot.coverage) {
        std::string cov = "alpha,nominal,empirical\n";
        std::string sizes = "alpha,nominal,mean_size\n";
        for (std::size_t m = 0; m < plot.coverage->alphas.size(); ++m) {
            const double a = plot.coverage->alphas[m];
            cov += format_real(a) + "," + format_real(1.0 - a) + "," + format_real(plot.coverage->empirical[m]) + "\n";
            sizes += format_real(a) + "," + format_real(1.0 - a) + "," + format_real(plot.mean_set_size[m]) + "\n";
        }
        write_file_atomic(dir / "coverage_curve.csv", cov);
        write_file_atomic(dir / "set_sizes.csv", sizes);
    }
    if (plot.conditional_coverage) {
        std::string s = "x_lo,x_hi,count,coverage,binom_se\n";
        for (const auto& b : plot.conditional_coverage->bins)
            s += format_real(b.x_lo) + "," + format_real(b.x_hi) + "," + std::to_string(b.count) + "," +
                 opt_real(b.coverage) + "," + opt_real(b.binom_se) + "\n";
        write_file_atomic(dir / "conditional_coverage.csv", s);
    }
}

std::string summary_header() {
    std::ostringstream os;
    os << std::left << std::setw(16) << "method" << std::right << std::setw(10) << "RMSE" << std::setw(10) << "CRPS"
       << std::setw(22) << "chi2_spec/ndf" << std::setw(12) << "deviance";
    return os.str();
}

std::string summary_row(const MethodReport& m) {
    std::ostringstream os;
    os << std::left << std::setw(16) << m.method_name << std::right << std::fixed << std::setprecision(3)
       << std::setw(10) << m.metrics.rmse << std::setw(10) << m.metrics.mean_crps;
    std::ostringstream chi;
    chi << std::setprecision(4) << std::defaultfloat << m.metrics.chi2 << "/" << m.metrics.ndf;
    os << std::setw(22) << chi.str();
    if (m.calibration)
        os << std::setw(12) << std::setprecision(4) << m.calibration->deviance;
    else
        os << std::setw(12) << "---";
    return os.str();
}

}  // namespace posteval
