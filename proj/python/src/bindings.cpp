#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "posteval/calibration.hpp"
#include "posteval/io.hpp"
#include "posteval/pipeline.hpp"
#include "posteval/scoring.hpp"
#include "posteval/synthetic.hpp"

namespace py = pybind11;
using namespace posteval;

namespace {

// Opaque handle so Python code never sees the variant directly.
struct Distribution {
    PredictiveDistribution value;
};

SyntheticConfig make_config(double a, double sigma_eps, std::int64_t grid_points, std::uint64_t seed) {
    SyntheticConfig c;
    c.a = a;
    c.sigma_eps = sigma_eps;
    c.grid_points = grid_points;
    c.seed = seed;
    c.validate();
    return c;
}

std::vector<PredictiveDistribution> unwrap(const std::vector<Distribution>& dists) {
    std::vector<PredictiveDistribution> out;
    out.reserve(dists.size());
    for (const auto& d : dists) out.push_back(d.value);
    return out;
}

EvaluationOptions options_from(const py::dict& kw) {
    EvaluationOptions o;
    for (const auto& [k, v] : kw) {
        const auto key = py::cast<std::string>(k);
        if (key == "method_name") o.method_name = py::cast<std::string>(v);
        else if (key == "bins") o.bins = py::cast<std::int64_t>(v);
        else if (key == "range") std::tie(o.range_lo, o.range_hi) = py::cast<std::pair<double, double>>(v);
        else if (key == "n_samples") o.n_samples = py::cast<std::int64_t>(v);
        else if (key == "seed") o.seed = py::cast<std::uint64_t>(v);
        else if (key == "alpha_grid") std::tie(o.alpha_lo, o.alpha_hi, o.alpha_step) = py::cast<std::tuple<double, double, double>>(v);
        else if (key == "n_cal") o.n_cal = py::cast<std::int64_t>(v);
        else if (key == "split_seed") o.split_seed = py::cast<std::optional<std::uint64_t>>(v);
        else if (key == "set_grid_points") o.set_grid_points = py::cast<std::int64_t>(v);
        else if (key == "threads") o.threads = py::cast<int>(v);
        else throw py::key_error("unknown evaluation option '" + key + "'");
    }
    return o;
}

py::object to_python(const nlohmann::ordered_json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Distributional evaluation of posterior predictions";
    py::register_exception<Error>(m, "PostevalError", PyExc_ValueError);

    py::class_<Distribution>(m, "Distribution")
        .def_property_readonly("family", [](const Distribution& d) { return family_name(d.value); })
        .def("to_json", [](const Distribution& d) { return distribution_to_json(d.value).dump(); })
        .def_static("from_json", [](const std::string& s) { return Distribution{distribution_from_json(nlohmann::json::parse(s))}; })
        .def("__eq__", [](const Distribution& a, const Distribution& b) { return a.value == b.value; })
        .def("__repr__", [](const Distribution& d) { return "Distribution(" + distribution_to_json(d.value).dump() + ")"; });

    m.def("point", [](double v) { return Distribution{make_point(v)}; }, py::arg("value"));
    m.def("gaussian", [](double mu, double sigma) { return Distribution{make_gaussian(mu, sigma)}; }, py::arg("mu"), py::arg("sigma"));
    m.def("mixture", [](std::vector<double> w, std::vector<double> mu, std::vector<double> s) {
        return Distribution{make_mixture(std::move(w), std::move(mu), std::move(s))};
    }, py::arg("weights"), py::arg("means"), py::arg("sigmas"));
    m.def("samples", [](std::vector<double> v) { return Distribution{make_sample_ensemble(std::move(v))}; }, py::arg("values"));
    m.def("grid", [](double lo, double hi, std::vector<double> d) {
        return Distribution{make_gridded_density(lo, hi, std::move(d))};
    }, py::arg("lo"), py::arg("hi"), py::arg("density"));

    py::class_<EventRecord>(m, "EventRecord")
        .def(py::init<>())
        .def(py::init([](std::int64_t id, double x, double z) { return EventRecord{id, x, z}; }),
             py::arg("event_id"), py::arg("x"), py::arg("z_true"))
        .def_readwrite("event_id", &EventRecord::event_id)
        .def_readwrite("x", &EventRecord::x)
        .def_readwrite("z_true", &EventRecord::z_true)
        .def("__eq__", [](const EventRecord& a, const EventRecord& b) { return a == b; })
        .def("__repr__", [](const EventRecord& e) {
            return "EventRecord(" + std::to_string(e.event_id) + ", " + format_real(e.x) + ", " + format_real(e.z_true) + ")";
        });

    py::class_<Histogram>(m, "Histogram")
        .def_readonly("edges", &Histogram::edges)
        .def_readonly("counts", &Histogram::counts)
        .def_readonly("underflow", &Histogram::underflow)
        .def_readonly("overflow", &Histogram::overflow);

    // scoring
    m.def("crps_empirical", [](std::vector<double> s, double z) { return crps_empirical(SampleEnsemble(std::move(s)), z); },
          py::arg("samples"), py::arg("z"));
    m.def("crps_point", &crps_point, py::arg("prediction"), py::arg("z"));
    m.def("build_histogram", [](const std::vector<double>& v, const std::vector<double>& e) { return build_histogram(v, e); },
          py::arg("values"), py::arg("edges"));
    m.def("uniform_edges", &uniform_edges, py::arg("lo"), py::arg("hi"), py::arg("bins"));
    m.def("spectrum_chi2", [](const Histogram& pred, const Histogram& truth) {
        const auto r = spectrum_chi2(pred, truth);
        return py::dict(py::arg("chi2") = r.chi2, py::arg("ndf") = r.ndf, py::arg("bins_used") = r.bins_used);
    }, py::arg("pred"), py::arg("truth"));
    m.def("emd_1d", &emd_1d, py::arg("pred"), py::arg("truth"));

    // calibration
    m.def("nll_score", [](const Distribution& d, double z) { return nll_score(d.value, z); }, py::arg("dist"), py::arg("z"));
    m.def("conformal_threshold", [](const std::vector<double>& s, double a) { return conformal_threshold(s, a); },
          py::arg("scores"), py::arg("alpha"));
    m.def("alpha_grid", &alpha_grid, py::arg("lo") = 0.01, py::arg("hi") = 0.99, py::arg("step") = 0.01);
    m.def("coverage_curve", [](const std::vector<double>& cal, const std::vector<double>& eval, const std::vector<double>& alphas) {
        return coverage_curve(cal, eval, alphas).empirical;
    }, py::arg("cal_scores"), py::arg("eval_scores"), py::arg("alphas"));
    m.def("calibration_deviance", [](std::vector<double> alphas, std::vector<double> empirical) {
        CoverageCurve c{std::move(alphas), std::move(empirical)};
        c.validate();
        return calibration_deviance(c).value;
    }, py::arg("alphas"), py::arg("empirical"));
    m.def("prediction_set_size", [](const Distribution& d, double q, double lo, double hi, std::int64_t n) {
        const auto s = prediction_set_size(d.value, q, lo, hi, n);
        return py::make_tuple(s.size, s.n_components);
    }, py::arg("dist"), py::arg("threshold"), py::arg("lo") = -5.0, py::arg("hi") = 5.0, py::arg("grid_points") = 1000);

    // synthetic benchmark
    m.def("generate_events", [](std::int64_t n, std::uint64_t seed, double a, double sigma_eps) {
        return generate_events(make_config(a, sigma_eps, 2001, seed), n);
    }, py::arg("n"), py::arg("seed") = 0, py::arg("a") = 5.0, py::arg("sigma_eps") = 0.5);
    m.def("analytic_posterior", [](double x, double a, double sigma_eps, std::int64_t grid_points) {
        const auto g = analytic_posterior(make_config(a, sigma_eps, grid_points, 0), x);
        return py::dict(py::arg("z") = g.grid, py::arg("density") = g.density, py::arg("cdf") = g.cdf);
    }, py::arg("x"), py::arg("a") = 5.0, py::arg("sigma_eps") = 0.5, py::arg("grid_points") = 2001);
    m.def("predict", [](const std::string& method, double x, double a, double sigma_eps, std::int64_t grid_points) {
        return Distribution{ReferencePredictor(parse_predictor_kind(method), make_config(a, sigma_eps, grid_points, 0)).predict(x)};
    }, py::arg("method"), py::arg("x"), py::arg("a") = 5.0, py::arg("sigma_eps") = 0.5, py::arg("grid_points") = 2001);
    m.def("predict_all", [](const std::string& method, const std::vector<EventRecord>& events, double a, double sigma_eps,
                            std::int64_t grid_points) {
        const auto d = predict_all(ReferencePredictor(parse_predictor_kind(method), make_config(a, sigma_eps, grid_points, 0)), events);
        std::vector<Distribution> out;
        out.reserve(d.size());
        for (const auto& v : d) out.push_back(Distribution{v});
        return out;
    }, py::arg("method"), py::arg("events"), py::arg("a") = 5.0, py::arg("sigma_eps") = 0.5, py::arg("grid_points") = 2001);
    m.def("variance_decomposition", [](const std::vector<EventRecord>& events, double a, double sigma_eps) {
        const auto v = variance_decomposition(make_config(a, sigma_eps, 2001, 0), events);
        return py::dict(py::arg("var_total") = v.var_total, py::arg("var_of_means") = v.var_of_means,
                        py::arg("mean_of_vars") = v.mean_of_vars);
    }, py::arg("events"), py::arg("a") = 5.0, py::arg("sigma_eps") = 0.5);

    // pipeline
    m.def("evaluate", [](const std::vector<EventRecord>& events, const std::vector<Distribution>& dists, const py::kwargs& kw) {
        const auto options = options_from(kw);
        const auto dist_values = unwrap(dists);
        Evaluation e;
        {
            py::gil_scoped_release release;
            e = evaluate_dataset(events, dist_values, options);
        }
        return to_python(report_to_json(e.report));
    }, py::arg("events"), py::arg("dists"));
    m.def("evaluate_files", [](const std::filesystem::path& events_path, const std::filesystem::path& preds_path,
                               const py::kwargs& kw) {
        const auto options = options_from(kw);
        Evaluation e;
        {
            py::gil_scoped_release release;
            e = evaluate_dataset(read_events(events_path), read_predictions(preds_path), options);
        }
        return to_python(report_to_json(e.report));
    }, py::arg("events_path"), py::arg("preds_path"));
    m.def("crps_sweep", [](const std::vector<EventRecord>& events, const std::vector<Distribution>& dists,
                           const std::vector<std::int64_t>& sizes, std::uint64_t seed) {
        std::vector<std::pair<std::int64_t, double>> out;
        for (const auto& r : crps_convergence_sweep(events, unwrap(dists), sizes, seed)) out.emplace_back(r.size, r.mean_crps);
        return out;
    }, py::arg("events"), py::arg("dists"), py::arg("sizes"), py::arg("seed") = 0);
    m.def("read_events", [](const std::filesystem::path& p) { return read_events(p); }, py::arg("path"));
    m.def("write_events", [](const std::filesystem::path& p, const std::vector<EventRecord>& e) { write_events(p, e); },
          py::arg("path"), py::arg("events"));
    m.def("write_predictions", [](const std::filesystem::path& p, const std::vector<EventRecord>& e,
                                  const std::vector<Distribution>& d) { write_predictions(p, e, unwrap(d)); },
          py::arg("path"), py::arg("events"), py::arg("dists"));

    m.attr("__version__") = kToolVersion;
    m.attr("REPORT_SCHEMA_VERSION") = kReportSchemaVersion;
}
