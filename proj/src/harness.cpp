#include "lorafp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <sstream>
#include <string_view>
#include <utility>

#include "json.hpp"
#include "lorafp/errors.hpp"
#include "lorafp/report.hpp"

namespace lorafp {

Method parse_method(const std::string& name) {
    if (name == "knn") return Method::Knn;
    if (name == "etrees") return Method::ExtraTrees;
    if (name == "mlp") return Method::Mlp;
    throw ConfigError("unknown method '" + name + "' (expected knn, etrees, or mlp)");
}

std::string to_string(Method m) {
    switch (m) {
        case Method::Knn: return "knn";
        case Method::ExtraTrees: return "etrees";
        case Method::Mlp: return "mlp";
    }
    return "?";
}

void ExperimentSpec::validate() const {
    mapping.validate();
    if (split.manifest_path.empty()) {
        double sum = 0.0;
        for (double f : split.fractions) {
            if (!(f > 0.0)) throw ConfigError("split fractions must be positive");
            sum += f;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
    }
    if (!(alpha > 0.0)) throw ConfigError("representation alpha must be positive");
    if (!(beta > 0.0)) throw ConfigError("representation beta must be positive");
    if (knn.k < 1) throw ConfigError("knn.k must be at least 1");
    if (knn.k_max < 1) throw ConfigError("knn.k_max must be at least 1");
    switch (method) {
        case Method::Knn: break;
        case Method::ExtraTrees: etrees.validate(); break;
        case Method::Mlp: mlp.validate(); break;
    }
}

namespace {

using njson = nlohmann::json;

[[noreturn]] void config_fail(const std::string& origin, const std::string& msg) {
    throw ConfigError(origin + ": " + msg);
}

void expect_object(const njson& j, const std::string& origin, const std::string& where) {
    if (!j.is_object()) config_fail(origin, where + " must be an object");
}

void check_keys(const njson& obj, std::initializer_list<std::string_view> allowed,
                const std::string& origin, const std::string& where) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (std::string_view k : allowed)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known) config_fail(origin, "unknown key '" + item.key() + "' in " + where);
    }
}

double as_number(const njson& v, const std::string& origin, const std::string& where) {
    if (!v.is_number()) config_fail(origin, where + " must be a number");
    return v.get<double>();
}

std::int64_t as_integer(const njson& v, const std::string& origin, const std::string& where) {
    if (!v.is_number_integer()) config_fail(origin, where + " must be an integer");
    return v.get<std::int64_t>();
}

std::size_t as_count(const njson& v, const std::string& origin, const std::string& where) {
    const std::int64_t n = as_integer(v, origin, where);
    if (n < 0) config_fail(origin, where + " must be non-negative");
    return static_cast<std::size_t>(n);
}

std::string as_string(const njson& v, const std::string& origin, const std::string& where) {
    if (!v.is_string()) config_fail(origin, where + " must be a string");
    return v.get<std::string>();
}

ColumnMapping default_mapping() {
    // A guess at the public fingerprint file's headers; always overridable in config.
    ColumnMapping m;
    m.rssi_columns.reserve(kGatewayCount);
    for (std::size_t i = 1; i <= kGatewayCount; ++i)
        m.rssi_columns.push_back("BS " + std::to_string(i));
    m.sf_column = "SF";
    m.hdop_column = "HDOP";
    m.lat_column = "Latitude";
    m.lon_column = "Longitude";
    return m;
}

ColumnMapping parse_columns(const njson& j, const std::string& origin) {
    expect_object(j, origin, "dataset.columns");
    check_keys(j, {"rssi", "rssi_prefix", "rssi_first", "sf", "hdop", "lat", "lon"}, origin,
               "dataset.columns");
    ColumnMapping m = default_mapping();
    if (j.contains("rssi")) {
        if (!j["rssi"].is_array())
            config_fail(origin, "dataset.columns.rssi must be an array of column names");
        m.rssi_columns.clear();
        for (const auto& name : j["rssi"])
            m.rssi_columns.push_back(as_string(name, origin, "dataset.columns.rssi entry"));
    } else if (j.contains("rssi_prefix")) {
        const std::string prefix = as_string(j["rssi_prefix"], origin, "dataset.columns.rssi_prefix");
        std::int64_t first = 1;
        if (j.contains("rssi_first"))
            first = as_integer(j["rssi_first"], origin, "dataset.columns.rssi_first");
        m.rssi_columns.clear();
        for (std::size_t i = 0; i < kGatewayCount; ++i)
            m.rssi_columns.push_back(prefix + std::to_string(first + static_cast<std::int64_t>(i)));
    }
    if (j.contains("sf")) m.sf_column = as_string(j["sf"], origin, "dataset.columns.sf");
    if (j.contains("hdop")) m.hdop_column = as_string(j["hdop"], origin, "dataset.columns.hdop");
    if (j.contains("lat")) m.lat_column = as_string(j["lat"], origin, "dataset.columns.lat");
    if (j.contains("lon")) m.lon_column = as_string(j["lon"], origin, "dataset.columns.lon");
    return m;
}

}  // namespace

ExperimentSpec parse_experiment_spec(const std::string& text, const std::string& origin) {
    njson j;
    try {
        j = njson::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const njson::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
    expect_object(j, origin, "config root");
    check_keys(j, {"dataset", "split", "representation", "method", "knn", "etrees", "mlp", "output_dir"},
               origin, "config root");

    ExperimentSpec spec;
    spec.mapping = default_mapping();

    if (j.contains("dataset")) {
        const njson& d = j["dataset"];
        expect_object(d, origin, "dataset");
        check_keys(d, {"path", "delimiter", "columns"}, origin, "dataset");
        if (d.contains("path")) spec.dataset_path = as_string(d["path"], origin, "dataset.path");
        if (d.contains("columns")) spec.mapping = parse_columns(d["columns"], origin);
        if (d.contains("delimiter")) {
            const std::string delim = as_string(d["delimiter"], origin, "dataset.delimiter");
            if (delim.size() != 1) config_fail(origin, "dataset.delimiter must be one character");
            spec.mapping.delimiter = delim[0];
        }
    }

    if (j.contains("split")) {
        const njson& s = j["split"];
        expect_object(s, origin, "split");
        check_keys(s, {"seed", "fractions", "manifest"}, origin, "split");
        if (s.contains("seed")) spec.split.seed = as_integer(s["seed"], origin, "split.seed");
        if (s.contains("fractions")) {
            if (!s["fractions"].is_array() || s["fractions"].size() != 3)
                config_fail(origin, "split.fractions must be an array of three numbers");
            for (std::size_t i = 0; i < 3; ++i)
                spec.split.fractions[i] = as_number(s["fractions"][i], origin, "split.fractions entry");
        }
        if (s.contains("manifest"))
            spec.split.manifest_path = as_string(s["manifest"], origin, "split.manifest");
    }

    if (j.contains("representation")) {
        const njson& r = j["representation"];
        expect_object(r, origin, "representation");
        check_keys(r, {"kind", "alpha", "beta", "tau"}, origin, "representation");
        if (r.contains("kind"))
            spec.representation = parse_representation(as_string(r["kind"], origin, "representation.kind"));
        if (r.contains("alpha")) spec.alpha = as_number(r["alpha"], origin, "representation.alpha");
        if (r.contains("beta")) spec.beta = as_number(r["beta"], origin, "representation.beta");
        if (r.contains("tau") && !r["tau"].is_null())
            spec.tau = as_number(r["tau"], origin, "representation.tau");
    }

    if (j.contains("method")) spec.method = parse_method(as_string(j["method"], origin, "method"));

    if (j.contains("knn")) {
        const njson& k = j["knn"];
        expect_object(k, origin, "knn");
        check_keys(k, {"metric", "k", "k_max"}, origin, "knn");
        if (k.contains("metric")) spec.knn.metric = parse_metric(as_string(k["metric"], origin, "knn.metric"));
        if (k.contains("k")) spec.knn.k = as_count(k["k"], origin, "knn.k");
        if (k.contains("k_max")) spec.knn.k_max = as_count(k["k_max"], origin, "knn.k_max");
    }

    if (j.contains("etrees")) {
        const njson& e = j["etrees"];
        expect_object(e, origin, "etrees");
        check_keys(e, {"n_estimators", "min_samples_split", "min_samples_leaf", "max_depth", "seed"},
                   origin, "etrees");
        if (e.contains("n_estimators"))
            spec.etrees.n_estimators = as_count(e["n_estimators"], origin, "etrees.n_estimators");
        if (e.contains("min_samples_split"))
            spec.etrees.min_samples_split = as_count(e["min_samples_split"], origin, "etrees.min_samples_split");
        if (e.contains("min_samples_leaf"))
            spec.etrees.min_samples_leaf = as_count(e["min_samples_leaf"], origin, "etrees.min_samples_leaf");
        if (e.contains("max_depth")) spec.etrees.max_depth = as_count(e["max_depth"], origin, "etrees.max_depth");
        if (e.contains("seed")) spec.etrees.seed = as_integer(e["seed"], origin, "etrees.seed");
    }

    if (j.contains("mlp")) {
        const njson& m = j["mlp"];
        expect_object(m, origin, "mlp");
        check_keys(m,
                   {"layer_widths", "dropout_rate", "l2_lambda", "learning_rate", "batch_size",
                    "max_epochs", "patience", "seed"},
                   origin, "mlp");
        if (m.contains("layer_widths")) {
            if (!m["layer_widths"].is_array() || m["layer_widths"].empty())
                config_fail(origin, "mlp.layer_widths must be a non-empty array");
            spec.mlp.layer_widths.clear();
            for (const auto& w : m["layer_widths"])
                spec.mlp.layer_widths.push_back(as_count(w, origin, "mlp.layer_widths entry"));
        }
        if (m.contains("dropout_rate"))
            spec.mlp.dropout_rate = as_number(m["dropout_rate"], origin, "mlp.dropout_rate");
        if (m.contains("l2_lambda")) spec.mlp.l2_lambda = as_number(m["l2_lambda"], origin, "mlp.l2_lambda");
        if (m.contains("learning_rate"))
            spec.mlp.learning_rate = as_number(m["learning_rate"], origin, "mlp.learning_rate");
        if (m.contains("batch_size")) spec.mlp.batch_size = as_count(m["batch_size"], origin, "mlp.batch_size");
        if (m.contains("max_epochs")) spec.mlp.max_epochs = as_count(m["max_epochs"], origin, "mlp.max_epochs");
        if (m.contains("patience")) spec.mlp.patience = as_count(m["patience"], origin, "mlp.patience");
        if (m.contains("seed"))
            spec.mlp.seed = static_cast<std::uint64_t>(as_integer(m["seed"], origin, "mlp.seed"));
    }

    if (j.contains("output_dir")) spec.output_dir = as_string(j["output_dir"], origin, "output_dir");

    spec.validate();
    return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_spec(buf.str(), path);
}

PreparedData prepare(const ExperimentSpec& spec) {
    if (spec.dataset_path.empty())
        throw ConfigError("dataset.path is required for this operation");
    PreparedData data;
    data.dataset = load_dataset(spec.dataset_path, spec.mapping);
    if (!spec.split.manifest_path.empty()) {
        data.split = load_split(spec.split.manifest_path);
        data.split.validate_against(data.dataset.size());
    } else {
        data.split = split_indices(data.dataset.size(), spec.split.seed, spec.split.fractions);
    }
    return data;
}

std::vector<LatLon> collect_targets(const Dataset& d, std::span<const std::size_t> indices) {
    std::vector<LatLon> out(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const Fingerprint& fp = d.records[indices[i]];
        out[i] = {fp.lat, fp.lon};
    }
    return out;
}

Matrix assemble_features(const RepresentationConfig& rep, const Dataset& d,
                         std::span<const std::size_t> indices, SfFeature sf) {
    const std::size_t extra = sf == SfFeature::None ? 0 : 1;
    Matrix out(indices.size(), kGatewayCount + extra);
    const auto n = static_cast<std::ptrdiff_t>(indices.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const Fingerprint& fp = d.records[indices[static_cast<std::size_t>(i)]];
        const std::array<double, kGatewayCount> row = transform(rep, fp);
        double* dst = out.data() + static_cast<std::size_t>(i) * out.cols();
        std::copy(row.begin(), row.end(), dst);
        if (extra == 1)
            dst[kGatewayCount] = sf == SfFeature::Raw ? static_cast<double>(fp.sf)
                                                      : (static_cast<double>(fp.sf) - 7.0) / 5.0;
    }
    return out;
}

std::vector<SweepPoint> knn_k_curve(Matrix train_x, std::vector<LatLon> train_y,
                                    const Matrix& val_x, std::span<const LatLon> val_y,
                                    MetricKind metric, std::size_t k_max) {
    if (k_max < 1) throw ConfigError("k_max must be at least 1");
    k_max = std::min(k_max, train_x.rows());
    const std::size_t n_val = val_x.rows();
    const KnnModel model = KnnModel::fit(std::move(train_x), std::move(train_y), metric, 1);
    const std::vector<std::vector<Neighbor>> topk = model.predict_topk_batch(val_x, k_max);

    // One error slab per k; a query's predictions for every k <= k_max fall out of one
    // prefix pass over its neighbor list, in the exact accumulation order aggregate() uses.
    std::vector<std::vector<double>> errors(k_max, std::vector<double>(n_val));
    const std::span<const LatLon> coords = model.coords();
    const auto nq = static_cast<std::ptrdiff_t>(n_val);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t q = 0; q < nq; ++q) {
        const auto qi = static_cast<std::size_t>(q);
        double lat = 0.0, lon = 0.0;
        for (std::size_t k = 1; k <= k_max; ++k) {
            const Neighbor& nb = topk[qi][k - 1];
            lat += coords[nb.index].lat;
            lon += coords[nb.index].lon;
            const LatLon pred{lat / static_cast<double>(k), lon / static_cast<double>(k)};
            errors[k - 1][qi] = haversine_m(pred, val_y[qi]);
        }
    }

    std::vector<SweepPoint> curve(k_max);
    for (std::size_t k = 1; k <= k_max; ++k) {
        const ErrorStats stats = summarize_errors(std::move(errors[k - 1]));
        curve[k - 1] = {static_cast<double>(k), stats.mean, stats.median};
    }
    return curve;
}

namespace {

// Shared body of the alpha and beta sweeps: exponential or powed representation swept
// over `grid` under the figure protocol (Bray-Curtis, k = 11, RSSI features only).
SweepResult sweep_scalar(const ExperimentSpec& spec, const PreparedData& data,
                         RepresentationKind kind, const std::vector<double>& grid,
                         const char* axis) {
    constexpr MetricKind kMetric = MetricKind::BrayCurtis;
    const Dataset& d = data.dataset;
    const auto& tr = data.split.train_indices;
    const auto& va = data.split.val_indices;
    const std::size_t k = std::min<std::size_t>(11, tr.size());  // clamped only for toy data
    const std::vector<LatLon> train_y = collect_targets(d, tr);
    const std::vector<LatLon> val_y = collect_targets(d, va);

    auto fit_at = [&](double v) {
        const double alpha = kind == RepresentationKind::Exponential ? v : spec.alpha;
        const double beta = kind == RepresentationKind::Powed ? v : spec.beta;
        return fit_representation(kind, d, tr, alpha, beta, spec.tau);
    };
    auto model_at = [&](const RepresentationConfig& rep) {
        return KnnModel::fit(assemble_features(rep, d, tr, SfFeature::None), train_y, kMetric, k);
    };

    SweepResult result;
    result.axis = axis;
    std::size_t best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const RepresentationConfig rep = fit_at(grid[i]);
        const KnnModel model = model_at(rep);
        const std::vector<LatLon> preds =
            model.predict_batch(assemble_features(rep, d, va, SfFeature::None));
        const ErrorStats stats = error_stats(preds, val_y);
        result.points.push_back({grid[i], stats.mean, stats.median});
        if (i == 0 || stats.mean < result.val_at_best.mean) {  // strict: ties keep the smaller value
            best = i;
            result.val_at_best = stats;
        }
    }
    result.best_value = grid[best];

    // The sweep's one test-set evaluation, at the winning parameter.
    const auto& te = data.split.test_indices;
    const std::vector<LatLon> test_y = collect_targets(d, te);
    const RepresentationConfig rep = fit_at(result.best_value);
    const KnnModel model = model_at(rep);
    result.test_at_best =
        error_stats(model.predict_batch(assemble_features(rep, d, te, SfFeature::None)), test_y);
    return result;
}

}  // namespace

SweepResult sweep_alpha(const ExperimentSpec& spec, const PreparedData& data) {
    std::vector<double> grid;
    for (int a = 5; a <= 90; a += 5) grid.push_back(a);
    return sweep_scalar(spec, data, RepresentationKind::Exponential, grid, "alpha");
}

SweepResult sweep_beta(const ExperimentSpec& spec, const PreparedData& data) {
    std::vector<double> grid;
    for (int i = 7; i <= 17; ++i) grid.push_back(static_cast<double>(i) / 10.0);
    return sweep_scalar(spec, data, RepresentationKind::Powed, grid, "beta");
}

Table2Result sweep_metric_k(const ExperimentSpec& spec, const PreparedData& data,
                            std::span<const MetricKind> metrics,
                            std::span<const RepresentationKind> representations,
                            std::size_t k_max) {
    if (metrics.empty() || representations.empty())
        throw ConfigError("sweep_metric_k needs at least one metric and one representation");
    Table2Result table;
    table.k_max = k_max;
    table.cells.resize(metrics.size() * representations.size());

    const Dataset& d = data.dataset;
    const auto& tr = data.split.train_indices;
    const auto& va = data.split.val_indices;
    const std::vector<LatLon> train_y = collect_targets(d, tr);
    const std::vector<LatLon> val_y = collect_targets(d, va);

    // Representations outer so each transform pass is shared by all metrics. Cells are
    // mutually independent; within a cell the top-k pass fans out across threads.
    for (std::size_t ri = 0; ri < representations.size(); ++ri) {
        const RepresentationConfig rep =
            fit_representation(representations[ri], d, tr, spec.alpha, spec.beta, spec.tau);
        const Matrix train_x = assemble_features(rep, d, tr, SfFeature::None);
        const Matrix val_x = assemble_features(rep, d, va, SfFeature::None);
        for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
            const std::vector<SweepPoint> curve =
                knn_k_curve(train_x, train_y, val_x, val_y, metrics[mi], k_max);
            std::size_t best = 0;
            for (std::size_t i = 1; i < curve.size(); ++i)
                if (curve[i].val_mean < curve[best].val_mean) best = i;
            table.cells[mi * representations.size() + ri] = {
                metrics[mi], representations[ri], static_cast<std::size_t>(curve[best].value),
                curve[best].val_mean, curve[best].val_median};
        }
    }
    return table;
}

Table2Result run_boolean_family(const ExperimentSpec& spec, const PreparedData& data) {
    const RepresentationKind reps[] = {RepresentationKind::Powed};
    return sweep_metric_k(spec, data, kBooleanMetrics, reps, spec.knn.k_max);
}

RunResult run_experiment(const ExperimentSpec& spec, const PreparedData& data) {
    const Dataset& d = data.dataset;
    const SplitManifest& split = data.split;
    const RepresentationConfig rep = fit_representation(spec.representation, d, split.train_indices,
                                                        spec.alpha, spec.beta, spec.tau);
    const SfFeature sf = spec.method == Method::Knn        ? SfFeature::None
                         : spec.method == Method::ExtraTrees ? SfFeature::Raw
                                                             : SfFeature::Normalized;

    Matrix train_x = assemble_features(rep, d, split.train_indices, sf);
    const std::vector<LatLon> train_y = collect_targets(d, split.train_indices);
    const Matrix val_x = assemble_features(rep, d, split.val_indices, sf);
    const std::vector<LatLon> val_y = collect_targets(d, split.val_indices);

    const bool persist = !spec.output_dir.empty();
    if (persist) ensure_directory(spec.output_dir);
    auto out_path = [&](const char* name) { return spec.output_dir + "/" + name; };

    RunResult result;
    result.method = spec.method;

    std::shared_ptr<KnnModel> knn_model;
    std::shared_ptr<Forest> forest;
    std::shared_ptr<MlpModel> mlp;
    switch (spec.method) {
        case Method::Knn: {
            const std::size_t k = std::min(spec.knn.k, train_x.rows());
            knn_model = std::make_shared<KnnModel>(
                KnnModel::fit(std::move(train_x), train_y, spec.knn.metric, k));
            break;
        }
        case Method::ExtraTrees:
            forest = std::make_shared<Forest>(Forest::fit(train_x, train_y, spec.etrees));
            break;
        case Method::Mlp: {
            MlpConfig cfg = spec.mlp;
            cfg.input_width = train_x.cols();  // the data decides, not the config
            TrainResult trained = train_mlp(MlpModel::build(cfg), train_x, train_y, val_x, val_y);
            mlp = std::make_shared<MlpModel>(std::move(trained.model));
            result.history = std::move(trained.history);
            if (persist) write_loss_csv(out_path("fig5_loss.csv"), result.history);
            break;
        }
    }

    auto predict = [&](const Matrix& x) {
        if (knn_model) return knn_model->predict_batch(x);
        if (forest) return forest->predict_batch(x);
        return mlp->predict_batch(x);
    };

    // Each split is flushed as soon as it is evaluated, so earlier files survive a
    // failure in a later stage.
    const Matrix& train_features = knn_model ? knn_model->features() : train_x;
    result.train_pred = predict(train_features);
    result.train_stats = error_stats(result.train_pred, train_y);
    if (persist)
        write_predictions_csv(out_path("predictions_train.csv"), split.train_indices, train_y,
                              result.train_pred);

    result.val_pred = predict(val_x);
    result.val_stats = error_stats(result.val_pred, val_y);
    if (persist)
        write_predictions_csv(out_path("predictions_val.csv"), split.val_indices, val_y,
                              result.val_pred);

    const Matrix test_x = assemble_features(rep, d, split.test_indices, sf);
    const std::vector<LatLon> test_y = collect_targets(d, split.test_indices);
    result.test_pred = predict(test_x);
    result.test_stats = error_stats(result.test_pred, test_y);
    if (persist)
        write_predictions_csv(out_path("predictions_test.csv"), split.test_indices, test_y,
                              result.test_pred);

    if (persist) {
        const std::string name = to_string(spec.method);
        const Table3Row rows[] = {{name, "train", result.train_stats},
                                  {name, "val", result.val_stats},
                                  {name, "test", result.test_stats}};
        write_table3_csv(out_path("table3.csv"), rows);
    }
    return result;
}

}  // namespace lorafp
