#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "lorafp/errors.hpp"
#include "lorafp/harness.hpp"
#include "lorafp/report.hpp"

using namespace lorafp;
using testutil::TempDir;

namespace {

// A config pointing at a freshly written synthetic dataset. The column names follow
// the loader defaults ("BS 1".."BS 68") unless a mapping block is given, so the
// fixture writes explicit names and maps them.
std::string fixture_config(const TempDir& dir, std::size_t n, const std::string& extra = "") {
    auto d = testutil::random_dataset(n, 1234);
    auto mapping = testutil::test_mapping();
    auto csv = dir.write("data.csv", testutil::to_csv(d, mapping));

    std::string cfg = R"({
  "dataset": {
    "path": ")" + csv + R"(",
    "columns": {"rssi_prefix": "rx", "rssi_first": 1, "sf": "sf", "hdop": "hdop", "lat": "lat", "lon": "lon"}
  },
  "split": {"seed": 9, "fractions": [0.7, 0.15, 0.15]},
  "output_dir": "")" +
                      extra + "\n}";
    return cfg;
}

}  // namespace

TEST_CASE("an empty document parses to the documented defaults") {
    auto spec = parse_experiment_spec("{}", "inline");
    CHECK(spec.method == Method::Knn);
    CHECK(spec.representation == RepresentationKind::Powed);
    CHECK(spec.alpha == 60.0);
    CHECK(spec.beta == 1.1);
    CHECK_FALSE(spec.tau.has_value());
    CHECK(spec.split.seed == 1);
    CHECK(spec.split.fractions == std::array<double, 3>{0.70, 0.15, 0.15});
    CHECK(spec.knn.metric == MetricKind::BrayCurtis);
    CHECK(spec.knn.k == 14);
    CHECK(spec.mapping.rssi_columns.size() == kGatewayCount);
    CHECK(spec.mapping.rssi_columns[0] == "BS 1");
    CHECK(spec.mapping.rssi_columns[67] == "BS 68");
    CHECK(spec.mapping.sf_column == "SF");
}

TEST_CASE("comments are tolerated, unknown keys are not") {
    auto spec = parse_experiment_spec("{\n// a comment\n\"method\": \"etrees\"\n}", "inline");
    CHECK(spec.method == Method::ExtraTrees);

    CHECK_THROWS_WITH_AS((void)parse_experiment_spec(R"({"metod": "knn"})", "inline"),
                         doctest::Contains("metod"), ConfigError);
    CHECK_THROWS_WITH_AS((void)parse_experiment_spec(R"({"knn": {"kay": 3}})", "inline"),
                         doctest::Contains("kay"), ConfigError);
}

TEST_CASE("malformed JSON names the origin") {
    CHECK_THROWS_WITH_AS((void)parse_experiment_spec("{", "broken.json"),
                         doctest::Contains("broken.json"), ParseError);
}

TEST_CASE("field types and domains are checked") {
    CHECK_THROWS_AS((void)parse_experiment_spec(R"({"split": {"fractions": [0.5, 0.5]}})", "x"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_experiment_spec(R"({"method": "svm"})", "x"), ConfigError);
    CHECK_THROWS_AS((void)parse_experiment_spec(R"({"representation": {"alpha": -3}})", "x"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_experiment_spec(R"({"knn": {"k": 0}})", "x"), ConfigError);
    CHECK_THROWS_AS((void)parse_experiment_spec(R"({"dataset": {"delimiter": "ab"}})", "x"),
                    ConfigError);
}

TEST_CASE("tau accepts a number or null") {
    auto with = parse_experiment_spec(R"({"representation": {"tau": -115.5}})", "x");
    REQUIRE(with.tau.has_value());
    CHECK(*with.tau == -115.5);
    auto without = parse_experiment_spec(R"({"representation": {"tau": null}})", "x");
    CHECK_FALSE(without.tau.has_value());
}

TEST_CASE("explicit rssi column arrays and overridden mappings work") {
    std::string doc = R"({"dataset": {"columns": {"rssi": [)";
    for (int g = 0; g < 68; ++g) doc += (g ? "," : "") + std::string("\"g") + std::to_string(g) + "\"";
    doc += R"(], "lat": "y", "lon": "x"}}})";
    auto spec = parse_experiment_spec(doc, "inline");
    CHECK(spec.mapping.rssi_columns[0] == "g0");
    CHECK(spec.mapping.lat_column == "y");
    CHECK(spec.mapping.sf_column == "SF");  // untouched default

    CHECK_THROWS_AS((void)parse_experiment_spec(R"({"dataset": {"columns": {"rssi": ["a", "b"]}}})", "x"),
                    ConfigError);
}

TEST_CASE("load_experiment_spec reads from disk and reports missing files") {
    TempDir dir;
    auto path = dir.write("cfg.json", R"({"method": "mlp"})");
    auto spec = load_experiment_spec(path);
    CHECK(spec.method == Method::Mlp);
    CHECK_THROWS_AS((void)load_experiment_spec(dir.file("absent.json")), IoError);
}

TEST_CASE("prepare loads the dataset and splits it per the config") {
    TempDir dir;
    auto spec = parse_experiment_spec(fixture_config(dir, 40), "inline");
    auto data = prepare(spec);
    CHECK(data.dataset.size() == 40);
    CHECK(data.split.train_indices.size() == 28);
    CHECK(data.split.val_indices.size() == 6);
    CHECK(data.split.test_indices.size() == 6);
    data.split.validate_against(40);

    // Same seed, same partition.
    auto again = prepare(spec);
    CHECK(again.split == data.split);
}

TEST_CASE("prepare honours a split manifest and rejects one of the wrong size") {
    TempDir dir;
    auto d = testutil::random_dataset(40, 1234);
    auto csv = dir.write("data.csv", testutil::to_csv(d, testutil::test_mapping()));
    auto manifest = split_indices(40, 77, {0.7, 0.15, 0.15});
    auto mpath = dir.file("split.txt");
    save_split(manifest, mpath);

    std::string cfg = R"({
  "dataset": {
    "path": ")" + csv + R"(",
    "columns": {"rssi_prefix": "rx", "rssi_first": 1, "sf": "sf", "hdop": "hdop", "lat": "lat", "lon": "lon"}
  },
  "split": {"manifest": ")" + mpath + R"("},
  "output_dir": ""
})";
    auto spec = parse_experiment_spec(cfg, "inline");
    auto data = prepare(spec);
    CHECK(data.split == manifest);

    auto wrong = split_indices(39, 77, {0.7, 0.15, 0.15});
    save_split(wrong, mpath);
    CHECK_THROWS_AS((void)prepare(spec), ValidationError);
}

TEST_CASE("assemble_features appends the spreading factor only when asked") {
    auto d = testutil::random_dataset(20, 5);
    std::vector<std::size_t> idx = {0, 3, 7};
    auto rep = fit_representation(RepresentationKind::Powed, d, idx, 60.0, 1.1);

    auto plain = assemble_features(rep, d, idx, SfFeature::None);
    CHECK(plain.rows() == 3);
    CHECK(plain.cols() == kGatewayCount);

    auto raw = assemble_features(rep, d, idx, SfFeature::Raw);
    CHECK(raw.cols() == kGatewayCount + 1);
    CHECK(raw(1, kGatewayCount) == static_cast<double>(d.records[3].sf));

    auto norm = assemble_features(rep, d, idx, SfFeature::Normalized);
    CHECK(norm(2, kGatewayCount) ==
          doctest::Approx((d.records[7].sf - 7.0) / 5.0).epsilon(1e-15));

    auto targets = collect_targets(d, idx);
    CHECK(targets.size() == 3);
    CHECK(targets[1].lat == d.records[3].lat);
}

TEST_CASE("the shared top-k sweep equals one refit per k") {
    auto d = testutil::random_dataset(60, 21);
    std::vector<std::size_t> train_idx, val_idx;
    for (std::size_t i = 0; i < 45; ++i) train_idx.push_back(i);
    for (std::size_t i = 45; i < 60; ++i) val_idx.push_back(i);

    auto rep = fit_representation(RepresentationKind::Powed, d, train_idx, 60.0, 1.1);
    auto train_x = assemble_features(rep, d, train_idx, SfFeature::None);
    auto val_x = assemble_features(rep, d, val_idx, SfFeature::None);
    auto train_y = collect_targets(d, train_idx);
    auto val_y = collect_targets(d, val_idx);

    auto curve = knn_k_curve(train_x, train_y, val_x, val_y, MetricKind::BrayCurtis, 8);
    REQUIRE(curve.size() == 8);

    for (std::size_t k = 1; k <= 8; ++k) {
        auto model = KnnModel::fit(train_x, train_y, MetricKind::BrayCurtis, k);
        auto stats = error_stats(model.predict_batch(val_x), val_y);
        REQUIRE(curve[k - 1].value == static_cast<double>(k));
        REQUIRE(curve[k - 1].val_mean == stats.mean);
        REQUIRE(curve[k - 1].val_median == stats.median);
    }
}

TEST_CASE("the alpha sweep walks its grid and re-evaluates cleanly at the best point") {
    TempDir dir;
    auto spec = parse_experiment_spec(fixture_config(dir, 60), "inline");
    auto data = prepare(spec);

    auto sweep = sweep_alpha(spec, data);
    REQUIRE(sweep.points.size() == 18);
    CHECK(sweep.axis == "alpha");
    CHECK(sweep.points.front().value == 5.0);
    CHECK(sweep.points.back().value == 90.0);

    double best_mean = 1e300;
    for (const auto& p : sweep.points) best_mean = std::min(best_mean, p.val_mean);
    CHECK(sweep.val_at_best.mean == best_mean);

    // Standalone reproduction of the best cell.
    auto rep = fit_representation(RepresentationKind::Exponential, data.dataset,
                                  data.split.train_indices, sweep.best_value, spec.beta, spec.tau);
    auto train_x = assemble_features(rep, data.dataset, data.split.train_indices, SfFeature::None);
    auto val_x = assemble_features(rep, data.dataset, data.split.val_indices, SfFeature::None);
    auto train_y = collect_targets(data.dataset, data.split.train_indices);
    auto val_y = collect_targets(data.dataset, data.split.val_indices);
    std::size_t k = std::min<std::size_t>(11, train_y.size());
    auto model = KnnModel::fit(train_x, train_y, MetricKind::BrayCurtis, k);
    auto stats = error_stats(model.predict_batch(val_x), val_y);
    CHECK(stats.mean == sweep.val_at_best.mean);
}

TEST_CASE("the beta sweep covers 0.7 through 1.7") {
    TempDir dir;
    auto spec = parse_experiment_spec(fixture_config(dir, 50), "inline");
    auto data = prepare(spec);

    auto sweep = sweep_beta(spec, data);
    REQUIRE(sweep.points.size() == 11);
    CHECK(sweep.axis == "beta");
    CHECK(sweep.points[0].value == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(sweep.points[10].value == doctest::Approx(1.7).epsilon(1e-12));
    bool found = false;
    for (const auto& p : sweep.points)
        if (p.value == sweep.best_value) found = true;
    CHECK(found);
}

TEST_CASE("the metric-representation sweep fills every cell") {
    TempDir dir;
    auto spec = parse_experiment_spec(fixture_config(dir, 50), "inline");
    auto data = prepare(spec);

    const MetricKind metrics[] = {MetricKind::Euclidean, MetricKind::BrayCurtis};
    const RepresentationKind reps[] = {RepresentationKind::Positive, RepresentationKind::Powed};
    auto table = sweep_metric_k(spec, data, metrics, reps, 6);

    REQUIRE(table.cells.size() == 4);
    CHECK(table.k_max == 6);
    CHECK(table.cells[0].metric == MetricKind::Euclidean);
    CHECK(table.cells[0].representation == RepresentationKind::Positive);
    CHECK(table.cells[3].metric == MetricKind::BrayCurtis);
    CHECK(table.cells[3].representation == RepresentationKind::Powed);

    for (const auto& cell : table.cells) {
        CHECK(cell.best_k >= 1);
        CHECK(cell.best_k <= 6);
        CHECK(cell.val_mean > 0.0);
        CHECK(cell.val_median > 0.0);
    }

    // Spot-check one cell against the curve primitive.
    auto rep = fit_representation(RepresentationKind::Positive, data.dataset,
                                  data.split.train_indices, spec.alpha, spec.beta, spec.tau);
    auto train_x = assemble_features(rep, data.dataset, data.split.train_indices, SfFeature::None);
    auto val_x = assemble_features(rep, data.dataset, data.split.val_indices, SfFeature::None);
    auto curve = knn_k_curve(train_x, collect_targets(data.dataset, data.split.train_indices),
                             val_x, collect_targets(data.dataset, data.split.val_indices),
                             MetricKind::Euclidean, 6);
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (curve[i].val_mean < curve[best].val_mean) best = i;
    CHECK(table.cells[0].best_k == best + 1);
    CHECK(table.cells[0].val_mean == curve[best].val_mean);
}

TEST_CASE("the boolean family runs on the zero-preserving representation") {
    TempDir dir;
    auto spec = parse_experiment_spec(fixture_config(dir, 40), "inline");
    auto data = prepare(spec);

    auto table = run_boolean_family(spec, data);
    REQUIRE(table.cells.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(table.cells[i].metric == kBooleanMetrics[i]);
        CHECK(table.cells[i].representation == RepresentationKind::Powed);
    }
}

TEST_CASE("run_experiment fits, evaluates and writes one file set per split") {
    TempDir dir;
    auto out = (dir.path / "out").string();
    auto cfg = fixture_config(dir, 50, ", \"knn\": {\"k\": 3}");
    auto spec = parse_experiment_spec(cfg, "inline");
    spec.output_dir = out;
    auto data = prepare(spec);

    auto result = run_experiment(spec, data);
    CHECK(result.method == Method::Knn);
    CHECK(result.train_stats.count == 35);
    CHECK(result.val_stats.count == 7);
    CHECK(result.test_stats.count == 8);
    CHECK(result.train_pred.size() == 35);
    CHECK(result.history.train_loss.empty());  // knn has no loss curve

    for (const char* name : {"predictions_train.csv", "predictions_val.csv",
                             "predictions_test.csv", "table3.csv"})
        CHECK(std::filesystem::exists(dir.path / "out" / name));

    auto text = testutil::slurp((dir.path / "out" / "predictions_val.csv").string());
    CHECK(text.rfind("index,true_lat,true_lon,pred_lat,pred_lon,error_m\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 8);  // header + 7 rows

    auto table3 = testutil::slurp((dir.path / "out" / "table3.csv").string());
    CHECK(table3.rfind("method,split,count,mean_m,", 0) == 0);
    CHECK(std::count(table3.begin(), table3.end(), '\n') == 4);  // header + 3 splits
    CHECK(table3.find("knn,train,35,") != std::string::npos);
    CHECK(table3.find("knn,test,8,") != std::string::npos);
}

TEST_CASE("run_experiment with the tree model stays inside the splits' bounding box") {
    TempDir dir;
    auto cfg = fixture_config(
        dir, 45, R"(, "method": "etrees", "etrees": {"n_estimators": 5, "seed": 3})");
    auto spec = parse_experiment_spec(cfg, "inline");
    auto data = prepare(spec);

    auto result = run_experiment(spec, data);
    CHECK(result.method == Method::ExtraTrees);
    CHECK(result.test_pred.size() == data.split.test_indices.size());
    CHECK(result.train_stats.mean < 20000.0);  // sanity: city-scale errors, not garbage
}

TEST_CASE("run_experiment trains the network and leaves a loss curve behind") {
    TempDir dir;
    auto out = (dir.path / "out").string();
    auto cfg = fixture_config(dir, 40,
                              R"(, "method": "mlp",
    "mlp": {"layer_widths": [8, 2], "max_epochs": 12, "batch_size": 16, "patience": 50,
            "dropout_rate": 0.0, "seed": 5})");
    auto spec = parse_experiment_spec(cfg, "inline");
    spec.output_dir = out;
    auto data = prepare(spec);

    auto result = run_experiment(spec, data);
    CHECK(result.method == Method::Mlp);
    REQUIRE_FALSE(result.history.val_loss.empty());
    CHECK(result.history.val_loss.size() <= 12);
    REQUIRE(result.history.best_epoch >= 1);

    double best = result.history.val_loss[result.history.best_epoch - 1];
    for (double v : result.history.val_loss) CHECK(best <= v);

    auto loss_csv = testutil::slurp((dir.path / "out" / "fig5_loss.csv").string());
    CHECK(loss_csv.rfind("epoch,train_loss,val_loss,is_best\n", 0) == 0);
    CHECK(std::count(loss_csv.begin(), loss_csv.end(), '\n') ==
          static_cast<long>(result.history.val_loss.size()) + 1);
}

TEST_CASE("identical specs produce byte-identical artifacts") {
    TempDir dir;
    auto cfg = fixture_config(dir, 45, ", \"knn\": {\"k\": 4}");

    auto run_into = [&](const std::string& sub) {
        auto spec = parse_experiment_spec(cfg, "inline");
        spec.output_dir = (dir.path / sub).string();
        auto data = prepare(spec);
        (void)run_experiment(spec, data);
    };
    run_into("a");
    run_into("b");

    for (const char* name : {"predictions_train.csv", "predictions_val.csv",
                             "predictions_test.csv", "table3.csv"}) {
        auto a = testutil::slurp((dir.path / "a" / name).string());
        auto b = testutil::slurp((dir.path / "b" / name).string());
        REQUIRE_FALSE(a.empty());
        REQUIRE(a == b);
    }
}

TEST_CASE("prediction indices refer to the original dataset rows") {
    TempDir dir;
    auto out = (dir.path / "out").string();
    auto cfg = fixture_config(dir, 30, ", \"knn\": {\"k\": 2}");
    auto spec = parse_experiment_spec(cfg, "inline");
    spec.output_dir = out;
    auto data = prepare(spec);
    (void)run_experiment(spec, data);

    auto text = testutil::slurp((dir.path / "out" / "predictions_test.csv").string());
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);  // header
    std::size_t row = 0;
    while (std::getline(lines, line)) {
        auto comma = line.find(',');
        std::size_t index = std::stoul(line.substr(0, comma));
        REQUIRE(index == data.split.test_indices[row]);
        ++row;
    }
    CHECK(row == data.split.test_indices.size());
}
