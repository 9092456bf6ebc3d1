#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lorafp/dataset.hpp"
#include "lorafp/etrees.hpp"
#include "lorafp/eval.hpp"
#include "lorafp/knn.hpp"
#include "lorafp/matrix.hpp"
#include "lorafp/metrics.hpp"
#include "lorafp/neural.hpp"
#include "lorafp/represent.hpp"

namespace lorafp {

enum class Method { Knn, ExtraTrees, Mlp };

Method parse_method(const std::string& name);
std::string to_string(Method m);

// How the split is produced: a manifest file wins over (seed, fractions).
struct SplitSpec {
    std::int64_t seed = 1;
    std::array<double, 3> fractions{0.70, 0.15, 0.15};
    std::string manifest_path;
};

struct KnnParams {
    MetricKind metric = MetricKind::BrayCurtis;
    std::size_t k = 14;
    std::size_t k_max = 20;  // upper bound of the k sweeps
};

// Everything one experiment needs, loaded from a JSON config file.
struct ExperimentSpec {
    std::string dataset_path;
    ColumnMapping mapping;
    SplitSpec split;

    RepresentationKind representation = RepresentationKind::Powed;
    double alpha = 60.0;
    double beta = 1.1;
    std::optional<double> tau;

    Method method = Method::Knn;
    KnnParams knn;
    ExtraTreesConfig etrees;
    MlpConfig mlp;

    std::string output_dir = "out";

    void validate() const;  // throws ConfigError
};

ExperimentSpec load_experiment_spec(const std::string& path);
// Same parser on an in-memory document; `origin` names the source in error messages.
ExperimentSpec parse_experiment_spec(const std::string& text, const std::string& origin);

// Dataset plus its train/validation/test partition.
struct PreparedData {
    Dataset dataset;
    SplitManifest split;
};

PreparedData prepare(const ExperimentSpec& spec);

// Whether and how the spreading factor joins the feature vector. kNN uses None
// (distances mix units badly); trees take the raw value; the MLP takes (sf-7)/5.
enum class SfFeature { None, Raw, Normalized };

Matrix assemble_features(const RepresentationConfig& rep, const Dataset& d,
                         std::span<const std::size_t> indices, SfFeature sf);
std::vector<LatLon> collect_targets(const Dataset& d, std::span<const std::size_t> indices);

struct SweepPoint {
    double value = 0.0;
    double val_mean = 0.0;
    double val_median = 0.0;
};

struct SweepResult {
    std::string axis;
    std::vector<SweepPoint> points;     // in grid order
    double best_value = 0.0;            // minimizes val_mean; ties take the smaller value
    ErrorStats val_at_best;
    ErrorStats test_at_best;            // the single test-set touch of the sweep
};

// Fig. 3: exponential representation, alpha in {5, 10, ..., 90}, Bray-Curtis, k=11.
SweepResult sweep_alpha(const ExperimentSpec& spec, const PreparedData& data);
// Fig. 4: powed representation, beta in {0.7, 0.8, ..., 1.7}, Bray-Curtis, k=11.
SweepResult sweep_beta(const ExperimentSpec& spec, const PreparedData& data);

// Validation mean/median for every k in 1..k_max from one shared top-k pass.
// Equivalent to fitting k_max separate models; tests hold the two paths equal.
std::vector<SweepPoint> knn_k_curve(Matrix train_x, std::vector<LatLon> train_y,
                                    const Matrix& val_x, std::span<const LatLon> val_y,
                                    MetricKind metric, std::size_t k_max);

struct Table2Cell {
    MetricKind metric = MetricKind::Euclidean;
    RepresentationKind representation = RepresentationKind::Positive;
    std::size_t best_k = 0;
    double val_mean = 0.0;
    double val_median = 0.0;
};

struct Table2Result {
    std::vector<Table2Cell> cells;  // metrics outer, representations inner
    std::size_t k_max = 0;
};

// Table 2: per (metric, representation) cell, the best k <= k_max by validation mean.
// alpha/beta for the exponential and powed columns are read off the config.
Table2Result sweep_metric_k(const ExperimentSpec& spec, const PreparedData& data,
                            std::span<const MetricKind> metrics,
                            std::span<const RepresentationKind> representations,
                            std::size_t k_max);

// The binarized-distance rows (jaccard, matching, dice, kulsinski). Binarization
// needs zeros to mean "not received", so this runs on the powed representation;
// the exponential one maps the sentinel to a nonzero floor.
Table2Result run_boolean_family(const ExperimentSpec& spec, const PreparedData& data);

struct RunResult {
    Method method = Method::Knn;
    ErrorStats train_stats;
    ErrorStats val_stats;
    ErrorStats test_stats;
    std::vector<LatLon> train_pred;
    std::vector<LatLon> val_pred;
    std::vector<LatLon> test_pred;
    TrainingHistory history;  // filled for the MLP only
};

// Fits the configured method on the training split and evaluates all three splits.
// When spec.output_dir is non-empty, predictions_<split>.csv files are flushed as
// soon as each split is evaluated, so earlier splits survive a later failure;
// the MLP loss history lands in fig5_loss.csv.
RunResult run_experiment(const ExperimentSpec& spec, const PreparedData& data);

}  // namespace lorafp
