#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lorafp/eval.hpp"
#include "lorafp/matrix.hpp"

namespace lorafp {

// Feed-forward position regressor: every hidden layer is affine -> batch-norm ->
// ReLU -> inverted dropout; the output layer is affine only. Trained with Adam on
// mean squared error over standardized coordinates, optional L2 on the weight
// matrices, and early stopping on validation loss.
struct MlpConfig {
    std::vector<std::size_t> layer_widths = {1024, 1024, 1024, 256, 128, 128, 2};
    std::size_t input_width = 69;
    double dropout_rate = 0.15;
    double l2_lambda = 0.0;
    double learning_rate = 1e-3;
    std::size_t batch_size = 256;
    std::size_t max_epochs = 2000;
    std::size_t patience = 50;  // tolerated epochs without val improvement before stopping
    std::uint64_t seed = 1;

    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;

    void validate() const;
};

// One affine layer plus, for hidden layers, its batch-norm state.
struct MlpLayer {
    Matrix weights;  // out_width x in_width
    std::vector<double> bias;

    bool has_batchnorm = false;
    std::vector<double> gamma;         // scale
    std::vector<double> delta;         // shift
    std::vector<double> running_mean;  // inference statistics
    std::vector<double> running_var;

    std::size_t in_width() const { return weights.cols(); }
    std::size_t out_width() const { return weights.rows(); }

    bool operator==(const MlpLayer&) const = default;
};

// Per-output standardization fitted on the training targets.
struct TargetScaler {
    double mean[2] = {0.0, 0.0};
    double stddev[2] = {1.0, 1.0};

    bool operator==(const TargetScaler&) const = default;
};

struct MlpModel {
    MlpConfig config;
    std::vector<MlpLayer> layers;
    TargetScaler target_scaler;
    // Spreading-factor input normalization (sf - offset) / scale, applied by callers
    // when assembling feature rows; stored so a serialized model is self-describing.
    double sf_offset = 7.0;
    double sf_scale = 5.0;

    static MlpModel build(const MlpConfig& cfg);

    std::size_t input_width() const { return layers.front().in_width(); }

    // Inference: dropout off, batch-norm running statistics, output de-standardized.
    LatLon predict(std::span<const double> query) const;
    std::vector<LatLon> predict_batch(const Matrix& queries) const;

    // Inference-mode forward pass in standardized output space, batch at a time.
    Matrix forward_inference(const Matrix& input) const;

    // Mean squared error (standardized space) of inference-mode predictions.
    double evaluate_mse(const Matrix& input, std::span<const LatLon> targets) const;
};

struct TrainingHistory {
    std::vector<double> train_loss;  // per epoch: mean batch loss incl. L2 term, training mode
    std::vector<double> val_loss;    // per epoch: inference-mode MSE on the validation set
    std::size_t best_epoch = 0;      // 1-based epoch achieving the minimum val_loss

    bool operator==(const TrainingHistory&) const = default;
};

// Stop once the monitored loss has failed to improve for more than `patience`
// consecutive epochs. Improvement is a strict decrease.
class EarlyStopper {
public:
    explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

    // Feed one epoch's loss; returns true when training should stop after this epoch.
    bool update(double loss, std::size_t epoch);

    bool improved_last_update() const { return improved_; }
    double best_loss() const { return best_loss_; }
    std::size_t best_epoch() const { return best_epoch_; }

private:
    std::size_t patience_;
    double best_loss_ = 0.0;
    std::size_t best_epoch_ = 0;
    std::size_t since_best_ = 0;
    bool improved_ = false;
    bool seen_any_ = false;
};

struct TrainResult {
    MlpModel model;  // state from the best epoch (weights, batch-norm statistics)
    TrainingHistory history;
};

// Trains `model` on (train_x, train_y) with (val_x, val_y) steering early stopping.
// Mini-batches are reshuffled every epoch from the model seed; all randomness is
// drawn in a fixed serial order, so the result is reproducible bit-for-bit.
// Throws FitError with the epoch number if the loss turns non-finite.
TrainResult train_mlp(MlpModel model, const Matrix& train_x, std::span<const LatLon> train_y,
                      const Matrix& val_x, std::span<const LatLon> val_y);

// Maximum relative discrepancy between analytic gradients and central finite
// differences (step 1e-5) over every parameter, on one batch with dropout disabled
// and batch-norm using batch statistics. Discrepancies under 1e-7 absolute count as
// agreement, so structurally-zero gradients don't score their roundoff dust.
double gradient_check(const MlpModel& model, const Matrix& batch_x, std::span<const LatLon> batch_y);

// Self-contained binary container: config, widths, all parameters, running statistics,
// scalers. Round-trips predictions bit-exactly.
void save_mlp(const MlpModel& model, const std::string& path);
MlpModel load_mlp(const std::string& path);

// Training internals exposed for white-box tests (batch-norm statistics, dropout
// expectation, gradient assembly).
namespace detail {

struct LayerTrace {
    Matrix affine;   // X W^T + b
    Matrix normed;   // batch-norm output (== affine when the layer has no BN)
    Matrix active;   // after ReLU
    Matrix dropped;  // after dropout (== active when dropout is off)
    std::vector<double> batch_mean;
    std::vector<double> batch_var;  // population variance
    std::vector<double> inv_std;
    Matrix dropout_mask;  // scaled mask actually applied
};

struct ForwardTrace {
    std::vector<LayerTrace> layers;
    Matrix output;  // standardized-space predictions
};

// Training-mode forward pass. `dropout_rng` null disables dropout; when
// `update_running_stats` is set the model's running statistics absorb this batch.
ForwardTrace forward_train(MlpModel& model, const Matrix& input, void* dropout_rng,
                           bool update_running_stats);

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> bias;
    std::vector<std::vector<double>> gamma;
    std::vector<std::vector<double>> delta;
};

// Loss (MSE + L2) and its gradients for one training-mode forward trace.
double backward(const MlpModel& model, const ForwardTrace& trace, const Matrix& input,
                const Matrix& std_targets, Gradients& grads);

Matrix standardize_targets(const TargetScaler& scaler, std::span<const LatLon> targets);

}  // namespace detail

}  // namespace lorafp
