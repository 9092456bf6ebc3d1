#include "lorafp/neural.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "lorafp/errors.hpp"
#include "lorafp/kernels.hpp"
#include "lorafp/rng.hpp"

namespace lorafp {

namespace {

constexpr double kBnEpsilon = 1e-5;
constexpr double kBnMomentum = 0.9;  // running = momentum * running + (1 - momentum) * batch

void check_positive(double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
}

}  // namespace

void MlpConfig::validate() const {
    if (layer_widths.empty()) throw ConfigError("layer_widths must not be empty");
    for (std::size_t w : layer_widths)
        if (w == 0) throw ConfigError("layer widths must be positive");
    if (layer_widths.back() != 2)
        throw ConfigError("the output layer must have width 2 (latitude, longitude)");
    if (input_width == 0) throw ConfigError("input_width must be positive");
    if (!(dropout_rate >= 0.0) || dropout_rate >= 1.0)
        throw ConfigError("dropout_rate must lie in [0, 1)");
    if (!(l2_lambda >= 0.0)) throw ConfigError("l2_lambda must be non-negative");
    check_positive(learning_rate, "learning_rate");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (max_epochs == 0) throw ConfigError("max_epochs must be positive");
    if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) || !(adam_beta2 > 0.0 && adam_beta2 < 1.0))
        throw ConfigError("adam betas must lie in (0, 1)");
    check_positive(adam_epsilon, "adam_epsilon");
}

MlpModel MlpModel::build(const MlpConfig& cfg) {
    cfg.validate();
    MlpModel model;
    model.config = cfg;
    model.layers.resize(cfg.layer_widths.size());

    Rng init_rng(derive_seed(cfg.seed, 0));
    std::size_t in = cfg.input_width;
    for (std::size_t l = 0; l < cfg.layer_widths.size(); ++l) {
        MlpLayer& layer = model.layers[l];
        const std::size_t out = cfg.layer_widths[l];
        layer.weights = Matrix(out, in);
        layer.bias.assign(out, 0.0);

        // He-uniform: U(-limit, limit) with limit = sqrt(6 / fan_in), suited to ReLU.
        const double limit = std::sqrt(6.0 / static_cast<double>(in));
        for (std::size_t r = 0; r < out; ++r)
            for (std::size_t c = 0; c < in; ++c)
                layer.weights(r, c) = (2.0 * uniform_unit(init_rng) - 1.0) * limit;

        layer.has_batchnorm = l + 1 < cfg.layer_widths.size();
        if (layer.has_batchnorm) {
            layer.gamma.assign(out, 1.0);
            layer.delta.assign(out, 0.0);
            layer.running_mean.assign(out, 0.0);
            layer.running_var.assign(out, 1.0);
        }
        in = out;
    }
    return model;
}

namespace detail {

Matrix standardize_targets(const TargetScaler& scaler, std::span<const LatLon> targets) {
    Matrix out(targets.size(), 2);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        out(i, 0) = (targets[i].lat - scaler.mean[0]) / scaler.stddev[0];
        out(i, 1) = (targets[i].lon - scaler.mean[1]) / scaler.stddev[1];
    }
    return out;
}

ForwardTrace forward_train(MlpModel& model, const Matrix& input, void* dropout_rng,
                           bool update_running_stats) {
    ForwardTrace trace;
    trace.layers.resize(model.layers.size());
    const std::size_t batch = input.rows();
    auto* rng = static_cast<Rng*>(dropout_rng);
    const double rate = model.config.dropout_rate;

    const Matrix* current = &input;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        MlpLayer& layer = model.layers[l];
        LayerTrace& lt = trace.layers[l];
        const std::size_t width = layer.out_width();

        lt.affine = gemm_nt(*current, layer.weights);
        for (std::size_t i = 0; i < batch; ++i)
            for (std::size_t j = 0; j < width; ++j) lt.affine(i, j) += layer.bias[j];

        if (!layer.has_batchnorm) {  // output layer: affine only
            trace.output = lt.affine;
            lt.normed = lt.affine;
            lt.active = lt.affine;
            lt.dropped = lt.affine;
            break;
        }

        // Batch-norm over the batch dimension, population variance.
        lt.batch_mean.assign(width, 0.0);
        lt.batch_var.assign(width, 0.0);
        lt.inv_std.assign(width, 0.0);
        const double inv_batch = 1.0 / static_cast<double>(batch);
        for (std::size_t j = 0; j < width; ++j) {
            double sum = 0.0;
            for (std::size_t i = 0; i < batch; ++i) sum += lt.affine(i, j);
            lt.batch_mean[j] = sum * inv_batch;
        }
        for (std::size_t j = 0; j < width; ++j) {
            double sumsq = 0.0;
            for (std::size_t i = 0; i < batch; ++i) {
                const double d = lt.affine(i, j) - lt.batch_mean[j];
                sumsq += d * d;
            }
            lt.batch_var[j] = sumsq * inv_batch;
            lt.inv_std[j] = 1.0 / std::sqrt(lt.batch_var[j] + kBnEpsilon);
        }
        if (update_running_stats) {
            for (std::size_t j = 0; j < width; ++j) {
                layer.running_mean[j] =
                    kBnMomentum * layer.running_mean[j] + (1.0 - kBnMomentum) * lt.batch_mean[j];
                layer.running_var[j] =
                    kBnMomentum * layer.running_var[j] + (1.0 - kBnMomentum) * lt.batch_var[j];
            }
        }

        lt.normed = Matrix(batch, width);
        for (std::size_t i = 0; i < batch; ++i)
            for (std::size_t j = 0; j < width; ++j)
                lt.normed(i, j) = layer.gamma[j] * (lt.affine(i, j) - lt.batch_mean[j]) *
                                      lt.inv_std[j] +
                                  layer.delta[j];

        lt.active = Matrix(batch, width);
        for (std::size_t i = 0; i < batch; ++i)
            for (std::size_t j = 0; j < width; ++j)
                lt.active(i, j) = lt.normed(i, j) > 0.0 ? lt.normed(i, j) : 0.0;

        // Inverted dropout: surviving units are scaled by 1/keep so the expected
        // activation matches inference. Mask drawn row-major, one draw per unit.
        if (rng != nullptr && rate > 0.0) {
            const double keep = 1.0 - rate;
            lt.dropout_mask = Matrix(batch, width);
            lt.dropped = Matrix(batch, width);
            for (std::size_t i = 0; i < batch; ++i)
                for (std::size_t j = 0; j < width; ++j) {
                    const double m = uniform_unit(*rng) < rate ? 0.0 : 1.0 / keep;
                    lt.dropout_mask(i, j) = m;
                    lt.dropped(i, j) = lt.active(i, j) * m;
                }
        } else {
            lt.dropped = lt.active;
        }
        current = &lt.dropped;
    }
    return trace;
}

double backward(const MlpModel& model, const ForwardTrace& trace, const Matrix& input,
                const Matrix& std_targets, Gradients& grads) {
    const std::size_t batch = input.rows();
    const std::size_t n_layers = model.layers.size();
    grads.weights.resize(n_layers);
    grads.bias.resize(n_layers);
    grads.gamma.resize(n_layers);
    grads.delta.resize(n_layers);

    // Data term: MSE averaged over batch and both outputs.
    double data_loss = 0.0;
    Matrix grad(batch, 2);
    const double inv_count = 1.0 / static_cast<double>(batch * 2);
    for (std::size_t i = 0; i < batch; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            const double diff = trace.output(i, j) - std_targets(i, j);
            data_loss += diff * diff;
            grad(i, j) = 2.0 * diff * inv_count;
        }
    data_loss *= inv_count;

    double l2_loss = 0.0;
    if (model.config.l2_lambda > 0.0) {
        for (const MlpLayer& layer : model.layers) {
            double sq = 0.0;
            for (std::size_t k = 0; k < layer.weights.rows() * layer.weights.cols(); ++k)
                sq += layer.weights.data()[k] * layer.weights.data()[k];
            l2_loss += sq;
        }
        l2_loss *= model.config.l2_lambda;
    }

    // `grad` enters layer l as the gradient with respect to its (post-dropout) output.
    for (std::size_t li = n_layers; li-- > 0;) {
        const MlpLayer& layer = model.layers[li];
        const LayerTrace& lt = trace.layers[li];
        const std::size_t width = layer.out_width();
        const Matrix& layer_input = li == 0 ? input : trace.layers[li - 1].dropped;

        Matrix d_affine;
        if (!layer.has_batchnorm) {
            d_affine = std::move(grad);
        } else {
            // Through dropout and ReLU into the batch-norm output.
            Matrix d_normed(batch, width);
            const bool masked = lt.dropout_mask.rows() == batch;
            for (std::size_t i = 0; i < batch; ++i)
                for (std::size_t j = 0; j < width; ++j) {
                    double g = grad(i, j);
                    if (masked) g *= lt.dropout_mask(i, j);
                    d_normed(i, j) = lt.normed(i, j) > 0.0 ? g : 0.0;
                }

            grads.gamma[li].assign(width, 0.0);
            grads.delta[li].assign(width, 0.0);
            d_affine = Matrix(batch, width);
            const double inv_batch = 1.0 / static_cast<double>(batch);
            for (std::size_t j = 0; j < width; ++j) {
                double sum_q = 0.0;
                double sum_qz = 0.0;
                double sum_g = 0.0;
                double sum_gz = 0.0;
                for (std::size_t i = 0; i < batch; ++i) {
                    const double zhat = (lt.affine(i, j) - lt.batch_mean[j]) * lt.inv_std[j];
                    const double q = d_normed(i, j) * layer.gamma[j];
                    sum_q += q;
                    sum_qz += q * zhat;
                    sum_g += d_normed(i, j);
                    sum_gz += d_normed(i, j) * zhat;
                }
                grads.delta[li][j] = sum_g;
                grads.gamma[li][j] = sum_gz;
                for (std::size_t i = 0; i < batch; ++i) {
                    const double zhat = (lt.affine(i, j) - lt.batch_mean[j]) * lt.inv_std[j];
                    const double q = d_normed(i, j) * layer.gamma[j];
                    d_affine(i, j) =
                        lt.inv_std[j] * inv_batch *
                        (static_cast<double>(batch) * q - sum_q - zhat * sum_qz);
                }
            }
        }

        grads.weights[li] = gemm_tn(d_affine, layer_input);
        if (model.config.l2_lambda > 0.0) {
            const double two_lambda = 2.0 * model.config.l2_lambda;
            for (std::size_t k = 0; k < grads.weights[li].rows() * grads.weights[li].cols(); ++k)
                grads.weights[li].data()[k] += two_lambda * layer.weights.data()[k];
        }
        grads.bias[li].assign(width, 0.0);
        for (std::size_t j = 0; j < width; ++j) {
            double sum = 0.0;
            for (std::size_t i = 0; i < batch; ++i) sum += d_affine(i, j);
            grads.bias[li][j] = sum;
        }
        if (li > 0) grad = gemm_nn(d_affine, layer.weights);
    }
    return data_loss + l2_loss;
}

}  // namespace detail

Matrix MlpModel::forward_inference(const Matrix& input) const {
    if (input.cols() != input_width())
        throw ConfigError("query width " + std::to_string(input.cols()) +
                          " does not match the model input width " +
                          std::to_string(input_width()));
    Matrix current = input;
    for (const MlpLayer& layer : layers) {
        Matrix next = gemm_nt(current, layer.weights);
        const std::size_t width = layer.out_width();
        for (std::size_t i = 0; i < next.rows(); ++i)
            for (std::size_t j = 0; j < width; ++j) next(i, j) += layer.bias[j];
        if (layer.has_batchnorm) {
            for (std::size_t j = 0; j < width; ++j) {
                const double inv_std = 1.0 / std::sqrt(layer.running_var[j] + kBnEpsilon);
                const double scale = layer.gamma[j] * inv_std;
                const double shift = layer.delta[j] - layer.running_mean[j] * scale;
                for (std::size_t i = 0; i < next.rows(); ++i) {
                    const double v = next(i, j) * scale + shift;
                    next(i, j) = v > 0.0 ? v : 0.0;
                }
            }
        }
        current = std::move(next);
    }
    return current;
}

LatLon MlpModel::predict(std::span<const double> query) const {
    Matrix one(1, query.size());
    std::copy(query.begin(), query.end(), one.data());
    return predict_batch(one).front();
}

std::vector<LatLon> MlpModel::predict_batch(const Matrix& queries) const {
    const Matrix out = forward_inference(queries);
    std::vector<LatLon> result(out.rows());
    for (std::size_t i = 0; i < out.rows(); ++i) {
        result[i].lat = out(i, 0) * target_scaler.stddev[0] + target_scaler.mean[0];
        result[i].lon = out(i, 1) * target_scaler.stddev[1] + target_scaler.mean[1];
    }
    return result;
}

double MlpModel::evaluate_mse(const Matrix& input, std::span<const LatLon> targets) const {
    if (input.rows() != targets.size())
        throw ConfigError("evaluate_mse: row count does not match target count");
    if (input.rows() == 0) throw ConfigError("evaluate_mse: empty input");
    const Matrix out = forward_inference(input);
    const Matrix std_t = detail::standardize_targets(target_scaler, targets);
    double sum = 0.0;
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            const double d = out(i, j) - std_t(i, j);
            sum += d * d;
        }
    return sum / static_cast<double>(out.rows() * 2);
}

bool EarlyStopper::update(double loss, std::size_t epoch) {
    if (!seen_any_ || loss < best_loss_) {
        seen_any_ = true;
        best_loss_ = loss;
        best_epoch_ = epoch;
        since_best_ = 0;
        improved_ = true;
        return false;
    }
    improved_ = false;
    ++since_best_;
    return since_best_ > patience_;
}

namespace {

TargetScaler fit_target_scaler(std::span<const LatLon> targets) {
    TargetScaler scaler;
    const double inv_n = 1.0 / static_cast<double>(targets.size());
    double sum[2] = {0.0, 0.0};
    for (const LatLon& t : targets) {
        sum[0] += t.lat;
        sum[1] += t.lon;
    }
    scaler.mean[0] = sum[0] * inv_n;
    scaler.mean[1] = sum[1] * inv_n;
    double sq[2] = {0.0, 0.0};
    for (const LatLon& t : targets) {
        const double dlat = t.lat - scaler.mean[0];
        const double dlon = t.lon - scaler.mean[1];
        sq[0] += dlat * dlat;
        sq[1] += dlon * dlon;
    }
    for (int j = 0; j < 2; ++j) {
        const double sd = std::sqrt(sq[j] * inv_n);
        scaler.stddev[j] = sd > 0.0 && std::isfinite(sd) ? sd : 1.0;
    }
    return scaler;
}

// Adam moment estimates, one slot per parameter tensor.
struct AdamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    std::size_t step = 0;

    void add_slot(std::size_t size) {
        m.emplace_back(size, 0.0);
        v.emplace_back(size, 0.0);
    }
};

void adam_update(double* param, const double* grad, std::size_t n, std::vector<double>& m,
                 std::vector<double>& v, const MlpConfig& cfg, double bias1, double bias2) {
    for (std::size_t k = 0; k < n; ++k) {
        m[k] = cfg.adam_beta1 * m[k] + (1.0 - cfg.adam_beta1) * grad[k];
        v[k] = cfg.adam_beta2 * v[k] + (1.0 - cfg.adam_beta2) * grad[k] * grad[k];
        const double mhat = m[k] / bias1;
        const double vhat = v[k] / bias2;
        param[k] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_epsilon);
    }
}

}  // namespace

TrainResult train_mlp(MlpModel model, const Matrix& train_x, std::span<const LatLon> train_y,
                      const Matrix& val_x, std::span<const LatLon> val_y) {
    if (train_x.rows() == 0) throw ConfigError("training set is empty");
    if (val_x.rows() == 0) throw ConfigError("validation set is empty");
    if (train_x.rows() != train_y.size() || val_x.rows() != val_y.size())
        throw ConfigError("feature rows and target counts do not match");
    if (train_x.cols() != model.input_width() || val_x.cols() != model.input_width())
        throw ConfigError("feature width does not match the model input width");

    const MlpConfig& cfg = model.config;
    model.target_scaler = fit_target_scaler(train_y);
    const Matrix std_train = detail::standardize_targets(model.target_scaler, train_y);

    Rng shuffle_rng(derive_seed(cfg.seed, 1));
    Rng dropout_rng(derive_seed(cfg.seed, 2));

    AdamState adam;
    for (const MlpLayer& layer : model.layers) {
        adam.add_slot(layer.weights.rows() * layer.weights.cols());
        adam.add_slot(layer.bias.size());
        if (layer.has_batchnorm) {
            adam.add_slot(layer.gamma.size());
            adam.add_slot(layer.delta.size());
        }
    }

    const std::size_t n = train_x.rows();
    const std::size_t d = train_x.cols();
    TrainResult result;
    EarlyStopper stopper(cfg.patience);
    std::vector<MlpLayer> best_layers = model.layers;

    detail::Gradients grads;
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const std::vector<std::size_t> perm = random_permutation(n, shuffle_rng);

        double loss_sum = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t count = std::min(cfg.batch_size, n - start);
            Matrix batch_x(count, d);
            Matrix batch_t(count, 2);
            for (std::size_t i = 0; i < count; ++i) {
                const std::size_t src = perm[start + i];
                std::copy(train_x.row(src).begin(), train_x.row(src).end(),
                          batch_x.data() + i * d);
                batch_t(i, 0) = std_train(src, 0);
                batch_t(i, 1) = std_train(src, 1);
            }

            detail::ForwardTrace trace = detail::forward_train(model, batch_x, &dropout_rng, true);
            const double loss = detail::backward(model, trace, batch_x, batch_t, grads);
            loss_sum += loss;
            ++n_batches;

            ++adam.step;
            const double bias1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(adam.step));
            const double bias2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(adam.step));
            std::size_t slot = 0;
            for (std::size_t l = 0; l < model.layers.size(); ++l) {
                MlpLayer& layer = model.layers[l];
                adam_update(layer.weights.data(), grads.weights[l].data(),
                            layer.weights.rows() * layer.weights.cols(), adam.m[slot],
                            adam.v[slot], cfg, bias1, bias2);
                ++slot;
                adam_update(layer.bias.data(), grads.bias[l].data(), layer.bias.size(),
                            adam.m[slot], adam.v[slot], cfg, bias1, bias2);
                ++slot;
                if (layer.has_batchnorm) {
                    adam_update(layer.gamma.data(), grads.gamma[l].data(), layer.gamma.size(),
                                adam.m[slot], adam.v[slot], cfg, bias1, bias2);
                    ++slot;
                    adam_update(layer.delta.data(), grads.delta[l].data(), layer.delta.size(),
                                adam.m[slot], adam.v[slot], cfg, bias1, bias2);
                    ++slot;
                }
            }
        }

        const double train_loss = loss_sum / static_cast<double>(n_batches);
        const double val_loss = model.evaluate_mse(val_x, val_y);
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
            throw FitError("loss became non-finite at epoch " + std::to_string(epoch));
        result.history.train_loss.push_back(train_loss);
        result.history.val_loss.push_back(val_loss);

        const bool stop = stopper.update(val_loss, epoch);
        if (stopper.improved_last_update()) best_layers = model.layers;
        if (stop) break;
    }

    model.layers = std::move(best_layers);
    result.history.best_epoch = stopper.best_epoch();
    result.model = std::move(model);
    return result;
}

double gradient_check(const MlpModel& model, const Matrix& batch_x,
                      std::span<const LatLon> batch_y) {
    MlpModel work = model;
    const Matrix std_t = detail::standardize_targets(work.target_scaler, batch_y);

    // Dropout off, batch statistics, running statistics untouched: the loss is then a
    // deterministic function of the parameters, which finite differences require.
    detail::ForwardTrace trace = detail::forward_train(work, batch_x, nullptr, false);
    detail::Gradients grads;
    detail::backward(work, trace, batch_x, std_t, grads);

    auto loss_at = [&]() {
        detail::ForwardTrace t = detail::forward_train(work, batch_x, nullptr, false);
        detail::Gradients unused;
        return detail::backward(work, t, batch_x, std_t, unused);
    };

    const double h = 1e-5;
    double worst = 0.0;
    auto probe = [&](double* param, const double* analytic, std::size_t count) {
        for (std::size_t k = 0; k < count; ++k) {
            const double saved = param[k];
            param[k] = saved + h;
            const double lp = loss_at();
            param[k] = saved - h;
            const double lm = loss_at();
            param[k] = saved;
            const double numeric = (lp - lm) / (2.0 * h);
            const double diff = std::abs(analytic[k] - numeric);
            // Absolute agreement means agreement. Without this, parameters whose true
            // gradient is exactly zero (a bias feeding batch-norm is cancelled by the
            // mean subtraction) divide finite-difference cancellation dust by the
            // small-denominator floor and report a bogus relative error.
            if (diff < 1e-7) continue;
            const double denom = std::max(std::abs(analytic[k]) + std::abs(numeric), 1e-4);
            worst = std::max(worst, diff / denom);
        }
    };

    for (std::size_t l = 0; l < work.layers.size(); ++l) {
        MlpLayer& layer = work.layers[l];
        probe(layer.weights.data(), grads.weights[l].data(),
              layer.weights.rows() * layer.weights.cols());
        probe(layer.bias.data(), grads.bias[l].data(), layer.bias.size());
        if (layer.has_batchnorm) {
            probe(layer.gamma.data(), grads.gamma[l].data(), layer.gamma.size());
            probe(layer.delta.data(), grads.delta[l].data(), layer.delta.size());
        }
    }
    return worst;
}

namespace {

constexpr char kMlpMagic[8] = {'L', 'F', 'P', 'M', 'L', 'P', '1', '\n'};

void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_f64(std::ostream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_doubles(std::ostream& out, const double* data, std::size_t n) {
    write_u64(out, n);
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

double read_f64(std::istream& in) {
    double v = 0.0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

std::vector<double> read_doubles(std::istream& in) {
    const std::uint64_t n = read_u64(in);
    if (n > (1ull << 32)) throw IoError("model file is corrupt: implausible array length");
    std::vector<double> data(n);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(n * sizeof(double)));
    return data;
}

}  // namespace

void save_mlp(const MlpModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(kMlpMagic, sizeof kMlpMagic);

    const MlpConfig& cfg = model.config;
    write_u64(out, cfg.layer_widths.size());
    for (std::size_t w : cfg.layer_widths) write_u64(out, w);
    write_u64(out, cfg.input_width);
    write_f64(out, cfg.dropout_rate);
    write_f64(out, cfg.l2_lambda);
    write_f64(out, cfg.learning_rate);
    write_u64(out, cfg.batch_size);
    write_u64(out, cfg.max_epochs);
    write_u64(out, cfg.patience);
    write_u64(out, cfg.seed);
    write_f64(out, cfg.adam_beta1);
    write_f64(out, cfg.adam_beta2);
    write_f64(out, cfg.adam_epsilon);

    for (const MlpLayer& layer : model.layers) {
        write_u64(out, layer.out_width());
        write_u64(out, layer.in_width());
        write_doubles(out, layer.weights.data(), layer.weights.rows() * layer.weights.cols());
        write_doubles(out, layer.bias.data(), layer.bias.size());
        write_u64(out, layer.has_batchnorm ? 1 : 0);
        if (layer.has_batchnorm) {
            write_doubles(out, layer.gamma.data(), layer.gamma.size());
            write_doubles(out, layer.delta.data(), layer.delta.size());
            write_doubles(out, layer.running_mean.data(), layer.running_mean.size());
            write_doubles(out, layer.running_var.data(), layer.running_var.size());
        }
    }
    for (int j = 0; j < 2; ++j) write_f64(out, model.target_scaler.mean[j]);
    for (int j = 0; j < 2; ++j) write_f64(out, model.target_scaler.stddev[j]);
    write_f64(out, model.sf_offset);
    write_f64(out, model.sf_scale);
    if (!out) throw IoError("failed while writing " + path);
}

MlpModel load_mlp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char magic[8] = {};
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMlpMagic, sizeof kMlpMagic) != 0)
        throw IoError(path + " is not a recognized model file");

    MlpModel model;
    MlpConfig& cfg = model.config;
    const std::uint64_t n_layers = read_u64(in);
    if (n_layers == 0 || n_layers > 1024) throw IoError("model file is corrupt: layer count");
    cfg.layer_widths.resize(n_layers);
    for (std::uint64_t l = 0; l < n_layers; ++l) cfg.layer_widths[l] = read_u64(in);
    cfg.input_width = read_u64(in);
    cfg.dropout_rate = read_f64(in);
    cfg.l2_lambda = read_f64(in);
    cfg.learning_rate = read_f64(in);
    cfg.batch_size = read_u64(in);
    cfg.max_epochs = read_u64(in);
    cfg.patience = read_u64(in);
    cfg.seed = read_u64(in);
    cfg.adam_beta1 = read_f64(in);
    cfg.adam_beta2 = read_f64(in);
    cfg.adam_epsilon = read_f64(in);

    model.layers.resize(n_layers);
    for (std::uint64_t l = 0; l < n_layers; ++l) {
        MlpLayer& layer = model.layers[l];
        const std::uint64_t out_w = read_u64(in);
        const std::uint64_t in_w = read_u64(in);
        std::vector<double> w = read_doubles(in);
        if (w.size() != out_w * in_w) throw IoError("model file is corrupt: weight shape");
        layer.weights = Matrix(out_w, in_w);
        std::copy(w.begin(), w.end(), layer.weights.data());
        layer.bias = read_doubles(in);
        layer.has_batchnorm = read_u64(in) != 0;
        if (layer.has_batchnorm) {
            layer.gamma = read_doubles(in);
            layer.delta = read_doubles(in);
            layer.running_mean = read_doubles(in);
            layer.running_var = read_doubles(in);
        }
    }
    for (int j = 0; j < 2; ++j) model.target_scaler.mean[j] = read_f64(in);
    for (int j = 0; j < 2; ++j) model.target_scaler.stddev[j] = read_f64(in);
    model.sf_offset = read_f64(in);
    model.sf_scale = read_f64(in);
    if (!in) throw IoError(path + " is truncated");
    return model;
}

}  // namespace lorafp
