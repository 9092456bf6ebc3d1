#include "lorafp/represent.hpp"

#include <cmath>

#include "lorafp/errors.hpp"

namespace lorafp {

RepresentationKind parse_representation(const std::string& name) {
    if (name == "positive") return RepresentationKind::Positive;
    if (name == "normalized") return RepresentationKind::Normalized;
    if (name == "exponential") return RepresentationKind::Exponential;
    if (name == "powed") return RepresentationKind::Powed;
    throw ConfigError("unknown representation kind: '" + name + "'");
}

std::string to_string(RepresentationKind kind) {
    switch (kind) {
        case RepresentationKind::Positive: return "positive";
        case RepresentationKind::Normalized: return "normalized";
        case RepresentationKind::Exponential: return "exponential";
        case RepresentationKind::Powed: return "powed";
    }
    return "?";
}

RepresentationConfig fit_representation(RepresentationKind kind, std::span<const Fingerprint> train,
                                        double alpha, double beta, std::optional<double> tau) {
    if (!(alpha > 0.0)) throw ConfigError("representation alpha must be positive");
    if (!(beta > 0.0)) throw ConfigError("representation beta must be positive");

    RepresentationConfig cfg;
    cfg.kind = kind;
    cfg.alpha = alpha;
    cfg.beta = beta;
    cfg.tau = tau;

    bool any = false;
    for (const auto& fp : train) {
        for (double v : fp.rssi) {
            if (is_sentinel(v)) continue;
            if (!any) {
                cfg.train_min = cfg.train_max = v;
                any = true;
            } else {
                cfg.train_min = std::min(cfg.train_min, v);
                cfg.train_max = std::max(cfg.train_max, v);
            }
        }
    }
    if (!any) throw FitError("representation fit: training set contains no received RSSI values");
    return cfg;
}

RepresentationConfig fit_representation(RepresentationKind kind, const Dataset& d,
                                        std::span<const std::size_t> indices, double alpha,
                                        double beta, std::optional<double> tau) {
    if (!(alpha > 0.0)) throw ConfigError("representation alpha must be positive");
    if (!(beta > 0.0)) throw ConfigError("representation beta must be positive");

    RepresentationConfig cfg;
    cfg.kind = kind;
    cfg.alpha = alpha;
    cfg.beta = beta;
    cfg.tau = tau;

    bool any = false;
    for (std::size_t idx : indices) {
        for (double v : d.records[idx].rssi) {
            if (is_sentinel(v)) continue;
            if (!any) {
                cfg.train_min = cfg.train_max = v;
                any = true;
            } else {
                cfg.train_min = std::min(cfg.train_min, v);
                cfg.train_max = std::max(cfg.train_max, v);
            }
        }
    }
    if (!any) throw FitError("representation fit: training set contains no received RSSI values");
    return cfg;
}

double positive_value(const RepresentationConfig& cfg, double rssi) {
    if (is_sentinel(rssi)) return 0.0;
    if (cfg.tau && rssi < *cfg.tau) return 0.0;
    return rssi - (cfg.train_min - 1.0);
}

double normalized_value(const RepresentationConfig& cfg, double rssi) {
    double max_positive = cfg.train_max - (cfg.train_min - 1.0);
    return positive_value(cfg, rssi) / max_positive;
}

double exponential_value(const RepresentationConfig& cfg, double rssi) {
    return std::exp(positive_value(cfg, rssi) / cfg.alpha) / std::exp(-cfg.train_min / cfg.alpha);
}

double powed_value(const RepresentationConfig& cfg, double rssi) {
    double p = positive_value(cfg, rssi);
    double num = p >= 0.0 ? std::pow(p, cfg.beta) : -std::pow(-p, cfg.beta);
    return num / std::pow(-cfg.train_min, cfg.beta);
}

double represent_value(const RepresentationConfig& cfg, double rssi) {
    switch (cfg.kind) {
        case RepresentationKind::Positive: return positive_value(cfg, rssi);
        case RepresentationKind::Normalized: return normalized_value(cfg, rssi);
        case RepresentationKind::Exponential: return exponential_value(cfg, rssi);
        case RepresentationKind::Powed: return powed_value(cfg, rssi);
    }
    return 0.0;
}

std::array<double, kGatewayCount> transform(const RepresentationConfig& cfg, const Fingerprint& fp) {
    std::array<double, kGatewayCount> out;
    for (std::size_t g = 0; g < kGatewayCount; ++g) out[g] = represent_value(cfg, fp.rssi[g]);
    return out;
}

Matrix transform_batch(const RepresentationConfig& cfg, const Dataset& d,
                       std::span<const std::size_t> indices) {
    Matrix features(indices.size(), kGatewayCount);
    const auto n = static_cast<std::ptrdiff_t>(indices.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        auto row = features.row(static_cast<std::size_t>(i));
        const auto& fp = d.records[indices[static_cast<std::size_t>(i)]];
        for (std::size_t g = 0; g < kGatewayCount; ++g) row[g] = represent_value(cfg, fp.rssi[g]);
    }
    return features;
}

}  // namespace lorafp
