#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lorafp/dataset.hpp"
#include "lorafp/matrix.hpp"

namespace lorafp {

enum class RepresentationKind { Positive, Normalized, Exponential, Powed };

RepresentationKind parse_representation(const std::string& name);
std::string to_string(RepresentationKind kind);

// Fitted preprocessing state for one of the four RSSI representations.
// Immutable after fit(); transforms are pure and reentrant.
struct RepresentationConfig {
    RepresentationKind kind = RepresentationKind::Positive;
    double alpha = 24.0;               // exponential scale
    double beta = 2.718281828459045;   // powed exponent, defaults to e
    std::optional<double> tau;         // optional reception threshold (dBm), unset by default
    double train_min = 0.0;            // minimum non-sentinel RSSI in the training set (dBm)
    double train_max = 0.0;            // maximum non-sentinel RSSI in the training set (dBm)
};

// Scans the training fingerprints for the min/max received RSSI and stores the
// parameters verbatim. Throws FitError when no non-sentinel entry exists.
RepresentationConfig fit_representation(RepresentationKind kind, std::span<const Fingerprint> train,
                                        double alpha = 24.0, double beta = 2.718281828459045,
                                        std::optional<double> tau = std::nullopt);

// Fit over an index subset of a dataset (a split's training slice).
RepresentationConfig fit_representation(RepresentationKind kind, const Dataset& d,
                                        std::span<const std::size_t> indices, double alpha = 24.0,
                                        double beta = 2.718281828459045,
                                        std::optional<double> tau = std::nullopt);

// Sentinel -> 0; values below tau (when set) -> 0; otherwise rssi - (train_min - 1),
// which is >= 1 for in-training-range receptions. Out-of-range test values may go
// below zero; nothing is clamped.
double positive_value(const RepresentationConfig& cfg, double rssi);

// positive / (largest positive value seen in training), so the training maximum maps to 1.
double normalized_value(const RepresentationConfig& cfg, double rssi);

// exp(positive/alpha) / exp(-train_min/alpha). The sentinel lands on the strictly
// positive floor exp(train_min/alpha), not 0.
double exponential_value(const RepresentationConfig& cfg, double rssi);

// positive^beta / (-train_min)^beta. For the negative bases that only out-of-range
// test inputs can produce, the signed power -(-p)^beta keeps the map monotone instead
// of yielding NaN.
double powed_value(const RepresentationConfig& cfg, double rssi);

// Dispatch on cfg.kind.
double represent_value(const RepresentationConfig& cfg, double rssi);

// Element-wise representation of one fingerprint's 68 RSSI readings.
std::array<double, kGatewayCount> transform(const RepresentationConfig& cfg, const Fingerprint& fp);

// Batch transform of selected records into the rows of an N x 68 matrix (OpenMP over rows).
Matrix transform_batch(const RepresentationConfig& cfg, const Dataset& d,
                       std::span<const std::size_t> indices);

}  // namespace lorafp
