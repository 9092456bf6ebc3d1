#pragma once

#include <span>
#include <string>
#include <vector>

namespace lorafp {

// Distance functions between feature vectors. The last four operate on the binarized
// vector: any non-zero entry counts as true.
enum class MetricKind {
    Euclidean,
    Manhattan,
    Chebyshev,
    Hamming,
    Canberra,
    BrayCurtis,
    Jaccard,
    Matching,
    Dice,
    Kulsinski,
};

MetricKind parse_metric(const std::string& name);
std::string to_string(MetricKind kind);

bool is_boolean_metric(MetricKind kind);

inline constexpr MetricKind kTable2Metrics[] = {
    MetricKind::Euclidean, MetricKind::Manhattan, MetricKind::Chebyshev,
    MetricKind::Hamming,   MetricKind::Canberra,  MetricKind::BrayCurtis,
};

inline constexpr MetricKind kBooleanMetrics[] = {
    MetricKind::Jaccard, MetricKind::Matching, MetricKind::Dice, MetricKind::Kulsinski,
};

// Standard definitions; 0/0 terms in canberra and braycurtis count as 0, hamming compares
// for exact inequality. Throws std::invalid_argument on length mismatch or empty input.
double distance(MetricKind kind, std::span<const double> x, std::span<const double> y);

// Unchecked single-metric kernels used by the batch scans.
double euclidean_distance(const double* x, const double* y, std::size_t n);
double manhattan_distance(const double* x, const double* y, std::size_t n);
double chebyshev_distance(const double* x, const double* y, std::size_t n);
double hamming_distance(const double* x, const double* y, std::size_t n);
double canberra_distance(const double* x, const double* y, std::size_t n);
double braycurtis_distance(const double* x, const double* y, std::size_t n);
double jaccard_distance(const double* x, const double* y, std::size_t n);
double matching_distance(const double* x, const double* y, std::size_t n);
double dice_distance(const double* x, const double* y, std::size_t n);
double kulsinski_distance(const double* x, const double* y, std::size_t n);

using MetricFn = double (*)(const double*, const double*, std::size_t);
MetricFn metric_function(MetricKind kind);

}  // namespace lorafp
