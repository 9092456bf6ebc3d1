#include "lorafp/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "lorafp/errors.hpp"

namespace lorafp {

MetricKind parse_metric(const std::string& name) {
    if (name == "euclidean") return MetricKind::Euclidean;
    if (name == "manhattan") return MetricKind::Manhattan;
    if (name == "chebyshev") return MetricKind::Chebyshev;
    if (name == "hamming") return MetricKind::Hamming;
    if (name == "canberra") return MetricKind::Canberra;
    if (name == "braycurtis") return MetricKind::BrayCurtis;
    if (name == "jaccard") return MetricKind::Jaccard;
    if (name == "matching") return MetricKind::Matching;
    if (name == "dice") return MetricKind::Dice;
    if (name == "kulsinski") return MetricKind::Kulsinski;
    throw ConfigError("unknown metric: '" + name + "'");
}

std::string to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::Euclidean: return "euclidean";
        case MetricKind::Manhattan: return "manhattan";
        case MetricKind::Chebyshev: return "chebyshev";
        case MetricKind::Hamming: return "hamming";
        case MetricKind::Canberra: return "canberra";
        case MetricKind::BrayCurtis: return "braycurtis";
        case MetricKind::Jaccard: return "jaccard";
        case MetricKind::Matching: return "matching";
        case MetricKind::Dice: return "dice";
        case MetricKind::Kulsinski: return "kulsinski";
    }
    return "?";
}

bool is_boolean_metric(MetricKind kind) {
    return kind == MetricKind::Jaccard || kind == MetricKind::Matching ||
           kind == MetricKind::Dice || kind == MetricKind::Kulsinski;
}

double euclidean_distance(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = x[i] - y[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double manhattan_distance(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(x[i] - y[i]);
    return s;
}

double chebyshev_distance(const double* x, const double* y, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

double hamming_distance(const double* x, const double* y, std::size_t n) {
    std::size_t unequal = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] != y[i]) ++unequal;
    return static_cast<double>(unequal) / static_cast<double>(n);
}

double canberra_distance(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double denom = std::abs(x[i]) + std::abs(y[i]);
        if (denom != 0.0) s += std::abs(x[i] - y[i]) / denom;
    }
    return s;
}

double braycurtis_distance(const double* x, const double* y, std::size_t n) {
    double num = 0.0, denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += std::abs(x[i] - y[i]);
        denom += x[i] + y[i];
    }
    return denom != 0.0 ? num / denom : 0.0;
}

namespace {

struct BoolCounts {
    std::size_t unequal = 0;    // exactly one of the pair is true
    std::size_t both_true = 0;  // both entries true
};

inline BoolCounts binarized_counts(const double* x, const double* y, std::size_t n) {
    BoolCounts c;
    for (std::size_t i = 0; i < n; ++i) {
        bool a = x[i] != 0.0;
        bool b = y[i] != 0.0;
        c.unequal += a != b;
        c.both_true += a && b;
    }
    return c;
}

}  // namespace

double jaccard_distance(const double* x, const double* y, std::size_t n) {
    auto c = binarized_counts(x, y, n);
    std::size_t any_true = c.both_true + c.unequal;
    return any_true != 0 ? static_cast<double>(c.unequal) / static_cast<double>(any_true) : 0.0;
}

double matching_distance(const double* x, const double* y, std::size_t n) {
    auto c = binarized_counts(x, y, n);
    return static_cast<double>(c.unequal) / static_cast<double>(n);
}

double dice_distance(const double* x, const double* y, std::size_t n) {
    auto c = binarized_counts(x, y, n);
    std::size_t denom = 2 * c.both_true + c.unequal;
    return denom != 0 ? static_cast<double>(c.unequal) / static_cast<double>(denom) : 0.0;
}

// Does not vanish at x == y unless every entry is true; that is a property of the
// definition, not a bug.
double kulsinski_distance(const double* x, const double* y, std::size_t n) {
    auto c = binarized_counts(x, y, n);
    return static_cast<double>(c.unequal + n - c.both_true) / static_cast<double>(c.unequal + n);
}

MetricFn metric_function(MetricKind kind) {
    switch (kind) {
        case MetricKind::Euclidean: return euclidean_distance;
        case MetricKind::Manhattan: return manhattan_distance;
        case MetricKind::Chebyshev: return chebyshev_distance;
        case MetricKind::Hamming: return hamming_distance;
        case MetricKind::Canberra: return canberra_distance;
        case MetricKind::BrayCurtis: return braycurtis_distance;
        case MetricKind::Jaccard: return jaccard_distance;
        case MetricKind::Matching: return matching_distance;
        case MetricKind::Dice: return dice_distance;
        case MetricKind::Kulsinski: return kulsinski_distance;
    }
    throw std::invalid_argument("metric_function: bad kind");
}

double distance(MetricKind kind, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("distance: vector lengths differ (" + std::to_string(x.size()) +
                                    " vs " + std::to_string(y.size()) + ")");
    if (x.empty()) throw std::invalid_argument("distance: empty vectors");
    return metric_function(kind)(x.data(), y.data(), x.size());
}

}  // namespace lorafp
