#include "lorafp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lorafp {

double haversine_m(const LatLon& a, const LatLon& b) {
    constexpr double deg = std::numbers::pi / 180.0;
    double phi1 = a.lat * deg;
    double phi2 = b.lat * deg;
    double dphi = (b.lat - a.lat) * deg;
    double dlambda = (b.lon - a.lon) * deg;
    double s1 = std::sin(dphi / 2.0);
    double s2 = std::sin(dlambda / 2.0);
    double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(h)));
}

std::vector<double> haversine_errors(std::span<const LatLon> predictions,
                                     std::span<const LatLon> truths) {
    if (predictions.size() != truths.size())
        throw std::invalid_argument("haversine_errors: prediction and truth counts differ");
    std::vector<double> errors(predictions.size());
    const auto n = static_cast<std::ptrdiff_t>(predictions.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        errors[static_cast<std::size_t>(i)] = haversine_m(predictions[static_cast<std::size_t>(i)],
                                                          truths[static_cast<std::size_t>(i)]);
    return errors;
}

namespace {

// Linear interpolation between closest ranks of the sorted sample; q in [0, 1].
double percentile_sorted(const std::vector<double>& sorted, double q) {
    double pos = q * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

ErrorStats summarize_errors(std::vector<double> errors) {
    if (errors.empty()) throw std::invalid_argument("summarize_errors: empty error sample");

    ErrorStats stats;
    stats.count = errors.size();
    double sum = 0.0;
    for (double e : errors) sum += e;  // serial accumulation keeps results jobs-independent
    stats.mean = sum / static_cast<double>(errors.size());

    std::sort(errors.begin(), errors.end());
    stats.p50 = percentile_sorted(errors, 0.50);
    stats.p75 = percentile_sorted(errors, 0.75);
    stats.p90 = percentile_sorted(errors, 0.90);
    stats.p95 = percentile_sorted(errors, 0.95);
    stats.median = stats.p50;
    return stats;
}

ErrorStats error_stats(std::span<const LatLon> predictions, std::span<const LatLon> truths) {
    return summarize_errors(haversine_errors(predictions, truths));
}

}  // namespace lorafp
