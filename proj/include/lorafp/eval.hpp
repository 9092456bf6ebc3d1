#pragma once

#include <span>
#include <vector>

namespace lorafp {

struct LatLon {
    double lat = 0.0;  // degrees
    double lon = 0.0;  // degrees

    bool operator==(const LatLon&) const = default;
};

// Mean Earth radius in meters used for every reported distance.
inline constexpr double kEarthRadiusMeters = 6371000.0;

// Great-circle distance in meters between two lat/lon points.
double haversine_m(const LatLon& a, const LatLon& b);

// Summary of per-point Haversine errors. median == percentile(50); even counts take
// the midpoint of the two central order statistics.
struct ErrorStats {
    double mean = 0.0;
    double median = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
    double p90 = 0.0;
    double p95 = 0.0;
    std::size_t count = 0;
};

// Element-wise errors between predictions and ground truth (OpenMP over pairs).
std::vector<double> haversine_errors(std::span<const LatLon> predictions, std::span<const LatLon> truths);

// Stats over a raw error sample. Percentiles interpolate linearly between closest ranks.
ErrorStats summarize_errors(std::vector<double> errors);

ErrorStats error_stats(std::span<const LatLon> predictions, std::span<const LatLon> truths);

}  // namespace lorafp
