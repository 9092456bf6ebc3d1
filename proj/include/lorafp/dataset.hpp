#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lorafp {

// Basestations reporting RSSI in the fingerprint files this library consumes.
inline constexpr std::size_t kGatewayCount = 68;

// RSSI value the dataset creators insert for basestations that did not receive a message.
inline constexpr double kSentinelRssi = -200.0;

inline bool is_sentinel(double rssi) { return rssi == kSentinelRssi; }

// One LoRaWAN message: per-gateway RSSI readings plus GPS ground truth.
struct Fingerprint {
    std::array<double, kGatewayCount> rssi{};  // dBm; kSentinelRssi = not received
    int sf = 0;                                // LoRa spreading factor
    double hdop = 0.0;                         // GPS horizontal dilution of precision (unused downstream)
    double lat = 0.0;                          // degrees
    double lon = 0.0;                          // degrees

    int reception_count() const {
        int n = 0;
        for (double v : rssi)
            if (!is_sentinel(v)) ++n;
        return n;
    }
};

struct Dataset {
    std::vector<Fingerprint> records;  // file order, stable across loads
    std::string source_id;

    std::size_t size() const { return records.size(); }
};

// Maps file header names onto Fingerprint fields. Supplied by configuration;
// header names are a property of the file, not of this library.
struct ColumnMapping {
    std::vector<std::string> rssi_columns;  // exactly kGatewayCount names
    std::string sf_column;
    std::string hdop_column;
    std::string lat_column;
    std::string lon_column;
    char delimiter = ',';

    // Throws ConfigError on duplicate names or wrong rssi arity.
    void validate() const;
};

// Reproducible train/validation/test partition of a dataset's record indices.
struct SplitManifest {
    std::int64_t seed = 0;
    std::array<double, 3> fractions{};  // train, val, test
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> val_indices;
    std::vector<std::size_t> test_indices;

    std::size_t total() const { return train_indices.size() + val_indices.size() + test_indices.size(); }

    bool operator==(const SplitManifest&) const = default;

    // Disjointness + full coverage of 0..total-1. Throws ValidationError.
    void validate() const;
    // Additionally checks the manifest indexes exactly `dataset_size` records.
    void validate_against(std::size_t dataset_size) const;
};

// Reads a delimited text file into a Dataset. One Fingerprint per data row, file order.
// Rejects records violating the domain invariants (rssi outside [-200, 0) and not the
// sentinel, lat/lon out of range, negative hdop) so record counts stay exact.
Dataset load_dataset(const std::string& path, const ColumnMapping& mapping);

// Number of messages received by exactly G gateways, keyed by G.
std::map<int, std::size_t> gateway_histogram(const Dataset& d);

// Histogram over all non-sentinel RSSI entries. Bins are [lo, lo + bin_width) with
// lo = floor(value / bin_width) * bin_width; only non-empty bins are returned, ascending.
std::vector<std::pair<double, std::size_t>> rssi_histogram(const Dataset& d, double bin_width);

// Split sizes under the rounding rule: train = floor(N*f0), val = floor(N*f1), test = rest.
// floor is taken with 1e-9 absolute slack so exact rational fractions divide exactly.
std::array<std::size_t, 3> split_sizes(std::size_t n, const std::array<double, 3>& fractions);

// Uniform random partition of 0..n-1 driven solely by `seed` (mt19937_64 + Fisher-Yates),
// sliced contiguously into train/val/test per split_sizes.
SplitManifest split_indices(std::size_t n, std::int64_t seed, const std::array<double, 3>& fractions);

inline SplitManifest split_dataset(const Dataset& d, std::int64_t seed, const std::array<double, 3>& fractions) {
    return split_indices(d.size(), seed, fractions);
}

// Plain-text manifest persistence; load(save(m)) == m bit-exactly.
void save_split(const SplitManifest& m, const std::string& path);
SplitManifest load_split(const std::string& path);

// Fallback for externally published splits: three plain index files (one index per
// token). seed is recorded as 0 and fractions as the observed proportions.
SplitManifest load_split_indices(const std::string& train_path, const std::string& val_path,
                                 const std::string& test_path);

}  // namespace lorafp
