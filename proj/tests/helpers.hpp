#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lorafp/dataset.hpp"
#include "lorafp/matrix.hpp"
#include "lorafp/rng.hpp"

namespace testutil {

// One fingerprint with the given (gateway, rssi) readings set and everything else sentinel.
inline lorafp::Fingerprint make_fp(const std::vector<std::pair<std::size_t, double>>& readings,
                                   int sf = 7, double lat = 51.2, double lon = 4.4) {
    lorafp::Fingerprint fp;
    fp.rssi.fill(lorafp::kSentinelRssi);
    for (auto [g, v] : readings) fp.rssi[g] = v;
    fp.sf = sf;
    fp.hdop = 1.0;
    fp.lat = lat;
    fp.lon = lon;
    return fp;
}

// Synthetic dataset that looks like urban drive-test data: a handful of gateways
// hear each message, signal strength correlated with position so the models have
// something to learn.
inline lorafp::Dataset random_dataset(std::size_t n, std::uint64_t seed) {
    lorafp::Rng rng(seed);
    lorafp::Dataset d;
    d.source_id = "synthetic";
    d.records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        lorafp::Fingerprint fp;
        fp.rssi.fill(lorafp::kSentinelRssi);
        double u = lorafp::uniform_unit(rng);
        double v = lorafp::uniform_unit(rng);
        fp.lat = 51.17 + 0.08 * u;
        fp.lon = 4.36 + 0.10 * v;
        std::size_t receptions = 2 + lorafp::uniform_below(rng, 5);
        for (std::size_t r = 0; r < receptions; ++r) {
            auto g = static_cast<std::size_t>(lorafp::uniform_below(rng, lorafp::kGatewayCount));
            // Pseudo path loss: nearer to the gateway's "home corner" means stronger.
            double gx = static_cast<double>(g % 10) / 10.0;
            double gy = static_cast<double>(g / 10) / 7.0;
            double dist = (u - gx) * (u - gx) + (v - gy) * (v - gy);
            double rssi = -55.0 - 60.0 * dist - 10.0 * lorafp::uniform_unit(rng);
            if (rssi < -199.0) rssi = -199.0;
            fp.rssi[g] = rssi;
        }
        fp.sf = 7 + static_cast<int>(lorafp::uniform_below(rng, 6));
        fp.hdop = 0.5 + lorafp::uniform_unit(rng);
        d.records.push_back(fp);
    }
    return d;
}

inline lorafp::Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                                    double lo = -1.0, double hi = 1.0) {
    lorafp::Rng rng(seed);
    lorafp::Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            m(r, c) = lo + (hi - lo) * lorafp::uniform_unit(rng);
    return m;
}

// Column names for CSV fixtures. Distinct from the loader defaults on purpose, so
// mapping really is exercised.
inline lorafp::ColumnMapping test_mapping() {
    lorafp::ColumnMapping m;
    m.rssi_columns.reserve(lorafp::kGatewayCount);
    for (std::size_t g = 1; g <= lorafp::kGatewayCount; ++g)
        m.rssi_columns.push_back("rx" + std::to_string(g));
    m.sf_column = "sf";
    m.hdop_column = "hdop";
    m.lat_column = "lat";
    m.lon_column = "lon";
    return m;
}

inline std::string csv_header(const lorafp::ColumnMapping& m) {
    std::ostringstream out;
    for (const auto& c : m.rssi_columns) out << c << m.delimiter;
    out << m.sf_column << m.delimiter << m.hdop_column << m.delimiter << m.lat_column
        << m.delimiter << m.lon_column;
    return out.str();
}

inline std::string to_csv(const lorafp::Dataset& d, const lorafp::ColumnMapping& m) {
    std::ostringstream out;
    out << csv_header(m) << '\n';
    out.precision(17);
    for (const auto& fp : d.records) {
        for (double r : fp.rssi) out << r << m.delimiter;
        out << fp.sf << m.delimiter << fp.hdop << m.delimiter << fp.lat << m.delimiter << fp.lon
            << '\n';
    }
    return out.str();
}

// Unique scratch directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static int counter = 0;
        auto base = std::filesystem::temp_directory_path();
        path = base / ("lorafp-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path / name).string(); }

    std::string write(const std::string& name, const std::string& content) const {
        auto p = file(name);
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p;
    }
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace testutil
