#include "lorafp/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "lorafp/csv.hpp"
#include "lorafp/errors.hpp"
#include "lorafp/rng.hpp"

namespace lorafp {

void ColumnMapping::validate() const {
    if (rssi_columns.size() != kGatewayCount)
        throw ConfigError("column mapping must name exactly " + std::to_string(kGatewayCount) +
                          " rssi columns, got " + std::to_string(rssi_columns.size()));
    std::set<std::string> seen;
    auto add = [&](const std::string& name) {
        if (name.empty()) throw ConfigError("column mapping contains an empty column name");
        if (!seen.insert(name).second) throw ConfigError("duplicate column name in mapping: " + name);
    };
    for (const auto& c : rssi_columns) add(c);
    add(sf_column);
    add(hdop_column);
    add(lat_column);
    add(lon_column);
}

namespace {

[[noreturn]] void cell_error(const std::string& column, long row, const std::string& cell) {
    throw ParseError("row " + std::to_string(row) + ", column '" + column +
                     "': cannot parse value '" + cell + "'");
}

}  // namespace

Dataset load_dataset(const std::string& path, const ColumnMapping& mapping) {
    mapping.validate();
    CsvReader reader(path, mapping.delimiter);

    auto require = [&](const std::string& name) {
        int idx = reader.column_index(name);
        if (idx < 0) throw ConfigError("mapped column not found in file header: '" + name + "'");
        return static_cast<std::size_t>(idx);
    };

    std::array<std::size_t, kGatewayCount> rssi_idx{};
    for (std::size_t g = 0; g < kGatewayCount; ++g) rssi_idx[g] = require(mapping.rssi_columns[g]);
    std::size_t sf_idx = require(mapping.sf_column);
    std::size_t hdop_idx = require(mapping.hdop_column);
    std::size_t lat_idx = require(mapping.lat_column);
    std::size_t lon_idx = require(mapping.lon_column);

    Dataset d;
    d.source_id = path;

    std::vector<std::string> fields;
    while (reader.next(fields)) {
        long row = reader.row_number();
        if (fields.size() != reader.header().size())
            throw SchemaError("row " + std::to_string(row) + ": expected " +
                              std::to_string(reader.header().size()) + " fields, got " +
                              std::to_string(fields.size()));

        Fingerprint fp;
        auto number_at = [&](std::size_t idx, const std::string& column) {
            double v;
            if (!parse_double(fields[idx], v)) cell_error(column, row, fields[idx]);
            return v;
        };

        for (std::size_t g = 0; g < kGatewayCount; ++g) {
            double v = number_at(rssi_idx[g], mapping.rssi_columns[g]);
            if (!is_sentinel(v) && !(v >= kSentinelRssi && v < 0.0))
                throw ValidationError("row " + std::to_string(row) + ", column '" +
                                      mapping.rssi_columns[g] + "': rssi value " +
                                      std::to_string(v) + " is neither the sentinel nor in [-200, 0)");
            fp.rssi[g] = v;
        }

        double sf = number_at(sf_idx, mapping.sf_column);
        if (!(std::abs(sf - std::round(sf)) < 1e-9)) cell_error(mapping.sf_column, row, fields[sf_idx]);
        fp.sf = static_cast<int>(std::llround(sf));

        fp.hdop = number_at(hdop_idx, mapping.hdop_column);
        if (!(fp.hdop >= 0.0))
            throw ValidationError("row " + std::to_string(row) + ": hdop must be non-negative, got " +
                                  std::to_string(fp.hdop));

        fp.lat = number_at(lat_idx, mapping.lat_column);
        fp.lon = number_at(lon_idx, mapping.lon_column);
        if (!(fp.lat >= -90.0 && fp.lat <= 90.0) || !(fp.lon >= -180.0 && fp.lon <= 180.0))
            throw ValidationError("row " + std::to_string(row) + ": coordinates out of range (lat " +
                                  std::to_string(fp.lat) + ", lon " + std::to_string(fp.lon) + ")");

        d.records.push_back(fp);
    }
    return d;
}

std::map<int, std::size_t> gateway_histogram(const Dataset& d) {
    std::map<int, std::size_t> hist;
    for (const auto& fp : d.records) ++hist[fp.reception_count()];
    return hist;
}

std::vector<std::pair<double, std::size_t>> rssi_histogram(const Dataset& d, double bin_width) {
    if (!(bin_width > 0.0)) throw ConfigError("rssi_histogram: bin_width must be positive");
    std::map<long long, std::size_t> bins;
    for (const auto& fp : d.records)
        for (double v : fp.rssi)
            if (!is_sentinel(v)) ++bins[static_cast<long long>(std::floor(v / bin_width))];
    std::vector<std::pair<double, std::size_t>> out;
    out.reserve(bins.size());
    for (auto [bin, count] : bins) out.emplace_back(static_cast<double>(bin) * bin_width, count);
    return out;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const std::array<double, 3>& fractions) {
    for (double f : fractions)
        if (!(f > 0.0)) throw ConfigError("split fractions must be positive");
    double sum = fractions[0] + fractions[1] + fractions[2];
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("split fractions must sum to 1, got " + std::to_string(sum));
    auto sized = [n](double f) {
        return static_cast<std::size_t>(std::floor(static_cast<double>(n) * f + 1e-9));
    };
    std::size_t train = sized(fractions[0]);
    std::size_t val = sized(fractions[1]);
    if (train + val > n) throw ConfigError("split fractions leave no room for the test slice");
    return {train, val, n - train - val};
}

SplitManifest split_indices(std::size_t n, std::int64_t seed, const std::array<double, 3>& fractions) {
    auto sizes = split_sizes(n, fractions);
    Rng rng(static_cast<std::uint64_t>(seed));
    std::vector<std::size_t> perm = random_permutation(n, rng);

    SplitManifest m;
    m.seed = seed;
    m.fractions = fractions;
    m.train_indices.assign(perm.begin(), perm.begin() + sizes[0]);
    m.val_indices.assign(perm.begin() + sizes[0], perm.begin() + sizes[0] + sizes[1]);
    m.test_indices.assign(perm.begin() + sizes[0] + sizes[1], perm.end());
    return m;
}

void SplitManifest::validate() const {
    std::size_t n = total();
    std::vector<bool> seen(n, false);
    auto mark = [&](const std::vector<std::size_t>& indices, const char* name) {
        for (std::size_t i : indices) {
            if (i >= n)
                throw ValidationError(std::string("split manifest: ") + name + " index " +
                                      std::to_string(i) + " outside 0.." + std::to_string(n - 1));
            if (seen[i])
                throw ValidationError(std::string("split manifest: index ") + std::to_string(i) +
                                      " appears in more than one slice");
            seen[i] = true;
        }
    };
    mark(train_indices, "train");
    mark(val_indices, "val");
    mark(test_indices, "test");
    // Disjoint + total count == n implies full coverage.
}

void SplitManifest::validate_against(std::size_t dataset_size) const {
    if (total() != dataset_size)
        throw ValidationError("split manifest covers " + std::to_string(total()) +
                              " records but the dataset has " + std::to_string(dataset_size));
    validate();
}

namespace {

std::string format_double_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_index_block(std::ostream& out, const char* name, const std::vector<std::size_t>& indices) {
    out << name << ' ' << indices.size() << '\n';
    for (std::size_t i = 0; i < indices.size(); ++i)
        out << indices[i] << ((i + 1) % 16 == 0 || i + 1 == indices.size() ? '\n' : ' ');
}

}  // namespace

void save_split(const SplitManifest& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << "lorafp-split v1\n";
    out << "seed " << m.seed << '\n';
    out << "fractions " << format_double_exact(m.fractions[0]) << ' '
        << format_double_exact(m.fractions[1]) << ' ' << format_double_exact(m.fractions[2]) << '\n';
    write_index_block(out, "train", m.train_indices);
    write_index_block(out, "val", m.val_indices);
    write_index_block(out, "test", m.test_indices);
    if (!out) throw IoError("write failed: " + path);
}

SplitManifest load_split(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);

    std::string word;
    auto expect = [&](const std::string& token) {
        if (!(in >> word) || word != token)
            throw SchemaError("split manifest " + path + ": expected '" + token + "', got '" + word + "'");
    };
    expect("lorafp-split");
    expect("v1");
    expect("seed");
    SplitManifest m;
    if (!(in >> m.seed)) throw SchemaError("split manifest " + path + ": bad seed");
    expect("fractions");
    for (double& f : m.fractions)
        if (!(in >> f)) throw SchemaError("split manifest " + path + ": bad fractions");

    auto read_block = [&](const std::string& name, std::vector<std::size_t>& indices) {
        expect(name);
        std::size_t count;
        if (!(in >> count)) throw SchemaError("split manifest " + path + ": bad " + name + " count");
        indices.resize(count);
        for (std::size_t i = 0; i < count; ++i)
            if (!(in >> indices[i]))
                throw SchemaError("split manifest " + path + ": truncated " + name + " index list");
    };
    read_block("train", m.train_indices);
    read_block("val", m.val_indices);
    read_block("test", m.test_indices);

    m.validate();
    return m;
}

namespace {

std::vector<std::size_t> read_index_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    std::vector<std::size_t> indices;
    long long v;
    std::string token;
    while (in >> token) {
        if (!parse_long(token, v) || v < 0)
            throw ParseError("index file " + path + ": bad index '" + token + "'");
        indices.push_back(static_cast<std::size_t>(v));
    }
    return indices;
}

}  // namespace

SplitManifest load_split_indices(const std::string& train_path, const std::string& val_path,
                                 const std::string& test_path) {
    SplitManifest m;
    m.train_indices = read_index_file(train_path);
    m.val_indices = read_index_file(val_path);
    m.test_indices = read_index_file(test_path);
    double n = static_cast<double>(m.total());
    if (n == 0) throw ValidationError("split index files contain no indices");
    m.seed = 0;
    m.fractions = {m.train_indices.size() / n, m.val_indices.size() / n, m.test_indices.size() / n};
    m.validate();
    return m;
}

}  // namespace lorafp
