#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace lorafp {

// Minimal delimited-text reader: first row is the header, one record per line.
// Double quotes are honored ("a,b" is one field); no multi-line fields.
class CsvReader {
public:
    CsvReader(const std::string& path, char delimiter = ',');

    const std::vector<std::string>& header() const { return header_; }

    // Column index for an exact header name; -1 when absent.
    int column_index(const std::string& name) const;

    // Reads the next record into `fields`. Returns false at end of file.
    // `fields` is cleared and refilled; blank lines are skipped.
    bool next(std::vector<std::string>& fields);

    // 1-based data row number of the record most recently returned by next().
    long row_number() const { return row_; }

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
    std::vector<std::string> header_;
    char delimiter_;
    long row_ = 0;
};

// Splits one line on `delimiter`, honoring double quotes. Exposed for tests.
std::vector<std::string> split_delimited(const std::string& line, char delimiter);

// Locale-independent numeric parsing (std::from_chars). Return false on any
// trailing garbage or empty input.
bool parse_double(const std::string& s, double& out);
bool parse_long(const std::string& s, long long& out);

}  // namespace lorafp
