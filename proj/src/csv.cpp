#include "lorafp/csv.hpp"

#include <charconv>
#include <fstream>
#include <memory>

#include "lorafp/errors.hpp"

namespace lorafp {

struct CsvReader::Impl {
    std::ifstream in;
    std::string line;
};

std::vector<std::string> split_delimited(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {  // escaped quote
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

CsvReader::CsvReader(const std::string& path, char delimiter)
    : impl_(std::make_shared<Impl>()), delimiter_(delimiter) {
    impl_->in.open(path);
    if (!impl_->in) throw IoError("cannot open file: " + path);
    if (!std::getline(impl_->in, impl_->line)) throw SchemaError("empty file, no header row: " + path);
    header_ = split_delimited(impl_->line, delimiter_);
}

int CsvReader::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == name) return static_cast<int>(i);
    return -1;
}

bool CsvReader::next(std::vector<std::string>& fields) {
    while (std::getline(impl_->in, impl_->line)) {
        bool blank = true;
        for (char c : impl_->line)
            if (c != '\r' && c != ' ' && c != '\t') { blank = false; break; }
        if (blank) continue;
        fields = split_delimited(impl_->line, delimiter_);
        ++row_;
        return true;
    }
    return false;
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (e[-1] == ' ' || e[-1] == '\t')) --e;
    if (b == e) return false;
    auto [ptr, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && ptr == e;
}

bool parse_long(const std::string& s, long long& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (e[-1] == ' ' || e[-1] == '\t')) --e;
    if (b == e) return false;
    auto [ptr, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && ptr == e;
}

}  // namespace lorafp
