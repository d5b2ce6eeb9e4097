#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace gwcal::csv {

/// One parsed CSV file: header row plus string cells. `#`-prefixed lines
/// before the header are collected as metadata (`key = value` pairs).
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::map<std::string, std::string> metadata;

    bool has_column(const std::string& name) const;
    std::size_t column(const std::string& name) const;  // throws if absent

    const std::string& cell(std::size_t row, const std::string& col) const;
    double number(std::size_t row, const std::string& col) const;
    long integer(std::size_t row, const std::string& col) const;
};

/// RFC-4180 parser (quoted fields, embedded commas/quotes/newlines).
Table read_file(const std::string& path);
Table read_string(const std::string& text);

/// Row-at-a-time writer with RFC-4180 quoting and locale-independent
/// numeric formatting ('.' decimal separator, %.12g).
class Writer {
public:
    explicit Writer(const std::string& path);
    ~Writer();
    Writer(const Writer&) = delete;
    Writer& operator=(const Writer&) = delete;

    void comment(const std::string& text);
    void row(const std::vector<std::string>& fields);
    void close();

private:
    void* file_ = nullptr;
};

std::string format_number(double v);
std::string quote_field(const std::string& field);

}  // namespace gwcal::csv
