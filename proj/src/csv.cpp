#include "gwcal/csv.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gwcal::csv {

bool Table::has_column(const std::string& name) const {
    for (const auto& h : header)
        if (h == name) return true;
    return false;
}

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw std::runtime_error("csv: missing column '" + name + "'");
}

const std::string& Table::cell(std::size_t row, const std::string& col) const {
    return rows.at(row).at(column(col));
}

double Table::number(std::size_t row, const std::string& col) const {
    const std::string& s = cell(row, col);
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("csv: cell '" + s + "' in column '" + col +
                                 "' is not a number");
    }
}

long Table::integer(std::size_t row, const std::string& col) const {
    const std::string& s = cell(row, col);
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("csv: cell '" + s + "' in column '" + col +
                                 "' is not an integer");
    }
}

namespace {

// Splits one logical record starting at `pos`; advances `pos` past the
// trailing newline. Handles quoted fields per RFC 4180.
std::vector<std::string> parse_record(const std::string& text, std::size_t& pos) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    while (pos < text.size()) {
        const char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field += '"';
                    ++pos;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
            ++pos;
            fields.push_back(std::move(field));
            return fields;
        } else {
            field += c;
        }
        ++pos;
    }
    fields.push_back(std::move(field));
    return fields;
}

void parse_metadata_line(const std::string& line, Table& out) {
    // "# key = value" or "# key: value"
    std::string body = line.substr(1);
    const std::size_t sep = body.find_first_of("=:");
    if (sep == std::string::npos) return;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    out.metadata[trim(body.substr(0, sep))] = trim(body.substr(sep + 1));
}

}  // namespace

Table read_string(const std::string& text) {
    Table t;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        if (text[pos] == '#') {
            std::size_t eol = text.find('\n', pos);
            if (eol == std::string::npos) eol = text.size();
            parse_metadata_line(text.substr(pos, eol - pos), t);
            pos = eol == text.size() ? eol : eol + 1;
            continue;
        }
        auto fields = parse_record(text, pos);
        if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
        if (!header_seen) {
            t.header = std::move(fields);
            header_seen = true;
        } else {
            if (fields.size() != t.header.size())
                throw std::runtime_error("csv: row has " +
                                         std::to_string(fields.size()) +
                                         " fields, header has " +
                                         std::to_string(t.header.size()));
            t.rows.push_back(std::move(fields));
        }
    }
    return t;
}

Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return read_string(ss.str());
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(std::string(e.what()) + " in '" + path + "'");
    }
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string quote_field(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

Writer::Writer(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("csv: cannot write '" + path + "'");
    file_ = f;
}

Writer::~Writer() { close(); }

void Writer::close() {
    if (file_) {
        std::fclose(static_cast<FILE*>(file_));
        file_ = nullptr;
    }
}

void Writer::comment(const std::string& text) {
    std::fprintf(static_cast<FILE*>(file_), "# %s\n", text.c_str());
}

void Writer::row(const std::vector<std::string>& fields) {
    FILE* f = static_cast<FILE*>(file_);
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) std::fputc(',', f);
        const std::string q = quote_field(fields[i]);
        std::fwrite(q.data(), 1, q.size(), f);
    }
    std::fputc('\n', f);
}

}  // namespace gwcal::csv
