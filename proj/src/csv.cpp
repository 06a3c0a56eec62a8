#include "crimegrid/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "crimegrid/errors.hpp"

namespace crimegrid {

namespace {

std::vector<std::string> parse_line_fields(std::string_view text, std::size_t& pos) {
    std::vector<std::string> fields;
    std::string current;
    bool in_quotes = false;
    bool any = false;
    while (pos < text.size()) {
        char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    current.push_back('"');
                    ++pos;
                } else {
                    in_quotes = false;
                }
            } else {
                current.push_back(c);
            }
            ++pos;
            any = true;
            continue;
        }
        if (c == '"') {
            in_quotes = true;
            ++pos;
            any = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
            ++pos;
            any = true;
        } else if (c == '\n') {
            ++pos;
            break;
        } else if (c == '\r') {
            ++pos;  // swallow, newline handled next iteration
        } else {
            current.push_back(c);
            ++pos;
            any = true;
        }
    }
    if (any || !current.empty()) fields.push_back(std::move(current));
    return fields;
}

}  // namespace

CsvTable read_csv_text(std::string_view text) {
    CsvTable table;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        auto fields = parse_line_fields(text, pos);
        if (fields.empty()) continue;
        if (first) {
            table.header = std::move(fields);
            first = false;
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_csv_text(buf.str());
}

std::string csv_escape(std::string_view field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) line.push_back(',');
        line += csv_escape(fields[i]);
    }
    return line;
}

struct CsvWriter::Impl {
    std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
    impl_->out.open(path, std::ios::binary);
    if (!impl_->out) {
        delete impl_;
        throw DataError("cannot open file for writing: " + path);
    }
}

CsvWriter::~CsvWriter() {
    close();
    delete impl_;
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
    impl_->out << csv_join(fields) << '\n';
}

void CsvWriter::write_raw_line(std::string_view line) {
    impl_->out << line << '\n';
}

void CsvWriter::close() {
    if (impl_->out.is_open()) impl_->out.close();
}

std::optional<double> parse_double_strict(std::string_view s) {
    if (s.empty()) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

std::optional<long long> parse_int_strict(std::string_view s) {
    if (s.empty()) return std::nullopt;
    long long value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

std::string format_double(double v) {
    char buf[48];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace crimegrid
