#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crimegrid {

// Minimal RFC-4180-style CSV: quoted fields, doubled quotes, CRLF tolerated.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv_file(const std::string& path);
CsvTable read_csv_text(std::string_view text);

std::string csv_escape(std::string_view field);
std::string csv_join(const std::vector<std::string>& fields);

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void write_row(const std::vector<std::string>& fields);
    void write_raw_line(std::string_view line);
    void close();

private:
    struct Impl;
    Impl* impl_;
};

// strict numeric parsing; rejects trailing junk, NaN and infinities
std::optional<double> parse_double_strict(std::string_view s);
std::optional<long long> parse_int_strict(std::string_view s);

// shortest round-trip representation
std::string format_double(double v);

}  // namespace crimegrid
