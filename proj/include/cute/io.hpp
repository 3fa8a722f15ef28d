#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace cute::io {

/// Shortest representation that round-trips to the same double.
std::string format_double(double value);

/// Minimal CSV writer. Numbers are written with round-trip precision so that
/// identical inputs always produce byte-identical files.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);

    void header(const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    void row(std::string_view label, const std::vector<double>& values);
    void raw_row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
};

void write_text(const std::string& path, std::string_view text);
std::string read_text(const std::string& path);

} // namespace cute::io
