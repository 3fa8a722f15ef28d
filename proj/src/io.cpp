#include "cute/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "cute/error.hpp"

namespace cute::io {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw Error(ErrorKind::InvalidArgument, "cannot format number");
    return std::string(buf.data(), ptr);
}

CsvWriter::CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw Error(ErrorKind::InvalidArgument, "cannot open " + path + " for writing");
}

void CsvWriter::header(const std::vector<std::string>& columns) { raw_row(columns); }

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ << ',';
        out_ << format_double(values[i]);
    }
    out_ << '\n';
}

void CsvWriter::row(std::string_view label, const std::vector<double>& values) {
    out_ << label;
    for (double v : values) out_ << ',' << format_double(v);
    out_ << '\n';
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

void write_text(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot open " + path + " for writing");
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace cute::io
