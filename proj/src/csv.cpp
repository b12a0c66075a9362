#include "octoswim/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace octoswim {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (value == 0.0) value = 0.0;  // drop the sign of -0
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

std::string format_number(long long value) {
    std::array<char, 32> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

void CsvWriter::header(std::initializer_list<std::string_view> names) {
    for (auto n : names) cell(n);
    end_row();
}

void CsvWriter::header(const std::vector<std::string>& names) {
    for (const auto& n : names) cell(std::string_view(n));
    end_row();
}

void CsvWriter::separator() {
    if (row_open_) out_ << ',';
    row_open_ = true;
}

CsvWriter& CsvWriter::cell(double value) {
    separator();
    out_ << format_number(value);
    return *this;
}

CsvWriter& CsvWriter::cell(long long value) {
    separator();
    out_ << format_number(value);
    return *this;
}

CsvWriter& CsvWriter::cell(std::string_view text) {
    separator();
    if (text.find_first_of(",\"\n") == std::string_view::npos) {
        out_ << text;
        return *this;
    }
    out_ << '"';
    for (char c : text) {
        if (c == '"') out_ << '"';
        out_ << c;
    }
    out_ << '"';
    return *this;
}

void CsvWriter::end_row() {
    out_ << '\n';
    row_open_ = false;
}

}  // namespace octoswim
