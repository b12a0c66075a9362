#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace octoswim {

/// Locale-independent, 17 significant digits.
std::string format_number(double value);
std::string format_number(long long value);

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void header(std::initializer_list<std::string_view> names);
    void header(const std::vector<std::string>& names);

    CsvWriter& cell(double value);
    CsvWriter& cell(int value) { return cell(static_cast<long long>(value)); }
    CsvWriter& cell(long long value);
    CsvWriter& cell(std::size_t value) { return cell(static_cast<long long>(value)); }
    CsvWriter& cell(std::string_view text);
    CsvWriter& cell(const char* text) { return cell(std::string_view(text)); }
    void end_row();

private:
    void separator();

    std::ostream& out_;
    bool row_open_ = false;
};

}  // namespace octoswim
