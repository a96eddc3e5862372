#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace osteo {

/// Shortest round-trip decimal form; independent of the C locale.
std::string format_double(double v);
/// Fixed-point with `decimals` digits; independent of the C locale.
std::string format_fixed(double v, int decimals);

/// Parses a whole string as a double or integer; throws DataError otherwise.
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

/// Minimal CSV: comma-separated, no quoting, LF line endings.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws DataError when absent.
    std::size_t column(std::string_view name) const;
    std::string to_string() const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace osteo
