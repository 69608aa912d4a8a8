#ifndef VBMA_IO_HPP
#define VBMA_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace vbma {

/// Reads a single numeric column. One optional non-numeric header line is
/// allowed; any other non-numeric row is a data error naming its line.
std::vector<double> read_series_csv(const std::filesystem::path& path);

/// Reads the column named `column` of a comma-separated file with a header row.
std::vector<double> read_csv_column(const std::filesystem::path& path, const std::string& column);

std::string read_text(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

}  // namespace vbma

#endif  // VBMA_IO_HPP
