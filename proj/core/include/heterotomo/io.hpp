#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace heterotomo {

/// 64-bit FNV-1a of a byte string, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::string fnv1a_file(const std::filesystem::path& path);

/// Shortest text that reads back to the same double ("%.17g").
std::string format_double(double value);

std::string read_text(const std::filesystem::path& path);
/// Writes the file, creating parent directories. Throws std::runtime_error on failure.
void write_text(const std::filesystem::path& path, std::string_view text);

/// Flat little-endian float64 arrays.
void write_doubles(const std::filesystem::path& path, const double* data, std::size_t count);
std::vector<double> read_doubles(const std::filesystem::path& path);

/// Minimal RFC-4180 table: a header row and string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column position by name; throws std::runtime_error when absent.
  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace heterotomo
