#include "heterotomo/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace heterotomo {

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fnv1a_file(const std::filesystem::path& path) { return fnv1a_hex(read_text(path)); }

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_doubles(const std::filesystem::path& path, const double* data, std::size_t count) {
  static_assert(std::endian::native == std::endian::little, "little-endian host expected");
  write_text(path, std::string_view(reinterpret_cast<const char*>(data), count * sizeof(double)));
}

std::vector<double> read_doubles(const std::filesystem::path& path) {
  const std::string bytes = read_text(path);
  if (bytes.size() % sizeof(double) != 0) {
    throw std::runtime_error(path.string() + ": size is not a multiple of 8 bytes");
  }
  std::vector<double> out(bytes.size() / sizeof(double));
  std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name) return c;
  throw std::runtime_error("csv column '" + std::string(name) + "' not found");
}

namespace {

// Splits one logical record starting at pos; handles quoted cells.
bool next_record(const std::string& text, std::size_t& pos, std::vector<std::string>& cells) {
  cells.clear();
  if (pos >= text.size()) return false;
  std::string cell;
  bool quoted = false;
  while (pos < text.size()) {
    const char c = text[pos++];
    if (quoted) {
      if (c == '"') {
        if (pos < text.size() && text[pos] == '"') {
          cell += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && pos < text.size() && text[pos] == '\n') ++pos;
      break;
    } else {
      cell += c;
    }
  }
  cells.push_back(std::move(cell));
  return true;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  CsvTable table;
  std::size_t pos = 0;
  std::vector<std::string> cells;
  if (!next_record(text, pos, table.header)) throw std::runtime_error(path.string() + ": empty csv");
  while (next_record(text, pos, cells)) {
    if (cells.size() == 1 && cells[0].empty()) continue;
    if (cells.size() != table.header.size()) {
      throw std::runtime_error(path.string() + ": ragged row " + std::to_string(table.rows.size() + 2));
    }
    table.rows.push_back(cells);
  }
  return table;
}

}  // namespace heterotomo
