#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lab {

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite.
std::string fmt(double v);
std::string fmt(std::int64_t v);
std::string fmt(std::uint64_t v);
inline std::string fmt(int v) { return fmt(static_cast<std::int64_t>(v)); }
inline std::string fmt(unsigned v) { return fmt(static_cast<std::uint64_t>(v)); }
inline std::string fmt(const std::string& s) { return s; }
inline std::string fmt(const char* s) { return s; }

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  template <class... T>
  void row(const T&... cells) {
    std::vector<std::string> r{fmt(cells)...};
    add(std::move(r));
  }
  void add(std::vector<std::string> cells);
  std::size_t size() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes through a temporary file in the same directory, then renames.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace lab
