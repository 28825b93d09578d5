#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace iic::cli {

/// One cell of a result table. monostate prints as an empty CSV field and
/// as null in JSON.
using Cell = std::variant<std::monostate, std::int64_t, std::uint64_t, double, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
  std::string to_csv() const;
  std::string to_json() const;
};

std::string format_double(double x);

/// Writes `text` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

/// ISO-8601 UTC, seconds resolution.
std::string utc_timestamp();

}  // namespace iic::cli
