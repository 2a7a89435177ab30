#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace kvnosc::io {

// Shortest decimal that round-trips to the same double (at most 17 significant digits).
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view text);

/// Column table written as CSV with a leading `# scenario_hash=<hash>` line
/// and a header row, or as JSON {"scenario_hash", "columns", "rows"}.
struct Table {
  std::string scenario_hash;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

enum class Format { csv, json };

std::string to_csv(const Table& table);
std::string to_json(const Table& table);

// Writes `<stem>.csv` or `<stem>.json` under dir; returns the path.
std::filesystem::path write_table(const std::filesystem::path& dir, std::string_view stem,
                                  const Table& table, Format format);

void write_text(const std::filesystem::path& path, std::string_view text);

/// Reads a CSV produced by write_table. Throws ConfigError on malformed input.
Table read_csv(const std::filesystem::path& path);

}  // namespace kvnosc::io
