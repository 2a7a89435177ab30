#include "kvnosc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "kvnosc/errors.hpp"

namespace kvnosc::io {

std::string format_double(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_csv(const Table& table) {
  std::string out = "# scenario_hash=" + table.scenario_hash + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& table) {
  // Numbers are emitted as raw shortest round-trip text for byte stability.
  std::string out = "{\"scenario_hash\":" + nlohmann::json(table.scenario_hash).dump() +
                    ",\"columns\":" + nlohmann::json(table.columns).dump() + ",\"rows\":[";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (r) out += ',';
    out += '[';
    for (std::size_t i = 0; i < table.rows[r].size(); ++i) {
      if (i) out += ',';
      const double v = table.rows[r][i];
      out += std::isfinite(v) ? format_double(v) : "null";
    }
    out += ']';
  }
  out += "]}\n";
  return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot open " + path.string() + " for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw ConfigError("failed writing " + path.string());
}

std::filesystem::path write_table(const std::filesystem::path& dir, std::string_view stem,
                                  const Table& table, Format format) {
  std::filesystem::create_directories(dir);
  const bool csv = format == Format::csv;
  const auto path = dir / (std::string(stem) + (csv ? ".csv" : ".json"));
  write_text(path, csv ? to_csv(table) : to_json(table));
  return path;
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path.string());
  Table t;
  std::string line;
  constexpr std::string_view kHashPrefix = "# scenario_hash=";
  bool have_header = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line.starts_with(kHashPrefix)) {
      t.scenario_hash = line.substr(kHashPrefix.size());
      continue;
    }
    if (line.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!have_header) {
      t.columns = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.columns.size())
      throw ConfigError("row width mismatch in " + path.string());
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc{} || res.ptr != c.data() + c.size())
        throw ConfigError("bad number '" + c + "' in " + path.string());
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw ConfigError("missing header in " + path.string());
  return t;
}

}  // namespace kvnosc::io
