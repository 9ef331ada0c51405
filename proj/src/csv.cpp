#include "kslab/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace kslab {

std::string format_double(double x) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc())
    throw std::runtime_error("csv: double formatting failed");
  return std::string(buf, end);
}

std::string csv_escape(std::string_view cell) {
  const bool needs = cell.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs) return std::string(cell);
  std::string out;
  out.reserve(cell.size() + 2);
  out.push_back('"');
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void atomic_write_text(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::create_directories(path.parent_path().empty()
                                          ? std::filesystem::path(".")
                                          : path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("csv: cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("csv: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string series_to_csv(const std::vector<DiagnosticsRecord>& series) {
  std::string out;
  out.reserve(64 + series.size() * 256);
  for (std::size_t c = 0; c < kDiagnosticsColumns.size(); ++c) {
    if (c) out.push_back(',');
    out += kDiagnosticsColumns[c];
  }
  out += "\r\n";
  for (const auto& r : series) {
    const double cols[] = {r.t,     r.mass,  r.lyapunov_E, r.dissipation_D1,
                           r.dissipation_D2, r.min_v,      r.max_v,
                           r.max_u, r.dist_u, r.dist_v_h1, r.key_residual,
                           r.envelope_margin};
    static_assert(sizeof(cols) / sizeof(cols[0]) == kDiagnosticsColumns.size());
    for (std::size_t c = 0; c < kDiagnosticsColumns.size(); ++c) {
      if (c) out.push_back(',');
      out += format_double(cols[c]);
    }
    out += "\r\n";
  }
  return out;
}

void write_series_csv(const std::filesystem::path& path,
                      const std::vector<DiagnosticsRecord>& series) {
  atomic_write_text(path, series_to_csv(series));
}

std::string table_to_csv(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out.push_back(',');
    out += csv_escape(header[c]);
  }
  out += "\r\n";
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("csv: row width does not match header");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out.push_back(',');
      out += csv_escape(row[c]);
    }
    out += "\r\n";
  }
  return out;
}

std::string snapshot_to_csv(std::string_view grid_descriptor, const Grid& grid,
                            const Field& u, const Field& v) {
  grid.check_field(u);
  grid.check_field(v);
  std::string out(grid_descriptor);
  out += "\r\n";
  out += grid.axes() == 1 ? "index,x0,u,v" : "index,x0,x1,u,v";
  out += "\r\n";
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    const auto c = grid.cell_center(i);
    out += std::to_string(i);
    out.push_back(',');
    out += format_double(c[0]);
    if (grid.axes() == 2) {
      out.push_back(',');
      out += format_double(c[1]);
    }
    out.push_back(',');
    out += format_double(u.values[i]);
    out.push_back(',');
    out += format_double(v.values[i]);
    out += "\r\n";
  }
  return out;
}

void write_snapshot_csv(const std::filesystem::path& path,
                        std::string_view grid_descriptor, const Grid& grid,
                        const Field& u, const Field& v) {
  atomic_write_text(path, snapshot_to_csv(grid_descriptor, grid, u, v));
}

}  // namespace kslab
