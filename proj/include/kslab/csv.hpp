#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "kslab/diagnostics.hpp"

namespace kslab {

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

// RFC-4180 quoting: wraps the cell when it holds a comma, quote, or newline.
std::string csv_escape(std::string_view cell);

// Writes content to a sibling temp file, then renames over the target.
void atomic_write_text(const std::filesystem::path& path, std::string_view content);

// Diagnostics series with the fixed column header; CRLF line endings.
std::string series_to_csv(const std::vector<DiagnosticsRecord>& series);
void write_series_csv(const std::filesystem::path& path,
                      const std::vector<DiagnosticsRecord>& series);

// Generic table with CRLF endings and escaping; used by sweep aggregates.
std::string table_to_csv(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows);

// Per-cell dump: one descriptor line (grid JSON), then index, center
// coordinates, u, v per cell.
std::string snapshot_to_csv(std::string_view grid_descriptor, const Grid& grid,
                            const Field& u, const Field& v);
void write_snapshot_csv(const std::filesystem::path& path,
                        std::string_view grid_descriptor, const Grid& grid,
                        const Field& u, const Field& v);

}  // namespace kslab
