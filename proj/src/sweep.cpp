#include "kslab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "kslab/csv.hpp"

namespace kslab {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Walks a dotted path, creating intermediate objects, and sets the leaf.
void set_by_dotted(json& root, const std::string& path, const json& value) {
  json* node = &root;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw std::invalid_argument("sweep: empty key segment in '" + path + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (!node->is_object() && !node->is_null())
      throw std::invalid_argument("sweep: '" + path + "' descends through a non-object");
    start = dot + 1;
  }
}

std::string cell_suffix(std::size_t index, std::size_t total) {
  int width = 1;
  for (std::size_t t = total; t >= 10; t /= 10) ++width;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, index);
  return buf;
}

std::string value_to_csv(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return format_double(v.get<double>());
  return v.dump();
}

}  // namespace

SweepResult run_sweep(const json& base_scenario, const ordered_json& grid,
                      const std::filesystem::path& out_dir) {
  if (!grid.is_object()) throw std::invalid_argument("sweep: grid must be a JSON object");

  std::vector<std::string> keys;
  std::vector<std::vector<json>> values;
  std::size_t total = grid.empty() ? 0 : 1;
  for (const auto& [key, arr] : grid.items()) {
    if (!arr.is_array() || arr.empty())
      throw std::invalid_argument("sweep: grid entry '" + key + "' must be a non-empty array");
    keys.push_back(key);
    values.emplace_back(arr.begin(), arr.end());
    total *= values.back().size();
  }

  SweepResult result;
  result.cells.resize(total);

  const std::string base_name =
      base_scenario.contains("name") ? base_scenario.at("name").get<std::string>() : "sweep";

  // Materialize every cell's parameter set and patched scenario up front so
  // workers only run simulations.
  std::vector<json> patched(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    auto& cell = result.cells[idx];
    json scenario = base_scenario;
    std::size_t rem = idx;
    // first key outermost: its index changes slowest
    std::vector<std::size_t> digit(keys.size(), 0);
    for (std::size_t a = keys.size(); a-- > 0;) {
      digit[a] = rem % values[a].size();
      rem /= values[a].size();
    }
    for (std::size_t a = 0; a < keys.size(); ++a) {
      const json& v = values[a][digit[a]];
      cell.params.emplace_back(keys[a], v);
      set_by_dotted(scenario, keys[a], v);
    }
    scenario["name"] = base_name + "-" + cell_suffix(idx, total);
    patched[idx] = std::move(scenario);
  }

  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t workers = std::min<std::size_t>(total, hw ? hw : 2);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      auto& cell = result.cells[idx];
      try {
        Scenario s = parse_scenario(patched[idx]);
        cell.manifest = run_scenario(s, out_dir);
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  if (workers > 1) {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  } else if (total > 0) {
    work();
  }

  std::vector<std::string> header = keys;
  header.insert(header.end(),
                {"exit_event", "exit_code", "fitted_rate", "r_squared", "max_v_growth", "status"});
  std::vector<std::vector<std::string>> rows;
  rows.reserve(total);
  int worst = 0;
  for (const auto& cell : result.cells) {
    std::vector<std::string> row;
    row.reserve(header.size());
    for (const auto& [key, v] : cell.params) {
      (void)key;
      row.push_back(value_to_csv(v));
    }
    if (cell.ok) {
      const auto& m = cell.manifest;
      row.push_back(to_string(m.exit_event));
      row.push_back(std::to_string(m.exit_code));
      row.push_back(format_double(m.fitted_rate));
      row.push_back(format_double(m.fit_r_squared));
      row.push_back(format_double(m.max_v_growth));
      row.push_back("ok");
      worst = std::max(worst, m.exit_code);
    } else {
      row.insert(row.end(), {"", "1", "nan", "nan", "nan", "error: " + cell.error});
      worst = std::max(worst, kExitOperational);
    }
    rows.push_back(std::move(row));
  }

  result.aggregate_csv = table_to_csv(header, rows);
  result.aggregate_path = out_dir / (base_name + "-sweep.csv");
  atomic_write_text(result.aggregate_path, result.aggregate_csv);
  result.exit_code = worst;
  return result;
}

}  // namespace kslab
