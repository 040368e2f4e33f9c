/* Copyright 2026 The Leafcast Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "leafcast/raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "leafcast/csv.hpp"
#include "leafcast/error.hpp"
#include "leafcast/kernels.hpp"

namespace leafcast::raster {
namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open raster " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

bool BandGrid::same_georeference(const BandGrid& o) const {
  const double tol = 1e-9 * std::max(cellsize, o.cellsize);
  return ncols == o.ncols && nrows == o.nrows && std::abs(xll - o.xll) <= tol &&
         std::abs(yll - o.yll) <= tol && std::abs(cellsize - o.cellsize) <= tol;
}

std::string to_string(IndexKind kind) {
  switch (kind) {
    case IndexKind::kNdvi:
      return "NDVI";
    case IndexKind::kNdwi:
      return "NDWI";
    case IndexKind::kNdmi:
      return "NDMI";
  }
  return "?";
}

IndexKind parse_index_kind(std::string_view name) {
  const std::string u = upper(name);
  for (IndexKind k : kAllIndexKinds) {
    if (to_string(k) == u) return k;
  }
  throw UsageError("unknown index kind '" + std::string(name) + "'");
}

BandGrid parse_ascii_grid(std::string_view text) {
  BandGrid grid;
  std::map<std::string, std::pair<std::string, std::size_t>> header;
  std::size_t line_no = 0;
  std::size_t pos = 0;

  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    return true;
  };

  // Header lines start with a letter; the first line starting otherwise is data.
  std::string_view line;
  std::size_t data_pos = 0;
  std::size_t data_line = 0;
  while (true) {
    data_pos = pos;
    data_line = line_no;
    if (!next_line(line)) break;
    std::istringstream ss{std::string(line)};
    std::string key, value;
    if (!(ss >> key)) continue;
    if (!std::isalpha(static_cast<unsigned char>(key[0]))) break;
    if (!(ss >> value)) throw ParseError(line_no, key, "header key without value");
    header[lower(key)] = {value, line_no};
  }

  auto get = [&](const char* key, bool required) -> std::optional<double> {
    auto it = header.find(key);
    if (it == header.end()) {
      if (required) throw ParseError(line_no, key, "missing header key");
      return std::nullopt;
    }
    return csv::parse_double(it->second.first, it->second.second, key);
  };
  const double ncols = *get("ncols", true);
  const double nrows = *get("nrows", true);
  grid.xll = *get("xllcorner", true);
  grid.yll = *get("yllcorner", true);
  grid.cellsize = *get("cellsize", true);
  if (auto nd = get("nodata_value", false)) grid.nodata = *nd;
  if (ncols < 1 || nrows < 1 || ncols != std::floor(ncols) || nrows != std::floor(nrows)) {
    throw ParseError(1, "ncols/nrows", "grid dimensions must be positive integers");
  }
  if (!(grid.cellsize > 0.0)) throw ParseError(1, "cellsize", "cellsize must be positive");
  grid.ncols = static_cast<int>(ncols);
  grid.nrows = static_cast<int>(nrows);
  grid.cells.reserve(static_cast<std::size_t>(grid.ncols) * grid.nrows);

  pos = data_pos;
  line_no = data_line;
  int rows_read = 0;
  while (next_line(line)) {
    std::istringstream ss{std::string(line)};
    std::string token;
    int count = 0;
    while (ss >> token) {
      const double v = csv::parse_double(token, line_no, "cell");
      grid.cells.push_back(v == grid.nodata ? kMissing : v);
      ++count;
    }
    if (count == 0) continue;
    if (count != grid.ncols) {
      throw ParseError(line_no, "", "row has " + std::to_string(count) + " values, ncols is " +
                                        std::to_string(grid.ncols));
    }
    ++rows_read;
  }
  if (rows_read != grid.nrows) {
    throw ParseError(line_no, "", "found " + std::to_string(rows_read) + " rows, nrows is " +
                                      std::to_string(grid.nrows));
  }
  return grid;
}

std::string write_ascii_grid(const BandGrid& grid) {
  std::string out;
  out += "ncols " + std::to_string(grid.ncols) + "\n";
  out += "nrows " + std::to_string(grid.nrows) + "\n";
  out += "xllcorner " + csv::format_double(grid.xll) + "\n";
  out += "yllcorner " + csv::format_double(grid.yll) + "\n";
  out += "cellsize " + csv::format_double(grid.cellsize) + "\n";
  out += "NODATA_value " + csv::format_double(grid.nodata) + "\n";
  for (int r = 0; r < grid.nrows; ++r) {
    for (int c = 0; c < grid.ncols; ++c) {
      const double v = grid.at(r, c);
      if (c) out += ' ';
      out += csv::format_double(std::isnan(v) ? grid.nodata : v);
    }
    out += '\n';
  }
  return out;
}

BandGrid normalized_difference(const BandGrid& a, const BandGrid& b) {
  if (!a.same_georeference(b)) {
    throw DataError("normalized_difference: grids differ in shape or georeference");
  }
  BandGrid out = a;
  kernels::normalized_difference(a.cells, b.cells, out.cells);
  return out;
}

BandGrid compute_index(IndexKind kind, const std::map<std::string, BandGrid>& bands) {
  auto band = [&](const char* name) -> const BandGrid& {
    for (const auto& [key, grid] : bands) {
      if (upper(key) == name) return grid;
    }
    throw DataError(to_string(kind) + " requires band " + name + ", which is missing");
  };
  switch (kind) {
    case IndexKind::kNdvi:
      return normalized_difference(band("NIR"), band("RED"));
    case IndexKind::kNdwi:
      return normalized_difference(band("GREEN"), band("NIR"));
    case IndexKind::kNdmi:
      return normalized_difference(band("NIR"), band("SWIR"));
  }
  throw DataError("unknown index kind");
}

std::optional<double> sample_at(const BandGrid& grid, double y, double x) {
  const double width = grid.ncols * grid.cellsize;
  const double height = grid.nrows * grid.cellsize;
  const double u = (x - grid.xll) / grid.cellsize;                 // columns from left edge
  const double v = (grid.yll + height - y) / grid.cellsize;        // rows from top edge
  if (!(x >= grid.xll && x <= grid.xll + width && y >= grid.yll && y <= grid.yll + height)) {
    throw DataError("point (" + csv::format_double(y) + ", " + csv::format_double(x) +
                    ") lies outside the grid extent");
  }
  // ceil(t) - 1 picks the lower index when t falls exactly on an edge.
  const int col = std::clamp(static_cast<int>(std::ceil(u)) - 1, 0, grid.ncols - 1);
  const int row = std::clamp(static_cast<int>(std::ceil(v)) - 1, 0, grid.nrows - 1);
  const double value = grid.at(row, col);
  if (std::isnan(value)) return std::nullopt;
  return value;
}

IndexSeries build_index_series(const std::vector<IndexSample>& samples, ingest::YearRange years,
                               std::string tree_id) {
  IndexSeries series;
  series.tree_id = std::move(tree_id);
  series.kind = samples.empty() ? IndexKind::kNdvi : samples.front().kind;
  series.start_date = Date::from_ymd(years.first, 1, 1);
  const Date end = Date::from_ymd(years.last, 12, 31);

  std::map<Date, double> valid;
  for (const auto& s : samples) {
    if (!s.value || s.date < series.start_date || s.date > end) continue;
    if (!valid.emplace(s.date, *s.value).second) {
      throw DataError("duplicate " + to_string(s.kind) + " sample on " + s.date.to_string() +
                      (series.tree_id.empty() ? "" : " for tree " + series.tree_id));
    }
  }
  if (valid.size() < 2) {
    throw DataError("fewer than 2 usable " + to_string(series.kind) + " samples" +
                    (series.tree_id.empty() ? "" : " for tree " + series.tree_id));
  }

  series.values.resize(static_cast<std::size_t>(end - series.start_date) + 1);
  auto index = [&](Date d) { return static_cast<std::size_t>(d - series.start_date); };
  auto it = valid.begin();
  for (Date d = series.start_date; d < it->first; ++d) series.values[index(d)] = it->second;
  for (auto next = std::next(it); next != valid.end(); it = next++) {
    const double span = next->first - it->first;
    for (Date d = it->first; d < next->first; ++d) {
      const double t = (d - it->first) / span;
      series.values[index(d)] = (1.0 - t) * it->second + t * next->second;
    }
  }
  for (Date d = it->first; d <= end; ++d) series.values[index(d)] = it->second;
  return series;
}

std::vector<RasterFile> scan_raster_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("raster directory not found: " + dir.string());
  }
  std::vector<RasterFile> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".asc") continue;
    const std::string stem = entry.path().stem().string();
    const auto sep = stem.rfind('_');
    if (sep == std::string::npos) continue;
    try {
      out.push_back({upper(stem.substr(0, sep)), Date::parse(stem.substr(sep + 1)), entry.path()});
    } catch (const DataError&) {
      continue;  // not a dated raster
    }
  }
  std::sort(out.begin(), out.end(), [](const RasterFile& a, const RasterFile& b) {
    return std::tie(a.date, a.name) < std::tie(b.date, b.name);
  });
  return out;
}

std::map<std::string, std::map<IndexKind, std::vector<IndexSample>>> load_index_samples(
    const std::filesystem::path& dir, const std::vector<IndexKind>& kinds,
    const std::map<std::string, ingest::SiteCoordinate>& trees) {
  std::map<Date, std::map<std::string, std::filesystem::path>> by_date;
  for (auto& f : scan_raster_dir(dir)) by_date[f.date][f.name] = f.path;

  struct Job {
    Date date;
    IndexKind kind;
    const std::map<std::string, std::filesystem::path>* files;
  };
  std::vector<Job> jobs;
  for (const auto& [date, files] : by_date) {
    for (IndexKind kind : kinds) jobs.push_back({date, kind, &files});
  }

  // values[job][tree] ; filled independently per job, assembled in job order.
  std::vector<std::string> tree_ids;
  for (const auto& [id, _] : trees) tree_ids.push_back(id);
  std::vector<std::vector<std::optional<double>>> values(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::vector<char> present(jobs.size(), 0);

  const long n = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic) if (kernels::policy() == kernels::Policy::kParallel)
  for (long j = 0; j < n; ++j) {
    const Job& job = jobs[j];
    try {
      std::optional<BandGrid> grid;
      const auto& files = *job.files;
      if (auto it = files.find(to_string(job.kind)); it != files.end()) {
        grid = parse_ascii_grid(read_file(it->second));
      } else {
        std::map<std::string, BandGrid> bands;
        for (const char* b : {"NIR", "RED", "GREEN", "SWIR"}) {
          if (auto bit = files.find(b); bit != files.end()) {
            bands.emplace(b, parse_ascii_grid(read_file(bit->second)));
          }
        }
        if (!bands.empty()) grid = compute_index(job.kind, bands);
      }
      if (!grid) continue;
      present[j] = 1;
      for (const auto& id : tree_ids) {
        const auto& site = trees.at(id);
        values[j].push_back(sample_at(*grid, site.lat, site.lon));
      }
    } catch (const std::exception& e) {
      errors[j] = job.date.to_string() + " " + to_string(job.kind) + ": " + e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw DataError("raster " + e);
  }

  std::map<std::string, std::map<IndexKind, std::vector<IndexSample>>> out;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (!present[j]) continue;
    for (std::size_t t = 0; t < tree_ids.size(); ++t) {
      out[tree_ids[t]][jobs[j].kind].push_back({jobs[j].date, jobs[j].kind, values[j][t]});
    }
  }
  return out;
}

}  // namespace leafcast::raster
