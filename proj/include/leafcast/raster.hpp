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

#ifndef LEAFCAST_RASTER_HPP_
#define LEAFCAST_RASTER_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leafcast/date.hpp"
#include "leafcast/ingest.hpp"

namespace leafcast::raster {

// Georeferenced grid of reflectance or index values. Missing cells are NaN.
struct BandGrid {
  int ncols = 0;
  int nrows = 0;
  double xll = 0.0;  // x of the lower-left corner
  double yll = 0.0;
  double cellsize = 1.0;
  double nodata = -9999.0;
  std::vector<double> cells;  // row-major, top row first

  double at(int row, int col) const { return cells[static_cast<std::size_t>(row) * ncols + col]; }
  bool same_georeference(const BandGrid& other) const;
};

enum class IndexKind { kNdvi, kNdwi, kNdmi };

inline constexpr IndexKind kAllIndexKinds[] = {IndexKind::kNdvi, IndexKind::kNdwi,
                                               IndexKind::kNdmi};

std::string to_string(IndexKind kind);
IndexKind parse_index_kind(std::string_view name);

struct IndexSample {
  Date date;
  IndexKind kind = IndexKind::kNdvi;
  std::optional<double> value;  // empty for cloud / nodata
};

struct IndexSeries {
  std::string tree_id;
  IndexKind kind = IndexKind::kNdvi;
  Date start_date;
  std::vector<double> values;
};

// ESRI ASCII grid: ncols, nrows, xllcorner, yllcorner, cellsize, optional
// NODATA_value (default -9999), then nrows rows top first.
BandGrid parse_ascii_grid(std::string_view text);
std::string write_ascii_grid(const BandGrid& grid);

// Cellwise (a - b) / (a + b); missing where an input is missing or a + b == 0.
BandGrid normalized_difference(const BandGrid& a, const BandGrid& b);

// Band keys (case-insensitive): NIR, RED, GREEN, SWIR.
// NDVI = nd(NIR, RED), NDWI = nd(GREEN, NIR), NDMI = nd(NIR, SWIR).
BandGrid compute_index(IndexKind kind, const std::map<std::string, BandGrid>& bands);

// Nearest cell centre to (y, x); on a shared edge the lower row / column index
// wins. Returns std::nullopt for nodata. Throws DataError outside the extent.
std::optional<double> sample_at(const BandGrid& grid, double y, double x);

// Daily series over `years`, linear between valid samples, holding the first /
// last valid sample before / after them.
IndexSeries build_index_series(const std::vector<IndexSample>& samples, ingest::YearRange years,
                               std::string tree_id = {});

// Files named `<NAME>_<YYYY-MM-DD>.asc` where NAME is an index (NDVI, NDWI,
// NDMI) or a band (NIR, RED, GREEN, SWIR).
struct RasterFile {
  std::string name;
  Date date;
  std::filesystem::path path;
};

std::vector<RasterFile> scan_raster_dir(const std::filesystem::path& dir);

// Samples every requested index at every tree for every date found in `dir`.
// Indices are read directly when an index file exists for a date, otherwise
// computed from band files. Result: tree -> kind -> samples in date order.
std::map<std::string, std::map<IndexKind, std::vector<IndexSample>>> load_index_samples(
    const std::filesystem::path& dir, const std::vector<IndexKind>& kinds,
    const std::map<std::string, ingest::SiteCoordinate>& trees);

}  // namespace leafcast::raster

#endif  // LEAFCAST_RASTER_HPP_
