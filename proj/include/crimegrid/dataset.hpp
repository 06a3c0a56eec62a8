#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "crimegrid/features.hpp"
#include "crimegrid/timeutil.hpp"

namespace crimegrid::dataset {

struct CellKey {
    std::int32_t region;  // region index (id-sorted)
    std::int16_t year;
    std::int8_t month;     // 1-12
    std::int8_t weekday;   // 0-6
    std::int8_t interval;  // 0-7

    bool operator==(const CellKey&) const = default;
};

struct GridCell {
    CellKey key;
    std::int32_t crime_count = 0;

    bool label() const { return crime_count > 0; }
};

// Full DA-by-time grid: |years| * 12 * 7 * 8 * |regions| cells, ordered by
// (region, year, month, weekday, interval).
struct Grid {
    std::vector<GridCell> cells;
    std::int32_t n_regions = 0;
    std::vector<int> years;

    std::size_t crime_cells() const;
};

Grid build_grid(std::span<const features::AssignedCrime> crimes, std::int32_t n_regions,
                std::span<const int> years);

// Keeps every crime cell and floor(ratio * minority) majority cells sampled
// without replacement. Returns sorted indices into cells.
std::vector<std::uint32_t> undersample(std::span<const GridCell> cells, double ratio,
                                       std::uint64_t seed);

struct FoldSpec {
    int fold_index = 0;
    MonthWindow train;
    MonthWindow test;
};

// Sliding two-year windows: fold i trains on months [i, i+12) and tests on
// [i+12, i+24) relative to the start of the data window.
std::vector<FoldSpec> make_folds(MonthWindow data_window, int n_folds);

struct GroupSet {
    bool r = true;  // always present
    bool d = false;
    bool s = false;
    bool f = false;
    bool p = false;

    bool contains(features::Group g) const;
    std::string letters() const;
};

GroupSet parse_group_set(std::string_view letters);  // e.g. "RDS"

struct FeatureMatrix {
    std::vector<std::string> names;
    std::vector<features::Group> tags;
    std::size_t n_rows = 0;
    std::vector<double> values;  // row-major
    std::vector<std::uint8_t> labels;

    std::size_t n_cols() const { return names.size(); }
    const double* row(std::size_t i) const { return values.data() + i * n_cols(); }
};

// Joins the selected cells with region features; per-cell season and interval
// pick the crime_season_share and F columns. Mask must include R.
FeatureMatrix assemble_matrix(const Grid& grid, std::span<const std::uint32_t> cell_indices,
                              const features::RegionFeatureTable& region_features,
                              const GroupSet& mask);

FeatureMatrix select_groups(const FeatureMatrix& full, const GroupSet& mask);

// CSV export with deterministic CellKey row order.
void write_matrix_csv(const std::string& path, const FeatureMatrix& matrix,
                      const Grid& grid, std::span<const std::uint32_t> cell_indices,
                      std::span<const std::string> region_ids);

}  // namespace crimegrid::dataset
