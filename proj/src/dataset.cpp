#include "crimegrid/dataset.hpp"

#include <algorithm>

#include "crimegrid/csv.hpp"
#include "crimegrid/errors.hpp"
#include "crimegrid/rng.hpp"

namespace crimegrid::dataset {

std::size_t Grid::crime_cells() const {
    std::size_t n = 0;
    for (const auto& c : cells)
        if (c.label()) ++n;
    return n;
}

namespace {

constexpr std::size_t kCellsPerRegionYear = 12u * 7u * 8u;

std::size_t cell_offset(std::size_t region, std::size_t year_idx, int month, int weekday,
                        int interval, std::size_t n_years) {
    std::size_t per_region = n_years * kCellsPerRegionYear;
    return region * per_region + year_idx * kCellsPerRegionYear +
           static_cast<std::size_t>(month - 1) * 7u * 8u +
           static_cast<std::size_t>(weekday) * 8u + static_cast<std::size_t>(interval);
}

}  // namespace

Grid build_grid(std::span<const features::AssignedCrime> crimes, std::int32_t n_regions,
                std::span<const int> years) {
    if (years.empty()) throw DataError("build_grid: years list is empty");
    if (n_regions <= 0) throw DataError("build_grid: no regions");
    std::vector<int> sorted_years(years.begin(), years.end());
    std::sort(sorted_years.begin(), sorted_years.end());
    sorted_years.erase(std::unique(sorted_years.begin(), sorted_years.end()), sorted_years.end());

    Grid grid;
    grid.n_regions = n_regions;
    grid.years = sorted_years;
    const std::size_t n_years = sorted_years.size();
    grid.cells.resize(static_cast<std::size_t>(n_regions) * n_years * kCellsPerRegionYear);

    std::size_t idx = 0;
    for (std::int32_t r = 0; r < n_regions; ++r) {
        for (std::size_t y = 0; y < n_years; ++y) {
            for (int m = 1; m <= 12; ++m) {
                for (int wd = 0; wd < 7; ++wd) {
                    for (int t = 0; t < kIntervalsPerDay; ++t) {
                        grid.cells[idx++].key = CellKey{r, static_cast<std::int16_t>(sorted_years[y]),
                                                        static_cast<std::int8_t>(m),
                                                        static_cast<std::int8_t>(wd),
                                                        static_cast<std::int8_t>(t)};
                    }
                }
            }
        }
    }

    for (const auto& c : crimes) {
        if (c.region < 0 || c.region >= n_regions)
            throw DataError("build_grid: crime assigned to unknown region index " +
                            std::to_string(c.region));
        auto it = std::lower_bound(sorted_years.begin(), sorted_years.end(), c.year);
        if (it == sorted_years.end() || *it != c.year)
            throw DataError("build_grid: crime year " + std::to_string(c.year) +
                            " outside the grid years");
        std::size_t year_idx = static_cast<std::size_t>(it - sorted_years.begin());
        ++grid.cells[cell_offset(static_cast<std::size_t>(c.region), year_idx, c.month, c.weekday,
                                 c.interval, n_years)]
              .crime_count;
    }
    return grid;
}

std::vector<std::uint32_t> undersample(std::span<const GridCell> cells, double ratio,
                                       std::uint64_t seed) {
    if (ratio < 1.0) throw DataError("undersample: ratio must be >= 1");
    std::vector<std::uint32_t> minority;
    std::vector<std::uint32_t> majority;
    for (std::uint32_t i = 0; i < cells.size(); ++i) {
        (cells[i].label() ? minority : majority).push_back(i);
    }
    if (minority.empty()) throw DataError("undersample: no crime cells present");
    if (majority.empty()) throw DataError("undersample: no no-crime cells present");

    std::size_t target = static_cast<std::size_t>(ratio * static_cast<double>(minority.size()));
    target = std::min(target, majority.size());

    Rng rng(derive_seed(seed, {0x5eedu, majority.size()}));
    auto picks = rng.sample_without_replacement(majority.size(), target);

    std::vector<std::uint32_t> retained = std::move(minority);
    retained.reserve(retained.size() + picks.size());
    for (std::size_t p : picks) retained.push_back(majority[p]);
    std::sort(retained.begin(), retained.end());
    return retained;
}

std::vector<FoldSpec> make_folds(MonthWindow data_window, int n_folds) {
    const int months_available = data_window.months();
    if (n_folds < 1) throw DataError("make_folds: need at least one fold");
    if (months_available < n_folds + 23)
        throw DataError("make_folds: " + std::to_string(months_available) +
                        " months cannot host " + std::to_string(n_folds) +
                        " sliding two-year folds");
    std::vector<FoldSpec> folds;
    folds.reserve(n_folds);
    for (int i = 0; i < n_folds; ++i) {
        FoldSpec f;
        f.fold_index = i;
        f.train = MonthWindow{data_window.begin + i, data_window.begin + i + 12};
        f.test = MonthWindow{data_window.begin + i + 12, data_window.begin + i + 24};
        folds.push_back(f);
    }
    return folds;
}

bool GroupSet::contains(features::Group g) const {
    switch (g) {
        case features::Group::R: return r;
        case features::Group::D: return d;
        case features::Group::S: return s;
        case features::Group::F: return f;
        case features::Group::P: return p;
    }
    return false;
}

std::string GroupSet::letters() const {
    std::string out;
    if (r) out += 'R';
    if (d) out += 'D';
    if (s) out += 'S';
    if (f) out += 'F';
    if (p) out += 'P';
    return out;
}

GroupSet parse_group_set(std::string_view letters) {
    GroupSet gs;
    gs.r = false;
    for (char c : letters) {
        switch (c) {
            case 'R': gs.r = true; break;
            case 'D': gs.d = true; break;
            case 'S': gs.s = true; break;
            case 'F': gs.f = true; break;
            case 'P': gs.p = true; break;
            default: throw DataError(std::string("unknown feature group '") + c + "'");
        }
    }
    if (gs.letters().empty()) throw DataError("feature mask is empty");
    if (!gs.r) throw DataError("feature mask must include the raw group R");
    return gs;
}

FeatureMatrix assemble_matrix(const Grid& grid, std::span<const std::uint32_t> cell_indices,
                              const features::RegionFeatureTable& region_features,
                              const GroupSet& mask) {
    if (!mask.r) throw DataError("assemble_matrix: mask must include the raw group R");
    if (static_cast<std::size_t>(grid.n_regions) != region_features.rows.size())
        throw DataError("assemble_matrix: grid and feature table disagree on region count");

    FeatureMatrix m;
    for (const auto& col : region_features.schema.columns) {
        if (!mask.contains(col.group)) continue;
        m.names.push_back(col.name);
        m.tags.push_back(col.group);
    }
    const std::size_t n_cols = m.names.size();
    m.n_rows = cell_indices.size();
    m.values.resize(m.n_rows * n_cols);
    m.labels.resize(m.n_rows);

    const bool with_distance = region_features.options.include_light_distance;
    std::size_t out = 0;
    for (std::size_t ri = 0; ri < cell_indices.size(); ++ri) {
        const GridCell& cell = grid.cells[cell_indices[ri]];
        const auto& rf = region_features.rows[cell.key.region];
        const int season =
            static_cast<int>(region_features.season_of_month[cell.key.month - 1]);
        const int t = cell.key.interval;
        double* row = m.values.data() + out;

        std::size_t c = 0;
        row[c++] = static_cast<double>(cell.key.month);
        row[c++] = static_cast<double>(cell.key.weekday);
        row[c++] = static_cast<double>(t);
        row[c++] = static_cast<double>(season);
        row[c++] = rf.historical.crime_frequency;
        row[c++] = rf.historical.crime_density_pop;
        row[c++] = rf.historical.crime_density_area;
        row[c++] = rf.historical.season_share[season];
        if (mask.d) {
            for (double v : rf.demographics) row[c++] = v;
        }
        if (mask.s) {
            row[c++] = rf.streetlight.count;
            row[c++] = rf.streetlight.density;
            if (with_distance) row[c++] = rf.streetlight.avg_min_crime_distance_km;
        }
        if (mask.f) {
            row[c++] = rf.dynamic.checkin_total[t];
            row[c++] = rf.dynamic.checkin_share[t];
            row[c++] = rf.dynamic.visitor_count[t];
            row[c++] = rf.dynamic.region_popularity[t];
        }
        if (mask.p) {
            row[c++] = rf.poi.total;
            for (double v : rf.poi.count) row[c++] = v;
            for (double v : rf.poi.share) row[c++] = v;
        }
        m.labels[ri] = cell.label() ? 1 : 0;
        out += n_cols;
    }
    return m;
}

FeatureMatrix select_groups(const FeatureMatrix& full, const GroupSet& mask) {
    if (!mask.r) throw DataError("select_groups: mask must include the raw group R");
    std::vector<std::size_t> keep;
    FeatureMatrix m;
    for (std::size_t c = 0; c < full.n_cols(); ++c) {
        if (!mask.contains(full.tags[c])) continue;
        keep.push_back(c);
        m.names.push_back(full.names[c]);
        m.tags.push_back(full.tags[c]);
    }
    m.n_rows = full.n_rows;
    m.labels = full.labels;
    m.values.resize(m.n_rows * keep.size());
    for (std::size_t r = 0; r < full.n_rows; ++r) {
        const double* src = full.row(r);
        double* dst = m.values.data() + r * keep.size();
        for (std::size_t k = 0; k < keep.size(); ++k) dst[k] = src[keep[k]];
    }
    return m;
}

void write_matrix_csv(const std::string& path, const FeatureMatrix& matrix,
                      const Grid& grid, std::span<const std::uint32_t> cell_indices,
                      std::span<const std::string> region_ids) {
    if (matrix.n_rows != cell_indices.size())
        throw DataError("write_matrix_csv: matrix rows and cell indices disagree");
    CsvWriter w(path);
    std::vector<std::string> header = {"region_id", "year", "month", "weekday", "interval"};
    for (const auto& n : matrix.names) header.push_back(n);
    header.push_back("label");
    w.write_row(header);
    for (std::size_t i = 0; i < matrix.n_rows; ++i) {
        const CellKey& key = grid.cells[cell_indices[i]].key;
        std::vector<std::string> row = {region_ids[key.region], std::to_string(key.year),
                                        std::to_string(key.month), std::to_string(key.weekday),
                                        std::to_string(key.interval)};
        const double* vals = matrix.row(i);
        for (std::size_t c = 0; c < matrix.n_cols(); ++c) row.push_back(format_double(vals[c]));
        row.push_back(matrix.labels[i] ? "1" : "0");
        w.write_row(row);
    }
}

}  // namespace crimegrid::dataset
