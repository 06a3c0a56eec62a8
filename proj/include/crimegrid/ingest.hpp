#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crimegrid/geo.hpp"
#include "crimegrid/timeutil.hpp"

namespace crimegrid::ingest {

struct CrimeRecord {
    geo::GeoPoint location;
    int year = 0;
    int month = 0;     // 1-12
    int weekday = 0;   // Monday = 0
    int interval = 0;  // 0-7
    std::string ucr_code;

    bool operator==(const CrimeRecord&) const = default;
};

struct StreetlightPole {
    geo::GeoPoint location;
    bool operator==(const StreetlightPole&) const = default;
};

inline constexpr int kPoiCategoryCount = 10;
// Fixed venue taxonomy of location-based check-in data; this order is canonical.
const std::array<std::string_view, kPoiCategoryCount>& poi_categories();
int poi_category_index(std::string_view name);  // -1 when unknown

struct PoiVenue {
    std::string id;
    geo::GeoPoint location;
    int category = 0;  // index into poi_categories()
    bool operator==(const PoiVenue&) const = default;
};

struct CheckinRecord {
    std::string user_id;
    std::string venue_id;
    DateTime timestamp;  // minute precision
    bool operator==(const CheckinRecord&) const = default;
};

inline constexpr int kDemographicColumnCount = 32;
// Canonical column order for demographics.csv; documented in docs/file_formats.md.
const std::array<std::string_view, kDemographicColumnCount>& demographic_columns();
int demographic_column_index(std::string_view name);

struct DemographicProfile {
    std::string region_id;
    std::array<double, kDemographicColumnCount> values{};
    bool operator==(const DemographicProfile&) const = default;
};

struct ParseStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rejected_orphan_venue = 0;  // check-ins only
    std::size_t imputed_cells = 0;          // demographics only
};

template <typename T>
struct Parsed {
    std::vector<T> records;
    ParseStats stats;
};

// regions.geojson: FeatureCollection of Polygons with id/population and
// optional area_km2 properties. Malformed features are fatal and the error
// names the offending feature.
std::vector<geo::Region> parse_regions(const std::string& path);

// crimes.csv: lat,lon,timestamp,ucr_code. Invalid rows are counted, not fatal.
Parsed<CrimeRecord> parse_crimes(const std::string& path, const TimeBinning& binning,
                                 int tz_offset_minutes = 0);

// streetlights.csv: lat,lon
Parsed<StreetlightPole> parse_streetlights(const std::string& path);

// pois.csv: id,lat,lon,category
Parsed<PoiVenue> parse_pois(const std::string& path);

// checkins.csv: user_id,venue_id,timestamp. Unknown venues are rejected with
// a distinct orphan count.
Parsed<CheckinRecord> parse_checkins(const std::string& path,
                                     std::span<const PoiVenue> venues);

// demographics.csv: region_id plus the 32 canonical columns. Missing cells
// impute to the column median and are counted.
Parsed<DemographicProfile> parse_demographics(const std::string& path);

// Canonical record-level serialization; re-parsing yields identical records.
void write_crime_records_csv(const std::string& path, std::span<const CrimeRecord> records);
Parsed<CrimeRecord> read_crime_records_csv(const std::string& path);

void write_streetlights_csv(const std::string& path, std::span<const StreetlightPole> records);
void write_pois_csv(const std::string& path, std::span<const PoiVenue> records);
void write_checkins_csv(const std::string& path, std::span<const CheckinRecord> records);
void write_demographics_csv(const std::string& path, std::span<const DemographicProfile> records);

}  // namespace crimegrid::ingest
