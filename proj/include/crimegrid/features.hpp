#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "crimegrid/geo.hpp"
#include "crimegrid/ingest.hpp"
#include "crimegrid/timeutil.hpp"

namespace crimegrid::features {

// The schema reports 9 POI categories; "event" venues fold into
// professional_other so category counts still sum to the region total.
inline constexpr int kReportedPoiCategories = 9;
const std::array<std::string_view, kReportedPoiCategories>& reported_poi_categories();
int reported_poi_index(int raw_category);

enum class Group : char { R = 'R', D = 'D', S = 'S', F = 'F', P = 'P' };
char group_letter(Group g);
Group group_from_letter(char c);

struct Column {
    std::string name;
    Group group;
};

struct FeatureSchema {
    std::vector<Column> columns;

    std::size_t count(Group g) const;
    std::size_t size() const { return columns.size(); }
};

struct FeatureOptions {
    bool include_light_distance = false;  // third streetlight feature, off by default
};

// The 65-column (66 with the light-distance flag) cell-level schema: the
// temporal encodings plus every region feature joined at matrix-assembly
// time by the cell's season and interval.
FeatureSchema matrix_schema(const FeatureOptions& opts = {});

// Crime joined to its region plus the binned time fields.
struct AssignedCrime {
    std::int32_t region;  // region index
    int year;
    int month;     // 1-12
    int weekday;   // Monday = 0
    int interval;  // 0-7
};

// Check-in resolved through its venue to a region, with an interned user id.
struct AssignedCheckin {
    std::int32_t region;
    int month_idx;  // absolute month index
    int interval;
    std::int32_t user;
};

// Parsed records joined into region space once; reused across fold windows.
struct CityData {
    std::vector<geo::Region> regions;  // sorted by id
    TimeBinning binning;

    std::vector<AssignedCrime> crimes;
    std::size_t crimes_unassigned = 0;

    std::vector<geo::GeoPoint> crime_points;   // aligned with crimes
    std::vector<geo::GeoPoint> light_points;   // every accepted pole
    std::vector<std::int32_t> light_region;    // -1 when outside all regions

    std::vector<std::int32_t> poi_region;      // aligned with poi_category
    std::vector<int> poi_category;             // raw 10-category index
    std::size_t pois_unassigned = 0;

    std::vector<AssignedCheckin> checkins;     // only check-ins inside a region
    std::int32_t user_count = 0;

    std::vector<std::array<double, ingest::kDemographicColumnCount>> demographics;

    int region_index(std::string_view id) const;  // -1 when unknown
    MonthWindow crime_month_span() const;
};

CityData assemble_city(std::vector<geo::Region> regions,
                       std::span<const ingest::CrimeRecord> crimes,
                       std::span<const ingest::StreetlightPole> lights,
                       std::span<const ingest::PoiVenue> pois,
                       std::span<const ingest::CheckinRecord> checkins,
                       std::span<const ingest::DemographicProfile> demographics,
                       const TimeBinning& binning, int tz_offset_minutes = 0);

struct HistoricalFeatures {
    double crime_frequency = 0.0;                 // CR(r) inside the window
    double crime_density_pop = 0.0;               // CR(r) / P(r)
    double crime_density_area = 0.0;              // CR(r) / A(r)
    std::array<double, kSeasonCount> season_share{};  // seasonal count / CR(r)
};

std::vector<HistoricalFeatures> crime_history_features(const CityData& city, MonthWindow window);

struct StreetlightFeatures {
    double count = 0.0;           // St(r)
    double density = 0.0;         // St(r) / A(r)
    double avg_min_crime_distance_km = 0.0;  // crimes in r to nearest pole
};

std::vector<StreetlightFeatures> streetlight_features(const CityData& city,
                                                      MonthWindow crime_window,
                                                      bool with_distance);

struct PoiFeatures {
    double total = 0.0;  // N(r)
    std::array<double, kReportedPoiCategories> count{};         // N_c(r)
    std::array<double, kReportedPoiCategories> share{};         // N_c(r) / N(r)
    std::array<double, kReportedPoiCategories> area_density{};  // N_c(r) / A(r), unselected
};

std::vector<PoiFeatures> poi_features(const CityData& city);

struct DynamicFeatures {
    std::array<double, kIntervalsPerDay> checkin_total{};    // Ck(r,t)
    std::array<double, kIntervalsPerDay> checkin_share{};    // Ck(r,t) / Ck(r)
    std::array<double, kIntervalsPerDay> checkin_area_density{};  // Ck(r,t) / A(r), unselected
    std::array<double, kIntervalsPerDay> visitor_count{};    // distinct users
    std::array<double, kIntervalsPerDay> region_popularity{};  // Ck(r,t) / Ck(t)
    double region_total = 0.0;  // Ck(r)
};

std::vector<DynamicFeatures> dynamic_features(const CityData& city, MonthWindow window);

struct RegionFeatures {
    std::string region_id;
    HistoricalFeatures historical;
    std::array<double, ingest::kDemographicColumnCount> demographics{};
    StreetlightFeatures streetlight;
    PoiFeatures poi;
    DynamicFeatures dynamic;
};

struct RegionFeatureTable {
    std::vector<RegionFeatures> rows;  // aligned with CityData region index
    FeatureSchema schema;              // the cell-level matrix schema
    FeatureOptions options;
    std::array<Season, 12> season_of_month{};
    MonthWindow window{};
};

RegionFeatureTable build_region_features(const CityData& city, MonthWindow window,
                                         const FeatureOptions& opts = {});

// region_features.csv plus a <path>.schema.csv sidecar with column,group rows.
void write_region_features_csv(const std::string& path, const RegionFeatureTable& table);

}  // namespace crimegrid::features
