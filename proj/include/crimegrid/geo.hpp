#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace crimegrid::geo {

// IUGG mean Earth radius, pinned so distances are bit-comparable in tests.
constexpr double kEarthRadiusKm = 6371.0088;

struct GeoPoint {
    double lat = 0.0;  // degrees, [-90, 90]
    double lon = 0.0;  // degrees, [-180, 180]

    bool operator==(const GeoPoint&) const = default;
};

bool point_in_bounds(double lat, double lon);
GeoPoint make_point(double lat, double lon);  // throws DataError when out of range

// Dissemination-area-like region: simple polygon ring without the closing
// vertex, plus the census attributes the feature equations need.
struct Region {
    std::string id;
    std::vector<GeoPoint> ring;
    double area_km2 = 0.0;
    long long population = 0;
};

void validate_region(const Region& r);  // throws DataError naming the region

double haversine_km(const GeoPoint& a, const GeoPoint& b);

// Even-odd ray casting in lat/lon coordinates; boundary points count inside.
bool point_in_region(const GeoPoint& p, const Region& r);

struct AssignResult {
    std::vector<std::int32_t> region_index;  // -1 = outside every region
    std::size_t unassigned_count = 0;
};

// Points on shared borders resolve to the lexicographically smallest region
// id. Region list must be non-empty.
AssignResult assign_events(std::span<const GeoPoint> points, std::span<const Region> regions);

// Shoelace area after an equirectangular projection about the ring centroid;
// positive regardless of winding. Degenerate rings raise DataError.
double polygon_area_km2(std::span<const GeoPoint> ring);

// Spatial bucket grid (0.01 degree cells) over a fixed target set, with
// brute-force fallback for small or high-latitude inputs.
class NearestNeighborIndex {
public:
    explicit NearestNeighborIndex(std::span<const GeoPoint> targets);

    double nearest_km(const GeoPoint& source) const;
    std::size_t size() const { return targets_.size(); }

private:
    double brute_force_km(const GeoPoint& source) const;

    std::vector<GeoPoint> targets_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
    bool use_buckets_ = false;
};

// Mean over sources of the distance to the nearest target.
double avg_min_distance_km(std::span<const GeoPoint> sources, std::span<const GeoPoint> targets);

}  // namespace crimegrid::geo
