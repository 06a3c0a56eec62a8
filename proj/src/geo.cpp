#include "crimegrid/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crimegrid/errors.hpp"

namespace crimegrid::geo {

namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kBucketDeg = 0.01;
constexpr int kLonBuckets = 36000;
constexpr int kLatBuckets = 18000;
constexpr int kMaxRings = 64;           // beyond ~0.64 degrees fall back to brute force
constexpr std::size_t kBruteForceMax = 64;  // small target sets are faster without the grid

std::uint64_t bucket_key(int lat_idx, int lon_idx) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(lat_idx)) << 32) |
           static_cast<std::uint32_t>(lon_idx);
}

int lat_bucket(double lat) {
    int idx = static_cast<int>(std::floor((lat + 90.0) / kBucketDeg));
    return std::clamp(idx, 0, kLatBuckets - 1);
}

int lon_bucket(double lon) {
    int idx = static_cast<int>(std::floor((lon + 180.0) / kBucketDeg));
    idx %= kLonBuckets;
    if (idx < 0) idx += kLonBuckets;
    return idx;
}

}  // namespace

bool point_in_bounds(double lat, double lon) {
    return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 &&
           lon >= -180.0 && lon <= 180.0;
}

GeoPoint make_point(double lat, double lon) {
    if (!point_in_bounds(lat, lon))
        throw DataError("geographic point out of range: lat=" + std::to_string(lat) +
                        " lon=" + std::to_string(lon));
    return GeoPoint{lat, lon};
}

void validate_region(const Region& r) {
    if (r.ring.size() < 3)
        throw DataError("region " + r.id + ": ring needs at least 3 vertices");
    if (r.ring.front() == r.ring.back())
        throw DataError("region " + r.id + ": ring must not repeat the first vertex");
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < r.ring.size(); ++i) {
        bool dup = false;
        for (std::size_t j = 0; j < i; ++j)
            if (r.ring[i] == r.ring[j]) { dup = true; break; }
        if (!dup) ++distinct;
        if (!point_in_bounds(r.ring[i].lat, r.ring[i].lon))
            throw DataError("region " + r.id + ": ring vertex out of range");
    }
    if (distinct < 3)
        throw DataError("region " + r.id + ": ring needs at least 3 distinct vertices");
    if (!(r.area_km2 > 0.0) || !std::isfinite(r.area_km2))
        throw DataError("region " + r.id + ": area must be positive");
    if (r.population < 0)
        throw DataError("region " + r.id + ": population must be non-negative");
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
    double lat1 = a.lat * kDegToRad;
    double lat2 = b.lat * kDegToRad;
    double dlat = (b.lat - a.lat) * kDegToRad;
    double dlon = (b.lon - a.lon) * kDegToRad;
    double s = std::sin(dlat / 2.0);
    double t = std::sin(dlon / 2.0);
    double h = s * s + std::cos(lat1) * std::cos(lat2) * t * t;
    h = std::min(1.0, h);
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

namespace {

bool point_on_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
    constexpr double kTol = 1e-9;  // degrees
    double dx = b.lon - a.lon;
    double dy = b.lat - a.lat;
    double px = p.lon - a.lon;
    double py = p.lat - a.lat;
    double len2 = dx * dx + dy * dy;
    if (len2 == 0.0)
        return std::abs(px) <= kTol && std::abs(py) <= kTol;
    double t = (px * dx + py * dy) / len2;
    if (t < -kTol || t > 1.0 + kTol) return false;
    double cx = px - t * dx;
    double cy = py - t * dy;
    return cx * cx + cy * cy <= kTol * kTol;
}

}  // namespace

bool point_in_region(const GeoPoint& p, const Region& r) {
    const auto& ring = r.ring;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (point_on_segment(p, ring[i], ring[(i + 1) % n])) return true;
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const GeoPoint& a = ring[i];
        const GeoPoint& b = ring[j];
        if ((a.lat > p.lat) != (b.lat > p.lat)) {
            double x = a.lon + (p.lat - a.lat) / (b.lat - a.lat) * (b.lon - a.lon);
            if (p.lon < x) inside = !inside;
        }
    }
    return inside;
}

AssignResult assign_events(std::span<const GeoPoint> points, std::span<const Region> regions) {
    if (regions.empty()) throw DataError("assign_events: region list is empty");

    struct Bbox {
        double min_lat, max_lat, min_lon, max_lon;
    };
    std::vector<Bbox> boxes(regions.size());
    for (std::size_t i = 0; i < regions.size(); ++i) {
        Bbox b{90.0, -90.0, 180.0, -180.0};
        for (const auto& v : regions[i].ring) {
            b.min_lat = std::min(b.min_lat, v.lat);
            b.max_lat = std::max(b.max_lat, v.lat);
            b.min_lon = std::min(b.min_lon, v.lon);
            b.max_lon = std::max(b.max_lon, v.lon);
        }
        boxes[i] = b;
    }
    constexpr double kPad = 1e-9;  // keep boundary points eligible

    AssignResult out;
    out.region_index.resize(points.size(), -1);
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        const GeoPoint& p = points[pi];
        std::int32_t best = -1;
        for (std::size_t ri = 0; ri < regions.size(); ++ri) {
            const Bbox& b = boxes[ri];
            if (p.lat < b.min_lat - kPad || p.lat > b.max_lat + kPad || p.lon < b.min_lon - kPad ||
                p.lon > b.max_lon + kPad)
                continue;
            if (!point_in_region(p, regions[ri])) continue;
            if (best < 0 || regions[ri].id < regions[best].id) best = static_cast<std::int32_t>(ri);
        }
        out.region_index[pi] = best;
        if (best < 0) ++out.unassigned_count;
    }
    return out;
}

double polygon_area_km2(std::span<const GeoPoint> ring) {
    if (ring.size() < 3) throw DataError("polygon_area_km2: ring needs at least 3 vertices");
    double lat0 = 0.0, lon0 = 0.0;
    for (const auto& p : ring) {
        lat0 += p.lat;
        lon0 += p.lon;
    }
    lat0 /= static_cast<double>(ring.size());
    lon0 /= static_cast<double>(ring.size());
    const double cos_lat0 = std::cos(lat0 * kDegToRad);

    auto px = [&](const GeoPoint& p) { return kEarthRadiusKm * cos_lat0 * (p.lon - lon0) * kDegToRad; };
    auto py = [&](const GeoPoint& p) { return kEarthRadiusKm * (p.lat - lat0) * kDegToRad; };

    double twice_area = 0.0;
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
        twice_area += px(ring[j]) * py(ring[i]) - px(ring[i]) * py(ring[j]);
    }
    double area = std::abs(twice_area) / 2.0;
    if (area <= 1e-12) throw DataError("polygon_area_km2: degenerate (zero-area) ring");
    return area;
}

NearestNeighborIndex::NearestNeighborIndex(std::span<const GeoPoint> targets)
    : targets_(targets.begin(), targets.end()) {
    if (targets_.empty()) throw DataError("nearest-neighbor index: no targets");
    bool high_latitude = false;
    for (const auto& t : targets_)
        if (std::abs(t.lat) > 85.0) high_latitude = true;
    use_buckets_ = targets_.size() > kBruteForceMax && !high_latitude;
    if (!use_buckets_) return;
    buckets_.reserve(targets_.size());
    for (std::uint32_t i = 0; i < targets_.size(); ++i) {
        buckets_[bucket_key(lat_bucket(targets_[i].lat), lon_bucket(targets_[i].lon))].push_back(i);
    }
}

double NearestNeighborIndex::brute_force_km(const GeoPoint& source) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : targets_) best = std::min(best, haversine_km(source, t));
    return best;
}

double NearestNeighborIndex::nearest_km(const GeoPoint& source) const {
    if (!use_buckets_ || std::abs(source.lat) > 85.0) return brute_force_km(source);

    const int lat0 = lat_bucket(source.lat);
    const int lon0 = lon_bucket(source.lon);
    const double cos_lat1 = std::cos(source.lat * kDegToRad);
    double best = std::numeric_limits<double>::infinity();

    auto scan_bucket = [&](int la, int lo) {
        if (la < 0 || la >= kLatBuckets) return;
        lo %= kLonBuckets;
        if (lo < 0) lo += kLonBuckets;
        auto it = buckets_.find(bucket_key(la, lo));
        if (it == buckets_.end()) return;
        for (std::uint32_t idx : it->second)
            best = std::min(best, haversine_km(source, targets_[idx]));
    };

    // Lower bound on the distance to any target in ring >= k. Such a target is
    // separated by at least (k-1) cells in latitude or in longitude; the
    // longitude-only case needs the cosine correction and a split on how far
    // the target latitude can drift.
    auto ring_lower_bound_km = [&](int k) {
        double d_rad = (k - 1) * kBucketDeg * kDegToRad;
        if (d_rad <= 0.0) return 0.0;
        double lat_case = kEarthRadiusKm * d_rad / 2.0;
        double max_abs_lat = std::min(90.0 * kDegToRad,
                                      std::abs(source.lat) * kDegToRad + d_rad / 2.0);
        double cos2 = std::cos(max_abs_lat);
        double arg = std::sqrt(std::max(0.0, cos_lat1 * cos2)) * std::sin(d_rad / 2.0);
        double lon_case = 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, arg));
        return std::min(lat_case, lon_case);
    };

    for (int k = 0; k <= kMaxRings; ++k) {
        if (k == 0) {
            scan_bucket(lat0, lon0);
        } else {
            for (int d = -k; d <= k; ++d) {
                scan_bucket(lat0 - k, lon0 + d);
                scan_bucket(lat0 + k, lon0 + d);
            }
            for (int d = -k + 1; d <= k - 1; ++d) {
                scan_bucket(lat0 + d, lon0 - k);
                scan_bucket(lat0 + d, lon0 + k);
            }
        }
        if (std::isfinite(best) && best <= ring_lower_bound_km(k + 1)) return best;
    }
    return brute_force_km(source);
}

double avg_min_distance_km(std::span<const GeoPoint> sources, std::span<const GeoPoint> targets) {
    if (sources.empty()) throw DataError("avg_min_distance_km: no source points");
    if (targets.empty()) throw DataError("avg_min_distance_km: no target points");
    NearestNeighborIndex index(targets);
    double sum = 0.0;
    for (const auto& s : sources) sum += index.nearest_km(s);
    return sum / static_cast<double>(sources.size());
}

}  // namespace crimegrid::geo
