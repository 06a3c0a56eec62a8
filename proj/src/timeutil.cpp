#include "crimegrid/timeutil.hpp"

#include <charconv>
#include <cstdio>

namespace crimegrid {

std::string_view season_name(Season s) {
    switch (s) {
        case Season::winter: return "winter";
        case Season::spring: return "spring";
        case Season::summer: return "summer";
        case Season::fall: return "fall";
    }
    return "?";
}

long long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

void civil_from_days(long long z, int& y, int& m, int& d) {
    z += 719468;
    const long long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long long yy = static_cast<long long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
    static constexpr int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap_year(year)) return 29;
    return lengths[month - 1];
}

int weekday_monday0(int year, int month, int day) {
    long long z = days_from_civil(year, month, day);
    // 1970-01-01 was a Thursday (=3 with Monday=0)
    long long wd = (z + 3) % 7;
    if (wd < 0) wd += 7;
    return static_cast<int>(wd);
}

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, value);
    if (ec != std::errc() || ptr != s.data() + pos + len) return false;
    out = value;
    return true;
}

}  // namespace

std::optional<DateTime> parse_iso8601(std::string_view text) {
    // YYYY-MM-DD[T ]HH:MM[:SS][Z]
    if (text.size() < 16) return std::nullopt;
    DateTime dt;
    if (!read_int(text, 0, 4, dt.year) || text[4] != '-' ||
        !read_int(text, 5, 2, dt.month) || text[7] != '-' ||
        !read_int(text, 8, 2, dt.day))
        return std::nullopt;
    if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
    if (!read_int(text, 11, 2, dt.hour) || text[13] != ':' || !read_int(text, 14, 2, dt.minute))
        return std::nullopt;
    std::size_t pos = 16;
    if (pos < text.size() && text[pos] == ':') {
        if (!read_int(text, pos + 1, 2, dt.second)) return std::nullopt;
        pos += 3;
    }
    if (pos < text.size() && text[pos] == 'Z') ++pos;
    if (pos != text.size()) return std::nullopt;

    if (dt.month < 1 || dt.month > 12) return std::nullopt;
    if (dt.day < 1 || dt.day > days_in_month(dt.year, dt.month)) return std::nullopt;
    if (dt.hour < 0 || dt.hour > 23 || dt.minute < 0 || dt.minute > 59 || dt.second < 0 ||
        dt.second > 59)
        return std::nullopt;
    return dt;
}

std::string format_iso8601(const DateTime& dt) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", dt.year, dt.month, dt.day,
                  dt.hour, dt.minute, dt.second);
    return buf;
}

DateTime add_minutes(const DateTime& dt, long long minutes) {
    long long total = days_from_civil(dt.year, dt.month, dt.day) * 1440ll + dt.hour * 60ll +
                      dt.minute + minutes;
    long long days = total / 1440;
    long long rem = total % 1440;
    if (rem < 0) {
        rem += 1440;
        days -= 1;
    }
    DateTime out;
    civil_from_days(days, out.year, out.month, out.day);
    out.hour = static_cast<int>(rem / 60);
    out.minute = static_cast<int>(rem % 60);
    out.second = dt.second;
    return out;
}

TimeBinning TimeBinning::default_binning() {
    TimeBinning b;
    for (int m = 1; m <= 12; ++m) {
        Season s = Season::winter;
        if (m >= 3 && m <= 5) s = Season::spring;
        else if (m >= 6 && m <= 8) s = Season::summer;
        else if (m >= 9 && m <= 11) s = Season::fall;
        b.season_of_month[m - 1] = s;
    }
    return b;
}

BinnedTime bin_timestamp(const DateTime& local, const TimeBinning& binning) {
    BinnedTime out;
    out.year = local.year;
    out.month = local.month;
    out.weekday = weekday_monday0(local.year, local.month, local.day);
    out.interval = interval_of_hour(local.hour);
    out.season = binning.season(local.month);
    return out;
}

}  // namespace crimegrid
