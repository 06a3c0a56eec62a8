#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace crimegrid {

constexpr int kIntervalsPerDay = 8;  // three-hour bins starting 00:00 local
constexpr int kSeasonCount = 4;

enum class Season : int { winter = 0, spring = 1, summer = 2, fall = 3 };

std::string_view season_name(Season s);

// Naive wall-clock datetime; timezone handling is a single offset applied
// before binning (see RunConfig::timezone_offset_minutes).
struct DateTime {
    int year = 1970;
    int month = 1;  // 1-12
    int day = 1;    // 1-31
    int hour = 0;
    int minute = 0;
    int second = 0;

    bool operator==(const DateTime&) const = default;
};

// days since 1970-01-01 (Howard Hinnant's civil-days algorithm)
long long days_from_civil(int y, int m, int d);
void civil_from_days(long long z, int& y, int& m, int& d);
int days_in_month(int year, int month);
bool is_leap_year(int year);

// Monday = 0 ... Sunday = 6
int weekday_monday0(int year, int month, int day);

// Accepts YYYY-MM-DD[T ]HH:MM[:SS][Z]; rejects anything out of calendar range.
std::optional<DateTime> parse_iso8601(std::string_view text);
std::string format_iso8601(const DateTime& dt);

DateTime add_minutes(const DateTime& dt, long long minutes);

// absolute month index used for windows and folds
constexpr int month_index(int year, int month) { return year * 12 + (month - 1); }
constexpr int month_index_year(int mi) { return mi >= 0 ? mi / 12 : -((-mi + 11) / 12); }
constexpr int month_index_month(int mi) { return mi - month_index_year(mi) * 12 + 1; }

// half-open [begin, end) over absolute month indices
struct MonthWindow {
    int begin = 0;
    int end = 0;

    constexpr bool contains(int mi) const { return mi >= begin && mi < end; }
    constexpr int months() const { return end - begin; }
    bool operator==(const MonthWindow&) const = default;
};

// 8 fixed three-hour intervals plus a configurable month-to-season map.
// Default seasons follow the meteorological convention: Dec-Feb winter,
// Mar-May spring, Jun-Aug summer, Sep-Nov fall.
struct TimeBinning {
    std::array<Season, 12> season_of_month;  // index 0 = January

    static TimeBinning default_binning();
    Season season(int month) const { return season_of_month[month - 1]; }
};

constexpr int interval_of_hour(int hour) { return hour / 3; }

struct BinnedTime {
    int year;
    int month;     // 1-12
    int weekday;   // Monday = 0
    int interval;  // 0-7
    Season season;
};

BinnedTime bin_timestamp(const DateTime& local, const TimeBinning& binning);

}  // namespace crimegrid
