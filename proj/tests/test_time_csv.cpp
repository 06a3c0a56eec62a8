#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crimegrid/csv.hpp"
#include "crimegrid/errors.hpp"
#include "crimegrid/rng.hpp"
#include "crimegrid/timeutil.hpp"

using namespace crimegrid;

TEST_CASE("iso8601 parsing accepts the documented forms") {
    auto dt = parse_iso8601("2013-01-07T02:59");
    REQUIRE(dt.has_value());
    CHECK(dt->year == 2013);
    CHECK(dt->month == 1);
    CHECK(dt->day == 7);
    CHECK(dt->hour == 2);
    CHECK(dt->minute == 59);
    CHECK(dt->second == 0);
    CHECK(parse_iso8601("2013-01-07 02:59:31").has_value());
    CHECK(parse_iso8601("2013-01-07T02:59:31Z").has_value());
    CHECK(parse_iso8601("2012-02-29T00:00").has_value());  // leap day
}

TEST_CASE("iso8601 parsing rejects malformed input") {
    CHECK_FALSE(parse_iso8601("").has_value());
    CHECK_FALSE(parse_iso8601("2013-13-01T00:00").has_value());
    CHECK_FALSE(parse_iso8601("2013-02-29T00:00").has_value());  // not a leap year
    CHECK_FALSE(parse_iso8601("2013-01-07T24:00").has_value());
    CHECK_FALSE(parse_iso8601("2013-01-07T02:60").has_value());
    CHECK_FALSE(parse_iso8601("2013/01/07T02:59").has_value());
    CHECK_FALSE(parse_iso8601("2013-01-07T02:59:12X").has_value());
    CHECK_FALSE(parse_iso8601("null").has_value());
}

TEST_CASE("weekday computation, Monday = 0") {
    CHECK(weekday_monday0(2013, 1, 7) == 0);   // Monday
    CHECK(weekday_monday0(2012, 11, 30) == 4); // Friday
    CHECK(weekday_monday0(2012, 1, 1) == 6);   // Sunday
    CHECK(weekday_monday0(1970, 1, 1) == 3);   // Thursday
}

TEST_CASE("bin_timestamp follows the three-hour bins and season map") {
    TimeBinning binning = TimeBinning::default_binning();
    SUBCASE("first bin boundary, winter Monday") {
        auto bt = bin_timestamp(*parse_iso8601("2013-01-07T02:59"), binning);
        CHECK(bt.year == 2013);
        CHECK(bt.month == 1);
        CHECK(bt.weekday == 0);
        CHECK(bt.interval == 0);
        CHECK(bt.season == Season::winter);
    }
    SUBCASE("last bin open edge, summer") {
        auto bt = bin_timestamp(*parse_iso8601("2013-07-15T21:00"), binning);
        CHECK(bt.interval == 7);
        CHECK(bt.season == Season::summer);
    }
    SUBCASE("end of November, fall") {
        auto bt = bin_timestamp(*parse_iso8601("2012-11-30T23:59"), binning);
        CHECK(bt.interval == 7);
        CHECK(bt.season == Season::fall);
        CHECK(bt.weekday == 4);
    }
}

TEST_CASE("default seasons follow the meteorological convention") {
    TimeBinning b = TimeBinning::default_binning();
    CHECK(b.season(12) == Season::winter);
    CHECK(b.season(1) == Season::winter);
    CHECK(b.season(2) == Season::winter);
    CHECK(b.season(3) == Season::spring);
    CHECK(b.season(5) == Season::spring);
    CHECK(b.season(6) == Season::summer);
    CHECK(b.season(8) == Season::summer);
    CHECK(b.season(9) == Season::fall);
    CHECK(b.season(11) == Season::fall);
}

TEST_CASE("add_minutes crosses day and month boundaries") {
    DateTime dt = *parse_iso8601("2012-12-31T23:30");
    DateTime shifted = add_minutes(dt, 45);
    CHECK(shifted.year == 2013);
    CHECK(shifted.month == 1);
    CHECK(shifted.day == 1);
    CHECK(shifted.hour == 0);
    CHECK(shifted.minute == 15);
    DateTime back = add_minutes(shifted, -45);
    CHECK(back == dt);
}

TEST_CASE("month index round trip") {
    for (int y : {2012, 2013, 2014}) {
        for (int m = 1; m <= 12; ++m) {
            int mi = month_index(y, m);
            CHECK(month_index_year(mi) == y);
            CHECK(month_index_month(mi) == m);
        }
    }
    CHECK(month_index(2013, 1) - month_index(2012, 12) == 1);
}

TEST_CASE("csv parsing handles quotes, CRLF and embedded commas") {
    auto table = read_csv_text("a,b,c\r\n1,\"x,y\",\"he said \"\"hi\"\"\"\n2,,3\n");
    REQUIRE(table.header == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0][1] == "x,y");
    CHECK(table.rows[0][2] == "he said \"hi\"");
    CHECK(table.rows[1][1] == "");
}

TEST_CASE("csv writer round-trips through the parser") {
    Rng rng(5);
    std::vector<std::string> fields = {"plain", "with,comma", "with\"quote", "with\nnewline", ""};
    auto line = csv_join(fields);
    auto table = read_csv_text("h1,h2,h3,h4,h5\n" + line + "\n");
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0] == fields);
}

TEST_CASE("strict numeric parsing") {
    CHECK(parse_double_strict("1.25") == 1.25);
    CHECK(parse_double_strict("-3e2") == -300.0);
    CHECK_FALSE(parse_double_strict("").has_value());
    CHECK_FALSE(parse_double_strict("abc").has_value());
    CHECK_FALSE(parse_double_strict("1.2x").has_value());
    CHECK_FALSE(parse_double_strict("nan").has_value());
    CHECK_FALSE(parse_double_strict("inf").has_value());
    CHECK(parse_int_strict("42") == 42);
    CHECK_FALSE(parse_int_strict("42.5").has_value());
}

TEST_CASE("format_double round-trips bit-exactly") {
    Rng rng(9);
    for (int i = 0; i < 1000; ++i) {
        double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform_int(-12, 12));
        CHECK(parse_double_strict(format_double(v)) == v);
    }
}
