#include "digest/dates.hpp"

#include <charconv>
#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace digest {

namespace {

int parse_int_field(const std::string& s, size_t pos, size_t len) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, value);
    if (ec != std::errc() || ptr != s.data() + pos + len) {
        throw std::invalid_argument("bad date field in '" + s + "'");
    }
    return value;
}

}  // namespace

bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int last_day_of_month(int year, int month) {
    static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month < 1 || month > 12) throw std::invalid_argument("month out of range");
    if (month == 2 && is_leap_year(year)) return 29;
    return kDays[month - 1];
}

CalendarDate CalendarDate::parse(const std::string& iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
        throw std::invalid_argument("expected YYYY-MM-DD, got '" + iso + "'");
    }
    CalendarDate d;
    d.year = parse_int_field(iso, 0, 4);
    d.month = parse_int_field(iso, 5, 2);
    d.day = parse_int_field(iso, 8, 2);
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > last_day_of_month(d.year, d.month)) {
        throw std::invalid_argument("invalid calendar date '" + iso + "'");
    }
    return d;
}

CalendarDate CalendarDate::from_days(std::chrono::sys_days days) {
    const std::chrono::year_month_day ymd{days};
    return CalendarDate{int(ymd.year()), int(unsigned(ymd.month())), int(unsigned(ymd.day()))};
}

std::chrono::sys_days CalendarDate::to_days() const {
    using namespace std::chrono;
    return sys_days{year_month_day{std::chrono::year{year}, std::chrono::month{unsigned(month)},
                                   std::chrono::day{unsigned(day)}}};
}

CalendarDate CalendarDate::plus_days(int n) const {
    return from_days(to_days() + std::chrono::days{n});
}

std::string CalendarDate::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

DateWindow DateWindow::for_month(int year, int month) {
    return DateWindow{CalendarDate{year, month, 1},
                      CalendarDate{year, month, last_day_of_month(year, month)}};
}

DateWindow DateWindow::parse_month(const std::string& year_month) {
    if (year_month.size() != 7 || year_month[4] != '-') {
        throw std::invalid_argument("expected YYYY-MM, got '" + year_month + "'");
    }
    const int y = parse_int_field(year_month, 0, 4);
    const int m = parse_int_field(year_month, 5, 2);
    if (m < 1 || m > 12) throw std::invalid_argument("month out of range in '" + year_month + "'");
    return for_month(y, m);
}

std::string DateWindow::period_label() const {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", start.year, start.month);
    return buf;
}

DateWindow compute_window(const CalendarDate& run_date, int lag_days) {
    if (lag_days < 1) throw std::invalid_argument("lag_days must be >= 1");
    int y = run_date.year;
    int m = run_date.month;
    for (;;) {
        const CalendarDate last{y, m, last_day_of_month(y, m)};
        if (last.plus_days(lag_days) <= run_date) return DateWindow::for_month(y, m);
        if (m == 1) {
            m = 12;
            --y;
        } else {
            --m;
        }
    }
}

std::string utc_now_iso8601() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace digest
