#pragma once

#include <chrono>
#include <compare>
#include <string>

namespace digest {

// Proleptic Gregorian calendar date, interpreted as UTC throughout the pipeline.
struct CalendarDate {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..last_day_of_month

    static CalendarDate parse(const std::string& iso);  // strict "YYYY-MM-DD"
    static CalendarDate from_days(std::chrono::sys_days days);

    std::chrono::sys_days to_days() const;
    CalendarDate plus_days(int n) const;
    std::string to_string() const;  // "YYYY-MM-DD"

    auto operator<=>(const CalendarDate&) const = default;
};

bool is_leap_year(int year);
int last_day_of_month(int year, int month);

// Closed interval covering exactly one calendar month.
struct DateWindow {
    CalendarDate start;
    CalendarDate end;

    static DateWindow for_month(int year, int month);
    static DateWindow parse_month(const std::string& year_month);  // "YYYY-MM"

    bool contains(const CalendarDate& d) const { return start <= d && d <= end; }
    std::string period_label() const;  // "YYYY-MM"

    bool operator==(const DateWindow&) const = default;
};

// Most recent full calendar month M with last_day(M) + lag_days <= run_date.
// A qualifying month always exists; lag_days must be >= 1.
DateWindow compute_window(const CalendarDate& run_date, int lag_days);

std::string utc_now_iso8601();

}  // namespace digest
