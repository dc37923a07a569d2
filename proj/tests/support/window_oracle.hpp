#pragma once

#include <chrono>
#include <utility>

namespace digest::testing {

struct OracleWindow {
    int start_year, start_month, start_day;
    int end_year, end_month, end_day;
};

// Month-enumeration oracle built directly on std::chrono calendar types: walk
// months backward from the run month and take the first whose last day plus
// the lag does not pass the run date.
inline OracleWindow oracle_window(int year, int month, int day, int lag_days) {
    using namespace std::chrono;
    const sys_days run = sys_days{std::chrono::year{year} / month / day};
    year_month ym{std::chrono::year{year}, std::chrono::month{unsigned(month)}};
    for (;;) {
        const year_month_day_last last{ym.year(), month_day_last{ym.month()}};
        if (sys_days{last} + days{lag_days} <= run) {
            const year_month_day first{ym.year(), ym.month(), std::chrono::day{1}};
            const year_month_day last_ymd{last};
            return OracleWindow{int(first.year()), int(unsigned(first.month())),
                                int(unsigned(first.day())), int(last_ymd.year()),
                                int(unsigned(last_ymd.month())), int(unsigned(last_ymd.day()))};
        }
        ym -= months{1};
    }
}

}  // namespace digest::testing
