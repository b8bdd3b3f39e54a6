#include "cohort_pulse/time.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace cohort_pulse {

namespace {

bool parse_uint(std::string_view s, size_t pos, size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int value = 0;
    for (size_t i = pos; i < pos + len; ++i) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (!std::isdigit(c)) return false;
        value = value * 10 + (c - '0');
    }
    out = value;
    return true;
}

std::optional<Date> parse_ymd(std::string_view s) {
    // strict "YYYY-MM-DD"
    int y = 0, m = 0, d = 0;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!parse_uint(s, 0, 4, y) || !parse_uint(s, 5, 2, m) || !parse_uint(s, 8, 2, d))
        return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                    std::chrono::day{unsigned(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{std::chrono::sys_days{ymd}};
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) { return parse_ymd(text); }

std::optional<Instant> parse_instant(std::string_view text) {
    using namespace std::chrono;
    if (text.size() == 10) {
        auto d = parse_ymd(text);
        if (!d) return std::nullopt;
        return Instant{time_point_cast<seconds>(*d)};
    }
    if (text.size() < 19 || (text[10] != 'T' && text[10] != ' ')) return std::nullopt;
    auto d = parse_ymd(text.substr(0, 10));
    if (!d) return std::nullopt;
    int hh = 0, mm = 0, ss = 0;
    if (text[13] != ':' || text[16] != ':') return std::nullopt;
    if (!parse_uint(text, 11, 2, hh) || !parse_uint(text, 14, 2, mm) || !parse_uint(text, 17, 2, ss))
        return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;  // 60 tolerated, folds over

    Instant utc = time_point_cast<seconds>(*d) + hours{hh} + minutes{mm} + seconds{ss};

    std::string_view rest = text.substr(19);
    if (rest.empty() || rest == "Z" || rest == "z") return utc;

    // offset suffix: ±hh:mm or ±hhmm
    if (rest[0] != '+' && rest[0] != '-') return std::nullopt;
    int sign = rest[0] == '+' ? 1 : -1;
    int oh = 0, om = 0;
    if (rest.size() == 6 && rest[3] == ':') {
        if (!parse_uint(rest, 1, 2, oh) || !parse_uint(rest, 4, 2, om)) return std::nullopt;
    } else if (rest.size() == 5) {
        if (!parse_uint(rest, 1, 2, oh) || !parse_uint(rest, 3, 2, om)) return std::nullopt;
    } else {
        return std::nullopt;
    }
    if (oh > 14 || om > 59) return std::nullopt;
    return utc - sign * (hours{oh} + minutes{om});
}

std::string format_instant_utc(Instant t) {
    using namespace std::chrono;
    auto day = floor<days>(t);
    year_month_day ymd{day};
    hh_mm_ss tod{t - day};
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ",
                  int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()),
                  static_cast<long long>(tod.hours().count()),
                  static_cast<long long>(tod.minutes().count()),
                  static_cast<long long>(tod.seconds().count()));
    return buf;
}

std::string format_date(Date d) {
    std::chrono::year_month_day ymd{d};
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
}

Date local_date(Instant t, UtcOffset offset) {
    return std::chrono::floor<std::chrono::days>(t + offset);
}

namespace {

// ISO weekday, Monday = 1 .. Sunday = 7.
int iso_weekday(Date d) {
    std::chrono::weekday wd{d};
    return int(wd.iso_encoding());
}

int day_of_year(Date d) {
    std::chrono::year_month_day ymd{d};
    Date jan1{std::chrono::sys_days{ymd.year() / std::chrono::January / 1}};
    return int((d - jan1).count()) + 1;
}

bool starts_or_ends_on_thursday(int y) {
    using namespace std::chrono;
    Date jan1{sys_days{year{y} / January / 1}};
    Date dec31{sys_days{year{y} / December / 31}};
    return iso_weekday(jan1) == 4 || iso_weekday(dec31) == 4;
}

}  // namespace

int iso_weeks_in_year(int y) { return starts_or_ends_on_thursday(y) ? 53 : 52; }

IsoWeek iso_week(Date d) {
    std::chrono::year_month_day ymd{d};
    int y = int(ymd.year());
    int w = (day_of_year(d) - iso_weekday(d) + 10) / 7;
    if (w < 1) return {y - 1, iso_weeks_in_year(y - 1)};
    if (w > iso_weeks_in_year(y)) return {y + 1, 1};
    return {y, w};
}

}  // namespace cohort_pulse
