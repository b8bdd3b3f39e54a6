#include "cohort_pulse/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace cohort_pulse {

namespace {

std::string fmt(double v, const char* spec = "%.2f") {
    char buf[48];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

const char* band_color(PeriodCategory c) {
    switch (c) {
        case PeriodCategory::Exam: return "#e06666";
        case PeriodCategory::PreExam: return "#f4b6c2";
        case PeriodCategory::Break: return "#93c47d";
        case PeriodCategory::GoldenWeek: return "#ffd966";
        default: return nullptr;
    }
}

// Folds every configured interval onto week indices; conflicts resolve by
// the calendar's precedence order.
std::map<int, PeriodCategory> week_bands(const PeriodCalendar& cal) {
    std::map<int, PeriodCategory> bands;
    auto rank = [&](PeriodCategory c) {
        const auto& prec = cal.precedence();
        return size_t(std::find(prec.begin(), prec.end(), c) - prec.begin());
    };
    for (const PeriodSpan& s : cal.spans()) {
        const PeriodCategory cat = period_category(s.label);
        if (!band_color(cat)) continue;
        for (Date d = s.start; d <= s.end; d += std::chrono::days{1}) {
            const int w = iso_week_fold(d).value;
            auto it = bands.find(w);
            if (it == bands.end() || rank(cat) < rank(it->second)) bands[w] = cat;
        }
    }
    return bands;
}

struct Ticks {
    double lo, hi, step;
};

Ticks nice_ticks(double lo, double hi) {
    if (lo == hi) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    return {std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
}

}  // namespace

std::string emit_week_plot(const std::vector<WeekCoefficient>& series,
                           const PeriodCalendar& calendar, const WeekPlotInfo& info) {
    const double width = 640, height = 320;
    const double left = 52, right = 625, top = 34, bottom = 284;

    double lo = 0.0, hi = 0.0;
    for (const auto& wc : series) {
        lo = std::min(lo, wc.estimate);
        hi = std::max(hi, wc.estimate);
    }
    const double pad = 0.08 * std::max(hi - lo, 1e-12);
    const Ticks ty = nice_ticks(lo - pad, hi + pad);

    auto xw = [&](double week) { return left + (week - 0.5) / 52.0 * (right - left); };
    auto yv = [&](double v) {
        return bottom - (v - ty.lo) / (ty.hi - ty.lo) * (bottom - top);
    };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    s << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

    // period bands
    for (const auto& [week, cat] : week_bands(calendar)) {
        const double x0 = left + double(week - 1) / 52.0 * (right - left);
        const double x1 = left + double(week) / 52.0 * (right - left);
        s << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(x1 - x0)
          << "\" height=\"" << fmt(bottom - top) << "\" fill=\"" << band_color(cat)
          << "\" fill-opacity=\"0.45\"/>\n";
    }

    // annotation dates (grade releases), as orange verticals at their week
    for (Date d : calendar.annotations()) {
        const double x = xw(double(iso_week_fold(d).value));
        s << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(x)
          << "\" y2=\"" << fmt(bottom) << "\" stroke=\"#ff8c00\" stroke-width=\"1.5\"/>\n";
    }

    // y grid and labels
    for (double v = ty.lo; v <= ty.hi + 1e-9 * ty.step; v += ty.step) {
        const double y = yv(v);
        s << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(right)
          << "\" y2=\"" << fmt(y) << "\" stroke=\"#dddddd\" stroke-width=\"0.6\"/>\n";
        s << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(y + 3)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
          << fmt(v, "%.4g") << "</text>\n";
    }
    // zero line
    if (ty.lo < 0.0 && ty.hi > 0.0) {
        const double y0 = yv(0.0);
        s << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(right)
          << "\" y2=\"" << fmt(y0) << "\" stroke=\"#888888\" stroke-width=\"1\" "
             "stroke-dasharray=\"4 3\"/>\n";
    }
    // x ticks every 4 weeks
    for (int w = 4; w <= 52; w += 4) {
        const double x = xw(double(w));
        s << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(bottom) << "\" x2=\"" << fmt(x)
          << "\" y2=\"" << fmt(bottom + 4) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        s << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(bottom + 16)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << w
          << "</text>\n";
    }
    s << "<text x=\"" << fmt((left + right) / 2) << "\" y=\"" << fmt(height - 4)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">calendar week"
      << "</text>\n";
    s << "<text transform=\"translate(13," << fmt((top + bottom) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << "coefficient (" << info.unit << ")</text>\n";

    // axes
    s << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(right - left)
      << "\" height=\"" << fmt(bottom - top) << "\" fill=\"none\" stroke=\"black\" "
         "stroke-width=\"1\"/>\n";

    // coefficient polyline
    if (series.size() > 1) {
        s << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.3\" points=\"";
        for (size_t i = 0; i < series.size(); ++i) {
            if (i) s << ' ';
            s << fmt(xw(double(series[i].week))) << ',' << fmt(yv(series[i].estimate));
        }
        s << "\"/>\n";
    }

    // markers by significance tier
    for (const auto& wc : series) {
        const double x = xw(double(wc.week));
        const double y = yv(wc.estimate);
        if (wc.p_below_005) {
            s << "<rect x=\"" << fmt(x - 3.5) << "\" y=\"" << fmt(y - 3.5)
              << "\" width=\"7\" height=\"7\" fill=\"#1f77b4\"/>\n";
        } else if (wc.p_below_010) {
            s << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y)
              << "\" r=\"3.5\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.4\"/>\n";
        } else {
            s << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y)
              << "\" r=\"1.6\" fill=\"#1f77b4\"/>\n";
        }
    }

    // title and info box
    s << "<text x=\"" << fmt(left) << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\" "
         "font-weight=\"bold\">"
      << info.title << "</text>\n";
    const double bx = right - 212, by = top + 8;
    s << "<rect x=\"" << fmt(bx) << "\" y=\"" << fmt(by)
      << "\" width=\"204\" height=\"34\" fill=\"#eeeeee\" stroke=\"#999999\" "
         "stroke-width=\"0.8\"/>\n";
    s << "<text x=\"" << fmt(bx + 6) << "\" y=\"" << fmt(by + 14)
      << "\" font-family=\"sans-serif\" font-size=\"10\">intercept (semester median): "
      << fmt(info.reference, "%.4g") << "</text>\n";
    s << "<text x=\"" << fmt(bx + 6) << "\" y=\"" << fmt(by + 27)
      << "\" font-family=\"sans-serif\" font-size=\"10\">R&#178; marginal "
      << fmt(info.r2_marginal, "%.3f") << ", conditional " << fmt(info.r2_conditional, "%.3f")
      << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

}  // namespace cohort_pulse
