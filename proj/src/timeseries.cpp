#include "ballast/timeseries.hpp"

#include "ballast/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

namespace ballast {

bool is_intensive(Unit u) {
    return u != Unit::kilowatt_hour;
}

std::string unit_name(Unit u) {
    switch (u) {
        case Unit::celsius: return "degC";
        case Unit::kilowatt_hour: return "kWh";
        case Unit::grams_co2_per_kwh: return "gCO2/kWh";
        case Unit::persons: return "persons";
        case Unit::kilowatt: return "kW";
        case Unit::dimensionless: return "-";
    }
    return "?";
}

Unit unit_from_name(const std::string& name) {
    if (name == "degC" || name == "C" || name == "°C") return Unit::celsius;
    if (name == "kWh") return Unit::kilowatt_hour;
    if (name == "gCO2/kWh") return Unit::grams_co2_per_kwh;
    if (name == "persons") return Unit::persons;
    if (name == "kW") return Unit::kilowatt;
    if (name == "-" || name == "dimensionless") return Unit::dimensionless;
    throw ParseError("unknown unit tag: '" + name + "'");
}

namespace {

int parse_int(const std::string& s, std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
            throw ParseError("bad timestamp: '" + s + "'");
        v = v * 10 + (s[i] - '0');
    }
    return v;
}

}  // namespace

TimePoint parse_timestamp(const std::string& text) {
    // YYYY-MM-DD[T ]HH:MM[:SS][Z]
    std::string s = text;
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.pop_back();
    if (s.size() < 16 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':')
        throw ParseError("bad timestamp: '" + text + "'");

    const int year = parse_int(s, 0, 4);
    const int month = parse_int(s, 5, 2);
    const int day = parse_int(s, 8, 2);
    const int hour = parse_int(s, 11, 2);
    const int minute = parse_int(s, 14, 2);
    int second = 0;
    if (s.size() > 16) {
        if (s.size() != 19 || s[16] != ':')
            throw ParseError("bad timestamp: '" + text + "'");
        second = parse_int(s, 17, 2);
    }

    const std::chrono::year_month_day ymd{std::chrono::year{year},
                                          std::chrono::month{static_cast<unsigned>(month)},
                                          std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok() || hour > 23 || minute > 59 || second > 60)
        throw ParseError("bad timestamp: '" + text + "'");

    return std::chrono::sys_days{ymd} + std::chrono::hours{hour} +
           std::chrono::minutes{minute} + std::chrono::seconds{second};
}

std::string format_timestamp(TimePoint t) {
    const auto days = std::chrono::floor<std::chrono::days>(t);
    const std::chrono::year_month_day ymd{days};
    const auto tod = std::chrono::hh_mm_ss{t - days};
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<long>(tod.hours().count()),
                  static_cast<long>(tod.minutes().count()),
                  static_cast<long>(tod.seconds().count()));
    return buf;
}

TimeSeries::TimeSeries(TimePoint start, Minutes step, std::vector<double> values, Unit unit)
    : start_(start), step_(step), values_(std::move(values)), unit_(unit) {
    if (step_.count() <= 0) throw Error("time series step must be positive");
    if (values_.empty()) throw EmptySeries("time series requires at least one sample");
    for (double v : values_)
        if (!std::isfinite(v)) throw Error("time series values must be finite");
}

double TimeSeries::at(std::size_t i) const {
    if (i >= values_.size()) throw OutOfRange("time series index out of range");
    return values_[i];
}

std::size_t TimeSeries::index_of(TimePoint t) const {
    const auto offset = t - start_;
    const auto step_s = std::chrono::seconds(step_).count();
    if (offset.count() < 0 || offset.count() % step_s != 0)
        throw SignalGap("timestamp " + format_timestamp(t) + " is not on the sampling grid");
    const auto idx = static_cast<std::size_t>(offset.count() / step_s);
    if (idx >= values_.size())
        throw SignalGap("timestamp " + format_timestamp(t) + " is beyond the series end");
    return idx;
}

TimeSeries TimeSeries::add(const TimeSeries& other) const {
    if (unit_ != other.unit_)
        throw UnitMismatch("cannot add " + unit_name(unit_) + " to " + unit_name(other.unit_));
    if (step_ != other.step_ || start_ != other.start_ || size() != other.size())
        throw LengthMismatch("series are not aligned");
    std::vector<double> out(values_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += other.values_[i];
    return TimeSeries(start_, step_, std::move(out), unit_);
}

TimeSeries resample(const TimeSeries& s, Minutes new_step) {
    if (new_step.count() <= 0) throw Error("resample step must be positive");
    if (s.size() == 0) throw EmptySeries("cannot resample an empty series");
    const auto old_min = s.step().count();
    const auto new_min = new_step.count();
    if (new_min == old_min) return s;

    const bool extensive = !is_intensive(s.unit());
    if (new_min > old_min) {
        // downsample: whole blocks only
        if (new_min % old_min != 0)
            throw NonIntegerRatio("cannot resample " + std::to_string(old_min) + " min to " +
                                  std::to_string(new_min) + " min");
        const auto factor = static_cast<std::size_t>(new_min / old_min);
        if (s.size() % factor != 0)
            throw NonIntegerRatio("series length " + std::to_string(s.size()) +
                                  " is not a multiple of the block size " + std::to_string(factor));
        std::vector<double> out;
        out.reserve(s.size() / factor);
        for (std::size_t b = 0; b < s.size(); b += factor) {
            double acc = 0.0;
            for (std::size_t i = 0; i < factor; ++i) acc += s.values()[b + i];
            out.push_back(extensive ? acc : acc / static_cast<double>(factor));
        }
        return TimeSeries(s.start_time(), new_step, std::move(out), s.unit());
    }

    // upsample: hold intensive values, split energy uniformly
    if (old_min % new_min != 0)
        throw NonIntegerRatio("cannot resample " + std::to_string(old_min) + " min to " +
                              std::to_string(new_min) + " min");
    const auto factor = static_cast<std::size_t>(old_min / new_min);
    std::vector<double> out;
    out.reserve(s.size() * factor);
    for (double v : s.values()) {
        const double piece = extensive ? v / static_cast<double>(factor) : v;
        for (std::size_t i = 0; i < factor; ++i) out.push_back(piece);
    }
    return TimeSeries(s.start_time(), new_step, std::move(out), s.unit());
}

std::vector<double> window(const TimeSeries& s, std::size_t k, std::size_t m) {
    if (k + m > s.size() || k + m < k)
        throw OutOfRange("window [" + std::to_string(k) + ", " + std::to_string(k + m) +
                         ") exceeds series length " + std::to_string(s.size()));
    return std::vector<double>(s.values().begin() + static_cast<std::ptrdiff_t>(k),
                               s.values().begin() + static_cast<std::ptrdiff_t>(k + m));
}

namespace {

void validate_profile(const std::vector<ScheduleSegment>& segs, const char* which) {
    if (segs.empty()) throw Error(std::string(which) + " profile is empty");
    double cursor = 0.0;
    for (const auto& seg : segs) {
        if (!std::isfinite(seg.value)) throw Error("schedule values must be finite");
        if (seg.start_hour != cursor)
            throw Error(std::string(which) + " profile has a gap or overlap at hour " +
                        std::to_string(seg.start_hour));
        if (seg.end_hour <= seg.start_hour)
            throw Error(std::string(which) + " profile has a non-positive segment");
        cursor = seg.end_hour;
    }
    if (cursor != 24.0)
        throw Error(std::string(which) + " profile does not cover [0, 24)");
}

}  // namespace

Schedule::Schedule(std::vector<ScheduleSegment> weekday, std::vector<ScheduleSegment> weekend)
    : weekday_(std::move(weekday)), weekend_(std::move(weekend)) {
    validate_profile(weekday_, "weekday");
    validate_profile(weekend_, "weekend");
}

double Schedule::sample(TimePoint t_utc, Minutes tz_offset) const {
    const TimePoint local = t_utc + tz_offset;
    const auto days = std::chrono::floor<std::chrono::days>(local);
    const std::chrono::weekday wd{days};
    const double hour =
        static_cast<double>(std::chrono::duration_cast<std::chrono::seconds>(local - days).count()) /
        3600.0;
    const auto& profile =
        (wd == std::chrono::Saturday || wd == std::chrono::Sunday) ? weekend_ : weekday_;
    for (const auto& seg : profile)
        if (hour >= seg.start_hour && hour < seg.end_hour) return seg.value;
    return profile.back().value;  // unreachable: profiles tile [0, 24)
}

TimeSeries schedule_series(const Schedule& sch, TimePoint start, Minutes step,
                           std::size_t n_steps, Minutes tz_offset, Unit unit) {
    std::vector<double> values;
    values.reserve(n_steps);
    for (std::size_t i = 0; i < n_steps; ++i)
        values.push_back(sch.sample(start + i * step, tz_offset));
    return TimeSeries(start, step, std::move(values), unit);
}

}  // namespace ballast
