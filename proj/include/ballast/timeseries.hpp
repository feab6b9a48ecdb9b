#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <vector>

namespace ballast {

/// All timestamps are UTC with second resolution. Calendar logic (schedules,
/// season windows, daily statistics) applies a fixed local-time offset; there
/// is deliberately no DST table.
using TimePoint = std::chrono::sys_seconds;
using Minutes = std::chrono::minutes;

enum class Unit {
    celsius,
    kilowatt_hour,
    grams_co2_per_kwh,
    persons,
    kilowatt,
    dimensionless,
};

/// Intensive quantities (temperatures, rates, counts) resample by averaging
/// and hold their value when split; kWh is the one extensive tag and is
/// summed / divided instead so that total energy is conserved.
bool is_intensive(Unit u);

std::string unit_name(Unit u);
Unit unit_from_name(const std::string& name);  // throws ParseError

/// Parses "YYYY-MM-DD[T ]HH:MM[:SS][Z]", interpreted as UTC. Throws ParseError.
TimePoint parse_timestamp(const std::string& text);
std::string format_timestamp(TimePoint t);

/// Uniformly sampled signal. Immutable after construction; safe to share
/// across threads. The unit tag travels with the data and gates arithmetic.
class TimeSeries {
public:
    TimeSeries(TimePoint start, Minutes step, std::vector<double> values, Unit unit);

    TimePoint start_time() const { return start_; }
    Minutes step() const { return step_; }
    Unit unit() const { return unit_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    double at(std::size_t i) const;
    TimePoint time_at(std::size_t i) const { return start_ + i * step_; }

    /// Index of the sample whose interval starts at t. Throws SignalGap when
    /// t is off the sampling grid or outside the series.
    std::size_t index_of(TimePoint t) const;

    /// Element-wise sum; requires identical unit, start, step and length.
    TimeSeries add(const TimeSeries& other) const;

private:
    TimePoint start_;
    Minutes step_;
    std::vector<double> values_;
    Unit unit_;
};

/// Integer-factor resampling. Downsampling averages blocks for intensive
/// units and sums kWh; upsampling holds intensive values and splits kWh
/// uniformly. Anything that would need interpolation raises NonIntegerRatio.
TimeSeries resample(const TimeSeries& s, Minutes new_step);

/// Copy of values at indices k .. k+m-1 (a forecast horizon). Throws OutOfRange.
std::vector<double> window(const TimeSeries& s, std::size_t k, std::size_t m);

struct ScheduleSegment {
    double start_hour;
    double end_hour;
    double value;
};

/// Daily profile pair (weekday / weekend). Segments must tile [0, 24) exactly,
/// so sampling is total: every instant falls in exactly one segment.
class Schedule {
public:
    Schedule(std::vector<ScheduleSegment> weekday, std::vector<ScheduleSegment> weekend);

    /// Value of the segment containing the local hour of t. Saturday and
    /// Sunday use the weekend profile.
    double sample(TimePoint t_utc, Minutes tz_offset) const;

    const std::vector<ScheduleSegment>& weekday() const { return weekday_; }
    const std::vector<ScheduleSegment>& weekend() const { return weekend_; }

private:
    std::vector<ScheduleSegment> weekday_;
    std::vector<ScheduleSegment> weekend_;
};

/// Realizes a schedule as a series sampled at each step start.
TimeSeries schedule_series(const Schedule& sch, TimePoint start, Minutes step,
                           std::size_t n_steps, Minutes tz_offset, Unit unit);

}  // namespace ballast
