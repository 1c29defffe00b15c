#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <compare>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "wavecluster/errors.hpp"

namespace wavecluster {

/// Calendar date stored as days since 1970-01-01, with ISO-8601 parsing.
class Date {
public:
    Date() = default;
    explicit Date(int days_since_epoch) : days_(days_since_epoch) {}

    static Date parse(const std::string& iso) {
        int y = 0;
        unsigned m = 0, d = 0;
        if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' ||
            std::from_chars(iso.data(), iso.data() + 4, y).ec != std::errc{} ||
            std::from_chars(iso.data() + 5, iso.data() + 7, m).ec != std::errc{} ||
            std::from_chars(iso.data() + 8, iso.data() + 10, d).ec != std::errc{})
            throw DataError("unparseable date '" + iso + "' (expected YYYY-MM-DD)");
        const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
        if (!ymd.ok()) throw DataError("invalid calendar date '" + iso + "'");
        return Date(static_cast<int>(std::chrono::sys_days{ymd}.time_since_epoch().count()));
    }

    std::string to_string() const {
        const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days_}}};
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
        return buf;
    }

    int days_since_epoch() const { return days_; }
    Date operator+(int days) const { return Date(days_ + days); }
    int operator-(const Date& other) const { return days_ - other.days_; }
    auto operator<=>(const Date&) const = default;

private:
    int days_ = 0;
};

enum class SampleType { influent, solids };

inline std::string to_string(SampleType t) { return t == SampleType::influent ? "influent" : "solids"; }

inline SampleType sample_type_from_string(const std::string& s) {
    if (s == "influent") return SampleType::influent;
    if (s == "solids") return SampleType::solids;
    throw DataError("unknown sample_type '" + s + "' (influent|solids)");
}

/// Identifies one series: a site paired with its sample matrix.
struct SeriesKey {
    std::string site;
    SampleType sample_type = SampleType::influent;

    auto operator<=>(const SeriesKey&) const = default;

    // "Los Banos(I)" / "Los Banos(S)" leaf labels, as in the dendrograms.
    std::string label() const { return site + (sample_type == SampleType::influent ? "(I)" : "(S)"); }
    std::string file_stem() const {
        std::string s = site + "_" + to_string(sample_type);
        std::replace(s.begin(), s.end(), ' ', '_');
        return s;
    }
};

/// One measurement, already reduced to the dimensionless N/PMMoV ratio.
struct RawSample {
    Date date;
    std::string site;
    SampleType sample_type = SampleType::influent;
    double ratio = 0.0;
};

/// A daily-gridded series. values[i] belongs to start_date + i days;
/// observed_mask marks measured days (false = gap, filled by impute).
struct TimeSeries {
    SeriesKey key;
    Date start_date;
    std::vector<double> values;
    std::vector<bool> observed_mask;

    Date end_date() const { return start_date + (static_cast<int>(values.size()) - 1); }
    std::size_t size() const { return values.size(); }
    std::size_t observed_count() const {
        return static_cast<std::size_t>(std::count(observed_mask.begin(), observed_mask.end(), true));
    }
};

/// N/PMMoV normalization; `context` names the offending record in errors.
inline double normalize_pmmov(double n_gene, double pmmov, const std::string& context = {}) {
    if (!(pmmov > 0.0))
        throw DataError("pmmov must be > 0 to normalize" + (context.empty() ? "" : " (" + context + ")"));
    if (n_gene < 0.0)
        throw DataError("n_gene must be >= 0" + (context.empty() ? "" : " (" + context + ")"));
    return n_gene / pmmov;
}

/// Places the key's samples on a daily grid from their first to their last
/// date. Days with multiple samples take the arithmetic mean of the ratios;
/// days without samples are masked unobserved (value 0 until imputed).
inline TimeSeries regularize(std::span<const RawSample> samples, const SeriesKey& key) {
    Date lo, hi;
    bool any = false;
    for (const auto& s : samples) {
        if (s.site != key.site || s.sample_type != key.sample_type) continue;
        if (!any || s.date < lo) lo = s.date;
        if (!any || hi < s.date) hi = s.date;
        any = true;
    }
    if (!any) throw DataError("no samples for series " + key.label());

    const auto n_days = static_cast<std::size_t>(hi - lo) + 1;
    std::vector<double> sums(n_days, 0.0);
    std::vector<int> counts(n_days, 0);
    for (const auto& s : samples) {
        if (s.site != key.site || s.sample_type != key.sample_type) continue;
        const auto i = static_cast<std::size_t>(s.date - lo);
        sums[i] += s.ratio;
        ++counts[i];
    }

    TimeSeries ts;
    ts.key = key;
    ts.start_date = lo;
    ts.values.resize(n_days, 0.0);
    ts.observed_mask.resize(n_days, false);
    for (std::size_t i = 0; i < n_days; ++i)
        if (counts[i] > 0) {
            ts.values[i] = sums[i] / counts[i];
            ts.observed_mask[i] = true;
        }
    return ts;
}

/// Fills every gap with the mean of the observed values inside a centered
/// window (an even window spans w/2 days back through w/2-1 forward, so the
/// default 10 covers 5 before through 4 after). A window with no observed
/// value falls back to the nearest observed day, earlier on ties. Observed
/// entries are never modified, which also makes the operation idempotent.
inline TimeSeries impute(const TimeSeries& ts, int window_days = 10) {
    if (window_days < 1) throw std::invalid_argument("impute: window_days must be >= 1");
    if (ts.observed_count() == 0) throw DataError("impute: series " + ts.key.label() + " has no observed values");

    const auto n = static_cast<std::ptrdiff_t>(ts.size());
    const std::ptrdiff_t back = window_days / 2;
    const std::ptrdiff_t fwd = (window_days % 2 == 0) ? window_days / 2 - 1 : window_days / 2;

    TimeSeries out = ts;
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (ts.observed_mask[static_cast<std::size_t>(i)]) continue;
        double sum = 0.0;
        int count = 0;
        for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - back); j <= std::min(n - 1, i + fwd); ++j)
            if (ts.observed_mask[static_cast<std::size_t>(j)]) {
                sum += ts.values[static_cast<std::size_t>(j)];
                ++count;
            }
        if (count > 0) {
            out.values[static_cast<std::size_t>(i)] = sum / count;
            continue;
        }
        for (std::ptrdiff_t dist = 1;; ++dist) {
            if (i - dist >= 0 && ts.observed_mask[static_cast<std::size_t>(i - dist)]) {
                out.values[static_cast<std::size_t>(i)] = ts.values[static_cast<std::size_t>(i - dist)];
                break;
            }
            if (i + dist < n && ts.observed_mask[static_cast<std::size_t>(i + dist)]) {
                out.values[static_cast<std::size_t>(i)] = ts.values[static_cast<std::size_t>(i + dist)];
                break;
            }
        }
    }
    return out;
}

/// Max-normalizes then z-scores a series (sample standard deviation), the
/// preprocessing applied before every clustering run. The max-normalization
/// cannot change correlation distances but is kept as part of the contract.
inline std::vector<double> prepare_for_clustering(std::span<const double> values, const std::string& context = {}) {
    const std::string where = context.empty() ? "" : " (" + context + ")";
    if (values.size() < 2) throw DataError("prepare_for_clustering: need at least 2 values" + where);

    const double maxv = *std::max_element(values.begin(), values.end());
    if (!(maxv > 0.0)) throw DataError("max-normalization undefined: max value is not positive" + where);

    std::vector<double> v(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) v[i] = values[i] / maxv;

    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    if (!(sd > 0.0)) throw DataError("zero variance, correlation distance undefined" + where);

    for (double& x : v) x = (x - mean) / sd;
    return v;
}

inline std::vector<double> prepare_for_clustering(const TimeSeries& ts) {
    return prepare_for_clustering(ts.values, ts.key.label());
}

} // namespace wavecluster
