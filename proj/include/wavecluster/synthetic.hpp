#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavecluster/timeseries.hpp"

namespace wavecluster {

namespace detail {

// splitmix64; used instead of <random> engines/distributions so generated
// datasets are bit-identical across standard libraries and platforms.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // burn-in decorrelates small consecutive seeds
        for (int i = 0; i < 4; ++i) (void)splitmix64(state_);
    }

    // Derives an independent substream; streams for distinct tag paths never
    // collide, so per-series generation order is irrelevant.
    Rng substream(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
        std::uint64_t s = state_ ^ 0xA0761D6478BD642FULL;
        s += 0x9E3779B97F4A7C15ULL * (a + 1);
        (void)splitmix64(s);
        s += 0x9E3779B97F4A7C15ULL * (b + 1);
        (void)splitmix64(s);
        s += 0x9E3779B97F4A7C15ULL * (c + 1);
        return Rng(splitmix64(s));
    }

    double uniform() { // [0, 1)
        return static_cast<double>(splitmix64(state_) >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) { // inclusive bounds
        return lo + static_cast<int>(splitmix64(state_) % static_cast<std::uint64_t>(hi - lo + 1));
    }
    double normal() { // Box-Muller, one value per pair of uniforms
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace detail

/// Distortions applied to one sample type on top of the shared site trend.
/// Gain and offset are drawn per series from the given ranges; noise_scale
/// multiplies the config-wide noise sigma.
struct SampleTypeParams {
    double gain_min = 0.8, gain_max = 1.2;
    double offset_min = 0.0, offset_max = 0.2;
    double noise_scale = 1.0;
};

/// Configuration of the synthetic dataset generator. Each site gets a smooth
/// trend (baseline + random low-frequency sinusoids + random wide peaks,
/// optionally plus a wave shared by all sites); influent and solids series
/// share the trend but carry independent white noise and their own affine
/// distortion. noise sigma = noise_sigma_scale * std(site trend).
struct SyntheticConfig {
    int n_sites = 5;
    int n_days = 224;
    std::string start_date = "2022-04-21";

    double baseline = 2.0;
    int waves_min = 2, waves_max = 4;
    double wave_amp_min = 0.3, wave_amp_max = 0.6;
    double wave_period_min_days = 70.0, wave_period_max_days = 224.0;
    int peaks_min = 1, peaks_max = 3;
    double peak_amp_min = 0.8, peak_amp_max = 2.0;
    double peak_width_min_days = 20.0, peak_width_max_days = 40.0;

    double shared_trend_amp = 0.0;
    double shared_trend_period_min_days = 150.0, shared_trend_period_max_days = 224.0;

    double noise_sigma_scale = 0.8;
    SampleTypeParams influent;
    SampleTypeParams solids;
    double missing_rate = 0.35;

    std::uint64_t seed = 0; // shipped default; the CLI --seed flag overrides
    bool has_seed = false;
};

inline void validate(const SyntheticConfig& c) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("synthetic config: " + msg); };
    if (c.n_sites < 2) fail("n_sites must be >= 2");
    if (c.n_days < 8) fail("n_days must be >= 8");
    if (c.waves_min < 0 || c.waves_max < c.waves_min) fail("invalid wave count bounds");
    if (c.peaks_min < 0 || c.peaks_max < c.peaks_min) fail("invalid peak count bounds");
    if (c.wave_period_min_days <= 0 || c.wave_period_max_days < c.wave_period_min_days)
        fail("invalid wave period bounds");
    if (c.peaks_max > 0 && c.peak_width_min_days < 20.0) fail("peak widths must be >= 20 days");
    if (c.peak_width_max_days < c.peak_width_min_days) fail("invalid peak width bounds");
    if (c.noise_sigma_scale < 0) fail("noise_sigma_scale must be >= 0");
    if (c.missing_rate < 0 || c.missing_rate >= 1.0) fail("missing_rate must be in [0, 1)");
    for (const auto* t : {&c.influent, &c.solids}) {
        if (t->gain_min <= 0 || t->gain_max < t->gain_min) fail("gains must be positive");
        if (t->offset_max < t->offset_min || t->offset_min < 0) fail("invalid offset bounds");
        if (t->noise_scale < 0) fail("noise_scale must be >= 0");
    }
}

inline std::string site_name(int index) {
    return "site" + std::string(index + 1 < 10 ? "0" : "") + std::to_string(index + 1);
}

/// Deterministically generates 2*n_sites gappy daily series (influent and
/// solids per site). First and last days are always observed so that every
/// series of a run shares one daily grid. Masked days carry value 0 until
/// imputed; emitted CSVs contain only observed rows.
inline std::vector<TimeSeries> generate_synthetic(const SyntheticConfig& config, std::uint64_t seed) {
    validate(config);
    const detail::Rng master(seed);
    const Date start = Date::parse(config.start_date);
    const auto n_days = static_cast<std::size_t>(config.n_days);

    // One wave common to every site, for configs that want cross-site
    // structure surviving heavy smoothing.
    std::vector<double> shared(n_days, 0.0);
    if (config.shared_trend_amp > 0.0) {
        detail::Rng rng = master.substream(0xC0DE);
        const double period = rng.uniform(config.shared_trend_period_min_days, config.shared_trend_period_max_days);
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        for (std::size_t t = 0; t < n_days; ++t)
            shared[t] = config.shared_trend_amp *
                        std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period + phase);
    }

    std::vector<TimeSeries> out;
    out.reserve(static_cast<std::size_t>(config.n_sites) * 2);

    for (int site = 0; site < config.n_sites; ++site) {
        detail::Rng trend_rng = master.substream(1, static_cast<std::uint64_t>(site));

        std::vector<double> trend(n_days, config.baseline);
        for (std::size_t t = 0; t < n_days; ++t) trend[t] += shared[t];

        const int n_waves = trend_rng.uniform_int(config.waves_min, config.waves_max);
        for (int w = 0; w < n_waves; ++w) {
            const double amp = trend_rng.uniform(config.wave_amp_min, config.wave_amp_max);
            const double period = trend_rng.uniform(config.wave_period_min_days, config.wave_period_max_days);
            const double phase = trend_rng.uniform(0.0, 2.0 * std::numbers::pi);
            for (std::size_t t = 0; t < n_days; ++t)
                trend[t] += amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period + phase);
        }
        const int n_peaks = trend_rng.uniform_int(config.peaks_min, config.peaks_max);
        for (int p = 0; p < n_peaks; ++p) {
            const double center = trend_rng.uniform(0.0, static_cast<double>(config.n_days - 1));
            const double width = trend_rng.uniform(config.peak_width_min_days, config.peak_width_max_days);
            const double amp = trend_rng.uniform(config.peak_amp_min, config.peak_amp_max);
            // Gaussian bump; width is its FWHM so the visible feature spans
            // at least the configured number of days.
            const double sigma = width / 2.355;
            for (std::size_t t = 0; t < n_days; ++t) {
                const double d = (static_cast<double>(t) - center) / sigma;
                trend[t] += amp * std::exp(-0.5 * d * d);
            }
        }

        double mean = 0.0;
        for (double v : trend) mean += v;
        mean /= static_cast<double>(n_days);
        double ss = 0.0;
        for (double v : trend) ss += (v - mean) * (v - mean);
        const double trend_sd = std::sqrt(ss / static_cast<double>(n_days - 1));

        for (SampleType type : {SampleType::influent, SampleType::solids}) {
            const auto type_idx = static_cast<std::uint64_t>(type == SampleType::solids);
            const SampleTypeParams& params = type == SampleType::influent ? config.influent : config.solids;
            detail::Rng series_rng = master.substream(2, static_cast<std::uint64_t>(site), type_idx);
            detail::Rng mask_rng = master.substream(3, static_cast<std::uint64_t>(site), type_idx);

            const double gain = series_rng.uniform(params.gain_min, params.gain_max);
            const double offset = series_rng.uniform(params.offset_min, params.offset_max);
            const double sigma = config.noise_sigma_scale * params.noise_scale * trend_sd;

            TimeSeries ts;
            ts.key = {site_name(site), type};
            ts.start_date = start;
            ts.values.resize(n_days, 0.0);
            ts.observed_mask.resize(n_days, false);
            for (std::size_t t = 0; t < n_days; ++t) {
                const double noise = sigma > 0.0 ? sigma * series_rng.normal() : 0.0;
                const double value = gain * trend[t] + offset + noise;
                const bool observed =
                    t == 0 || t + 1 == n_days || mask_rng.uniform() >= config.missing_rate;
                if (observed) {
                    ts.values[t] = value < 0.0 ? 0.0 : value; // ratios are nonnegative
                    ts.observed_mask[t] = true;
                }
            }
            out.push_back(std::move(ts));
        }
    }
    return out;
}

} // namespace wavecluster
