#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wavecluster/wavelet.hpp"

namespace wavecluster {

/// Boundary handling for the transforms.
///
/// periodization treats the signal as circular (odd lengths are first
/// extended by repeating the final sample), giving exactly ceil(N/2)
/// coefficients per band. symmetric uses half-point reflection and yields
/// floor((N + filter_len)/2) coefficients. Round trips are exact for both.
enum class BoundaryMode { periodization, symmetric };

inline std::string to_string(BoundaryMode mode) {
    return mode == BoundaryMode::periodization ? "periodization" : "symmetric";
}

inline BoundaryMode boundary_mode_from_string(const std::string& s) {
    if (s == "periodization" || s == "per") return BoundaryMode::periodization;
    if (s == "symmetric" || s == "sym") return BoundaryMode::symmetric;
    throw std::invalid_argument("unknown boundary mode '" + s + "' (periodization|symmetric)");
}

/// Output of an L-level decomposition. details[l-1] holds cD_l, ordered
/// finest (l=1) to coarsest (l=L); approx holds cA_L.
struct CoefficientSet {
    std::vector<double> approx;
    std::vector<std::vector<double>> details;
    std::size_t original_length = 0;
    int level = 0;
    std::string wavelet;
    BoundaryMode mode = BoundaryMode::periodization;
};

/// Number of coefficients a single-level transform produces per band.
inline std::size_t dwt_output_length(std::size_t n, int filter_len, BoundaryMode mode) {
    if (mode == BoundaryMode::periodization) return (n + 1) / 2;
    return (n + static_cast<std::size_t>(filter_len)) / 2;
}

namespace detail {

// Sample accessor over the boundary-extended signal. Periodization works on
// the even-length extension (odd signals repeat their final sample);
// symmetric is half-point reflection with period 2N, valid for any number
// of folds.
struct ExtendedSignal {
    std::span<const double> x;
    BoundaryMode mode;
    std::ptrdiff_t n_ext; // periodized length (n or n+1); unused for symmetric

    double operator[](std::ptrdiff_t i) const {
        const auto n = static_cast<std::ptrdiff_t>(x.size());
        if (mode == BoundaryMode::periodization) {
            i %= n_ext;
            if (i < 0) i += n_ext;
            return i < n ? x[static_cast<std::size_t>(i)] : x[static_cast<std::size_t>(n - 1)];
        }
        const std::ptrdiff_t period = 2 * n;
        i %= period;
        if (i < 0) i += period;
        return i < n ? x[static_cast<std::size_t>(i)] : x[static_cast<std::size_t>(period - 1 - i)];
    }
};

inline std::vector<double> analysis_convolve(const ExtendedSignal& ext, std::span<const double> filt,
                                             std::size_t out_len) {
    std::vector<double> out(out_len, 0.0);
    const auto flen = static_cast<std::ptrdiff_t>(filt.size());
    for (std::size_t n = 0; n < out_len; ++n) {
        double acc = 0.0;
        const auto base = static_cast<std::ptrdiff_t>(2 * n);
        for (std::ptrdiff_t j = 0; j < flen; ++j) acc += filt[static_cast<std::size_t>(j)] * ext[base - j];
        out[n] = acc;
    }
    return out;
}

} // namespace detail

/// Single-level forward transform: cA[n] = sum_j g[j] x_ext[2n-j] and
/// cD[n] = sum_j h[j] x_ext[2n-j] over the boundary-extended signal.
inline std::pair<std::vector<double>, std::vector<double>>
dwt_single(std::span<const double> signal, const WaveletFilter& filter, BoundaryMode mode) {
    if (signal.empty()) throw std::invalid_argument("dwt_single: empty signal");
    const auto n = static_cast<std::ptrdiff_t>(signal.size());
    const detail::ExtendedSignal ext{signal, mode, n + (n % 2)};
    const std::size_t out_len = dwt_output_length(signal.size(), filter.length(), mode);
    return {detail::analysis_convolve(ext, filter.dec_lo, out_len),
            detail::analysis_convolve(ext, filter.dec_hi, out_len)};
}

/// The pair of original lengths a coefficient length can correspond to
/// under the given mode (odd originals arise under periodization; symmetric
/// admits its own pair because its band length depends on the filter).
inline std::pair<std::ptrdiff_t, std::ptrdiff_t>
admissible_idwt_lengths(std::size_t coeff_len, int filter_len, BoundaryMode mode) {
    const auto len = static_cast<std::ptrdiff_t>(coeff_len);
    if (mode == BoundaryMode::periodization) return {2 * len - 1, 2 * len};
    return {2 * len - filter_len, 2 * len - filter_len + 1};
}

/// Exact left-inverse of dwt_single: the transpose reconstruction
/// y[2n-j] += cA[n] g[j] + cD[n] h[j], truncated to target_length.
inline std::vector<double> idwt_single(std::span<const double> approx, std::span<const double> det,
                                       const WaveletFilter& filter, BoundaryMode mode,
                                       std::size_t target_length) {
    if (approx.size() != det.size())
        throw std::invalid_argument("idwt_single: cA length " + std::to_string(approx.size()) +
                                    " != cD length " + std::to_string(det.size()));
    if (approx.empty()) throw std::invalid_argument("idwt_single: empty coefficient vectors");
    const auto [lo, hi] = admissible_idwt_lengths(approx.size(), filter.length(), mode);
    const auto target = static_cast<std::ptrdiff_t>(target_length);
    if (target != lo && target != hi)
        throw std::invalid_argument("idwt_single: target_length " + std::to_string(target_length) +
                                    " not in admissible pair {" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + "} for " + std::to_string(approx.size()) +
                                    " coefficients in mode " + to_string(mode));
    if (target < 1) throw std::invalid_argument("idwt_single: target_length must be >= 1");

    const auto flen = static_cast<std::ptrdiff_t>(filter.length());
    const auto n_coeff = static_cast<std::ptrdiff_t>(approx.size());

    if (mode == BoundaryMode::periodization) {
        const std::ptrdiff_t n_ext = 2 * n_coeff;
        std::vector<double> y(static_cast<std::size_t>(n_ext), 0.0);
        for (std::ptrdiff_t n = 0; n < n_coeff; ++n) {
            const double a = approx[static_cast<std::size_t>(n)];
            const double d = det[static_cast<std::size_t>(n)];
            for (std::ptrdiff_t j = 0; j < flen; ++j) {
                std::ptrdiff_t idx = (2 * n - j) % n_ext;
                if (idx < 0) idx += n_ext;
                y[static_cast<std::size_t>(idx)] += a * filter.dec_lo[static_cast<std::size_t>(j)] +
                                                    d * filter.dec_hi[static_cast<std::size_t>(j)];
            }
        }
        y.resize(target_length);
        return y;
    }

    std::vector<double> y(target_length, 0.0);
    for (std::ptrdiff_t n = 0; n < n_coeff; ++n) {
        const double a = approx[static_cast<std::size_t>(n)];
        const double d = det[static_cast<std::size_t>(n)];
        for (std::ptrdiff_t j = 0; j < flen; ++j) {
            const std::ptrdiff_t idx = 2 * n - j;
            if (idx >= 0 && idx < target)
                y[static_cast<std::size_t>(idx)] += a * filter.dec_lo[static_cast<std::size_t>(j)] +
                                                    d * filter.dec_hi[static_cast<std::size_t>(j)];
        }
    }
    return y;
}

/// Largest decomposition depth: the biggest L with ceil(N/2^L) >= filter
/// length, or 0 when even one level is unavailable.
inline int max_level(std::size_t signal_length, const WaveletFilter& filter) {
    if (signal_length < 1) throw std::invalid_argument("max_level: signal_length must be >= 1");
    const auto flen = static_cast<std::size_t>(filter.length());
    int level = 0;
    std::size_t len = signal_length;
    while (true) {
        len = (len + 1) / 2;
        if (len < flen) break;
        ++level;
    }
    return level;
}

/// Per-level approximation lengths len_0 = N .. len_L, following the mode's
/// single-level output-length rule. Used by waverec to rebuild targets.
inline std::vector<std::size_t> level_lengths(std::size_t n, int filter_len, BoundaryMode mode, int level) {
    std::vector<std::size_t> lens{n};
    for (int l = 0; l < level; ++l) lens.push_back(dwt_output_length(lens.back(), filter_len, mode));
    return lens;
}

/// Multilevel decomposition: dwt_single applied recursively to successive
/// approximations, cA_0 being the signal itself.
inline CoefficientSet wavedec(std::span<const double> signal, const WaveletFilter& filter, int level,
                              BoundaryMode mode) {
    if (signal.empty()) throw std::invalid_argument("wavedec: empty signal");
    if (level < 1) throw std::invalid_argument("wavedec: level must be >= 1, got " + std::to_string(level));
    const int maxl = max_level(signal.size(), filter);
    if (level > maxl)
        throw std::invalid_argument("wavedec: level " + std::to_string(level) + " exceeds maximum " +
                                    std::to_string(maxl) + " for length " + std::to_string(signal.size()) +
                                    " with " + filter.name);

    CoefficientSet out;
    out.original_length = signal.size();
    out.level = level;
    out.wavelet = filter.name;
    out.mode = mode;

    std::vector<double> current(signal.begin(), signal.end());
    for (int l = 0; l < level; ++l) {
        auto [approx, det] = dwt_single(current, filter, mode);
        out.details.push_back(std::move(det));
        current = std::move(approx);
    }
    out.approx = std::move(current);
    return out;
}

/// Validates the internal shape of a CoefficientSet against its bookkeeping.
inline void validate_coefficients(const CoefficientSet& coeffs, const WaveletFilter& filter) {
    if (coeffs.level < 1 || coeffs.details.size() != static_cast<std::size_t>(coeffs.level))
        throw std::invalid_argument("coefficient set: details count does not match level");
    const auto lens = level_lengths(coeffs.original_length, filter.length(), coeffs.mode, coeffs.level);
    for (int l = 1; l <= coeffs.level; ++l)
        if (coeffs.details[static_cast<std::size_t>(l - 1)].size() != lens[static_cast<std::size_t>(l)])
            throw std::invalid_argument("coefficient set: cD_" + std::to_string(l) + " has length " +
                                        std::to_string(coeffs.details[static_cast<std::size_t>(l - 1)].size()) +
                                        ", expected " + std::to_string(lens[static_cast<std::size_t>(l)]));
    if (coeffs.approx.size() != lens[static_cast<std::size_t>(coeffs.level)])
        throw std::invalid_argument("coefficient set: cA_" + std::to_string(coeffs.level) + " has length " +
                                    std::to_string(coeffs.approx.size()) + ", expected " +
                                    std::to_string(lens[static_cast<std::size_t>(coeffs.level)]));
}

/// Full inverse of wavedec; returns original_length samples and is a perfect
/// reconstruction when the coefficients are unmodified.
inline std::vector<double> waverec(const CoefficientSet& coeffs, const WaveletFilter& filter) {
    validate_coefficients(coeffs, filter);
    const auto lens = level_lengths(coeffs.original_length, filter.length(), coeffs.mode, coeffs.level);
    std::vector<double> current = coeffs.approx;
    for (int l = coeffs.level; l >= 1; --l)
        current = idwt_single(current, coeffs.details[static_cast<std::size_t>(l - 1)], filter, coeffs.mode,
                              lens[static_cast<std::size_t>(l - 1)]);
    return current;
}

} // namespace wavecluster
