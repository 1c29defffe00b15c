#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavecluster/transform.hpp"

namespace wavecluster {

/// One frequency band of a decomposition: D1..DL or the approximation A.
struct Band {
    enum class Kind { detail, approx };
    Kind kind = Kind::approx;
    int level = 0; // meaningful for detail bands only

    static Band detail(int level) { return {Kind::detail, level}; }
    static Band approx() { return {Kind::approx, 0}; }

    bool operator==(const Band&) const = default;
};

inline std::string band_label(const Band& band, int level) {
    return band.kind == Band::Kind::approx ? "cA" + std::to_string(level)
                                           : "cD" + std::to_string(band.level);
}

/// Parses "D1".."DL" / "A" as well as the coefficient spellings "cD1" / "cA3".
inline Band parse_band(const std::string& text, int level) {
    std::string s = text;
    if (s.rfind("c", 0) == 0) s = s.substr(1);
    if (s == "A" || s == "a" || s == "A" + std::to_string(level)) return Band::approx();
    if ((s.rfind("D", 0) == 0 || s.rfind("d", 0) == 0) && s.size() > 1) {
        try {
            std::size_t pos = 0;
            const int l = std::stoi(s.substr(1), &pos);
            if (pos == s.size() - 1 && l >= 1 && l <= level) return Band::detail(l);
        } catch (const std::exception&) {
        }
    }
    throw std::invalid_argument("unknown band '" + text + "' for a level-" + std::to_string(level) +
                                " decomposition (expected D1..D" + std::to_string(level) + " or A)");
}

/// A progressively smoothed signal S_l: the reconstruction with detail
/// bands 1..l zeroed. S_L keeps only the approximation band.
struct SmoothingResult {
    int level_removed = 0;
    std::vector<double> signal;
    std::string source_key;
};

/// Returns a copy with cD_1..cD_l replaced by zero vectors of identical
/// lengths; every other field is untouched.
inline CoefficientSet zero_details(const CoefficientSet& coeffs, int l) {
    if (l < 1 || l > coeffs.level)
        throw std::invalid_argument("zero_details: l=" + std::to_string(l) + " out of range 1.." +
                                    std::to_string(coeffs.level));
    CoefficientSet out = coeffs;
    for (int band = 0; band < l; ++band)
        out.details[static_cast<std::size_t>(band)].assign(out.details[static_cast<std::size_t>(band)].size(), 0.0);
    return out;
}

/// S_l = waverec(zero_details(wavedec(x, L), l)). l = 0 is admitted as the
/// raw case and returns the plain round trip of the signal.
inline SmoothingResult smooth(std::span<const double> signal, const WaveletFilter& filter, int level,
                              int l, BoundaryMode mode, std::string source_key = {}) {
    if (l < 0 || l > level)
        throw std::invalid_argument("smooth: l=" + std::to_string(l) + " out of range 0.." +
                                    std::to_string(level));
    CoefficientSet coeffs = wavedec(signal, filter, level, mode);
    if (l > 0) coeffs = zero_details(coeffs, l);
    return {l, waverec(coeffs, filter), std::move(source_key)};
}

/// Reconstruction of a single band at the original temporal scale: every
/// other band is zeroed before the inverse transform, so the band
/// reconstructions of a signal sum to its round trip.
inline std::vector<double> component(std::span<const double> signal, const WaveletFilter& filter,
                                     int level, const Band& which, BoundaryMode mode) {
    if (which.kind == Band::Kind::detail && (which.level < 1 || which.level > level))
        throw std::invalid_argument("component: detail band " + std::to_string(which.level) +
                                    " out of range 1.." + std::to_string(level));
    CoefficientSet coeffs = wavedec(signal, filter, level, mode);
    for (int l = 1; l <= level; ++l)
        if (which.kind != Band::Kind::detail || which.level != l)
            coeffs.details[static_cast<std::size_t>(l - 1)].assign(
                coeffs.details[static_cast<std::size_t>(l - 1)].size(), 0.0);
    if (which.kind != Band::Kind::approx) coeffs.approx.assign(coeffs.approx.size(), 0.0);
    return waverec(coeffs, filter);
}

} // namespace wavecluster
