#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavecluster {

/// Quadrature-mirror filter pair defining an orthogonal wavelet basis.
///
/// dec_lo is the low-pass analysis filter g, dec_hi the high-pass analysis
/// filter h with the sign convention h[k] = (-1)^k * g[2M-1-k]. Reconstruction
/// filters are the time-reverses of the analysis pair. For dbM the filters
/// have 2M taps and M vanishing moments.
struct WaveletFilter {
    std::string name;
    std::vector<double> dec_lo;
    std::vector<double> dec_hi;
    std::vector<double> rec_lo;
    std::vector<double> rec_hi;
    int vanishing_moments = 0;

    int length() const { return static_cast<int>(dec_lo.size()); }
};

namespace detail {

// All complex roots of a real polynomial given by ascending coefficients,
// via Durand-Kerner iteration plus a Newton polish. Degrees here are <= 9
// (Daubechies moment polynomial for M <= 10), well within the method's
// comfort zone.
inline std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs) {
    using C = std::complex<double>;
    int degree = static_cast<int>(coeffs.size()) - 1;
    while (degree > 0 && coeffs[static_cast<std::size_t>(degree)] == 0.0) --degree;
    if (degree < 1) return {};

    // Monic form, ascending: z^degree + m[degree-1] z^(degree-1) + ... + m[0]
    std::vector<C> monic(static_cast<std::size_t>(degree));
    for (int i = 0; i < degree; ++i)
        monic[static_cast<std::size_t>(i)] = coeffs[static_cast<std::size_t>(i)] / coeffs[static_cast<std::size_t>(degree)];

    auto eval = [&](C z) {
        C acc{1.0, 0.0};
        for (int i = degree - 1; i >= 0; --i) acc = acc * z + monic[static_cast<std::size_t>(i)];
        return acc;
    };
    auto eval_deriv = [&](C z) {
        // Derivative of the monic polynomial via Horner.
        C acc = C(static_cast<double>(degree), 0.0);
        for (int i = degree - 1; i >= 1; --i)
            acc = acc * z + C(static_cast<double>(i), 0.0) * monic[static_cast<std::size_t>(i)];
        return acc;
    };

    double radius = 0.0;
    for (const auto& m : monic) radius = std::max(radius, std::abs(m));
    radius = 1.0 + radius;

    std::vector<C> z(static_cast<std::size_t>(degree));
    const C seed{0.4, 0.9}; // standard non-real starting ray
    C p{1.0, 0.0};
    for (auto& zi : z) {
        p *= seed;
        zi = radius * p;
    }

    for (int iter = 0; iter < 500; ++iter) {
        double worst = 0.0;
        for (int k = 0; k < degree; ++k) {
            C denom{1.0, 0.0};
            for (int j = 0; j < degree; ++j)
                if (j != k) denom *= (z[static_cast<std::size_t>(k)] - z[static_cast<std::size_t>(j)]);
            C delta = eval(z[static_cast<std::size_t>(k)]) / denom;
            z[static_cast<std::size_t>(k)] -= delta;
            worst = std::max(worst, std::abs(delta));
        }
        if (worst < 1e-15 * (1.0 + radius)) break;
    }
    // Newton polish to squeeze out the last few ulps.
    for (auto& zi : z)
        for (int it = 0; it < 4; ++it) {
            C d = eval_deriv(zi);
            if (std::abs(d) == 0.0) break;
            zi -= eval(zi) / d;
        }
    return z;
}

// Multiply polynomial (ascending complex coefficients) by (z + c).
inline void poly_mul_linear(std::vector<std::complex<double>>& poly, std::complex<double> c) {
    std::vector<std::complex<double>> out(poly.size() + 1, {0.0, 0.0});
    for (std::size_t i = 0; i < poly.size(); ++i) {
        out[i + 1] += poly[i];
        out[i] += poly[i] * c;
    }
    poly = std::move(out);
}

inline double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

} // namespace detail

/// Checks the full orthogonal-wavelet invariant suite on a filter.
/// Returns an empty string when everything passes, otherwise a description
/// of the first failed check.
inline std::string check_filter_invariants(const WaveletFilter& f) {
    const int len = f.length();
    const int m = f.vanishing_moments;
    const double sqrt2 = std::sqrt(2.0);

    if (m < 1 || len != 2 * m || f.dec_hi.size() != f.dec_lo.size() ||
        f.rec_lo.size() != f.dec_lo.size() || f.rec_hi.size() != f.dec_lo.size())
        return "filter length must be 2*vanishing_moments across all four filters";

    double sum_lo = 0.0, sum_hi = 0.0;
    for (double v : f.dec_lo) sum_lo += v;
    for (double v : f.dec_hi) sum_hi += v;
    if (std::abs(sum_lo - sqrt2) > 1e-12) return "sum(dec_lo) != sqrt(2)";
    if (std::abs(sum_hi) > 1e-12) return "sum(dec_hi) != 0";

    for (int shift = 0; shift < m; ++shift) {
        double dot = 0.0;
        for (int k = 0; k + 2 * shift < len; ++k)
            dot += f.dec_lo[static_cast<std::size_t>(k)] * f.dec_lo[static_cast<std::size_t>(k + 2 * shift)];
        const double want = shift == 0 ? 1.0 : 0.0;
        if (std::abs(dot - want) > 1e-10) return "dec_lo shift-orthonormality failed at shift " + std::to_string(shift);
    }

    for (int k = 0; k < len; ++k) {
        const double qmf = (k % 2 == 0 ? 1.0 : -1.0) * f.dec_lo[static_cast<std::size_t>(len - 1 - k)];
        if (std::abs(f.dec_hi[static_cast<std::size_t>(k)] - qmf) > 1e-14)
            return "quadrature-mirror relation violated at tap " + std::to_string(k);
    }

    for (int k = 0; k < len; ++k) {
        if (f.rec_lo[static_cast<std::size_t>(k)] != f.dec_lo[static_cast<std::size_t>(len - 1 - k)] ||
            f.rec_hi[static_cast<std::size_t>(k)] != f.dec_hi[static_cast<std::size_t>(len - 1 - k)])
            return "reconstruction filters are not time-reverses of the analysis pair";
    }

    // Moments of the high-pass filter vanish up to degree M-1; the check is
    // scaled because sum(|h[k]| k^p) grows quickly with p.
    for (int p = 0; p < m; ++p) {
        double moment = 0.0, scale = 0.0;
        for (int k = 0; k < len; ++k) {
            const double kp = std::pow(static_cast<double>(k), p);
            moment += f.dec_hi[static_cast<std::size_t>(k)] * kp;
            scale += std::abs(f.dec_hi[static_cast<std::size_t>(k)]) * kp;
        }
        if (std::abs(moment) > 1e-8 * std::max(1.0, scale))
            return "vanishing moment " + std::to_string(p) + " failed";
    }
    return {};
}

/// Builds the Daubechies filter bank with M vanishing moments (db1..db10).
///
/// Coefficients come from spectral factorization of the Daubechies moment
/// polynomial (minimal-phase root selection, then reversed so dec_lo[0] is
/// the largest leading tap, matching the classic table ordering). The result
/// is validated against the invariant suite; construction throws if any
/// check fails rather than returning a dubious filter.
inline WaveletFilter make_daubechies(int m) {
    if (m < 1 || m > 10)
        throw std::invalid_argument("make_daubechies: M must be in 1..10, got " + std::to_string(m));

    using C = std::complex<double>;

    // P(y) = sum_{k=0}^{M-1} binom(M-1+k, k) y^k; its roots determine the
    // non-trivial zeros of the product filter.
    std::vector<double> p(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) p[static_cast<std::size_t>(k)] = detail::binomial(m - 1 + k, k);

    std::vector<C> h{{1.0, 0.0}};
    for (const C& y : detail::polynomial_roots(p)) {
        // y = sin^2(w/2) maps to z^2 - (2-4y) z + 1 = 0; the two roots are
        // reciprocal, keep the one inside the unit circle.
        const C c = C(1.0, 0.0) - 2.0 * y;
        const C s = std::sqrt(c * c - C(1.0, 0.0));
        const C z1 = c + s;
        const C z2 = c - s;
        detail::poly_mul_linear(h, -(std::abs(z1) <= std::abs(z2) ? z1 : z2));
    }
    for (int i = 0; i < m; ++i) detail::poly_mul_linear(h, C(1.0, 0.0)); // (1+z)^M

    WaveletFilter f;
    f.name = "db" + std::to_string(m);
    f.vanishing_moments = m;
    f.dec_lo.resize(h.size());

    double sum = 0.0;
    for (const auto& c : h) sum += c.real();
    const double scale = std::sqrt(2.0) / sum;
    for (std::size_t i = 0; i < h.size(); ++i) f.dec_lo[i] = h[i].real() * scale;
    std::reverse(f.dec_lo.begin(), f.dec_lo.end());

    const int len = f.length();
    f.dec_hi.resize(static_cast<std::size_t>(len));
    for (int k = 0; k < len; ++k)
        f.dec_hi[static_cast<std::size_t>(k)] =
            (k % 2 == 0 ? 1.0 : -1.0) * f.dec_lo[static_cast<std::size_t>(len - 1 - k)];

    f.rec_lo.assign(f.dec_lo.rbegin(), f.dec_lo.rend());
    f.rec_hi.assign(f.dec_hi.rbegin(), f.dec_hi.rend());

    if (auto err = check_filter_invariants(f); !err.empty())
        throw std::runtime_error("make_daubechies(" + std::to_string(m) + "): constructed filter failed validation: " + err);
    return f;
}

/// Resolves "haar" or "db1".."db10" to a validated filter bank.
inline WaveletFilter wavelet_from_name(const std::string& name) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "haar") {
        WaveletFilter f = make_daubechies(1);
        f.name = "haar";
        return f;
    }
    if (lower.rfind("db", 0) == 0) {
        int m = 0;
        try {
            std::size_t pos = 0;
            m = std::stoi(lower.substr(2), &pos);
            if (pos != lower.size() - 2) m = 0;
        } catch (const std::exception&) {
            m = 0;
        }
        if (m >= 1 && m <= 10) return make_daubechies(m);
    }
    throw std::invalid_argument("unknown wavelet '" + name + "' (supported: haar, db1..db10)");
}

} // namespace wavecluster
