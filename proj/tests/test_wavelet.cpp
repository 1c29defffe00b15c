#include <doctest.h>

#include <cmath>

#include "wavecluster/wavelet.hpp"

using wavecluster::WaveletFilter;
using wavecluster::check_filter_invariants;
using wavecluster::make_daubechies;
using wavecluster::wavelet_from_name;

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

TEST_CASE("haar (db1) is the analytic filter") {
    const WaveletFilter f = make_daubechies(1);
    REQUIRE(f.length() == 2);
    CHECK(f.dec_lo[0] == doctest::Approx(1.0 / kSqrt2).epsilon(1e-14));
    CHECK(f.dec_lo[1] == doctest::Approx(1.0 / kSqrt2).epsilon(1e-14));
    CHECK(f.dec_hi[0] == doctest::Approx(1.0 / kSqrt2).epsilon(1e-14));
    CHECK(f.dec_hi[1] == doctest::Approx(-1.0 / kSqrt2).epsilon(1e-14));
}

TEST_CASE("db2 matches the classic table ordering") {
    const WaveletFilter f = make_daubechies(2);
    REQUIRE(f.length() == 4);
    CHECK(f.dec_lo[0] == doctest::Approx(0.48296).epsilon(1e-4));
    CHECK(f.dec_lo[1] == doctest::Approx(0.83652).epsilon(1e-4));
    CHECK(f.dec_lo[2] == doctest::Approx(0.22414).epsilon(1e-4));
    CHECK(f.dec_lo[3] == doctest::Approx(-0.12941).epsilon(1e-4));

    double sum = 0.0;
    for (double v : f.dec_lo) sum += v;
    CHECK(sum == doctest::Approx(kSqrt2).epsilon(1e-14));
}

TEST_CASE("db1..db10 pass the full invariant suite") {
    for (int m = 1; m <= 10; ++m) {
        const WaveletFilter f = make_daubechies(m);
        CAPTURE(m);
        REQUIRE(f.length() == 2 * m);
        CHECK(check_filter_invariants(f).empty());

        // invariants re-stated directly, independent of the construction path
        double sum_lo = 0.0, sum_hi = 0.0;
        for (double v : f.dec_lo) sum_lo += v;
        for (double v : f.dec_hi) sum_hi += v;
        CHECK(std::abs(sum_lo - kSqrt2) < 1e-12);
        CHECK(std::abs(sum_hi) < 1e-12);

        for (int shift = 0; shift < m; ++shift) {
            double dot = 0.0;
            for (int k = 0; k + 2 * shift < 2 * m; ++k) dot += f.dec_lo[k] * f.dec_lo[k + 2 * shift];
            CHECK(std::abs(dot - (shift == 0 ? 1.0 : 0.0)) < 1e-10);
        }
        for (int k = 0; k < 2 * m; ++k)
            CHECK(f.dec_hi[k] == (k % 2 == 0 ? 1.0 : -1.0) * f.dec_lo[2 * m - 1 - k]);
    }
}

TEST_CASE("db4 has eight taps and annihilates cubics in the moment sense") {
    const WaveletFilter f = make_daubechies(4);
    REQUIRE(f.length() == 8);
    for (int p = 0; p < 4; ++p) {
        double moment = 0.0, scale = 0.0;
        for (int k = 0; k < 8; ++k) {
            moment += f.dec_hi[k] * std::pow(k, p);
            scale += std::abs(f.dec_hi[k]) * std::pow(k, p);
        }
        CHECK(std::abs(moment) <= 1e-8 * std::max(1.0, scale));
    }
}

TEST_CASE("M outside 1..10 is rejected") {
    CHECK_THROWS_AS(make_daubechies(0), std::invalid_argument);
    CHECK_THROWS_AS(make_daubechies(11), std::invalid_argument);
    CHECK_THROWS_AS(make_daubechies(-3), std::invalid_argument);
}

TEST_CASE("name lookup") {
    CHECK(wavelet_from_name("haar").name == "haar");
    CHECK(wavelet_from_name("db4").vanishing_moments == 4);
    CHECK(wavelet_from_name("DB2").vanishing_moments == 2);
    CHECK_THROWS_AS(wavelet_from_name("sym5"), std::invalid_argument);
    CHECK_THROWS_AS(wavelet_from_name("db11"), std::invalid_argument);
    CHECK_THROWS_AS(wavelet_from_name("db"), std::invalid_argument);
}
