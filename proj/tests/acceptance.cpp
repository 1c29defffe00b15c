// Acceptance suite. Runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion; exits nonzero if any fail.
//
// argv[1] = path to the wavecluster CLI binary (for the determinism check)
// argv[2] = path to the shipped configs directory

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "naive_ward.hpp"
#include "wavecluster/cluster.hpp"
#include "wavecluster/io.hpp"
#include "wavecluster/synthetic.hpp"

namespace fs = std::filesystem;
using namespace wavecluster;
using Clock = std::chrono::steady_clock;

namespace {

int g_failed = 0;

void report(int criterion, const std::string& label, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d  %-28s %s\n", pass ? "PASS" : "FAIL", criterion, label.c_str(),
                detail.c_str());
    if (!pass) ++g_failed;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> random_signal(std::mt19937& rng, std::size_t n) {
    std::vector<double> x(n);
    for (auto& v : x) v = static_cast<double>(rng()) / static_cast<double>(rng.max()) * 6.0 - 3.0;
    return x;
}

std::vector<TimeSeries> prepared_series(const SyntheticConfig& config, std::uint64_t seed) {
    std::map<SeriesKey, TimeSeries> by_key;
    for (auto& ts : generate_synthetic(config, seed)) by_key[ts.key] = impute(ts, 10);
    std::vector<TimeSeries> out;
    out.reserve(by_key.size());
    for (auto& [key, ts] : by_key) out.push_back(std::move(ts));
    return out;
}

double variant_purity(const std::vector<TimeSeries>& series, const std::string& variant,
                      const WaveletFilter& filter, int level) {
    return cluster_run(series, parse_variant(variant, level), filter, level, BoundaryMode::periodization)
        .purity;
}

// ---- criteria ---------------------------------------------------------------

void criterion_1_filters() {
    const auto start = Clock::now();
    bool pass = true;
    std::string detail;
    for (int m = 1; m <= 10 && pass; ++m) {
        try {
            const auto f = make_daubechies(m);
            const auto err = check_filter_invariants(f);
            if (!err.empty()) {
                pass = false;
                detail = "db" + std::to_string(m) + ": " + err;
            }
        } catch (const std::exception& e) {
            pass = false;
            detail = e.what();
        }
    }
    const double elapsed = seconds_since(start);
    if (pass && elapsed >= 1.0) {
        pass = false;
        detail = "runtime " + std::to_string(elapsed) + "s >= 1s";
    }
    if (pass) detail = "db1..db10 invariant suite, " + std::to_string(elapsed) + "s";
    report(1, "filter correctness", pass, detail);
}

void criterion_2_perfect_reconstruction() {
    const auto start = Clock::now();
    std::mt19937 rng(20220421);
    double worst = 0.0;
    std::size_t cases = 0;
    std::vector<WaveletFilter> filters;
    for (int m = 1; m <= 10; ++m) filters.push_back(make_daubechies(m));

    while (cases < 1000) {
        const std::size_t n = 8 + rng() % 293; // 8..300
        const auto& filter = filters[rng() % filters.size()];
        const auto mode = rng() % 2 == 0 ? BoundaryMode::periodization : BoundaryMode::symmetric;
        const auto x = random_signal(rng, n);

        const auto [ca, cd] = dwt_single(x, filter, mode);
        const auto single = idwt_single(ca, cd, filter, mode, n);
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(single[i] - x[i]));

        const int maxl = max_level(n, filter);
        if (maxl >= 1) {
            const auto multi = waverec(wavedec(x, filter, maxl, mode), filter);
            for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(multi[i] - x[i]));
        }
        ++cases;
    }
    const double elapsed = seconds_since(start);
    const bool pass = worst < 1e-10 && elapsed < 10.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "1000 signals, max |error| %.3g (< 1e-10), %.2fs (< 10s)", worst,
                  elapsed);
    report(2, "perfect reconstruction", pass, buf);
}

void criterion_3_dyadic_lengths() {
    std::mt19937 rng(3);
    const auto db4 = make_daubechies(4);
    const auto x = random_signal(rng, 224);
    const auto coeffs = wavedec(x, db4, 3, BoundaryMode::periodization);
    const bool pass = coeffs.details.size() == 3 && coeffs.details[0].size() == 112 &&
                      coeffs.details[1].size() == 56 && coeffs.details[2].size() == 28 &&
                      coeffs.approx.size() == 28;
    char buf[160];
    std::snprintf(buf, sizeof buf, "N=224 db4 L=3 -> details [%zu,%zu,%zu], approx %zu",
                  coeffs.details[0].size(), coeffs.details[1].size(), coeffs.details[2].size(),
                  coeffs.approx.size());
    report(3, "dyadic coefficient lengths", pass, buf);
}

void criterion_4_polynomial_annihilation() {
    std::mt19937 rng(4);
    const auto db4 = make_daubechies(4);
    const std::size_t n = 224;
    const auto margin = static_cast<std::size_t>(db4.length());
    double worst_rel = 0.0;

    for (int trial = 0; trial < 50; ++trial) {
        double c[4];
        for (double& v : c) v = static_cast<double>(rng()) / static_cast<double>(rng.max()) * 2.0 - 1.0;
        std::vector<double> x(n);
        double sup = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(n - 1);
            x[i] = ((c[3] * t + c[2]) * t + c[1]) * t + c[0];
            sup = std::max(sup, std::abs(x[i]));
        }
        const auto coeffs = wavedec(x, db4, 3, BoundaryMode::periodization);
        for (const auto& band : coeffs.details)
            for (std::size_t i = margin; i + margin < band.size(); ++i)
                worst_rel = std::max(worst_rel, std::abs(band[i]) / sup);
    }
    const bool pass = worst_rel < 1e-8;
    char buf[160];
    std::snprintf(buf, sizeof buf, "50 cubics, interior |cD| / sup <= %.3g (< 1e-8)", worst_rel);
    report(4, "polynomial annihilation", pass, buf);
}

void criterion_5_linkage_oracle() {
    const auto start = Clock::now();
    std::mt19937 rng(5);
    bool pass = true;
    std::string detail;
    double worst_height = 0.0;

    for (int trial = 0; trial < 200 && pass; ++trial) {
        const std::size_t n = 3 + rng() % 6;
        DistanceMatrix dm;
        dm.n = n;
        dm.data.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) dm.labels.push_back("L" + std::to_string(i));
        std::vector<double> pool;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                double d;
                // every third matrix reuses earlier entries: exact duplicate
                // distances construct tie cases
                if (trial % 3 == 0 && !pool.empty() && rng() % 2 == 0) {
                    d = pool[rng() % pool.size()];
                } else {
                    d = 0.2 + static_cast<double>(rng()) / static_cast<double>(rng.max()) * 1.6;
                    pool.push_back(d);
                }
                dm.at(i, j) = d;
                dm.at(j, i) = d;
            }

        const auto dendro = ward_linkage(dm);
        const auto expected = naive_ward(dm.data, n);
        for (std::size_t k = 0; k < expected.size() && pass; ++k) {
            const auto& got = dendro.merges[k];
            const auto& want = expected[k];
            if (got.left_id != want.left_id || got.right_id != want.right_id || got.size != want.size) {
                pass = false;
                detail = "merge sequence diverged at trial " + std::to_string(trial) + " step " +
                         std::to_string(k);
            }
            worst_height = std::max(worst_height, std::abs(got.height - want.height));
        }
    }
    if (pass && worst_height >= 1e-10) {
        pass = false;
        detail = "height mismatch " + std::to_string(worst_height);
    }
    const double elapsed = seconds_since(start);
    if (pass && elapsed >= 5.0) {
        pass = false;
        detail = "runtime over budget";
    }
    if (pass) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "200 matrices incl. ties, max height delta %.3g, %.2fs (< 5s)",
                      worst_height, elapsed);
        detail = buf;
    }
    report(5, "ward linkage vs naive oracle", pass, detail);
}

void criterion_6_progressive_purity(const SyntheticConfig& config) {
    const auto start = Clock::now();
    const auto db4 = make_daubechies(4);

    const auto series = prepared_series(config, config.seed);
    const double raw = variant_purity(series, "raw", db4, 3);
    const double s1 = variant_purity(series, "S1", db4, 3);
    const double s2 = variant_purity(series, "S2", db4, 3);
    const double s3 = variant_purity(series, "S3", db4, 3);

    int s3_ge_raw = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto draw = prepared_series(config, seed);
        if (variant_purity(draw, "S3", db4, 3) >= variant_purity(draw, "raw", db4, 3)) ++s3_ge_raw;
    }

    const double elapsed = seconds_since(start);
    const bool pass = raw <= 0.6 && s3 == 1.0 && raw <= s1 && s1 <= s2 && s2 <= s3 && s3_ge_raw >= 95 &&
                      elapsed < 60.0;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "seed %llu: raw %.1f <= S1 %.1f <= S2 %.1f <= S3 %.1f; S3>=raw in %d/100; %.1fs (< 60s)",
                  static_cast<unsigned long long>(config.seed), raw, s1, s2, s3, s3_ge_raw, elapsed);
    report(6, "progressive clustering purity", pass, buf);
}

void criterion_7_level4_oversmoothing(const SyntheticConfig& fine) {
    const auto db4 = make_daubechies(4);
    const auto series = prepared_series(fine, fine.seed);
    const double s3 = variant_purity(series, "S3", db4, 4);
    const double s4 = variant_purity(series, "S4", db4, 4);
    const bool pass = s4 < s3;
    char buf[160];
    std::snprintf(buf, sizeof buf, "fine-trend seed %llu: purity(S4) %.1f < purity(S3) %.1f",
                  static_cast<unsigned long long>(fine.seed), s4, s3);
    report(7, "level-4 over-smoothing", pass, buf);
}

void criterion_8_coefficient_space(const SyntheticConfig& config) {
    const auto db4 = make_daubechies(4);
    const auto series = prepared_series(config, config.seed);
    const double ca3 = variant_purity(series, "coeff:cA3", db4, 3);
    const double cd1 = variant_purity(series, "coeff:cD1", db4, 3);
    const bool pass = ca3 == 1.0 && cd1 < 1.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "coeff:cA3 purity %.1f (= 1.0), coeff:cD1 purity %.1f (< 1.0)", ca3,
                  cd1);
    report(8, "coefficient-space clustering", pass, buf);
}

void criterion_9_determinism(const std::string& cli, const std::string& config_path) {
    const fs::path work = fs::temp_directory_path() / "wavecluster_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);
    const fs::path run1 = work / "run1";
    const fs::path run2 = work / "run2";

    const std::string base = cli + " pipeline --synthetic-config " + config_path + " --out ";
    const int rc1 = WEXITSTATUS(std::system((base + run1.string() + " >/dev/null 2>&1").c_str()));
    const int rc2 = WEXITSTATUS(std::system((base + run2.string() + " >/dev/null 2>&1").c_str()));

    bool pass = rc1 == 0 && rc2 == 0;
    std::size_t files = 0;
    std::string detail;
    if (!pass) {
        detail = "pipeline exited " + std::to_string(rc1) + "/" + std::to_string(rc2);
    } else {
        for (const auto& entry : fs::recursive_directory_iterator(run1)) {
            if (!entry.is_regular_file()) continue;
            ++files;
            const auto rel = fs::relative(entry.path(), run1);
            const fs::path other = run2 / rel;
            std::ifstream a(entry.path(), std::ios::binary);
            std::ifstream b(other, std::ios::binary);
            const std::string ca{std::istreambuf_iterator<char>(a), std::istreambuf_iterator<char>()};
            const std::string cb{std::istreambuf_iterator<char>(b), std::istreambuf_iterator<char>()};
            if (!fs::exists(other) || ca != cb) {
                pass = false;
                detail = "mismatch at " + rel.string();
                break;
            }
        }
        std::size_t files2 = 0;
        for (const auto& entry : fs::recursive_directory_iterator(run2))
            if (entry.is_regular_file()) ++files2;
        if (pass && files != files2) {
            pass = false;
            detail = "tree sizes differ";
        }
    }
    if (pass) detail = std::to_string(files) + " files byte-identical across reruns";
    fs::remove_all(work);
    report(9, "pipeline determinism", pass, detail);
}

void criterion_10_prep_contracts() {
    std::mt19937 rng(10);
    bool pass = true;
    std::string detail;

    for (int run = 0; run < 100 && pass; ++run) {
        const std::size_t n = 30 + rng() % 200;
        TimeSeries ts;
        ts.key = {"s", SampleType::influent};
        ts.start_date = Date::parse("2022-04-21");
        ts.values.assign(n, 0.0);
        ts.observed_mask.assign(n, false);
        for (std::size_t i = 0; i < n; ++i)
            if (static_cast<double>(rng()) / static_cast<double>(rng.max()) < 0.55) {
                ts.values[i] = static_cast<double>(rng()) / static_cast<double>(rng.max()) * 4.0 + 0.1;
                ts.observed_mask[i] = true;
            }
        ts.values[0] = 1.0;
        ts.observed_mask[0] = true;
        ts.values[n - 1] = 2.0;
        ts.observed_mask[n - 1] = true;

        const auto once = impute(ts, 10);
        const auto twice = impute(once, 10);
        if (once.values != twice.values) {
            pass = false;
            detail = "impute not idempotent at run " + std::to_string(run);
            break;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (ts.observed_mask[i] && once.values[i] != ts.values[i]) {
                pass = false;
                detail = "observed value modified at run " + std::to_string(run);
            }
        if (!pass) break;

        const auto z = prepare_for_clustering(once.values);
        double mean = 0.0;
        for (double v : z) mean += v;
        mean /= static_cast<double>(z.size());
        double ss = 0.0;
        for (double v : z) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(z.size() - 1));
        if (std::abs(mean) >= 1e-12 || std::abs(sd - 1.0) >= 1e-12) {
            pass = false;
            detail = "mean/std contract violated at run " + std::to_string(run);
        }
    }
    if (pass) detail = "100 gappy series: idempotence, preservation, mean/std within 1e-12";
    report(10, "signal-prep contracts", pass, detail);
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: acceptance <wavecluster-binary> <configs-dir>\n";
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path configs = argv[2];

    SyntheticConfig default_config, fine_config;
    try {
        default_config = read_synthetic_config((configs / "default_synthetic.json").string());
        fine_config = read_synthetic_config((configs / "fine_trend_synthetic.json").string());
        if (!default_config.has_seed || !fine_config.has_seed)
            throw DataError("shipped configs must carry their seed");
    } catch (const std::exception& e) {
        std::cerr << "cannot load shipped configs: " << e.what() << "\n";
        return 2;
    }

    criterion_1_filters();
    criterion_2_perfect_reconstruction();
    criterion_3_dyadic_lengths();
    criterion_4_polynomial_annihilation();
    criterion_5_linkage_oracle();
    criterion_6_progressive_purity(default_config);
    criterion_7_level4_oversmoothing(fine_config);
    criterion_8_coefficient_space(default_config);
    criterion_9_determinism(cli, (configs / "default_synthetic.json").string());
    criterion_10_prep_contracts();

    if (g_failed == 0) {
        std::printf("ACCEPTANCE: all 10 criteria passed\n");
        return 0;
    }
    std::printf("ACCEPTANCE: %d criteria FAILED\n", g_failed);
    return 1;
}
