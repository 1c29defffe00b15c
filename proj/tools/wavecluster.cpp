// wavecluster: decompose noisy environmental time series with a multilevel
// DWT, reconstruct progressively denoised versions, and cluster them to
// recover shared trends across sites and sample types.
//
// Subcommands: synth, ingest, decompose, cluster, pipeline.
// Exit codes: 0 success, 1 data error, 2 usage error.
// WAVECLUSTER_LOG=debug|info|warn|error controls stderr logging.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wavecluster/export.hpp"
#include "wavecluster/filtering.hpp"
#include "wavecluster/io.hpp"
#include "wavecluster/synthetic.hpp"

namespace fs = std::filesystem;
using namespace wavecluster;

namespace {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("WAVECLUSTER_LOG");
        if (!env) return LogLevel::warn;
        const std::string s = env;
        if (s == "error") return LogLevel::error;
        if (s == "info") return LogLevel::info;
        if (s == "debug") return LogLevel::debug;
        return LogLevel::warn;
    }();
    return level;
}

void log(LogLevel level, const std::string& msg) {
    static const char* names[] = {"error", "warn", "info", "debug"};
    if (level <= log_level())
        std::cerr << "[" << names[static_cast<int>(level)] << "] " << msg << "\n";
}

struct RunConfig {
    std::string input;            // raw samples CSV or ingested directory
    std::string synthetic_config; // synthetic config JSON
    std::optional<std::uint64_t> seed;
    std::string wavelet = "db4";
    int level = 3;
    std::string mode = "periodization";
    int window = 10;
    std::vector<std::string> variants; // empty -> raw,S1..SL
    std::string out;
    bool lenient = false;
    int sites_override = 0; // synth only
};

std::vector<std::string> default_variants(int level) {
    std::vector<std::string> v{"raw"};
    for (int l = 1; l <= level; ++l) v.push_back("S" + std::to_string(l));
    return v;
}

void ensure_out_dir(const std::string& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw DataError("cannot create output directory '" + out + "': " + ec.message());
    // probe writability up front for a clean failure
    const fs::path probe = fs::path(out) / ".write_probe";
    {
        std::ofstream f(probe);
        if (!f) throw DataError("output directory '" + out + "' is not writable");
    }
    fs::remove(probe, ec);
}

// Ingested, imputed series keyed deterministically (sites sorted, influent
// before solids). All downstream iteration follows this order.
std::map<SeriesKey, TimeSeries> ingest_samples(const std::vector<RawSample>& samples, int window) {
    std::map<SeriesKey, TimeSeries> series;
    std::map<SeriesKey, bool> keys;
    for (const auto& s : samples) keys[{s.site, s.sample_type}] = true;
    for (const auto& [key, unused] : keys) {
        const TimeSeries gridded = regularize(samples, key);
        series[key] = impute(gridded, window);
        log(LogLevel::debug, "ingested " + key.label() + ": " + std::to_string(gridded.size()) + " days, " +
                                 std::to_string(gridded.observed_count()) + " observed");
    }
    return series;
}

std::map<SeriesKey, TimeSeries> load_series(const RunConfig& config) {
    if (!config.synthetic_config.empty()) {
        const SyntheticConfig synth = read_synthetic_config(config.synthetic_config);
        if (!config.seed && !synth.has_seed)
            throw DataError("no seed: pass --seed or set \"seed\" in the synthetic config");
        const std::uint64_t seed = config.seed ? *config.seed : synth.seed;
        log(LogLevel::info, "generating synthetic dataset with seed " + std::to_string(seed));
        std::map<SeriesKey, TimeSeries> series;
        for (auto& ts : generate_synthetic(synth, seed)) series[ts.key] = impute(ts, config.window);
        return series;
    }
    if (config.input.empty()) throw DataError("no input: pass --input or --synthetic-config");

    if (fs::is_directory(config.input)) {
        const auto manifest_path = (fs::path(config.input) / "manifest.json").string();
        const auto entries = manifest_from_json(read_json(manifest_path));
        std::map<SeriesKey, TimeSeries> series;
        for (const auto& e : entries) {
            const auto path = (fs::path(config.input) / e.file).string();
            series[e.key] = impute(read_series_csv(path, e.key), config.window);
        }
        return series;
    }
    ParseReport report;
    const auto samples = read_samples_csv(config.input, config.lenient, &report);
    for (const auto& w : report.warnings) log(LogLevel::warn, w);
    return ingest_samples(samples, config.window);
}

void check_common_grid(const std::map<SeriesKey, TimeSeries>& series) {
    const TimeSeries* first = nullptr;
    for (const auto& [key, ts] : series) {
        if (!first) {
            first = &ts;
            continue;
        }
        if (ts.start_date != first->start_date || ts.size() != first->size())
            throw DataError("series " + key.label() + " covers " + ts.start_date.to_string() + ".." +
                            ts.end_date().to_string() + " but " + first->key.label() + " covers " +
                            first->start_date.to_string() + ".." + first->end_date().to_string() +
                            "; clustering needs one shared daily grid");
    }
}

void check_level(const std::map<SeriesKey, TimeSeries>& series, const WaveletFilter& filter, int level) {
    for (const auto& [key, ts] : series) {
        const int maxl = max_level(ts.size(), filter);
        if (level > maxl)
            throw DataError("level " + std::to_string(level) + " exceeds maximum " + std::to_string(maxl) +
                            " for series " + key.label() + " (" + std::to_string(ts.size()) + " days, " +
                            filter.name + ")");
    }
}

std::vector<ManifestEntry> write_series_dir(const std::map<SeriesKey, TimeSeries>& series,
                                            const std::string& out) {
    std::vector<ManifestEntry> entries;
    for (const auto& [key, ts] : series) {
        const std::string file = key.file_stem() + ".csv";
        write_series_csv((fs::path(out) / file).string(), ts);
        entries.push_back({key, file, ts.start_date, ts.end_date(), ts.size(), ts.observed_count()});
    }
    // manifest written last so it never references missing files
    write_json((fs::path(out) / "manifest.json").string(), manifest_to_json(entries));
    return entries;
}

int cmd_synth(const RunConfig& config) {
    if (config.synthetic_config.empty()) throw DataError("synth requires --synthetic-config");
    SyntheticConfig synth = read_synthetic_config(config.synthetic_config);
    if (config.sites_override > 0) synth.n_sites = config.sites_override;
    if (!config.seed && !synth.has_seed)
        throw DataError("no seed: pass --seed or set \"seed\" in the synthetic config (wall-clock seeding is not supported)");
    const std::uint64_t seed = config.seed ? *config.seed : synth.seed;

    std::string out_file = config.out;
    if (out_file.empty()) throw DataError("synth requires --out");
    if (fs::is_directory(out_file) || out_file.back() == '/' ||
        fs::path(out_file).extension() != ".csv") {
        ensure_out_dir(out_file);
        out_file = (fs::path(out_file) / "synthetic.csv").string();
    }

    std::vector<RawSample> samples;
    for (const auto& ts : generate_synthetic(synth, seed))
        for (std::size_t i = 0; i < ts.size(); ++i)
            if (ts.observed_mask[i])
                samples.push_back({ts.start_date + static_cast<int>(i), ts.key.site, ts.key.sample_type,
                                   ts.values[i]});
    write_samples_csv(out_file, samples);
    log(LogLevel::info, "wrote " + std::to_string(samples.size()) + " samples to " + out_file);
    std::cout << out_file << "\n";
    return 0;
}

int cmd_ingest(const RunConfig& config) {
    if (config.input.empty()) throw DataError("ingest requires --input");
    if (config.out.empty()) throw DataError("ingest requires --out");
    ensure_out_dir(config.out);

    ParseReport report;
    const auto samples = read_samples_csv(config.input, config.lenient, &report);
    for (const auto& w : report.warnings) log(LogLevel::warn, w);
    const auto series = ingest_samples(samples, config.window);
    const auto entries = write_series_dir(series, config.out);
    std::cout << "ingested " << entries.size() << " series to " << config.out << "\n";
    return 0;
}

int cmd_decompose(const RunConfig& config) {
    if (config.out.empty()) throw DataError("decompose requires --out");
    const auto series = load_series(config);
    const auto filter = wavelet_from_name(config.wavelet);
    const auto mode = boundary_mode_from_string(config.mode);
    check_level(series, filter, config.level);
    ensure_out_dir(config.out);

    for (const auto& [key, ts] : series) {
        const auto coeffs = wavedec(ts.values, filter, config.level, mode);
        write_coefficients((fs::path(config.out) / (key.file_stem() + "_coeffs.json")).string(), coeffs);

        for (int l = 1; l <= config.level; ++l) {
            const auto band = component(ts.values, filter, config.level, Band::detail(l), mode);
            write_value_csv((fs::path(config.out) / (key.file_stem() + "_cD" + std::to_string(l) + ".csv")).string(),
                            ts.start_date, band);
        }
        const auto approx = component(ts.values, filter, config.level, Band::approx(), mode);
        write_value_csv((fs::path(config.out) / (key.file_stem() + "_cA" + std::to_string(config.level) + ".csv")).string(),
                        ts.start_date, approx);
    }
    std::cout << "decomposed " << series.size() << " series (" << filter.name << ", level "
              << config.level << ", " << config.mode << ")\n";
    return 0;
}

nlohmann::ordered_json run_cluster_variants(const std::map<SeriesKey, TimeSeries>& series_map,
                                            const RunConfig& config, const std::string& out_dir) {
    const auto filter = wavelet_from_name(config.wavelet);
    const auto mode = boundary_mode_from_string(config.mode);
    check_common_grid(series_map);
    check_level(series_map, filter, config.level);

    std::vector<TimeSeries> series;
    std::size_t n_sites_count = 0;
    {
        std::map<std::string, bool> sites;
        for (const auto& [key, ts] : series_map) {
            series.push_back(ts);
            sites[key.site] = true;
        }
        n_sites_count = sites.size();
    }

    const auto variant_names = config.variants.empty() ? default_variants(config.level) : config.variants;
    nlohmann::ordered_json summary = nlohmann::ordered_json::array();
    for (const auto& name : variant_names) {
        const auto variant = parse_variant(name, config.level);
        const auto result = cluster_run(series, variant, filter, config.level, mode);
        log(LogLevel::info, "variant " + result.variant + ": purity " + format_double(result.purity));

        std::string stem = result.variant;
        for (auto& c : stem)
            if (c == ':') c = '_';
        write_json((fs::path(out_dir) / (stem + "_dendrogram.json")).string(),
                   dendrogram_to_json(result.dendrogram, result.distances.labels));
        {
            auto out = detail::open_output((fs::path(out_dir) / (stem + "_dendrogram.nwk")).string());
            out << to_newick(result.dendrogram, result.distances.labels) << "\n";
        }
        {
            auto out = detail::open_output((fs::path(out_dir) / (stem + "_dendrogram.svg")).string());
            out << dendrogram_svg(result.dendrogram, result.distances.labels,
                                  result.variant + " (purity " + format_double(result.purity) + ")");
        }
        summary.push_back(purity_record(result, n_sites_count));
    }
    return summary;
}

int cmd_cluster(const RunConfig& config) {
    if (config.out.empty()) throw DataError("cluster requires --out");
    const auto series = load_series(config);
    ensure_out_dir(config.out);
    const auto summary = run_cluster_variants(series, config, config.out);
    write_json((fs::path(config.out) / "purity_summary.json").string(), summary);
    for (const auto& rec : summary)
        std::cout << rec["variant"].get<std::string>() << ": purity "
                  << format_double(rec["purity"].get<double>()) << "\n";
    return 0;
}

int cmd_pipeline(const RunConfig& config) {
    if (config.out.empty()) throw DataError("pipeline requires --out");
    ensure_out_dir(config.out);

    const auto series = load_series(config);
    const auto filter = wavelet_from_name(config.wavelet);
    const auto mode = boundary_mode_from_string(config.mode);
    check_common_grid(series);
    check_level(series, filter, config.level);

    const auto prepared_dir = (fs::path(config.out) / "series").string();
    ensure_out_dir(prepared_dir);
    write_series_dir(series, prepared_dir);

    RunConfig decompose_config = config;
    decompose_config.out = (fs::path(config.out) / "decomposition").string();
    decompose_config.synthetic_config.clear();
    decompose_config.input = prepared_dir;
    cmd_decompose(decompose_config);

    const auto cluster_dir = (fs::path(config.out) / "clustering").string();
    ensure_out_dir(cluster_dir);
    const auto summary = run_cluster_variants(series, config, cluster_dir);

    const auto smoothed_dir = (fs::path(config.out) / "smoothed").string();
    ensure_out_dir(smoothed_dir);
    for (const auto& [key, ts] : series)
        for (int l = 1; l <= config.level; ++l) {
            const auto result = smooth(ts.values, filter, config.level, l, mode, key.label());
            write_value_csv((fs::path(smoothed_dir) / (key.file_stem() + "_S" + std::to_string(l) + ".csv")).string(),
                            ts.start_date, result.signal);
        }

    // per-site overlays of the progressively smoothed signals
    const auto plot_dir = (fs::path(config.out) / "plots").string();
    ensure_out_dir(plot_dir);
    {
        std::map<std::string, std::vector<const TimeSeries*>> by_site;
        for (const auto& [key, ts] : series) by_site[key.site].push_back(&ts);
        for (const auto& [site, members] : by_site) {
            std::vector<SvgPanel> panels;
            for (int l = 1; l <= config.level; ++l) {
                SvgPanel panel;
                panel.title = "S" + std::to_string(l);
                for (const TimeSeries* ts : members) {
                    const auto smoothed = smooth(ts->values, filter, config.level, l, mode).signal;
                    const bool influent = ts->key.sample_type == SampleType::influent;
                    panel.series.push_back({to_string(ts->key.sample_type),
                                            influent ? "#1f77b4" : "#d62728", smoothed});
                }
                panels.push_back(std::move(panel));
            }
            std::string stem = site;
            std::replace(stem.begin(), stem.end(), ' ', '_');
            auto out = detail::open_output((fs::path(plot_dir) / (stem + "_smoothing.svg")).string());
            out << panels_svg(panels, site);
        }
    }

    nlohmann::ordered_json report;
    report["wavelet"] = filter.name;
    report["level"] = config.level;
    report["mode"] = config.mode;
    report["window"] = config.window;
    report["n_series"] = series.size();
    report["variants"] = summary;
    write_json((fs::path(config.out) / "report.json").string(), report);

    for (const auto& rec : summary)
        std::cout << rec["variant"].get<std::string>() << ": purity "
                  << format_double(rec["purity"].get<double>()) << "\n";
    std::cout << "report: " << (fs::path(config.out) / "report.json").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavelet decomposition, progressive denoising and clustering of environmental time series"};
    app.require_subcommand(1);

    RunConfig config;
    std::uint64_t seed_arg = 0;

    auto add_common = [&](CLI::App* cmd, bool with_transform) {
        cmd->add_option("--out", config.out, "output directory");
        if (with_transform) {
            cmd->add_option("--wavelet", config.wavelet, "wavelet name (haar, db1..db10)")
                ->capture_default_str();
            cmd->add_option("--level", config.level, "decomposition level")->capture_default_str();
            cmd->add_option("--mode", config.mode, "boundary mode (periodization|symmetric)")
                ->capture_default_str();
        }
        cmd->add_option("--window", config.window, "imputation window in days")->capture_default_str();
        cmd->add_flag("--lenient", config.lenient, "skip malformed CSV rows with a warning");
    };

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic raw-sample CSV");
    synth->add_option("--synthetic-config", config.synthetic_config, "synthetic config JSON")->required();
    synth->add_option("--seed", seed_arg, "master seed (overrides the config's seed)");
    synth->add_option("--sites", config.sites_override, "override the config's site count");
    synth->add_option("--out", config.out, "output CSV file or directory")->required();

    CLI::App* ingest = app.add_subcommand("ingest", "normalize, grid and impute a raw-sample CSV");
    ingest->add_option("--input", config.input, "raw samples CSV")->required();
    add_common(ingest, false);

    CLI::App* decompose = app.add_subcommand("decompose", "emit coefficient JSON and per-band component CSVs");
    decompose->add_option("--input", config.input, "raw samples CSV or ingested directory");
    decompose->add_option("--synthetic-config", config.synthetic_config, "synthetic config JSON");
    decompose->add_option("--seed", seed_arg, "seed for synthetic input");
    add_common(decompose, true);

    CLI::App* cluster = app.add_subcommand("cluster", "cluster variants and report pairing purity");
    cluster->add_option("--input", config.input, "raw samples CSV or ingested directory");
    cluster->add_option("--synthetic-config", config.synthetic_config, "synthetic config JSON");
    cluster->add_option("--seed", seed_arg, "seed for synthetic input");
    cluster->add_option("--variants", config.variants,
                        "comma-separated variants (raw,S1..SL,coeff:cD1..,coeff:cAL)")
        ->delimiter(',');
    add_common(cluster, true);

    CLI::App* pipeline = app.add_subcommand("pipeline", "ingest, decompose, cluster and write report.json");
    pipeline->add_option("--input", config.input, "raw samples CSV or ingested directory");
    pipeline->add_option("--synthetic-config", config.synthetic_config, "synthetic config JSON");
    pipeline->add_option("--seed", seed_arg, "seed for synthetic input");
    pipeline->add_option("--variants", config.variants,
                         "comma-separated variants (raw,S1..SL,coeff:cD1..,coeff:cAL)")
        ->delimiter(',');
    add_common(pipeline, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    for (const auto* cmd : {synth, decompose, cluster, pipeline})
        if (cmd->parsed() && cmd->count("--seed") > 0) config.seed = seed_arg;

    try {
        if (synth->parsed()) return cmd_synth(config);
        if (ingest->parsed()) return cmd_ingest(config);
        if (decompose->parsed()) return cmd_decompose(config);
        if (cluster->parsed()) return cmd_cluster(config);
        if (pipeline->parsed()) return cmd_pipeline(config);
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
