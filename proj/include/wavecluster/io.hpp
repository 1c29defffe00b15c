#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavecluster/cluster.hpp"
#include "wavecluster/errors.hpp"
#include "wavecluster/format.hpp"
#include "wavecluster/synthetic.hpp"
#include "wavecluster/timeseries.hpp"
#include "wavecluster/transform.hpp"

namespace wavecluster {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        // trim ASCII whitespace
        const auto a = field.find_first_not_of(" \t\r");
        const auto b = field.find_last_not_of(" \t\r");
        fields.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
    }
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "' for reading");
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    return out;
}

} // namespace detail

struct ParseReport {
    std::size_t rows_ok = 0;
    std::vector<std::string> warnings; // lenient-mode skipped rows
};

/// Reads a raw-measurement CSV. Accepts either header
/// date,site,sample_type,n_gene,pmmov or date,site,sample_type,ratio.
/// In strict mode any malformed row throws a DataError naming its line;
/// lenient mode records a warning and skips the row. Zero valid rows is
/// always an error.
inline std::vector<RawSample> read_samples_csv(const std::string& path, bool lenient,
                                               ParseReport* report = nullptr) {
    auto in = detail::open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");

    const auto header = detail::split_csv_line(line);
    bool has_ratio = false;
    if (header == std::vector<std::string>{"date", "site", "sample_type", "ratio"})
        has_ratio = true;
    else if (header != std::vector<std::string>{"date", "site", "sample_type", "n_gene", "pmmov"})
        throw DataError(path + ": unrecognized header '" + line +
                        "' (expected date,site,sample_type,n_gene,pmmov or date,site,sample_type,ratio)");

    std::vector<RawSample> samples;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::string where = path + ":" + std::to_string(line_no);
        try {
            const auto fields = detail::split_csv_line(line);
            if (fields.size() != header.size())
                throw DataError("expected " + std::to_string(header.size()) + " fields, got " +
                                std::to_string(fields.size()));
            RawSample s;
            s.date = Date::parse(fields[0]);
            s.site = fields[1];
            if (s.site.empty()) throw DataError("empty site");
            s.sample_type = sample_type_from_string(fields[2]);
            if (has_ratio) {
                s.ratio = parse_double(fields[3], "ratio");
                if (s.ratio < 0.0) throw DataError("ratio must be >= 0");
            } else {
                s.ratio = normalize_pmmov(parse_double(fields[3], "n_gene"), parse_double(fields[4], "pmmov"));
            }
            samples.push_back(std::move(s));
        } catch (const std::exception& e) {
            if (!lenient) throw DataError(where + ": " + e.what());
            if (report) report->warnings.push_back(where + ": " + e.what() + " (row skipped)");
        }
    }
    if (samples.empty()) throw DataError(path + ": no valid data rows");
    if (report) report->rows_ok = samples.size();
    return samples;
}

inline void write_samples_csv(const std::string& path, std::span<const RawSample> samples) {
    auto out = detail::open_output(path);
    out << "date,site,sample_type,ratio\n";
    for (const auto& s : samples)
        out << s.date.to_string() << ',' << s.site << ',' << to_string(s.sample_type) << ','
            << format_double(s.ratio) << '\n';
    if (!out) throw DataError("failed writing '" + path + "'");
}

/// Per-series daily-grid CSV with columns date,value,observed.
inline void write_series_csv(const std::string& path, const TimeSeries& ts) {
    auto out = detail::open_output(path);
    out << "date,value,observed\n";
    for (std::size_t i = 0; i < ts.size(); ++i)
        out << (ts.start_date + static_cast<int>(i)).to_string() << ',' << format_double(ts.values[i])
            << ',' << (ts.observed_mask[i] ? '1' : '0') << '\n';
    if (!out) throw DataError("failed writing '" + path + "'");
}

inline TimeSeries read_series_csv(const std::string& path, const SeriesKey& key) {
    auto in = detail::open_input(path);
    std::string line;
    if (!std::getline(in, line) || detail::split_csv_line(line) != std::vector<std::string>{"date", "value", "observed"})
        throw DataError(path + ": expected header date,value,observed");

    TimeSeries ts;
    ts.key = key;
    std::size_t line_no = 1;
    std::optional<Date> prev;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        const std::string where = path + ":" + std::to_string(line_no);
        if (fields.size() != 3) throw DataError(where + ": expected 3 fields");
        const Date d = Date::parse(fields[0]);
        if (prev && d - *prev != 1) throw DataError(where + ": dates not on a contiguous daily grid");
        if (!prev) ts.start_date = d;
        prev = d;
        ts.values.push_back(parse_double(fields[1], where));
        if (fields[2] != "0" && fields[2] != "1") throw DataError(where + ": observed flag must be 0 or 1");
        ts.observed_mask.push_back(fields[2] == "1");
    }
    if (ts.values.empty()) throw DataError(path + ": no data rows");
    return ts;
}

/// Plain date,value CSV used for component and smoothed-signal files.
inline void write_value_csv(const std::string& path, Date start, std::span<const double> values) {
    auto out = detail::open_output(path);
    out << "date,value\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out << (start + static_cast<int>(i)).to_string() << ',' << format_double(values[i]) << '\n';
    if (!out) throw DataError("failed writing '" + path + "'");
}

// --- coefficient JSON ------------------------------------------------------

inline nlohmann::ordered_json coefficients_to_json(const CoefficientSet& coeffs) {
    nlohmann::ordered_json j;
    j["wavelet"] = coeffs.wavelet;
    j["mode"] = to_string(coeffs.mode);
    j["level"] = coeffs.level;
    j["original_length"] = coeffs.original_length;
    j["approx"] = coeffs.approx;
    j["details"] = coeffs.details; // finest (cD_1) first
    return j;
}

inline CoefficientSet coefficients_from_json(const nlohmann::json& j) {
    CoefficientSet coeffs;
    try {
        coeffs.wavelet = j.at("wavelet").get<std::string>();
        coeffs.mode = boundary_mode_from_string(j.at("mode").get<std::string>());
        coeffs.level = j.at("level").get<int>();
        coeffs.original_length = j.at("original_length").get<std::size_t>();
        coeffs.approx = j.at("approx").get<std::vector<double>>();
        coeffs.details = j.at("details").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed coefficient JSON: ") + e.what());
    }
    return coeffs;
}

inline void write_coefficients(const std::string& path, const CoefficientSet& coeffs) {
    auto out = detail::open_output(path);
    out << coefficients_to_json(coeffs).dump(2) << '\n';
    if (!out) throw DataError("failed writing '" + path + "'");
}

inline CoefficientSet read_coefficients(const std::string& path) {
    auto in = detail::open_input(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return coefficients_from_json(j);
}

// --- synthetic config JSON --------------------------------------------------

inline SyntheticConfig synthetic_config_from_json(const nlohmann::json& j) {
    SyntheticConfig c;
    try {
        auto get = [&](const char* key, auto& slot) {
            if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
        };
        get("n_sites", c.n_sites);
        get("n_days", c.n_days);
        get("start_date", c.start_date);
        get("baseline", c.baseline);
        get("waves_min", c.waves_min);
        get("waves_max", c.waves_max);
        get("wave_amp_min", c.wave_amp_min);
        get("wave_amp_max", c.wave_amp_max);
        get("wave_period_min_days", c.wave_period_min_days);
        get("wave_period_max_days", c.wave_period_max_days);
        get("peaks_min", c.peaks_min);
        get("peaks_max", c.peaks_max);
        get("peak_amp_min", c.peak_amp_min);
        get("peak_amp_max", c.peak_amp_max);
        get("peak_width_min_days", c.peak_width_min_days);
        get("peak_width_max_days", c.peak_width_max_days);
        get("shared_trend_amp", c.shared_trend_amp);
        get("shared_trend_period_min_days", c.shared_trend_period_min_days);
        get("shared_trend_period_max_days", c.shared_trend_period_max_days);
        get("noise_sigma_scale", c.noise_sigma_scale);
        get("missing_rate", c.missing_rate);
        for (auto [name, params] : {std::pair{"influent", &c.influent}, std::pair{"solids", &c.solids}})
            if (j.contains(name)) {
                const auto& t = j.at(name);
                auto tget = [&](const char* key, double& slot) {
                    if (t.contains(key)) slot = t.at(key).get<double>();
                };
                tget("gain_min", params->gain_min);
                tget("gain_max", params->gain_max);
                tget("offset_min", params->offset_min);
                tget("offset_max", params->offset_max);
                tget("noise_scale", params->noise_scale);
            }
        if (j.contains("seed")) {
            c.seed = j.at("seed").get<std::uint64_t>();
            c.has_seed = true;
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed synthetic config: ") + e.what());
    }
    validate(c);
    return c;
}

inline SyntheticConfig read_synthetic_config(const std::string& path) {
    auto in = detail::open_input(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return synthetic_config_from_json(j);
}

// --- manifests and summaries -------------------------------------------------

struct ManifestEntry {
    SeriesKey key;
    std::string file;
    Date start_date;
    Date end_date;
    std::size_t n_days = 0;
    std::size_t n_observed = 0;
};

inline nlohmann::ordered_json manifest_to_json(std::span<const ManifestEntry> entries) {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
        nlohmann::ordered_json j;
        j["site"] = e.key.site;
        j["sample_type"] = to_string(e.key.sample_type);
        j["file"] = e.file;
        j["start_date"] = e.start_date.to_string();
        j["end_date"] = e.end_date.to_string();
        j["n_days"] = e.n_days;
        j["n_observed"] = e.n_observed;
        list.push_back(std::move(j));
    }
    nlohmann::ordered_json root;
    root["series"] = std::move(list);
    return root;
}

inline std::vector<ManifestEntry> manifest_from_json(const nlohmann::json& root) {
    std::vector<ManifestEntry> entries;
    try {
        for (const auto& j : root.at("series")) {
            ManifestEntry e;
            e.key.site = j.at("site").get<std::string>();
            e.key.sample_type = sample_type_from_string(j.at("sample_type").get<std::string>());
            e.file = j.at("file").get<std::string>();
            e.start_date = Date::parse(j.at("start_date").get<std::string>());
            e.end_date = Date::parse(j.at("end_date").get<std::string>());
            e.n_days = j.at("n_days").get<std::size_t>();
            e.n_observed = j.at("n_observed").get<std::size_t>();
            entries.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed manifest: ") + e.what());
    }
    if (entries.empty()) throw DataError("manifest lists no series");
    return entries;
}

/// Per-variant purity record: {variant, purity, k_city_cut_labels}.
inline nlohmann::ordered_json purity_record(const ClusterRunResult& result, std::size_t n_sites) {
    nlohmann::ordered_json j;
    j["variant"] = result.variant;
    j["purity"] = result.purity;
    j["k_city_cut_labels"] = cut(result.dendrogram, n_sites);
    return j;
}

inline nlohmann::ordered_json dendrogram_to_json(const Dendrogram& dendro, std::span<const std::string> labels) {
    nlohmann::ordered_json j;
    j["n_leaves"] = dendro.n_leaves;
    j["labels"] = std::vector<std::string>(labels.begin(), labels.end());
    nlohmann::ordered_json merges = nlohmann::ordered_json::array();
    for (const auto& m : dendro.merges) {
        nlohmann::ordered_json rec;
        rec["left_id"] = m.left_id;
        rec["right_id"] = m.right_id;
        rec["height"] = m.height;
        rec["size"] = m.size;
        merges.push_back(std::move(rec));
    }
    j["merges"] = std::move(merges);
    return j;
}

inline void write_json(const std::string& path, const nlohmann::ordered_json& j) {
    auto out = detail::open_output(path);
    out << j.dump(2) << '\n';
    if (!out) throw DataError("failed writing '" + path + "'");
}

inline nlohmann::json read_json(const std::string& path) {
    auto in = detail::open_input(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return j;
}

} // namespace wavecluster
