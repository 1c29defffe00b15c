#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "wavecluster/cluster.hpp"
#include "wavecluster/format.hpp"

namespace wavecluster {

namespace detail {

// Fixed-precision coordinate formatting keeps SVG output byte-stable.
inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string newick_quote(const std::string& label) {
    // Quote anything carrying Newick structural characters or spaces.
    if (label.find_first_of("(),:; '\t") == std::string::npos) return label;
    std::string quoted = "'";
    for (char c : label) {
        quoted += c;
        if (c == '\'') quoted += '\''; // '' escapes a quote
    }
    quoted += '\'';
    return quoted;
}

// Left-to-right leaf order from a depth-first walk of the merge tree.
inline void leaf_order_rec(const Dendrogram& dendro, std::size_t id, std::vector<std::size_t>& out) {
    if (id < dendro.n_leaves) {
        out.push_back(id);
        return;
    }
    const Merge& m = dendro.merges[id - dendro.n_leaves];
    leaf_order_rec(dendro, m.left_id, out);
    leaf_order_rec(dendro, m.right_id, out);
}

} // namespace detail

inline std::vector<std::size_t> dendrogram_leaf_order(const Dendrogram& dendro) {
    std::vector<std::size_t> order;
    order.reserve(dendro.n_leaves);
    detail::leaf_order_rec(dendro, dendro.n_leaves + dendro.merges.size() - 1, order);
    return order;
}

/// Newick serialization with merge heights as branch lengths (the branch to
/// a child spans parent height minus child height; leaves sit at height 0).
inline std::string to_newick(const Dendrogram& dendro, std::span<const std::string> labels) {
    if (labels.size() != dendro.n_leaves)
        throw std::invalid_argument("to_newick: need one label per leaf");

    auto height_of = [&](std::size_t id) {
        return id < dendro.n_leaves ? 0.0 : dendro.merges[id - dendro.n_leaves].height;
    };
    // iterative would be overkill; depth <= n_leaves and n is small
    auto rec = [&](auto&& self, std::size_t id) -> std::string {
        if (id < dendro.n_leaves) return detail::newick_quote(labels[id]);
        const Merge& m = dendro.merges[id - dendro.n_leaves];
        const std::string left = self(self, m.left_id) + ":" + format_double(m.height - height_of(m.left_id));
        const std::string right = self(self, m.right_id) + ":" + format_double(m.height - height_of(m.right_id));
        return "(" + left + "," + right + ")";
    };
    return rec(rec, dendro.n_leaves + dendro.merges.size() - 1) + ";";
}

/// Minimal dendrogram rendering: leaves along the bottom, merge heights on
/// the vertical axis. Diagnostic quality, not publication-grade.
inline std::string dendrogram_svg(const Dendrogram& dendro, std::span<const std::string> labels,
                                  const std::string& title = {}) {
    if (labels.size() != dendro.n_leaves)
        throw std::invalid_argument("dendrogram_svg: need one label per leaf");

    const double leaf_spacing = 70.0;
    const double margin_x = 50.0, top = 40.0, axis_h = 320.0, label_h = 110.0;
    const double width = margin_x * 2 + leaf_spacing * static_cast<double>(dendro.n_leaves - 1);
    const double height = top + axis_h + label_h;

    double max_h = 0.0;
    for (const auto& m : dendro.merges) max_h = std::max(max_h, m.height);
    if (max_h <= 0.0) max_h = 1.0;
    auto y_of = [&](double h) { return top + axis_h - h / max_h * axis_h; };

    const auto order = dendrogram_leaf_order(dendro);
    std::vector<double> x_of(2 * dendro.n_leaves - 1, 0.0);
    for (std::size_t i = 0; i < order.size(); ++i)
        x_of[order[i]] = margin_x + leaf_spacing * static_cast<double>(i);

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::svg_num(width) +
           "\" height=\"" + detail::svg_num(height) + "\" viewBox=\"0 0 " + detail::svg_num(width) + " " +
           detail::svg_num(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty())
        svg += "<text x=\"" + detail::svg_num(width / 2) +
               "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" + title +
               "</text>\n";

    for (std::size_t k = 0; k < dendro.merges.size(); ++k) {
        const Merge& m = dendro.merges[k];
        const double xl = x_of[m.left_id], xr = x_of[m.right_id];
        const double yl = m.left_id < dendro.n_leaves ? y_of(0.0) : y_of(dendro.merges[m.left_id - dendro.n_leaves].height);
        const double yr = m.right_id < dendro.n_leaves ? y_of(0.0) : y_of(dendro.merges[m.right_id - dendro.n_leaves].height);
        const double ym = y_of(m.height);
        x_of[dendro.n_leaves + k] = (xl + xr) / 2.0;
        svg += "<path fill=\"none\" stroke=\"#444444\" stroke-width=\"1.5\" d=\"M " + detail::svg_num(xl) +
               " " + detail::svg_num(yl) + " L " + detail::svg_num(xl) + " " + detail::svg_num(ym) + " L " +
               detail::svg_num(xr) + " " + detail::svg_num(ym) + " L " + detail::svg_num(xr) + " " +
               detail::svg_num(yr) + "\"/>\n";
    }

    for (std::size_t i = 0; i < order.size(); ++i) {
        const double x = margin_x + leaf_spacing * static_cast<double>(i);
        const double y = top + axis_h + 14.0;
        svg += "<text x=\"" + detail::svg_num(x) + "\" y=\"" + detail::svg_num(y) +
               "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\" transform=\"rotate(-40 " +
               detail::svg_num(x) + " " + detail::svg_num(y) + ")\">" + labels[order[i]] + "</text>\n";
    }

    // height axis: max-height tick only
    svg += "<line x1=\"" + detail::svg_num(margin_x - 18) + "\" y1=\"" + detail::svg_num(y_of(0.0)) +
           "\" x2=\"" + detail::svg_num(margin_x - 18) + "\" y2=\"" + detail::svg_num(y_of(max_h)) +
           "\" stroke=\"#999999\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + detail::svg_num(margin_x - 22) + "\" y=\"" + detail::svg_num(y_of(max_h) + 4) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" + detail::svg_num(max_h) +
           "</text>\n";
    svg += "</svg>\n";
    return svg;
}

/// One named curve of an overlay panel.
struct SvgSeries {
    std::string name;
    std::string color;
    std::vector<double> values;
};

struct SvgPanel {
    std::string title;
    std::vector<SvgSeries> series;
};

/// Stacked line panels sharing one x axis (day index). Used for the
/// progressive-smoothing overlays (one panel per S_l, influent and solids
/// overlaid per panel).
inline std::string panels_svg(std::span<const SvgPanel> panels, const std::string& title = {}) {
    const double width = 860.0, panel_h = 180.0, pad = 46.0, top = title.empty() ? 16.0 : 40.0;
    const double plot_w = width - 2 * pad;
    const double height = top + static_cast<double>(panels.size()) * (panel_h + 18.0);

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::svg_num(width) + "\" height=\"" +
           detail::svg_num(height) + "\" viewBox=\"0 0 " + detail::svg_num(width) + " " +
           detail::svg_num(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty())
        svg += "<text x=\"" + detail::svg_num(width / 2) +
               "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" + title +
               "</text>\n";

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto& panel = panels[p];
        const double y0 = top + static_cast<double>(p) * (panel_h + 18.0);
        double lo = 0.0, hi = 1.0;
        bool first = true;
        std::size_t n = 0;
        for (const auto& s : panel.series)
            for (double v : s.values) {
                if (first) {
                    lo = hi = v;
                    first = false;
                } else {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
        for (const auto& s : panel.series) n = std::max(n, s.values.size());
        if (hi <= lo) hi = lo + 1.0;

        svg += "<rect x=\"" + detail::svg_num(pad) + "\" y=\"" + detail::svg_num(y0 + 16) + "\" width=\"" +
               detail::svg_num(plot_w) + "\" height=\"" + detail::svg_num(panel_h - 28) +
               "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
        svg += "<text x=\"" + detail::svg_num(pad) + "\" y=\"" + detail::svg_num(y0 + 10) +
               "\" font-family=\"sans-serif\" font-size=\"13\">" + panel.title + "</text>\n";

        double legend_x = pad + 8.0;
        for (const auto& s : panel.series) {
            if (s.values.size() < 2) continue;
            std::string points;
            for (std::size_t i = 0; i < s.values.size(); ++i) {
                const double x = pad + plot_w * static_cast<double>(i) / static_cast<double>(n - 1);
                const double y = y0 + 16 + (panel_h - 28) * (1.0 - (s.values[i] - lo) / (hi - lo));
                points += detail::svg_num(x) + "," + detail::svg_num(y) + " ";
            }
            points.pop_back();
            svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.3\" points=\"" +
                   points + "\"/>\n";
            svg += "<text x=\"" + detail::svg_num(legend_x) + "\" y=\"" + detail::svg_num(y0 + 30) +
                   "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" + s.color + "\">" + s.name +
                   "</text>\n";
            legend_x += 72.0;
        }
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace wavecluster
