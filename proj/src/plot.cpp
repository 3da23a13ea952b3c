#include "turnon/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

namespace turnon {

namespace {

struct Series {
    std::string label;
    std::string color;
    std::function<Real(const CircuitState&, const BranchCurrents&)> value;
};

struct Panel {
    std::string axis;
    std::vector<Series> series;
};

std::string num(Real v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(Real v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// 1-2-5 tick spacing giving roughly n ticks over [lo, hi].
Real nice_step(Real lo, Real hi, int n) {
    const Real raw = (hi - lo) / n;
    if (!(raw > 0)) return 1.0;
    const Real mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (Real m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) return m * mag;
    }
    return 10 * mag;
}

}  // namespace

std::string render_svg(const WaveformTrace& trace, const PhaseTimeline& timeline, const PlotOptions& opt) {
    const std::vector<Panel> panels{
        {"V", {{"v_gs,S1", "#1f77b4", [](const CircuitState& s, const BranchCurrents&) { return s.v_gs_s1; }}}},
        {"V", {{"v_ds,S1", "#d62728", [](const CircuitState& s, const BranchCurrents&) { return s.v_ds_s1; }},
               {"v_ds,S2", "#9467bd", [](const CircuitState& s, const BranchCurrents&) { return s.v_ds_s2; }}}},
        {"A", {{"i_RS1", "#2ca02c", [](const CircuitState&, const BranchCurrents& c) { return c.i_rs1; }},
               {"i_DC", "#ff7f0e", [](const CircuitState&, const BranchCurrents& c) { return c.i_dc; }},
               {"i_d,S2", "#8c564b", [](const CircuitState&, const BranchCurrents& c) { return c.i_d_s2; }},
               {"i_C,S1", "#17becf", [](const CircuitState&, const BranchCurrents& c) { return c.i_c_s1; }}}},
    };

    const int left = 70, right = 150, top = 40, gap = 30, bottom = 40;
    const int plot_w = opt.width - left - right;
    const int height = top + static_cast<int>(panels.size()) * (opt.panel_height + gap) + bottom;
    const Real t0 = trace.empty() ? 0.0 : trace.t_begin();
    const Real t1 = trace.empty() ? 1.0 : trace.t_end();
    auto x_of = [&](Real t) { return left + plot_w * (t - t0) / (t1 - t0); };
    const std::size_t stride =
        std::max<std::size_t>(1, trace.size() / static_cast<std::size_t>(std::max(opt.max_points, 2)));

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<metadata>manifest_hash=" << escape(opt.manifest_hash) << "</metadata>\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">"
        << escape(opt.title.empty() ? std::string(to_string(timeline.scenario)) : opt.title) << "</text>\n";

    // Phase bands, drawn under every panel.
    struct Band {
        Window w;
        std::string label;
        std::string fill;
    };
    std::vector<Band> bands;
    const auto cc = timeline.time_of(EventKind::CCComplete);
    if (cc) bands.push_back({{timeline.onset, *cc}, "CC", "#dbe9f6"});
    const auto vf0 = timeline.time_of(EventKind::VFStart);
    const auto vf1 = timeline.time_of(EventKind::VFEnd);
    if (vf0 && vf1) bands.push_back({{*vf0, *vf1}, "VF", "#fde2cf"});
    const auto sub = timeline.miller_subphases();
    const char* sub_fill[] = {"#e6e6e6", "#cfcfcf", "#e6e6e6", "#cfcfcf"};
    for (std::size_t i = 0; i < sub.size() && i < 4; ++i) {
        bands.push_back({sub[i], "M" + std::to_string(i + 1), sub_fill[i]});
    }

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const int y_top = top + static_cast<int>(p) * (opt.panel_height + gap);
        const int y_bot = y_top + opt.panel_height;

        Real lo = std::numeric_limits<Real>::infinity(), hi = -lo;
        for (const Series& s : panels[p].series) {
            for (std::size_t i = 0; i < trace.size(); ++i) {
                const Real v = s.value(trace.states[i], trace.currents[i]);
                if (std::isfinite(v)) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
        }
        if (!(hi > lo)) {
            lo = std::isfinite(lo) ? lo - 1 : -1;
            hi = lo + 2;
        }
        const Real pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
        auto y_of = [&](Real v) { return y_bot - opt.panel_height * (v - lo) / (hi - lo); };

        // Miller sub-phases shade the gate panel, CC and VF the other two.
        int label_row = 0;
        for (const Band& b : bands) {
            const bool miller = b.label[0] == 'M';
            if (miller != (p == 0)) continue;
            const Real xa = x_of(std::clamp(b.w.start, t0, t1));
            const Real xb = x_of(std::clamp(b.w.end, t0, t1));
            svg << "<rect class=\"phase\" data-phase=\"" << b.label << "\" x=\"" << num(xa) << "\" y=\"" << y_top
                << "\" width=\"" << num(std::max(xb - xa, 0.5)) << "\" height=\"" << opt.panel_height
                << "\" fill=\"" << b.fill << "\" fill-opacity=\"0.7\"/>\n";
            // Alternate label rows so narrow neighbouring bands stay readable.
            svg << "<text x=\"" << num(xa + 2) << "\" y=\"" << y_top + 12 + 12 * (label_row++ % 2)
                << "\" fill=\"#555\">" << b.label
                << "</text>\n";
        }

        svg << "<rect x=\"" << left << "\" y=\"" << y_top << "\" width=\"" << plot_w << "\" height=\""
            << opt.panel_height << "\" fill=\"none\" stroke=\"#333\"/>\n";
        const Real ys = nice_step(lo, hi, 5);
        for (Real v = std::ceil(lo / ys) * ys; v <= hi; v += ys) {
            svg << "<line x1=\"" << left - 4 << "\" x2=\"" << left << "\" y1=\"" << num(y_of(v)) << "\" y2=\""
                << num(y_of(v)) << "\" stroke=\"#333\"/><text x=\"" << left - 6 << "\" y=\"" << num(y_of(v) + 4)
                << "\" text-anchor=\"end\">" << tick_label(std::abs(v) < 1e-9 * ys ? 0.0 : v) << "</text>\n";
        }
        svg << "<text x=\"14\" y=\"" << (y_top + y_bot) / 2 << "\" transform=\"rotate(-90 14 " << (y_top + y_bot) / 2
            << ")\" text-anchor=\"middle\">" << panels[p].axis << "</text>\n";

        int legend_y = y_top + 14;
        for (const Series& s : panels[p].series) {
            svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.3\" points=\"";
            for (std::size_t i = 0; i < trace.size(); i += stride) {
                svg << num(x_of(trace.t[i])) << ',' << num(y_of(s.value(trace.states[i], trace.currents[i]))) << ' ';
            }
            if (!trace.empty()) {
                svg << num(x_of(trace.t.back())) << ','
                    << num(y_of(s.value(trace.states.back(), trace.currents.back())));
            }
            svg << "\"/>\n";
            svg << "<line x1=\"" << left + plot_w + 10 << "\" x2=\"" << left + plot_w + 30 << "\" y1=\"" << legend_y - 4
                << "\" y2=\"" << legend_y - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/><text x=\""
                << left + plot_w + 34 << "\" y=\"" << legend_y << "\">" << s.label << "</text>\n";
            legend_y += 16;
        }
    }

    const int axis_y = top + static_cast<int>(panels.size()) * (opt.panel_height + gap) - gap;
    const Real xs = nice_step(t0 * 1e9, t1 * 1e9, 10);
    for (Real v = std::ceil(t0 * 1e9 / xs) * xs; v <= t1 * 1e9; v += xs) {
        const Real x = x_of(v * 1e-9);
        svg << "<line x1=\"" << num(x) << "\" x2=\"" << num(x) << "\" y1=\"" << axis_y << "\" y2=\"" << axis_y + 4
            << "\" stroke=\"#333\"/><text x=\"" << num(x) << "\" y=\"" << axis_y + 16 << "\" text-anchor=\"middle\">"
            << tick_label(v) << "</text>\n";
    }
    svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << axis_y + 32 << "\" text-anchor=\"middle\">t (ns)</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace turnon
