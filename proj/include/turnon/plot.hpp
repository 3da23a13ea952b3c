#pragma once

// Static SVG of a turn-on trace: gate voltage, drain-source voltage and the
// switch currents on a shared time axis, with the phase timeline shaded.

#include "turnon/phases.hpp"
#include "turnon/solver.hpp"

#include <string>

namespace turnon {

struct PlotOptions {
    int width = 960;
    int panel_height = 200;
    /// Polylines are decimated to at most this many vertices per series.
    int max_points = 2500;
    std::string title;
    /// Written into the SVG metadata.
    std::string manifest_hash;
};

[[nodiscard]] std::string render_svg(const WaveformTrace& trace, const PhaseTimeline& timeline,
                                     const PlotOptions& opt = {});

}  // namespace turnon
