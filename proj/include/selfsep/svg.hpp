#pragma once

#include <span>
#include <string>

#include "selfsep/bench.hpp"

namespace selfsep {

// Efficiency-versus-sample-count chart: log-scaled x axis, one polyline per
// (scenario, method) series with a shaded standard-error band.  Points whose
// mean is the exact sentinel are omitted.
std::string render_curves_svg(std::span<const CurvePoint> curves,
                              const std::string& title);

}  // namespace selfsep
