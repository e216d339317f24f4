#pragma once

#include "specbreak/detector.hpp"

#include <string>

namespace specbreak {

/// One panel per component: exceedance curve, dashed threshold and a vertical line per detected break.
[[nodiscard]] std::string render_svg(const BreakReport& report);

}  // namespace specbreak
