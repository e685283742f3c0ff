#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isoband/design.hpp"
#include "isoband/io.hpp"

namespace isoband {

struct PlotData {
  std::vector<Observation> points;
  BandTable band;
  std::optional<BandTable> refined;
  std::vector<Observation> reference;  // polyline, e.g. the true quantile curve
  std::string title;
};

/// SVG with the data points, one horizontal segment per grid point for each
/// bound (L right-continuous, U left-continuous), the optional refined band
/// and reference curve. Infinite bound values are clipped to the viewport.
/// Throws DataError on an empty band.
std::string render_svg(const PlotData& data);

}  // namespace isoband
