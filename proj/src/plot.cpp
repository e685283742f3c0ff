#include "isoband/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace isoband {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kMargin = 50.0;

struct Viewport {
  double x0, x1, y0, y1;

  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const {
    const double c = std::clamp(y, y0, y1);
    return kHeight - kMargin - (c - y0) / (y1 - y0) * (kHeight - 2 * kMargin);
  }
};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return lo > hi; }
};

Range padded(Range r) {
  if (r.empty()) return {0.0, 1.0};
  const double pad = r.hi > r.lo ? 0.05 * (r.hi - r.lo) : 0.5 * std::max(1.0, std::abs(r.lo));
  return {r.lo - pad, r.hi + pad};
}

std::string num(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << std::fixed << v;
  return ss.str();
}

void line(std::ostringstream& out, const char* cls, double x0, double y0, double x1, double y1) {
  out << "<line class=\"" << cls << "\" x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\""
      << num(x1) << "\" y2=\"" << num(y1) << "\"/>\n";
}

void step_bounds(std::ostringstream& out, const Viewport& vp, const BandTable& t,
                 const char* lower_cls, const char* upper_cls) {
  const std::size_t nd = t.z.size();
  for (std::size_t j = 0; j < nd; ++j) {
    const double right = j + 1 < nd ? t.z[j + 1] : vp.x1;
    line(out, lower_cls, vp.px(t.z[j]), vp.py(t.lower[j]), vp.px(right), vp.py(t.lower[j]));
  }
  for (std::size_t j = 0; j < nd; ++j) {
    const double left = j > 0 ? t.z[j - 1] : vp.x0;
    line(out, upper_cls, vp.px(left), vp.py(t.upper[j]), vp.px(t.z[j]), vp.py(t.upper[j]));
  }
}

}  // namespace

std::string render_svg(const PlotData& data) {
  if (data.band.z.empty()) throw DataError("cannot plot an empty band");
  Range xr, yr;
  for (double z : data.band.z) xr.add(z);
  for (const auto& p : data.points) {
    xr.add(p.x);
    yr.add(p.y);
  }
  for (const auto& p : data.reference) yr.add(p.y);
  for (double v : data.band.lower) yr.add(v);
  for (double v : data.band.upper) yr.add(v);
  xr = padded(xr);
  yr = padded(yr);
  const Viewport vp{xr.lo, xr.hi, yr.lo, yr.hi};

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<style>.point{fill:#777}.lower,.upper{stroke:#c03;stroke-width:1.5}"
         ".lower-refined,.upper-refined{stroke:#06c;stroke-width:1.5;stroke-dasharray:4 2}"
         ".reference{fill:none;stroke:#000;stroke-width:1}.frame{fill:none;stroke:#000}</style>\n";
  out << "<rect class=\"frame\" x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
      << kWidth - 2 * kMargin << "\" height=\"" << kHeight - 2 * kMargin << "\"/>\n";
  if (!data.title.empty()) {
    out << "<text x=\"" << kMargin << "\" y=\"" << kMargin - 15 << "\">" << data.title << "</text>\n";
  }
  for (const auto& p : data.points) {
    out << "<circle class=\"point\" cx=\"" << num(vp.px(p.x)) << "\" cy=\"" << num(vp.py(p.y))
        << "\" r=\"1.5\"/>\n";
  }
  step_bounds(out, vp, data.band, "lower", "upper");
  if (data.refined) step_bounds(out, vp, *data.refined, "lower-refined", "upper-refined");
  if (!data.reference.empty()) {
    out << "<polyline class=\"reference\" points=\"";
    for (std::size_t i = 0; i < data.reference.size(); ++i) {
      out << (i ? " " : "") << num(vp.px(data.reference[i].x)) << ',' << num(vp.py(data.reference[i].y));
    }
    out << "\"/>\n";
  }
  out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - 15 << "\">x: " << num(xr.lo) << " to "
      << num(xr.hi) << ", y: " << num(yr.lo) << " to " << num(yr.hi) << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace isoband
