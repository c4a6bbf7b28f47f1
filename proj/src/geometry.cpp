#include "confboost/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "confboost/errors.hpp"

namespace confboost {

bool BBox::valid() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) && std::isfinite(h) &&
         w > 0.0 && h > 0.0 && std::isfinite(w * h);
}

std::array<double, 4> to_corners(const BBox& b) { return {b.x, b.y, b.right(), b.bottom()}; }

BBox from_corners(double x1, double y1, double x2, double y2) {
  return BBox{x1, y1, x2 - x1, y2 - y1};
}

std::array<double, 4> to_center(const BBox& b) {
  return {b.center_x(), b.center_y(), b.w, b.h};
}

BBox from_center(double cx, double cy, double w, double h) {
  return BBox{cx - 0.5 * w, cy - 0.5 * h, w, h};
}

void require_valid(const BBox& b, const char* what) {
  if (!b.valid()) {
    throw InvalidGeometry(std::string(what) + " must have finite coordinates and positive size (w=" +
                          std::to_string(b.w) + ", h=" + std::to_string(b.h) + ")");
  }
}

double iou(const BBox& a, const BBox& b) {
  require_valid(a, "iou: first box");
  require_valid(b, "iou: second box");
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

BBox buffer_box(const BBox& o, double s) {
  require_valid(o, "buffer_box");
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw InvalidScale("buffer scale must be finite and >= 0, got " + std::to_string(s));
  }
  return BBox{o.x - s * o.w, o.y - s * o.h, o.w + 2.0 * s * o.w, o.h + 2.0 * s * o.h};
}

double soft_biou(const BBox& detection, const BBox& tracklet, double tracklet_confidence) {
  if (!(tracklet_confidence >= 0.0 && tracklet_confidence <= 1.0)) {
    throw InvalidConfidence("tracklet confidence must lie in [0,1], got " +
                            std::to_string(tracklet_confidence));
  }
  const double slack = 1.0 - tracklet_confidence;
  return iou(buffer_box(detection, slack / 4.0), buffer_box(tracklet, slack / 2.0));
}

}  // namespace confboost
