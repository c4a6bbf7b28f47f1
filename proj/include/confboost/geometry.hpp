#pragma once

#include <array>

namespace confboost {

// Axis-aligned box in top-left/width/height form, pixel units.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }
  double center_x() const { return x + 0.5 * w; }
  double center_y() const { return y + 0.5 * h; }
  bool valid() const;

  friend bool operator==(const BBox&, const BBox&) = default;
};

// Corner form (x1, y1, x2, y2).
std::array<double, 4> to_corners(const BBox& b);
BBox from_corners(double x1, double y1, double x2, double y2);

// Center form (cx, cy, w, h).
std::array<double, 4> to_center(const BBox& b);
BBox from_center(double cx, double cy, double w, double h);

// Throws InvalidGeometry unless w > 0, h > 0 and all fields finite.
void require_valid(const BBox& b, const char* what = "box");

// Intersection over union. Touching edges give 0.
double iou(const BBox& a, const BBox& b);

// Grows the box by s*w on the left and right and s*h on top and bottom,
// keeping the center fixed. Throws InvalidScale for s < 0.
BBox buffer_box(const BBox& o, double s);

// IoU after buffering the detection by (1 - c_t)/4 and the tracklet by
// (1 - c_t)/2, so less reliable tracklet predictions get larger buffers.
// Reduces to plain IoU when c_t == 1.
double soft_biou(const BBox& detection, const BBox& tracklet, double tracklet_confidence);

}  // namespace confboost
