#pragma once

#include <algorithm>
#include <cmath>

namespace gelmine {

/// Axis-aligned pixel box with top-left origin, half-open on both axes:
/// it covers the pixels [x0, x1) x [y0, y1).
struct BoundingBox {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    long long area() const { return static_cast<long long>(width()) * height(); }
    bool valid() const { return x1 > x0 && y1 > y0 && x0 >= 0 && y0 >= 0; }

    bool contains(int x, int y) const {
        return x >= x0 && x < x1 && y >= y0 && y < y1;
    }

    bool operator==(const BoundingBox&) const = default;
};

/// True when the boxes share at least one pixel.
inline bool boxes_intersect(const BoundingBox& a, const BoundingBox& b) {
    return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
}

/// Intersection box; degenerate (area 0) when the boxes do not overlap.
inline BoundingBox box_intersection(const BoundingBox& a, const BoundingBox& b) {
    BoundingBox r{std::max(a.x0, b.x0), std::max(a.y0, b.y0),
                  std::min(a.x1, b.x1), std::min(a.y1, b.y1)};
    if (r.x1 < r.x0) r.x1 = r.x0;
    if (r.y1 < r.y0) r.y1 = r.y0;
    return r;
}

/// Smallest box containing both inputs.
inline BoundingBox box_union(const BoundingBox& a, const BoundingBox& b) {
    return BoundingBox{std::min(a.x0, b.x0), std::min(a.y0, b.y0),
                       std::max(a.x1, b.x1), std::max(a.y1, b.y1)};
}

inline double box_iou(const BoundingBox& a, const BoundingBox& b) {
    const long long inter = box_intersection(a, b).area();
    if (inter == 0) return 0.0;
    const long long uni = a.area() + b.area() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Euclidean distance between the closest points of the two boxes;
/// 0 exactly when they intersect or touch.
inline double box_gap(const BoundingBox& a, const BoundingBox& b) {
    const double dx = std::max({0, a.x0 - b.x1, b.x0 - a.x1});
    const double dy = std::max({0, a.y0 - b.y1, b.y0 - a.y1});
    return std::sqrt(dx * dx + dy * dy);
}

/// Distance from a point to the solid rectangle spanned by the box
/// (0 when the point lies inside).
inline double point_box_distance(double px, double py, const BoundingBox& box) {
    const double dx = std::max({box.x0 - px, px - box.x1, 0.0});
    const double dy = std::max({box.y0 - py, py - box.y1, 0.0});
    return std::sqrt(dx * dx + dy * dy);
}

/// Largest distance from any of the four corners of `inner` to `outer`.
inline double max_corner_distance(const BoundingBox& inner, const BoundingBox& outer) {
    double best = 0.0;
    for (const double cx : {static_cast<double>(inner.x0), static_cast<double>(inner.x1)}) {
        for (const double cy : {static_cast<double>(inner.y0), static_cast<double>(inner.y1)}) {
            best = std::max(best, point_box_distance(cx, cy, outer));
        }
    }
    return best;
}

} // namespace gelmine
