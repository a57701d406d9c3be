#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vdr {

// Pixel rectangle, half-open on neither side: (x0,y0) inclusive top-left,
// (x1,y1) exclusive bottom-right in the usual crop sense. Valid boxes have
// x0 < x1 and y0 < y1 and lie inside the image they are applied to.
struct BoundingBox {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    std::int64_t area() const {
        return static_cast<std::int64_t>(width()) * height();
    }
    bool valid_for(int image_w, int image_h) const {
        return 0 <= x0 && x0 < x1 && x1 <= image_w && 0 <= y0 && y0 < y1 &&
               y1 <= image_h;
    }
    bool contains(const BoundingBox& other) const {
        return x0 <= other.x0 && y0 <= other.y0 && x1 >= other.x1 &&
               y1 >= other.y1;
    }
    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Intersection; may be degenerate (zero area) when the boxes do not overlap.
inline BoundingBox intersect(const BoundingBox& a, const BoundingBox& b) {
    BoundingBox r{std::max(a.x0, b.x0), std::max(a.y0, b.y0),
                  std::min(a.x1, b.x1), std::min(a.y1, b.y1)};
    if (r.x0 >= r.x1 || r.y0 >= r.y1) return BoundingBox{0, 0, 0, 0};
    return r;
}

// A crop request: a proposed box plus a center-expansion factor.
struct CropSpec {
    BoundingBox box;
    double scale = 1.0;

    friend bool operator==(const CropSpec&, const CropSpec&) = default;
};

// Expands `box` about its center by `scale` in each dimension, then clamps to
// the image. Fractional edges round outward so the result always contains the
// original box clipped to the image; scale 1.0 is the identity.
BoundingBox expand_crop(const BoundingBox& box, double scale, int image_w,
                        int image_h);

}  // namespace vdr
