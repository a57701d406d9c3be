#include "vdr/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace vdr {

BoundingBox expand_crop(const BoundingBox& box, double scale, int image_w,
                        int image_h) {
    if (scale <= 0.0)
        throw std::invalid_argument("expand_crop: scale must be positive");
    if (!(box.x0 < box.x1 && box.y0 < box.y1))
        throw std::invalid_argument("expand_crop: degenerate box");

    const double cx = (box.x0 + box.x1) / 2.0;
    const double cy = (box.y0 + box.y1) / 2.0;
    const double half_w = box.width() * scale / 2.0;
    const double half_h = box.height() * scale / 2.0;

    double x0 = std::max(0.0, cx - half_w);
    double y0 = std::max(0.0, cy - half_h);
    double x1 = std::min(static_cast<double>(image_w), cx + half_w);
    double y1 = std::min(static_cast<double>(image_h), cy + half_h);

    BoundingBox out{static_cast<int>(std::floor(x0)),
                    static_cast<int>(std::floor(y0)),
                    static_cast<int>(std::ceil(x1)),
                    static_cast<int>(std::ceil(y1))};
    if (out.x0 >= out.x1 || out.y0 >= out.y1)
        throw std::invalid_argument(
            "expand_crop: clamped box has zero area (box outside image)");
    return out;
}

}  // namespace vdr
