#include "vdr/image.hpp"

#include <stdexcept>
#include <utility>

namespace vdr {

ImageRef make_sim_image(std::string id, int w, int h,
                        std::vector<SimRegion> regions) {
    ImageRef img;
    img.id = std::move(id);
    img.width = w;
    img.height = h;
    img.regions = std::move(regions);
    return img;
}

ImageRef crop_image(const ImageRef& image, const BoundingBox& box) {
    if (!image.valid()) throw std::invalid_argument("crop_image: invalid image");
    if (!box.valid_for(image.width, image.height))
        throw std::invalid_argument("crop_image: box invalid for image");

    ImageRef out;
    out.id = image.id + "#" + std::to_string(box.x0) + "," +
             std::to_string(box.y0) + "," + std::to_string(box.x1) + "," +
             std::to_string(box.y1);
    out.width = box.width();
    out.height = box.height();

    if (image.is_sim()) {
        std::vector<SimRegion> kept;
        for (const SimRegion& r : *image.regions) {
            BoundingBox inter = intersect(r.region, box);
            if (inter.area() == 0) continue;
            kept.push_back(SimRegion{
                r.descriptor,
                BoundingBox{inter.x0 - box.x0, inter.y0 - box.y0,
                            inter.x1 - box.x0, inter.y1 - box.y0}});
        }
        out.regions = std::move(kept);
    } else {
        out.bytes = crop_encoded_pixels(*image.bytes, box);
    }
    return out;
}

}  // namespace vdr
