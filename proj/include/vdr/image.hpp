#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vdr/geometry.hpp"

namespace vdr {

// One labelled region inside a simulated image. The descriptor string is the
// canonical identifier the sim search engine matches on.
struct SimRegion {
    std::string descriptor;
    BoundingBox region;

    friend bool operator==(const SimRegion&, const SimRegion&) = default;
};

// An image is either opaque encoded bytes (live mode) or a descriptor layout
// (sim mode). Exactly one payload kind is present; pixels are only ever
// touched by crop_image.
struct ImageRef {
    std::string id;
    int width = 0;
    int height = 0;
    std::optional<std::string> bytes;              // encoded image data
    std::optional<std::vector<SimRegion>> regions; // sim descriptor layout

    bool is_sim() const { return regions.has_value(); }
    bool valid() const {
        return width >= 1 && height >= 1 &&
               (bytes.has_value() != regions.has_value());
    }
    friend bool operator==(const ImageRef&, const ImageRef&) = default;
};

ImageRef make_sim_image(std::string id, int w, int h,
                        std::vector<SimRegion> regions);

// Cuts `box` out of `image`. Sim payloads intersect and re-origin the region
// list; byte payloads are pixel-cropped (PNG re-encoded). Throws
// std::invalid_argument on a box that is invalid for the image.
ImageRef crop_image(const ImageRef& image, const BoundingBox& box);

// Pixel crop of an encoded image, used by crop_image for byte payloads.
std::string crop_encoded_pixels(const std::string& encoded,
                                const BoundingBox& box);

}  // namespace vdr
