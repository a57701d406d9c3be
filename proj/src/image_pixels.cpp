#include <opencv2/imgcodecs.hpp>

#include "vdr/image.hpp"

namespace vdr {

// Live-mode pixel path; sim images never reach this.
std::string crop_encoded_pixels(const std::string& encoded,
                                const BoundingBox& box) {
    std::vector<unsigned char> buf(encoded.begin(), encoded.end());
    cv::Mat decoded = cv::imdecode(buf, cv::IMREAD_UNCHANGED);
    if (decoded.empty())
        throw std::invalid_argument("crop_encoded_pixels: undecodable image");
    if (box.x1 > decoded.cols || box.y1 > decoded.rows)
        throw std::invalid_argument("crop_encoded_pixels: box outside pixels");
    cv::Mat roi = decoded(cv::Rect(box.x0, box.y0, box.width(), box.height()));
    std::vector<unsigned char> out;
    if (!cv::imencode(".png", roi, out))
        throw std::runtime_error("crop_encoded_pixels: png encode failed");
    return std::string(out.begin(), out.end());
}

}  // namespace vdr
