#include "seamstitch/image.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "seamstitch/error.hpp"

namespace seamstitch {

double DisplacementField::max_component() const {
    double m = 0.0;
    for (float v : dx.values) m = std::max(m, static_cast<double>(std::abs(v)));
    for (float v : dy.values) m = std::max(m, static_cast<double>(std::abs(v)));
    return m;
}

double DisplacementField::max_magnitude() const {
    double m = 0.0;
    for (std::size_t i = 0; i < dx.values.size(); ++i) {
        m = std::max(m, std::hypot(static_cast<double>(dx.values[i]), static_cast<double>(dy.values[i])));
    }
    return m;
}

Image load_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorCode::IoError, "no such file: " + path.string());
    }
    cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (mat.empty()) throw Error(ErrorCode::IoError, "cannot decode image: " + path.string());
    if (mat.depth() != CV_8U) throw Error(ErrorCode::IoError, "only 8-bit images are supported: " + path.string());
    const int ch = mat.channels();
    if (ch != 1 && ch != 3 && ch != 4) throw Error(ErrorCode::IoError, "unsupported channel count in " + path.string());

    Image img(static_cast<std::uint32_t>(mat.cols), static_cast<std::uint32_t>(mat.rows), static_cast<std::uint32_t>(ch));
    for (int y = 0; y < mat.rows; ++y) {
        const std::uint8_t* row = mat.ptr<std::uint8_t>(y);
        for (int x = 0; x < mat.cols; ++x) {
            const std::uint8_t* px = row + std::size_t(x) * ch;
            auto ux = static_cast<std::uint32_t>(x);
            auto uy = static_cast<std::uint32_t>(y);
            if (ch == 1) {
                img.at(ux, uy, 0) = px[0];
            } else {
                // BGR[A] -> RGB[A]
                img.at(ux, uy, 0) = px[2];
                img.at(ux, uy, 1) = px[1];
                img.at(ux, uy, 2) = px[0];
                if (ch == 4) img.at(ux, uy, 3) = px[3];
            }
        }
    }
    return img;
}

void save_image(const Image& image, const std::filesystem::path& path) {
    const int ch = static_cast<int>(image.channels);
    if (ch != 1 && ch != 3 && ch != 4) throw Error(ErrorCode::IoError, "unsupported channel count");
    cv::Mat mat(static_cast<int>(image.height), static_cast<int>(image.width), CV_8UC(ch));
    for (std::uint32_t y = 0; y < image.height; ++y) {
        std::uint8_t* row = mat.ptr<std::uint8_t>(static_cast<int>(y));
        for (std::uint32_t x = 0; x < image.width; ++x) {
            std::uint8_t* px = row + std::size_t(x) * ch;
            if (ch == 1) {
                px[0] = image.at(x, y, 0);
            } else {
                px[0] = image.at(x, y, 2);
                px[1] = image.at(x, y, 1);
                px[2] = image.at(x, y, 0);
                if (ch == 4) px[3] = image.at(x, y, 3);
            }
        }
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), mat);
    } catch (const cv::Exception& e) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string() + ": " + e.what());
    }
    if (!ok) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

void save_pfm(const std::vector<const ScalarField*>& channels, const std::filesystem::path& path) {
    if (channels.empty() || channels.size() > 3) throw Error(ErrorCode::IoError, "PFM needs 1 to 3 channels");
    const std::uint32_t w = channels[0]->width;
    const std::uint32_t h = channels[0]->height;
    for (const ScalarField* c : channels) {
        if (c->width != w || c->height != h) throw Error(ErrorCode::DimensionMismatch, "PFM channel size mismatch");
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    const bool color = channels.size() > 1;
    out << (color ? "PF" : "Pf") << '\n' << w << ' ' << h << '\n' << "-1.0" << '\n';
    // PFM rows run bottom-to-top.
    for (std::uint32_t row = 0; row < h; ++row) {
        const std::uint32_t y = h - 1 - row;
        for (std::uint32_t x = 0; x < w; ++x) {
            const int n = color ? 3 : 1;
            for (int c = 0; c < n; ++c) {
                float v = c < static_cast<int>(channels.size()) ? channels[std::size_t(c)]->at(x, y) : 0.0f;
                std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
                if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
                char buf[4];
                std::memcpy(buf, &bits, 4);
                out.write(buf, 4);
            }
        }
    }
    if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

ScalarField to_gray(const Image& image) {
    ScalarField g(image.width, image.height);
    for (std::uint32_t y = 0; y < image.height; ++y) {
        for (std::uint32_t x = 0; x < image.width; ++x) {
            if (image.channels < 3) {
                g.at(x, y) = image.at(x, y, 0);
            } else {
                g.at(x, y) = static_cast<float>(0.299 * image.at(x, y, 0) + 0.587 * image.at(x, y, 1) +
                                                0.114 * image.at(x, y, 2));
            }
        }
    }
    return g;
}

Image to_rgb(const Image& image) {
    if (image.channels == 3) return image;
    Image out(image.width, image.height, 3);
    for (std::uint32_t y = 0; y < image.height; ++y) {
        for (std::uint32_t x = 0; x < image.width; ++x) {
            for (std::uint32_t c = 0; c < 3; ++c) {
                out.at(x, y, c) = image.channels == 1 ? image.at(x, y, 0) : image.at(x, y, c);
            }
        }
    }
    return out;
}

Image field_to_gray8(const ScalarField& field) {
    Image out(field.width, field.height, 1);
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        const float v = std::clamp(field.values[i], 0.0f, 1.0f);
        out.data[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
    }
    return out;
}

}  // namespace seamstitch
