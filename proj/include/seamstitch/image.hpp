#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace seamstitch {

/// 8-bit interleaved raster (1, 3 or 4 channels; color order RGB[A]).
struct Image {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint32_t channels = 0;
    std::vector<std::uint8_t> data;

    Image() = default;
    Image(std::uint32_t w, std::uint32_t h, std::uint32_t c, std::uint8_t fill = 0)
        : width(w), height(h), channels(c), data(std::size_t(w) * h * c, fill) {}

    [[nodiscard]] bool empty() const { return data.empty(); }
    [[nodiscard]] std::uint8_t& at(std::uint32_t x, std::uint32_t y, std::uint32_t c) {
        return data[(std::size_t(y) * width + x) * channels + c];
    }
    [[nodiscard]] std::uint8_t at(std::uint32_t x, std::uint32_t y, std::uint32_t c) const {
        return data[(std::size_t(y) * width + x) * channels + c];
    }

    friend bool operator==(const Image&, const Image&) = default;
};

/// Single-channel float raster. Used for gates, ramps, density maps and
/// each channel of a displacement field.
struct ScalarField {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<float> values;

    ScalarField() = default;
    ScalarField(std::uint32_t w, std::uint32_t h, float fill = 0.0f)
        : width(w), height(h), values(std::size_t(w) * h, fill) {}

    [[nodiscard]] float& at(std::uint32_t x, std::uint32_t y) { return values[std::size_t(y) * width + x]; }
    [[nodiscard]] float at(std::uint32_t x, std::uint32_t y) const { return values[std::size_t(y) * width + x]; }

    friend bool operator==(const ScalarField&, const ScalarField&) = default;
};

/// Two-channel displacement field (dx, dy) in source pixels.
struct DisplacementField {
    ScalarField dx;
    ScalarField dy;

    DisplacementField() = default;
    DisplacementField(std::uint32_t w, std::uint32_t h) : dx(w, h), dy(w, h) {}

    [[nodiscard]] std::uint32_t width() const { return dx.width; }
    [[nodiscard]] std::uint32_t height() const { return dx.height; }
    /// Largest |dx| or |dy| over the field.
    [[nodiscard]] double max_component() const;
    /// Largest Euclidean magnitude over the field.
    [[nodiscard]] double max_magnitude() const;

    friend bool operator==(const DisplacementField&, const DisplacementField&) = default;
};

/// PNG/JPEG, 8-bit, 1/3/4 channels. Throws IoError.
Image load_image(const std::filesystem::path& path);
void save_image(const Image& image, const std::filesystem::path& path);

/// Portable float map, little-endian (scale -1). One channel writes "Pf",
/// two or three write "PF" (missing channels zero-filled).
void save_pfm(const std::vector<const ScalarField*>& channels, const std::filesystem::path& path);

/// Luma (BT.601 weights) as a float field in [0, 255]. Alpha is ignored.
ScalarField to_gray(const Image& image);

/// Drops or adds channels: RGBA->RGB, gray->RGB, RGB->RGB.
Image to_rgb(const Image& image);

/// Field in [0,1] scaled to 8-bit gray.
Image field_to_gray8(const ScalarField& field);

}  // namespace seamstitch
