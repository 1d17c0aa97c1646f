#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace graypatch {

/// Raised when an operation is handed an image it cannot work on
/// (wrong channel count, mismatched dimensions, bad geometry).
class image_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Row-major, channel-interleaved 8-bit raster. Three channels are stored
/// in RGB order; a single channel is a luma or sketch plane.
class ImageBuffer {
public:
    ImageBuffer() = default;

    ImageBuffer(int width, int height, int channels, std::uint8_t fill = 0)
        : width_(width), height_(height), channels_(channels) {
        check_shape(width, height, channels);
        data_.assign(sample_count(), fill);
    }

    ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> data)
        : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
        check_shape(width, height, channels);
        if (data_.size() != sample_count()) {
            throw image_error("sample buffer holds " + std::to_string(data_.size()) +
                              " bytes, expected " + std::to_string(sample_count()));
        }
    }

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] int channels() const noexcept { return channels_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }
    [[nodiscard]] std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }
    [[nodiscard]] std::size_t sample_count() const noexcept {
        return pixel_count() * static_cast<std::size_t>(channels_);
    }

    [[nodiscard]] std::span<std::uint8_t> data() noexcept { return data_; }
    [[nodiscard]] std::span<const std::uint8_t> data() const noexcept { return data_; }

    [[nodiscard]] std::size_t index(int x, int y, int c = 0) const noexcept {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x)) * static_cast<std::size_t>(channels_) +
               static_cast<std::size_t>(c);
    }

    [[nodiscard]] std::uint8_t at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }
    [[nodiscard]] std::uint8_t& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }

    [[nodiscard]] bool same_shape(const ImageBuffer& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
    }

    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

private:
    static void check_shape(int width, int height, int channels) {
        if (width < 1 || height < 1) {
            throw image_error("image dimensions must be positive, got " + std::to_string(width) + "x" +
                              std::to_string(height));
        }
        if (channels != 1 && channels != 3) {
            throw image_error("channel count must be 1 or 3, got " + std::to_string(channels));
        }
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> data_;
};

inline void require_channels(const ImageBuffer& img, int channels, const char* op) {
    if (img.empty() || img.channels() != channels) {
        throw image_error(std::string(op) + ": expected a " + std::to_string(channels) +
                          "-channel image, got " + std::to_string(img.channels()));
    }
}

/// Round-half-up for non-negative values, clamped to the 8-bit range.
inline std::uint8_t round_to_u8(double v) noexcept {
    if (!(v > 0.0)) return 0;
    if (v >= 254.5) return 255;
    return static_cast<std::uint8_t>(static_cast<int>(v + 0.5));
}

} // namespace graypatch
