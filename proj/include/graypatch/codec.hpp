#pragma once

#include "graypatch/image.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <jpeglib.h>
#include <jerror.h>

namespace graypatch {

class codec_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ImageFormat { png, jpeg };

inline ImageFormat parse_format(std::string_view name) {
    if (name == "png") return ImageFormat::png;
    if (name == "jpeg" || name == "jpg") return ImageFormat::jpeg;
    throw codec_error("unsupported image format '" + std::string(name) + "'");
}

/// Identifies the container from its leading bytes.
inline ImageFormat sniff_format(std::span<const std::uint8_t> bytes) {
    static constexpr std::uint8_t png_magic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), png_magic, 8) == 0) return ImageFormat::png;
    if (bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 && bytes[2] == 0xff) return ImageFormat::jpeg;
    throw codec_error("unsupported or unrecognised image format");
}

namespace detail {

inline ImageBuffer decode_png(std::span<const std::uint8_t> bytes) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        std::string msg = image.message;
        png_image_free(&image);
        throw codec_error("png decode: " + msg);
    }
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const int channels = color ? 3 : 1;
    if (image.width == 0 || image.height == 0 || image.width > (1u << 24) || image.height > (1u << 24)) {
        png_image_free(&image);
        throw codec_error("png decode: implausible dimensions");
    }
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
    // Transparent pixels are composited over black.
    png_color black{0, 0, 0};
    if (!png_image_finish_read(&image, &black, pixels.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw codec_error("png decode: " + msg);
    }
    return ImageBuffer(static_cast<int>(image.width), static_cast<int>(image.height), channels, std::move(pixels));
}

inline std::vector<std::uint8_t> encode_png(const ImageBuffer& img) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.data().data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw codec_error("png encode: " + msg);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.data().data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw codec_error("png encode: " + msg);
    }
    out.resize(size);
    return out;
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    bool truncated;
    char message[JMSG_LENGTH_MAX];
};

inline void jpeg_fail(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

inline void jpeg_note(j_common_ptr cinfo, int level) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    if (level < 0 && cinfo->err->msg_code == JWRN_JPEG_EOF) err->truncated = true;
}

// Only trivially destructible locals live in this frame, so longjmp back
// into it is well defined.
inline bool jpeg_decode_into(std::span<const std::uint8_t> bytes, std::vector<std::uint8_t>* pixels, int* width,
                             int* height, int* channels, JpegErrorManager* err) {
    jpeg_decompress_struct cinfo;
    cinfo.err = jpeg_std_error(&err->base);
    err->base.error_exit = jpeg_fail;
    err->base.emit_message = jpeg_note;
    err->truncated = false;
    err->message[0] = '\0';
    if (setjmp(err->jump)) {
        jpeg_destroy_decompress(&cinfo);
        return false;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_start_decompress(&cinfo);
    *width = static_cast<int>(cinfo.output_width);
    *height = static_cast<int>(cinfo.output_height);
    *channels = cinfo.output_components;
    const std::size_t stride = static_cast<std::size_t>(*width) * static_cast<std::size_t>(*channels);
    pixels->resize(stride * static_cast<std::size_t>(*height));
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = pixels->data() + stride * cinfo.output_scanline;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return true;
}

inline ImageBuffer decode_jpeg(std::span<const std::uint8_t> bytes) {
    std::vector<std::uint8_t> pixels;
    int width = 0, height = 0, channels = 0;
    JpegErrorManager err{};
    if (!jpeg_decode_into(bytes, &pixels, &width, &height, &channels, &err)) {
        throw codec_error(std::string("jpeg decode: ") + err.message);
    }
    if (err.truncated) throw codec_error("jpeg decode: premature end of data");
    if (channels != 1 && channels != 3) throw codec_error("jpeg decode: unsupported component count");
    return ImageBuffer(width, height, channels, std::move(pixels));
}

inline bool jpeg_encode_into(const ImageBuffer& img, int quality, unsigned char** buffer, unsigned long* size,
                             JpegErrorManager* err) {
    jpeg_compress_struct cinfo;
    cinfo.err = jpeg_std_error(&err->base);
    err->base.error_exit = jpeg_fail;
    err->message[0] = '\0';
    if (setjmp(err->jump)) {
        jpeg_destroy_compress(&cinfo);
        return false;
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, buffer, size);
    cinfo.image_width = static_cast<JDIMENSION>(img.width());
    cinfo.image_height = static_cast<JDIMENSION>(img.height());
    cinfo.input_components = img.channels();
    cinfo.in_color_space = img.channels() == 3 ? JCS_RGB : JCS_GRAYSCALE;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    const std::size_t stride = static_cast<std::size_t>(img.width()) * static_cast<std::size_t>(img.channels());
    while (cinfo.next_scanline < cinfo.image_height) {
        auto* row = const_cast<JSAMPLE*>(img.data().data() + stride * cinfo.next_scanline);
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    return true;
}

inline std::vector<std::uint8_t> encode_jpeg(const ImageBuffer& img, int quality) {
    unsigned char* buffer = nullptr;
    unsigned long size = 0;
    JpegErrorManager err{};
    const bool ok = jpeg_encode_into(img, quality, &buffer, &size, &err);
    std::vector<std::uint8_t> out;
    if (ok) out.assign(buffer, buffer + size);
    std::free(buffer);
    if (!ok) throw codec_error(std::string("jpeg encode: ") + err.message);
    return out;
}

} // namespace detail

inline ImageBuffer decode_image(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) throw codec_error("cannot decode an empty byte stream");
    switch (sniff_format(bytes)) {
    case ImageFormat::png:
        return detail::decode_png(bytes);
    case ImageFormat::jpeg:
        return detail::decode_jpeg(bytes);
    }
    throw codec_error("unsupported image format");
}

/// PNG is lossless and is what the pipeline writes. JPEG is lossy and only
/// offered for producing test corpora.
inline std::vector<std::uint8_t> encode_image(const ImageBuffer& img, ImageFormat format = ImageFormat::png,
                                              int jpeg_quality = 95) {
    if (img.empty()) throw codec_error("cannot encode an empty image");
    switch (format) {
    case ImageFormat::png:
        return detail::encode_png(img);
    case ImageFormat::jpeg:
        return detail::encode_jpeg(img, jpeg_quality);
    }
    throw codec_error("unsupported image format");
}

} // namespace graypatch
