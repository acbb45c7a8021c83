// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include "purikit/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <system_error>

#include "purikit/error.hpp"

namespace purikit {

namespace {

png_uint_32 format_for(int channels)
{
    return channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
}

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};

[[noreturn]] void on_png_error(png_structp png, png_const_charp message)
{
    auto* slot = static_cast<std::string*>(png_get_error_ptr(png));
    *slot = message;
    png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

// Decodes with the classic API so that samples come back exactly as stored:
// no gamma or background processing is ever requested.
ImageU8 read_png_file(std::FILE* file, const std::string& name)
{
    std::string error;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, on_png_error,
                                             on_png_warning);
    if (!png)
        fail(ErrorCode::IoError, "png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(ErrorCode::IoError, "png_create_info_struct failed");
    }

    ImageU8 out;
    std::vector<std::uint8_t> buffer;
    std::vector<png_bytep> rows;
    volatile int read_channels = 0;
    volatile bool unsupported = false;
    std::string unsupported_reason;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(ErrorCode::UnsupportedFormat, name + ": " + error);
    }

    png_init_io(png, file);
    png_read_info(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);

    if (bit_depth == 16) {
        unsupported = true;
        unsupported_reason = "16-bit samples";
    } else if (color_type == PNG_COLOR_TYPE_PALETTE && png_get_valid(png, info, PNG_INFO_tRNS)) {
        unsupported = true;
        unsupported_reason = "palette with transparency";
    }
    if (!unsupported) {
        if (color_type == PNG_COLOR_TYPE_PALETTE)
            png_set_palette_to_rgb(png);
        if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
            png_set_expand_gray_1_2_4_to_8(png);
        // tRNS on gray/RGB is a color key, not a channel; it is ignored.
        png_set_interlace_handling(png);
        png_read_update_info(png, info);

        out.width = static_cast<int>(png_get_image_width(png, info));
        out.height = static_cast<int>(png_get_image_height(png, info));
        read_channels = png_get_channels(png, info);
        const int out_type = png_get_color_type(png, info);
        out.channels = (out_type & PNG_COLOR_MASK_COLOR) ? 3 : 1;
        out.alpha_dropped = (out_type & PNG_COLOR_MASK_ALPHA) != 0;

        const std::size_t stride = png_get_rowbytes(png, info);
        buffer.resize(stride * static_cast<std::size_t>(out.height));
        rows.resize(static_cast<std::size_t>(out.height));
        for (int y = 0; y < out.height; ++y)
            rows[static_cast<std::size_t>(y)] = buffer.data() + stride * static_cast<std::size_t>(y);
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    if (unsupported)
        fail(ErrorCode::UnsupportedFormat, name + ": " + unsupported_reason);

    if (!out.alpha_dropped) {
        out.data = std::move(buffer);
    } else {
        const std::size_t n = static_cast<std::size_t>(out.width) * out.height;
        out.data.resize(n * out.channels);
        for (std::size_t i = 0; i < n; ++i)
            for (int c = 0; c < out.channels; ++c)
                out.data[i * out.channels + c] = buffer[i * read_channels + c];
    }
    return out;
}

}  // namespace

ImageU8 load_png(const std::filesystem::path& path)
{
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
        fail(ErrorCode::FileNotFound, path.string());
    std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
    if (!file)
        fail(ErrorCode::FileNotFound, path.string());
    std::uint8_t sig[8] = {};
    if (std::fread(sig, 1, sizeof sig, file.get()) != sizeof sig || png_sig_cmp(sig, 0, sizeof sig))
        fail(ErrorCode::UnsupportedFormat, path.string() + ": not a PNG file");
    std::rewind(file.get());
    return read_png_file(file.get(), path.string());
}

std::vector<std::uint8_t> encode_png(const ImageU8& img)
{
    validate(img);
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = format_for(img.channels);

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.data.data(), 0, nullptr))
        fail(ErrorCode::IoError, std::string("png encode: ") + image.message);
    std::vector<std::uint8_t> bytes(size);
    if (!png_image_write_to_memory(&image, bytes.data(), &size, 0, img.data.data(), 0,
                                   nullptr))
        fail(ErrorCode::IoError, std::string("png encode: ") + image.message);
    bytes.resize(size);
    return bytes;
}

void save_png(const ImageU8& img, const std::filesystem::path& path)
{
    const auto bytes = encode_png(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        fail(ErrorCode::IoError, "write failed: " + path.string());
}

void save_ppm(const ImageU8& img, const std::filesystem::path& path)
{
    validate(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out << (img.channels == 3 ? "P6" : "P5") << '\n'
        << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
    if (!out)
        fail(ErrorCode::IoError, "write failed: " + path.string());
}

ImageF load_png_float(const std::filesystem::path& path)
{
    return to_float(load_png(path));
}

void save_png_float(const ImageF& img, const std::filesystem::path& path)
{
    save_png(to_u8(img), path);
}

}  // namespace purikit
