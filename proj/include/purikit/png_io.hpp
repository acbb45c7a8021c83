// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "purikit/image.hpp"

namespace purikit {

/// Reads an 8-bit gray or RGB PNG. Gray+alpha and RGBA inputs lose their
/// alpha channel (img.alpha_dropped is set). Palette images without
/// transparency are expanded to RGB.
///
/// Throws FileNotFound, UnsupportedFormat (16-bit, transparent palette,
/// undecodable data).
ImageU8 load_png(const std::filesystem::path& path);

/// Writes img as an 8-bit PNG. Output bytes depend only on img.
void save_png(const ImageU8& img, const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const ImageU8& img);

/// Binary PPM (P6) or PGM (P5) dump for debugging.
void save_ppm(const ImageU8& img, const std::filesystem::path& path);

/// Convenience wrappers through to_float / to_u8.
ImageF load_png_float(const std::filesystem::path& path);
void save_png_float(const ImageF& img, const std::filesystem::path& path);

}  // namespace purikit
