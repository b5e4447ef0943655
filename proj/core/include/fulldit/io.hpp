#pragma once

#include <filesystem>
#include <string>

#include "fulldit/tensor.hpp"

namespace fulldit {

// TNSR container: magic "TNSR", u8 version=1, u8 ndim, ndim x u64 LE dims,
// float32 LE row-major payload.
void write_tnsr(const std::filesystem::path& path, const Tensorf& t);
Tensorf read_tnsr(const std::filesystem::path& path);

// Binary PPM (P6). `video` is [N,H,W,3] in [0,1]; frames are tiled left to
// right into one grid image with `cols` frames per row.
void write_ppm_grid(const std::filesystem::path& path, const Tensorf& video, size_t cols = 0);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fulldit
