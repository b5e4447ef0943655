#include "fulldit/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fulldit/errors.hpp"

namespace fulldit {

namespace {

void put_u64_le(std::ostream& os, uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

uint64_t get_u64_le(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(b[i]) << (8 * i);
    return v;
}

}  // namespace

void write_tnsr(const std::filesystem::path& path, const Tensorf& t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os.write("TNSR", 4);
    const unsigned char version = 1;
    const unsigned char ndim = (unsigned char)t.ndim();
    os.put(char(version));
    os.put(char(ndim));
    for (size_t i = 0; i < t.ndim(); ++i) put_u64_le(os, t.dim(i));
    static_assert(sizeof(float) == 4);
    os.write(reinterpret_cast<const char*>(t.data()), std::streamsize(t.size() * 4));
    if (!os) throw IoError("write failed: " + path.string());
}

Tensorf read_tnsr(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "TNSR", 4) != 0)
        throw IoError("bad TNSR magic in " + path.string());
    const int version = is.get();
    if (version != 1) throw IoError("unsupported TNSR version in " + path.string());
    const int ndim = is.get();
    if (ndim < 0) throw IoError("truncated TNSR header in " + path.string());
    std::vector<size_t> shape(size_t(ndim));
    for (auto& d : shape) d = size_t(get_u64_le(is));
    Tensorf t(shape);
    is.read(reinterpret_cast<char*>(t.data()), std::streamsize(t.size() * 4));
    if (!is) throw IoError("truncated TNSR payload in " + path.string());
    return t;
}

void write_ppm_grid(const std::filesystem::path& path, const Tensorf& video, size_t cols) {
    if (video.ndim() != 4 || video.dim(3) != 3)
        throw ShapeError("PPM grid expects [N,H,W,3], got " + video.shape_str());
    const size_t n = video.dim(0), h = video.dim(1), w = video.dim(2);
    if (cols == 0) cols = n;
    const size_t rows = (n + cols - 1) / cols;
    const size_t gw = cols * w, gh = rows * h;

    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os << "P6\n" << gw << " " << gh << "\n255\n";
    std::vector<unsigned char> line(gw * 3, 0);
    for (size_t gy = 0; gy < gh; ++gy) {
        const size_t tile_row = gy / h, y = gy % h;
        for (size_t gx = 0; gx < gw; ++gx) {
            const size_t tile_col = gx / w, x = gx % w;
            const size_t frame = tile_row * cols + tile_col;
            for (size_t c = 0; c < 3; ++c) {
                float v = 0.f;
                if (frame < n) v = video.at4(frame, y, x, c);
                v = std::clamp(v, 0.0f, 1.0f);
                line[gx * 3 + c] = (unsigned char)std::lround(v * 255.0f);
            }
        }
        os.write(reinterpret_cast<const char*>(line.data()), std::streamsize(line.size()));
    }
    if (!os) throw IoError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os << text;
    if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace fulldit
