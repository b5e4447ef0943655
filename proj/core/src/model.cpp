#include "fulldit/model.hpp"

#include <cstring>
#include <fstream>

#include "fulldit/errors.hpp"
#include "fulldit/rng.hpp"

namespace fulldit::model {

void ModelConfig::validate() const {
    if (d_model == 0 || n_heads == 0 || n_layers == 0 || d_ff == 0 || text_vocab == 0 ||
        text_dim == 0)
        throw InvalidConfig("model dimensions must be positive");
    if (d_model % n_heads != 0) throw InvalidConfig("d_model must divide evenly into heads");
    const size_t hd = head_dim();
    if (hd % 4 != 0 || hd < 8)
        throw InvalidConfig("head_dim must be a multiple of 4 and at least 8 for 2D/3D RoPE");
    if (rope_base <= 1.0) throw InvalidConfig("rope_base must exceed 1");
    if (video_raw_dim == 0 || camera_raw_dim == 0 || identity_raw_dim == 0 || depth_raw_dim == 0)
        throw InvalidConfig("raw token dims must be positive");
}

namespace detail {

RopeSplit rope_split(size_t head_dim, RopeAxes axes) {
    if (head_dim % 2 != 0) throw ShapeError("head_dim must be even for RoPE pairs");
    const size_t pairs = head_dim / 2;
    RopeSplit s;
    if (axes == RopeAxes::Axes2D) {
        if (pairs % 2 != 0) throw ShapeError("2D RoPE needs an even pair count");
        s.n_axes = 2;
        s.pairs[0] = s.pairs[1] = pairs / 2;
    } else {
        s.n_axes = 3;
        if (pairs % 4 == 0) {
            s.pairs[0] = pairs / 2;  // t gets twice the spatial share
            s.pairs[1] = s.pairs[2] = pairs / 4;
        } else if (pairs >= 3) {
            s.pairs[0] = pairs / 3 + pairs % 3;
            s.pairs[1] = s.pairs[2] = pairs / 3;
        } else {
            throw ShapeError("3D RoPE needs at least 3 feature pairs");
        }
    }
    return s;
}

}  // namespace detail

namespace {

Tensorf random_matrix(Rng& rng, size_t rows, size_t cols) {
    Tensorf m({rows, cols});
    const float std = 1.0f / std::sqrt(float(rows));
    for (auto& v : m.raw()) v = float(rng.normal()) * std;
    return m;
}

void add_linear(ModelParams& p, Rng& rng, const std::string& prefix, size_t in, size_t out,
                bool zero = false) {
    p[prefix + ".w"] = zero ? Tensorf({in, out}) : random_matrix(rng, in, out);
    p[prefix + ".b"] = Tensorf({size_t(1), out});
}

}  // namespace

ModelParams init_params(const ModelConfig& cfg, uint64_t seed) {
    cfg.validate();
    Rng rng(mix_seed(seed, 0xf0117d17));
    ModelParams p;

    add_linear(p, rng, "embed.video", cfg.video_raw_dim, cfg.d_model);
    add_linear(p, rng, "embed.camera", cfg.camera_raw_dim, cfg.d_model);
    add_linear(p, rng, "embed.identity", cfg.identity_raw_dim, cfg.d_model);
    add_linear(p, rng, "embed.depth", cfg.depth_raw_dim, cfg.d_model);
    // identity/depth projections start from the video projection weights
    if (cfg.identity_raw_dim == cfg.video_raw_dim)
        p["embed.identity.w"] = p["embed.video.w"];
    if (cfg.depth_raw_dim == cfg.video_raw_dim)
        p["embed.depth.w"] = p["embed.video.w"];

    p["embed.text"] = random_matrix(rng, cfg.text_vocab, cfg.text_dim);

    add_linear(p, rng, "time.l1", cfg.d_model, cfg.d_model);
    add_linear(p, rng, "time.l2", cfg.d_model, cfg.d_model);

    for (size_t layer = 0; layer < cfg.n_layers; ++layer) {
        const std::string b = "block" + std::to_string(layer);
        add_linear(p, rng, b + ".ada", cfg.d_model, 12 * cfg.d_model, /*zero=*/true);
        for (const char* attn : {".attn2d", ".attn3d"}) {
            add_linear(p, rng, b + attn + ".q", cfg.d_model, cfg.d_model);
            add_linear(p, rng, b + attn + ".k", cfg.d_model, cfg.d_model);
            add_linear(p, rng, b + attn + ".v", cfg.d_model, cfg.d_model);
            add_linear(p, rng, b + attn + ".o", cfg.d_model, cfg.d_model);
        }
        add_linear(p, rng, b + ".cross.q", cfg.d_model, cfg.d_model);
        add_linear(p, rng, b + ".cross.k", cfg.text_dim, cfg.d_model);
        add_linear(p, rng, b + ".cross.v", cfg.text_dim, cfg.d_model);
        add_linear(p, rng, b + ".cross.o", cfg.d_model, cfg.d_model);
        add_linear(p, rng, b + ".ffn.l1", cfg.d_model, cfg.d_ff);
        add_linear(p, rng, b + ".ffn.l2", cfg.d_ff, cfg.d_model);
    }

    p["final.gain"] = Tensorf({size_t(1), cfg.d_model}, 1.0f);
    add_linear(p, rng, "final", cfg.d_model, cfg.video_raw_dim, /*zero=*/true);
    return p;
}

size_t param_count(const ModelParams& params) {
    size_t n = 0;
    for (const auto& [name, t] : params) n += t.size();
    return n;
}

namespace {

void put_u16(std::ostream& os, uint16_t v) {
    unsigned char b[2] = {(unsigned char)(v & 0xff), (unsigned char)(v >> 8)};
    os.write(reinterpret_cast<const char*>(b), 2);
}

void put_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = (unsigned char)((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

uint64_t get_uint(std::istream& is, int bytes) {
    unsigned char b[8] = {0};
    is.read(reinterpret_cast<char*>(b), bytes);
    uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= uint64_t(b[i]) << (8 * i);
    return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os.write("FDIT", 4);
    put_u32(os, 1);
    put_u64(os, params.size());
    for (const auto& [name, t] : params) {  // std::map iterates sorted by name
        put_u16(os, uint16_t(name.size()));
        os.write(name.data(), std::streamsize(name.size()));
        os.put(char((unsigned char)t.ndim()));
        for (size_t i = 0; i < t.ndim(); ++i) put_u64(os, t.dim(i));
        os.write(reinterpret_cast<const char*>(t.data()), std::streamsize(t.size() * 4));
    }
    if (!os) throw IoError("write failed: " + path.string());
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "FDIT", 4) != 0)
        throw IoError("bad FDIT magic in " + path.string());
    if (get_uint(is, 4) != 1) throw IoError("unsupported FDIT version in " + path.string());
    const uint64_t count = get_uint(is, 8);
    ModelParams params;
    for (uint64_t i = 0; i < count; ++i) {
        const size_t name_len = size_t(get_uint(is, 2));
        std::string name(name_len, '\0');
        is.read(name.data(), std::streamsize(name_len));
        const int ndim = is.get();
        std::vector<size_t> shape(size_t(ndim));
        for (auto& d : shape) d = size_t(get_uint(is, 8));
        Tensorf t(shape);
        is.read(reinterpret_cast<char*>(t.data()), std::streamsize(t.size() * 4));
        if (!is) throw IoError("truncated FDIT payload in " + path.string());
        params.emplace(std::move(name), std::move(t));
    }
    return params;
}

}  // namespace fulldit::model
