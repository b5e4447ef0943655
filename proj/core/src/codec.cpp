#include "fulldit/codec.hpp"

#include <cmath>

#include "fulldit/errors.hpp"
#include "fulldit/rng.hpp"

namespace fulldit::codec {

void CodecConfig::validate() const {
    if (mode == CodecMode::Unit) return;  // unit mode ignores the rates
    if (temporal_compression == 0 || spatial_compression == 0 || latent_channels == 0)
        throw InvalidConfig("codec rates and channels must be positive");
    const size_t block = spatial_compression * spatial_compression * 3;
    if (block < latent_channels)
        throw InvalidConfig("latent channels exceed the causal first-frame block size");
}

size_t CodecConfig::latent_frames(size_t n) const {
    return 1 + (n - 1) / temporal();
}

bool CodecConfig::frame_count_ok(size_t n) const {
    return n >= 1 && (n - 1) % temporal() == 0;
}

namespace {

// Seeded Gaussian matrix with rows orthonormalized by Gram-Schmidt. The seed
// is mixed with the dimensions so the first-frame and grouped-frame
// projections differ.
MatRM<float> projection(size_t rows, size_t cols, uint64_t seed) {
    MatRM<double> m(rows, cols);
    Rng rng(mix_seed(seed, rows, cols));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    for (size_t r = 0; r < rows; ++r) {
        for (size_t p = 0; p < r; ++p)
            m.row(Eigen::Index(r)) -= m.row(Eigen::Index(r)).dot(m.row(Eigen::Index(p))) * m.row(Eigen::Index(p));
        const double norm = m.row(Eigen::Index(r)).norm();
        m.row(Eigen::Index(r)) /= norm;
    }
    return m.cast<float>();
}

void check_video_shape(const Tensorf& video, const CodecConfig& cfg) {
    if (video.ndim() != 4 || video.dim(3) != 3)
        throw ShapeError("expected video [N,H,W,3], got " + video.shape_str());
    const size_t n = video.dim(0), h = video.dim(1), w = video.dim(2);
    if (!cfg.frame_count_ok(n))
        throw ShapeError("frame count " + std::to_string(n) + " violates the causal rule 1+k*" +
                         std::to_string(cfg.temporal()));
    if (h % cfg.spatial() != 0 || w % cfg.spatial() != 0)
        throw ShapeError("frame size " + std::to_string(h) + "x" + std::to_string(w) +
                         " not divisible by spatial rate " + std::to_string(cfg.spatial()));
}

}  // namespace

Tensorf toy_encode(const Tensorf& video, const CodecConfig& cfg) {
    cfg.validate();
    check_video_shape(video, cfg);
    if (cfg.mode == CodecMode::Unit) return video;

    const size_t n = video.dim(0), h = video.dim(1), w = video.dim(2);
    const size_t tc = cfg.temporal(), s = cfg.spatial(), c = cfg.channels();
    const size_t nl = cfg.latent_frames(n), hl = h / s, wl = w / s;

    const size_t block0 = s * s * 3;       // first latent frame: frame 0 alone
    const size_t block = tc * s * s * 3;   // later latent frames: tc video frames
    const auto proj0 = projection(c, block0, cfg.seed);
    const auto proj = projection(c, block, cfg.seed);

    Tensorf latent({nl, hl, wl, c});
    Eigen::VectorXf buf(Eigen::Index(block));
    for (size_t t = 0; t < nl; ++t) {
        const size_t frames = t == 0 ? 1 : tc;
        const size_t f0 = t == 0 ? 0 : 1 + (t - 1) * tc;
        for (size_t y = 0; y < hl; ++y) {
            for (size_t x = 0; x < wl; ++x) {
                size_t idx = 0;
                for (size_t f = 0; f < frames; ++f)
                    for (size_t py = 0; py < s; ++py)
                        for (size_t px = 0; px < s; ++px)
                            for (size_t ch = 0; ch < 3; ++ch)
                                buf[Eigen::Index(idx++)] =
                                    video.at4(f0 + f, y * s + py, x * s + px, ch);
                const auto& p = t == 0 ? proj0 : proj;
                Eigen::VectorXf cell = p * buf.head(Eigen::Index(idx));
                for (size_t ch = 0; ch < c; ++ch) latent.at4(t, y, x, ch) = cell[Eigen::Index(ch)];
            }
        }
    }
    return latent;
}

Tensorf toy_decode(const Tensorf& latent, const CodecConfig& cfg) {
    cfg.validate();
    if (latent.ndim() != 4)
        throw ShapeError("expected latent [N_l,H_l,W_l,C], got " + latent.shape_str());
    if (cfg.mode == CodecMode::Unit) {
        if (latent.dim(3) != 3) throw ShapeError("unit-mode latent must have 3 channels");
        return latent;
    }
    if (latent.dim(3) != cfg.channels())
        throw ShapeError("latent channel count mismatches the codec config");

    const size_t nl = latent.dim(0), hl = latent.dim(1), wl = latent.dim(2), c = cfg.channels();
    const size_t tc = cfg.temporal(), s = cfg.spatial();
    const size_t n = 1 + (nl - 1) * tc;

    const size_t block0 = s * s * 3;
    const size_t block = tc * s * s * 3;
    const MatRM<float> dec0 = projection(c, block0, cfg.seed).transpose();
    const MatRM<float> dec = projection(c, block, cfg.seed).transpose();

    Tensorf video({n, hl * s, wl * s, 3});
    Eigen::VectorXf cell(Eigen::Index(c));
    for (size_t t = 0; t < nl; ++t) {
        const size_t frames = t == 0 ? 1 : tc;
        const size_t f0 = t == 0 ? 0 : 1 + (t - 1) * tc;
        for (size_t y = 0; y < hl; ++y) {
            for (size_t x = 0; x < wl; ++x) {
                for (size_t ch = 0; ch < c; ++ch) cell[Eigen::Index(ch)] = latent.at4(t, y, x, ch);
                Eigen::VectorXf buf = (t == 0 ? dec0 : dec) * cell;
                size_t idx = 0;
                for (size_t f = 0; f < frames; ++f)
                    for (size_t py = 0; py < s; ++py)
                        for (size_t px = 0; px < s; ++px)
                            for (size_t ch = 0; ch < 3; ++ch)
                                video.at4(f0 + f, y * s + py, x * s + px, ch) =
                                    buf[Eigen::Index(idx++)];
            }
        }
    }
    return video;
}

}  // namespace fulldit::codec
