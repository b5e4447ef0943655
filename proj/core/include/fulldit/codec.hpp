#pragma once

#include <cstdint>

#include "fulldit/tensor.hpp"

namespace fulldit::codec {

enum class CodecMode { Paper, Unit };

// Deterministic causal codec standing in for a learned video autoencoder.
// Paper mode compresses 4x in time and 8x per spatial axis into 8 channels
// via a fixed seeded linear projection with orthonormal rows; unit mode is
// the exact identity (all rates 1, 3 channels).
struct CodecConfig {
    CodecMode mode = CodecMode::Paper;
    size_t temporal_compression = 4;
    size_t spatial_compression = 8;
    size_t latent_channels = 8;
    uint64_t seed = 0x7a11e7;

    void validate() const;

    size_t temporal() const { return mode == CodecMode::Unit ? 1 : temporal_compression; }
    size_t spatial() const { return mode == CodecMode::Unit ? 1 : spatial_compression; }
    size_t channels() const { return mode == CodecMode::Unit ? 3 : latent_channels; }

    // causal rule: frame 0 encodes alone, then groups of `temporal()` frames
    size_t latent_frames(size_t video_frames) const;
    bool frame_count_ok(size_t video_frames) const;
};

// video [N,H,W,3] -> latent [N_l, H/s, W/s, C]; frame 0 maps alone to latent
// frame 0, each later latent frame covers `temporal()` video frames.
Tensorf toy_encode(const Tensorf& video, const CodecConfig& cfg);

// Transpose of the encoding projection; exact inverse in unit mode, row-space
// reconstruction in paper mode.
Tensorf toy_decode(const Tensorf& latent, const CodecConfig& cfg);

}  // namespace fulldit::codec
