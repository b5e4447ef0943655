#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fulldit/codec.hpp"
#include "fulldit/geometry.hpp"
#include "fulldit/tensor.hpp"

namespace fulldit::tok {

enum class TokenType : uint8_t { Video, Camera, Identity, Depth, Pad };

const char* token_type_name(TokenType t);

// 3D RoPE coordinate. Identity tokens sit at negative t so they never share a
// temporal slot with any video frame.
struct Coord3 {
    int32_t t = 0, h = 0, w = 0;
    bool operator==(const Coord3&) const = default;
};

// One contiguous run of same-type tokens: raw (pre-projection) token vectors
// plus their RoPE coordinates. Projection to d_model is a model parameter and
// happens inside the forward pass.
struct TokenFragment {
    TokenType type = TokenType::Video;
    Tensorf raw;                  // [L, raw_dim]
    std::vector<Coord3> coords;   // length L

    size_t length() const { return raw.ndim() ? raw.dim(0) : 0; }
    size_t raw_dim() const { return raw.ndim() > 1 ? raw.dim(1) : 0; }
};

// Unified sequence: fragments concatenated in the fixed order
// [video, camera, identities, depth], then right padding.
class TokenSequence {
public:
    TokenSequence() = default;

    const std::vector<TokenFragment>& segments() const { return segments_; }
    std::vector<TokenFragment>& segments() { return segments_; }

    size_t length() const;           // includes padding
    size_t padding() const { return pad_count_; }
    size_t video_length() const;
    size_t video_raw_dim() const;

    std::vector<TokenType> type_tags() const;
    std::vector<Coord3> coords() const;        // padding gets (0,0,0)
    std::vector<uint8_t> attn_mask() const;    // 0 only on padding
    std::vector<uint8_t> loss_mask() const;    // 1 exactly on video tokens

    // Replaces the video segment's raw values (same shape), e.g. with x_t.
    void set_video_raw(const Tensorf& raw);
    const Tensorf& video_raw() const;

    friend TokenSequence assemble_sequence(const TokenFragment&,
                                           const std::optional<TokenFragment>&,
                                           const std::optional<TokenFragment>&,
                                           const std::optional<TokenFragment>&, size_t);

private:
    std::vector<TokenFragment> segments_;
    size_t pad_count_ = 0;
};

// latent [N_l,H_l,W_l,C], spatial patchify; token order is t-major then h
// then w; raw dim = patch^2 * C.
TokenFragment tokenize_video(const Tensorf& latent, size_t patch = 2);

// Plucker-embeds every trajectory frame and patchifies the [N,H,W,6] grid;
// raw dim = 6 * patch^2 (1536 at the default patch 16). Temporal coordinates
// align each camera frame to the video latent grid of `latent_frames` frames:
// t_i = round(i * (latent_frames-1) / (N-1)), 0 when N == 1.
TokenFragment tokenize_camera(const geometry::Trajectory& traj, size_t patch = 16,
                              size_t latent_frames = 0);

// Each image encodes as a 1-frame video, patchifies like video tokens, and
// takes temporal coordinate -(j+1) for identity j.
TokenFragment tokenize_identity(const std::vector<Tensorf>& images, const codec::CodecConfig& cfg,
                                size_t patch = 2, size_t max_identities = 3);

// Same pipeline as video tokens; coordinates share the video latent grid.
TokenFragment tokenize_depth(const Tensorf& depth, const codec::CodecConfig& cfg,
                             size_t patch = 2);

// Concatenation order is fixed; absent conditions contribute zero tokens.
// pad_to = 0 means no padding; padding tokens carry zero raw vectors of the
// video raw dim with attn_mask = loss_mask = 0.
TokenSequence assemble_sequence(const TokenFragment& video,
                                const std::optional<TokenFragment>& camera = std::nullopt,
                                const std::optional<TokenFragment>& identity = std::nullopt,
                                const std::optional<TokenFragment>& depth = std::nullopt,
                                size_t pad_to = 0);

}  // namespace fulldit::tok
