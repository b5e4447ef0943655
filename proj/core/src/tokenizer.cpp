#include "fulldit/tokenizer.hpp"

#include <cmath>

#include "fulldit/errors.hpp"

namespace fulldit::tok {

const char* token_type_name(TokenType t) {
    switch (t) {
        case TokenType::Video: return "video";
        case TokenType::Camera: return "camera";
        case TokenType::Identity: return "identity";
        case TokenType::Depth: return "depth";
        case TokenType::Pad: return "pad";
    }
    return "?";
}

size_t TokenSequence::length() const {
    size_t n = pad_count_;
    for (const auto& s : segments_) n += s.length();
    return n;
}

size_t TokenSequence::video_length() const {
    for (const auto& s : segments_)
        if (s.type == TokenType::Video) return s.length();
    return 0;
}

size_t TokenSequence::video_raw_dim() const {
    for (const auto& s : segments_)
        if (s.type == TokenType::Video) return s.raw_dim();
    return 0;
}

std::vector<TokenType> TokenSequence::type_tags() const {
    std::vector<TokenType> tags;
    tags.reserve(length());
    for (const auto& s : segments_) tags.insert(tags.end(), s.length(), s.type);
    tags.insert(tags.end(), pad_count_, TokenType::Pad);
    return tags;
}

std::vector<Coord3> TokenSequence::coords() const {
    std::vector<Coord3> out;
    out.reserve(length());
    for (const auto& s : segments_) out.insert(out.end(), s.coords.begin(), s.coords.end());
    out.insert(out.end(), pad_count_, Coord3{});
    return out;
}

std::vector<uint8_t> TokenSequence::attn_mask() const {
    std::vector<uint8_t> m;
    m.reserve(length());
    for (const auto& s : segments_) m.insert(m.end(), s.length(), uint8_t(1));
    m.insert(m.end(), pad_count_, uint8_t(0));
    return m;
}

std::vector<uint8_t> TokenSequence::loss_mask() const {
    std::vector<uint8_t> m;
    m.reserve(length());
    for (const auto& s : segments_)
        m.insert(m.end(), s.length(), uint8_t(s.type == TokenType::Video ? 1 : 0));
    m.insert(m.end(), pad_count_, uint8_t(0));
    return m;
}

void TokenSequence::set_video_raw(const Tensorf& raw) {
    for (auto& s : segments_) {
        if (s.type != TokenType::Video) continue;
        if (!s.raw.same_shape(raw))
            throw ShapeError("video raw replacement shape " + raw.shape_str() +
                             " != " + s.raw.shape_str());
        s.raw = raw;
        return;
    }
    throw ShapeError("sequence has no video segment");
}

const Tensorf& TokenSequence::video_raw() const {
    for (const auto& s : segments_)
        if (s.type == TokenType::Video) return s.raw;
    throw ShapeError("sequence has no video segment");
}

namespace {

// [N,H,W,C] -> tokens of dim patch^2*C, inner layout (py, px, c).
TokenFragment patchify(const Tensorf& grid, size_t patch, TokenType type) {
    if (grid.ndim() != 4) throw ShapeError("patchify expects rank-4 input, got " + grid.shape_str());
    const size_t n = grid.dim(0), h = grid.dim(1), w = grid.dim(2), c = grid.dim(3);
    if (patch == 0 || h % patch != 0 || w % patch != 0)
        throw ShapeError("spatial dims " + std::to_string(h) + "x" + std::to_string(w) +
                         " not divisible by patch " + std::to_string(patch));
    const size_t hp = h / patch, wp = w / patch, dim = patch * patch * c;

    TokenFragment frag;
    frag.type = type;
    frag.raw = Tensorf({n * hp * wp, dim});
    frag.coords.resize(n * hp * wp);
    size_t tokidx = 0;
    for (size_t t = 0; t < n; ++t) {
        for (size_t ph = 0; ph < hp; ++ph) {
            for (size_t pw = 0; pw < wp; ++pw, ++tokidx) {
                frag.coords[tokidx] = {int32_t(t), int32_t(ph), int32_t(pw)};
                float* tokrow = &frag.raw.at2(tokidx, 0);
                size_t k = 0;
                for (size_t py = 0; py < patch; ++py)
                    for (size_t px = 0; px < patch; ++px)
                        for (size_t ch = 0; ch < c; ++ch)
                            tokrow[k++] = grid.at4(t, ph * patch + py, pw * patch + px, ch);
            }
        }
    }
    return frag;
}

}  // namespace

TokenFragment tokenize_video(const Tensorf& latent, size_t patch) {
    return patchify(latent, patch, TokenType::Video);
}

TokenFragment tokenize_camera(const geometry::Trajectory& traj, size_t patch,
                              size_t latent_frames) {
    traj.validate();
    const size_t n = traj.size();
    const size_t h = traj.frames.front().intrinsics.height;
    const size_t w = traj.frames.front().intrinsics.width;
    if (patch == 0 || h % patch != 0 || w % patch != 0)
        throw ShapeError("camera frame " + std::to_string(h) + "x" + std::to_string(w) +
                         " not divisible by patch " + std::to_string(patch));
    if (latent_frames == 0) latent_frames = n;

    Tensorf grid({n, h, w, 6});
    for (size_t i = 0; i < n; ++i) {
        const auto pl = geometry::plucker_embedding(traj.frames[i].pose, traj.frames[i].intrinsics);
        for (size_t y = 0; y < h; ++y)
            for (size_t x = 0; x < w; ++x)
                for (size_t c = 0; c < 6; ++c)
                    grid.at4(i, y, x, c) = float(pl.grid.at3(y, x, c));
    }

    TokenFragment frag = patchify(grid, patch, TokenType::Camera);
    // re-map temporal coords onto the video latent grid (even alignment)
    for (auto& coord : frag.coords) {
        const double i = double(coord.t);
        coord.t = n == 1 ? 0
                         : int32_t(std::lround(i * double(latent_frames - 1) / double(n - 1)));
    }
    return frag;
}

TokenFragment tokenize_identity(const std::vector<Tensorf>& images, const codec::CodecConfig& cfg,
                                size_t patch, size_t max_identities) {
    if (images.size() > max_identities)
        throw TooManyIdentities("got " + std::to_string(images.size()) + " identities, max " +
                                std::to_string(max_identities));
    TokenFragment out;
    out.type = TokenType::Identity;
    std::vector<float> raw;
    size_t dim = 0;
    for (size_t j = 0; j < images.size(); ++j) {
        const auto& img = images[j];
        if (img.ndim() != 3 || img.dim(2) != 3)
            throw ShapeError("identity image must be [H,W,3], got " + img.shape_str());
        Tensorf frame({size_t(1), img.dim(0), img.dim(1), size_t(3)});
        std::copy(img.raw().begin(), img.raw().end(), frame.raw().begin());
        const Tensorf latent = codec::toy_encode(frame, cfg);
        TokenFragment frag = patchify(latent, patch, TokenType::Identity);
        dim = frag.raw_dim();
        raw.insert(raw.end(), frag.raw.raw().begin(), frag.raw.raw().end());
        for (auto& coord : frag.coords) coord.t = -int32_t(j + 1);
        out.coords.insert(out.coords.end(), frag.coords.begin(), frag.coords.end());
    }
    out.raw = Tensorf::from_data({out.coords.size(), dim}, std::move(raw));
    return out;
}

TokenFragment tokenize_depth(const Tensorf& depth, const codec::CodecConfig& cfg, size_t patch) {
    const Tensorf latent = codec::toy_encode(depth, cfg);
    return patchify(latent, patch, TokenType::Depth);
}

TokenSequence assemble_sequence(const TokenFragment& video,
                                const std::optional<TokenFragment>& camera,
                                const std::optional<TokenFragment>& identity,
                                const std::optional<TokenFragment>& depth, size_t pad_to) {
    TokenSequence seq;
    if (video.type != TokenType::Video) throw ShapeError("first fragment must be video tokens");
    seq.segments_.push_back(video);
    if (camera && camera->length()) {
        if (camera->type != TokenType::Camera) throw ShapeError("camera slot got wrong fragment");
        seq.segments_.push_back(*camera);
    }
    if (identity && identity->length()) {
        if (identity->type != TokenType::Identity)
            throw ShapeError("identity slot got wrong fragment");
        seq.segments_.push_back(*identity);
    }
    if (depth && depth->length()) {
        if (depth->type != TokenType::Depth) throw ShapeError("depth slot got wrong fragment");
        seq.segments_.push_back(*depth);
    }
    const size_t total = seq.length();
    if (pad_to > 0) {
        if (pad_to < total)
            throw PadTooSmall("pad_to " + std::to_string(pad_to) + " < sequence length " +
                              std::to_string(total));
        seq.pad_count_ = pad_to - total;
    }
    return seq;
}

}  // namespace fulldit::tok
