#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fulldit/autodiff.hpp"
#include "fulldit/tensor.hpp"
#include "fulldit/tokenizer.hpp"

namespace fulldit::model {

struct ModelConfig {
    size_t d_model = 64;
    size_t n_heads = 4;
    size_t n_layers = 2;
    size_t d_ff = 128;
    size_t text_vocab = 16;
    size_t text_dim = 32;
    double rope_base = 10000.0;

    // raw (pre-projection) token widths; derived from codec + patch sizes
    size_t video_raw_dim = 32;
    size_t camera_raw_dim = 1536;
    size_t identity_raw_dim = 32;
    size_t depth_raw_dim = 32;

    size_t head_dim() const { return d_model / n_heads; }
    void validate() const;
};

// All learnable weights, addressable by hierarchical name. std::map keeps
// iteration (and the checkpoint layout) sorted by name.
using ModelParams = std::map<std::string, Tensorf>;

ModelParams init_params(const ModelConfig& cfg, uint64_t seed);
size_t param_count(const ModelParams& params);

// FDIT container: magic "FDIT", u32 version=1, u64 param count, then per
// param: u16 name length, UTF-8 name, u8 ndim, u64 LE dims, float32 LE
// payload; parameters sorted by name.
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_checkpoint(const std::filesystem::path& path);

enum class RopeAxes { Axes2D, Axes3D };

namespace detail {

// feature pairs per axis; order (t,)h,w
struct RopeSplit {
    size_t n_axes = 0;
    size_t pairs[3] = {0, 0, 0};
};

RopeSplit rope_split(size_t head_dim, RopeAxes axes);

// In-place axial rotation of [L, n_heads*head_dim]; sign -1 inverts (used by
// the backward pass; the rotation is orthogonal).
template <typename T>
void rope_apply(Tensor<T>& x, size_t n_heads, size_t head_dim,
                const std::vector<tok::Coord3>& coords, RopeAxes axes, double base, int sign) {
    const RopeSplit split = rope_split(head_dim, axes);
    const size_t L = x.dim(0);
    if (coords.size() != L) throw ShapeError("rope: coords length mismatch");

    // per-axis frequency tables
    std::vector<std::vector<T>> freqs(split.n_axes);
    for (size_t a = 0; a < split.n_axes; ++a) {
        freqs[a].resize(split.pairs[a]);
        for (size_t j = 0; j < split.pairs[a]; ++j)
            freqs[a][j] = T(std::pow(base, -double(j) / double(split.pairs[a])));
    }

    for (size_t i = 0; i < L; ++i) {
        int32_t axis_coord[3];
        if (axes == RopeAxes::Axes3D) {
            axis_coord[0] = coords[i].t;
            axis_coord[1] = coords[i].h;
            axis_coord[2] = coords[i].w;
        } else {
            axis_coord[0] = coords[i].h;
            axis_coord[1] = coords[i].w;
        }
        for (size_t head = 0; head < n_heads; ++head) {
            T* f = x.data() + (i * n_heads + head) * head_dim;
            size_t off = 0;
            for (size_t a = 0; a < split.n_axes; ++a) {
                const T c = T(axis_coord[a]) * T(sign);
                for (size_t j = 0; j < split.pairs[a]; ++j) {
                    const T angle = c * freqs[a][j];
                    const T cs = std::cos(angle), sn = std::sin(angle);
                    const T x0 = f[off + 2 * j], x1 = f[off + 2 * j + 1];
                    f[off + 2 * j] = x0 * cs - x1 * sn;
                    f[off + 2 * j + 1] = x0 * sn + x1 * cs;
                }
                off += 2 * split.pairs[a];
            }
        }
    }
}

}  // namespace detail

// Axial rotary encoding on [L, n_heads, head_dim]. 2D rotates by (h,w), 3D by
// (t,h,w); pairs split 2:1:1 across t:h:w when divisible by four, otherwise
// thirds with the remainder on t.
template <typename T>
Tensor<T> rope_rotate(const Tensor<T>& x, const std::vector<tok::Coord3>& coords, RopeAxes axes,
                      double base = 10000.0) {
    if (x.ndim() != 3) throw ShapeError("rope_rotate expects [L, n_heads, head_dim]");
    Tensor<T> out = x;
    Tensor<T> flat = Tensor<T>::from_data({x.dim(0), x.dim(1) * x.dim(2)}, std::move(out.raw()));
    detail::rope_apply(flat, x.dim(1), x.dim(2), coords, axes, base, +1);
    return Tensor<T>::from_data(x.shape(), std::move(flat.raw()));
}

namespace graph {

template <typename T>
using NodeMap = std::map<std::string, ad::Ptr<T>>;

// Lifts checkpoint params into graph leaves (trainable) or constants.
template <typename T>
NodeMap<T> lift_params(const ModelParams& params, bool trainable) {
    NodeMap<T> out;
    for (const auto& [name, tensor] : params) {
        Tensor<T> v = tensor.template cast<T>();
        out.emplace(name, trainable ? ad::leaf(std::move(v)) : ad::constant(std::move(v)));
    }
    return out;
}

template <typename T>
const ad::Ptr<T>& p(const NodeMap<T>& m, const std::string& name) {
    auto it = m.find(name);
    if (it == m.end()) throw ShapeError("missing parameter " + name);
    return it->second;
}

template <typename T>
ad::Ptr<T> rope_node(const ad::Ptr<T>& x, size_t n_heads,
                     std::shared_ptr<std::vector<tok::Coord3>> coords, RopeAxes axes,
                     double base) {
    const size_t head_dim = x->value.dim(1) / n_heads;
    Tensor<T> out = x->value;
    detail::rope_apply(out, n_heads, head_dim, *coords, axes, base, +1);
    return ad::detail::make_op<T>(
        std::move(out), {x}, [x, n_heads, head_dim, coords, axes, base](ad::Node<T>& n) {
            if (!x->needs_grad) return;
            Tensor<T> g = n.grad;
            detail::rope_apply(g, n_heads, head_dim, *coords, axes, base, -1);
            as_rows(ad::grad_of(x)) += as_rows(g);
        });
}

// Grouped masked attention. Keys with key_valid = 0 are excluded outright, so
// their values cannot influence any output. Queries whose group has no valid
// key produce a zero row when inactive (padding) and AllMasked otherwise.
// groups == nullptr means a single group (full attention).
template <typename T>
ad::Ptr<T> attention_core(const ad::Ptr<T>& q, const ad::Ptr<T>& k, const ad::Ptr<T>& v,
                          size_t n_heads, const std::vector<uint8_t>& key_valid,
                          const std::vector<uint8_t>& query_active,
                          const std::vector<int32_t>* groups_q,
                          const std::vector<int32_t>* groups_k) {
    const size_t lq = q->value.dim(0), lk = k->value.dim(0);
    const size_t d = q->value.dim(1), hd = d / n_heads;
    if (k->value.dim(1) != d || v->value.dim(1) != d || v->value.dim(0) != lk)
        throw ShapeError("attention: q/k/v width mismatch");
    if (key_valid.size() != lk) throw ShapeError("attention: mask length != key count");
    const T inv_sqrt = T(1) / std::sqrt(T(hd));

    struct Group {
        std::vector<int32_t> qi, ki;
        std::vector<MatRM<T>> probs;  // one [nq x nk] per head
    };
    auto groups = std::make_shared<std::vector<Group>>();
    {
        std::map<int32_t, size_t> index;
        auto slot = [&](int32_t id) {
            auto [it, fresh] = index.try_emplace(id, groups->size());
            if (fresh) groups->emplace_back();
            return it->second;
        };
        for (size_t i = 0; i < lq; ++i)
            (*groups)[slot(groups_q ? (*groups_q)[i] : 0)].qi.push_back(int32_t(i));
        for (size_t i = 0; i < lk; ++i)
            if (key_valid[i]) (*groups)[slot(groups_k ? (*groups_k)[i] : 0)].ki.push_back(int32_t(i));
    }

    Tensor<T> out({lq, d});
    for (auto& g : *groups) {
        if (g.qi.empty()) continue;
        if (g.ki.empty()) {
            for (int32_t i : g.qi) {
                if (query_active[size_t(i)])
                    throw AllMasked("query row " + std::to_string(i) + " has no unmasked key");
                for (size_t j = 0; j < d; ++j) out.at2(size_t(i), j) = T(0);
            }
            continue;
        }
        const size_t nq = g.qi.size(), nk = g.ki.size();
        MatRM<T> qg(nq, d), kg(nk, d), vg(nk, d);
        for (size_t i = 0; i < nq; ++i) qg.row(Eigen::Index(i)) = as_rows(q->value).row(g.qi[i]);
        for (size_t i = 0; i < nk; ++i) {
            kg.row(Eigen::Index(i)) = as_rows(k->value).row(g.ki[i]);
            vg.row(Eigen::Index(i)) = as_rows(v->value).row(g.ki[i]);
        }
        g.probs.resize(n_heads);
        MatRM<T> og(nq, d);
        for (size_t head = 0; head < n_heads; ++head) {
            const auto qh = qg.middleCols(Eigen::Index(head * hd), Eigen::Index(hd));
            const auto kh = kg.middleCols(Eigen::Index(head * hd), Eigen::Index(hd));
            MatRM<T> s = qh * kh.transpose() * inv_sqrt;
            for (Eigen::Index r = 0; r < s.rows(); ++r) {
                const T mx = s.row(r).maxCoeff();
                s.row(r) = (s.row(r).array() - mx).exp();
                s.row(r) /= s.row(r).sum();
            }
            g.probs[head] = std::move(s);
            og.middleCols(Eigen::Index(head * hd), Eigen::Index(hd)).noalias() =
                g.probs[head] * vg.middleCols(Eigen::Index(head * hd), Eigen::Index(hd));
        }
        for (size_t i = 0; i < nq; ++i) as_rows(out).row(g.qi[i]) = og.row(Eigen::Index(i));
    }

    return ad::detail::make_op<T>(
        std::move(out), {q, k, v},
        [q, k, v, groups, n_heads, hd, d, inv_sqrt](ad::Node<T>& n) {
            for (auto& g : *groups) {
                if (g.qi.empty() || g.ki.empty()) continue;
                const size_t nq = g.qi.size(), nk = g.ki.size();
                MatRM<T> qg(nq, d), kg(nk, d), dog(nq, d);
                for (size_t i = 0; i < nq; ++i) {
                    qg.row(Eigen::Index(i)) = as_rows(q->value).row(g.qi[i]);
                    dog.row(Eigen::Index(i)) = as_rows(n.grad).row(g.qi[i]);
                }
                for (size_t i = 0; i < nk; ++i) kg.row(Eigen::Index(i)) = as_rows(k->value).row(g.ki[i]);
                MatRM<T> vg(nk, d);
                for (size_t i = 0; i < nk; ++i) vg.row(Eigen::Index(i)) = as_rows(v->value).row(g.ki[i]);

                MatRM<T> dqg = MatRM<T>::Zero(nq, d), dkg = MatRM<T>::Zero(nk, d),
                         dvg = MatRM<T>::Zero(nk, d);
                for (size_t head = 0; head < n_heads; ++head) {
                    const auto cols = [&](MatRM<T>& m) {
                        return m.middleCols(Eigen::Index(head * hd), Eigen::Index(hd));
                    };
                    const MatRM<T>& probs = g.probs[head];
                    const MatRM<T> doh = cols(dog);
                    dvg.middleCols(Eigen::Index(head * hd), Eigen::Index(hd)).noalias() =
                        probs.transpose() * doh;
                    MatRM<T> dp = doh * cols(vg).transpose();
                    const Eigen::Array<T, Eigen::Dynamic, 1> row_dot =
                        (dp.array() * probs.array()).rowwise().sum();
                    const MatRM<T> ds =
                        (probs.array() * (dp.array().colwise() - row_dot)).matrix();
                    dqg.middleCols(Eigen::Index(head * hd), Eigen::Index(hd)).noalias() =
                        ds * cols(kg) * inv_sqrt;
                    dkg.middleCols(Eigen::Index(head * hd), Eigen::Index(hd)).noalias() =
                        ds.transpose() * cols(qg) * inv_sqrt;
                }
                if (q->needs_grad)
                    for (size_t i = 0; i < nq; ++i)
                        as_rows(ad::grad_of(q)).row(g.qi[i]) += dqg.row(Eigen::Index(i));
                if (k->needs_grad)
                    for (size_t i = 0; i < nk; ++i)
                        as_rows(ad::grad_of(k)).row(g.ki[i]) += dkg.row(Eigen::Index(i));
                if (v->needs_grad)
                    for (size_t i = 0; i < nk; ++i)
                        as_rows(ad::grad_of(v)).row(g.ki[i]) += dvg.row(Eigen::Index(i));
            }
        });
}

template <typename T>
ad::Ptr<T> linear(const ad::Ptr<T>& x, const NodeMap<T>& params, const std::string& prefix) {
    return ad::add_rowwise(ad::matmul(x, p(params, prefix + ".w")), p(params, prefix + ".b"));
}

// Sinusoidal timestep features followed by the 2-layer MLP -> [1, d_model].
template <typename T>
ad::Ptr<T> timestep_embedding_node(T t, const NodeMap<T>& params, const ModelConfig& cfg) {
    const size_t d = cfg.d_model, half = d / 2;
    Tensor<T> feat({size_t(1), d});
    for (size_t i = 0; i < half; ++i) {
        const T freq = T(std::pow(10000.0, -double(i) / double(half)));
        const T angle = t * T(1000) * freq;
        feat.at2(0, i) = std::cos(angle);
        feat.at2(0, half + i) = std::sin(angle);
    }
    auto h = linear(ad::constant(std::move(feat)), params, "time.l1");
    return linear(ad::silu(h), params, "time.l2");
}

template <typename T>
Tensor<T> timestep_embedding(T t, const ModelParams& params, const ModelConfig& cfg) {
    auto leaves = lift_params<T>(params, false);
    return timestep_embedding_node(t, leaves, cfg)->value;
}

// AdaLN projection of t_emb to 12 * d_model and split into four
// (scale, shift, gate) triples, ordered (2d, 3d, cross, ffn).
template <typename T>
std::array<std::array<ad::Ptr<T>, 3>, 4> adaln_node(const ad::Ptr<T>& t_emb,
                                                    const NodeMap<T>& params,
                                                    const std::string& prefix, size_t d_model) {
    auto all = linear(t_emb, params, prefix);
    std::array<std::array<ad::Ptr<T>, 3>, 4> out;
    for (size_t sub = 0; sub < 4; ++sub)
        for (size_t part = 0; part < 3; ++part)
            out[sub][part] = ad::slice_cols(all, (sub * 3 + part) * d_model, d_model);
    return out;
}

struct SequenceInfo {
    std::shared_ptr<std::vector<tok::Coord3>> coords;
    std::shared_ptr<std::vector<int32_t>> frame_group;  // temporal coordinate per token
    std::vector<uint8_t> attn_mask;
};

inline SequenceInfo sequence_info(const tok::TokenSequence& seq) {
    SequenceInfo info;
    info.coords = std::make_shared<std::vector<tok::Coord3>>(seq.coords());
    info.frame_group = std::make_shared<std::vector<int32_t>>();
    info.frame_group->reserve(info.coords->size());
    for (const auto& c : *info.coords) info.frame_group->push_back(c.t);
    info.attn_mask = seq.attn_mask();
    return info;
}

template <typename T>
ad::Ptr<T> self_attention(const ad::Ptr<T>& h, const NodeMap<T>& params, const std::string& prefix,
                          const ModelConfig& cfg, const SequenceInfo& info, RopeAxes axes) {
    auto q = linear(h, params, prefix + ".q");
    auto k = linear(h, params, prefix + ".k");
    auto v = linear(h, params, prefix + ".v");
    q = rope_node(q, cfg.n_heads, info.coords, axes, cfg.rope_base);
    k = rope_node(k, cfg.n_heads, info.coords, axes, cfg.rope_base);
    const std::vector<int32_t>* groups =
        axes == RopeAxes::Axes2D ? info.frame_group.get() : nullptr;
    auto att = attention_core(q, k, v, cfg.n_heads, info.attn_mask, info.attn_mask, groups, groups);
    return linear(att, params, prefix + ".o");
}

template <typename T>
ad::Ptr<T> cross_attention(const ad::Ptr<T>& h, const ad::Ptr<T>& text_emb,
                           const NodeMap<T>& params, const std::string& prefix,
                           const ModelConfig& cfg) {
    auto q = linear(h, params, prefix + ".q");
    auto k = linear(text_emb, params, prefix + ".k");
    auto v = linear(text_emb, params, prefix + ".v");
    const std::vector<uint8_t> text_valid(text_emb->value.dim(0), uint8_t(1));
    const std::vector<uint8_t> active(h->value.dim(0), uint8_t(1));
    auto att = attention_core(q, k, v, cfg.n_heads, text_valid, active, nullptr, nullptr);
    return linear(att, params, prefix + ".o");
}

// One FullDiT block: 2D self-attn, 3D self-attn, text cross-attn, FFN, each
// as y = x + gate * Sub(norm(x) * (1 + scale) + shift).
template <typename T>
ad::Ptr<T> block_node(const ad::Ptr<T>& x_in, const ad::Ptr<T>& text_emb, const ad::Ptr<T>& t_emb,
                      const NodeMap<T>& params, size_t layer, const ModelConfig& cfg,
                      const SequenceInfo& info) {
    const std::string prefix = "block" + std::to_string(layer);
    auto mods = adaln_node(t_emb, params, prefix + ".ada", cfg.d_model);

    ad::Ptr<T> x = x_in;
    for (size_t sub = 0; sub < 4; ++sub) {
        auto h = ad::modulate(ad::rmsnorm(x), mods[sub][0], mods[sub][1]);
        ad::Ptr<T> y;
        switch (sub) {
            case 0: y = self_attention(h, params, prefix + ".attn2d", cfg, info, RopeAxes::Axes2D); break;
            case 1: y = self_attention(h, params, prefix + ".attn3d", cfg, info, RopeAxes::Axes3D); break;
            case 2: y = cross_attention(h, text_emb, params, prefix + ".cross", cfg); break;
            default: {
                auto f = ad::silu(linear(h, params, prefix + ".ffn.l1"));
                y = linear(f, params, prefix + ".ffn.l2");
            }
        }
        x = ad::gate_residual(x, y, mods[sub][2]);
    }
    return x;
}

template <typename T>
ad::Ptr<T> embed_sequence(const tok::TokenSequence& seq, const NodeMap<T>& params) {
    std::vector<ad::Ptr<T>> parts;
    for (const auto& seg : seq.segments()) {
        if (seg.length() == 0) continue;
        const char* proj = nullptr;
        switch (seg.type) {
            case tok::TokenType::Video: proj = "embed.video"; break;
            case tok::TokenType::Camera: proj = "embed.camera"; break;
            case tok::TokenType::Identity: proj = "embed.identity"; break;
            case tok::TokenType::Depth: proj = "embed.depth"; break;
            case tok::TokenType::Pad: proj = "embed.video"; break;  // zero rows, masked out
        }
        auto raw = ad::constant(seg.raw.template cast<T>());
        parts.push_back(linear(raw, params, std::string(proj)));
    }
    return ad::concat_rows(parts);
}

// Full stack: embed text ids, run the blocks, final norm + zero-initialized
// projection; only video-token rows are projected and returned.
template <typename T>
ad::Ptr<T> model_forward_node(const tok::TokenSequence& seq, T t,
                              const std::vector<int32_t>& text_ids, const NodeMap<T>& params,
                              const ModelConfig& cfg) {
    if (seq.video_length() == 0) throw ShapeError("sequence has no video block");
    const SequenceInfo info = sequence_info(seq);

    auto x = embed_sequence(seq, params);
    auto t_emb = timestep_embedding_node(t, params, cfg);
    std::vector<int32_t> ids = text_ids.empty() ? std::vector<int32_t>{0} : text_ids;
    auto text_emb = ad::embed_rows(p(params, std::string("embed.text")), std::move(ids));

    for (size_t layer = 0; layer < cfg.n_layers; ++layer)
        x = block_node(x, text_emb, t_emb, params, layer, cfg, info);

    // video segment is always first in the assembled order
    auto video = ad::slice_rows(x, 0, seq.video_length());
    auto normed = ad::mul_rowwise(ad::rmsnorm(video), p(params, std::string("final.gain")));
    return linear(normed, params, std::string("final"));
}

}  // namespace graph

// Plain-tensor entry points ------------------------------------------------

template <typename T>
Tensor<T> model_forward(const tok::TokenSequence& seq, T t, const std::vector<int32_t>& text_ids,
                        const ModelParams& params, const ModelConfig& cfg) {
    auto leaves = graph::lift_params<T>(params, false);
    return graph::model_forward_node(seq, t, text_ids, leaves, cfg)->value;
}

// The spec-level attention operation: kv doubles as keys and values, RoPE is
// applied to q and k when coordinates are given, and 2D axes restrict

// attention to keys sharing the query's temporal coordinate.
template <typename T>
Tensor<T> attention(const Tensor<T>& q_seq, const Tensor<T>& kv_seq,
                    const std::vector<uint8_t>& attn_mask,
                    const std::vector<tok::Coord3>* coords_q = nullptr,
                    const std::vector<tok::Coord3>* coords_kv = nullptr,
                    RopeAxes axes = RopeAxes::Axes3D, double base = 10000.0) {
    if (q_seq.ndim() != 3 || kv_seq.ndim() != 3)
        throw ShapeError("attention expects [L, n_heads, head_dim]");
    const size_t n_heads = q_seq.dim(1), head_dim = q_seq.dim(2);

    Tensor<T> qr = coords_q ? rope_rotate(q_seq, *coords_q, axes, base) : q_seq;
    Tensor<T> kr = coords_kv ? rope_rotate(kv_seq, *coords_kv, axes, base) : kv_seq;

    auto to2d = [&](const Tensor<T>& t3) {
        Tensor<T> c = t3;
        return ad::constant(
            Tensor<T>::from_data({t3.dim(0), n_heads * head_dim}, std::move(c.raw())));
    };
    std::vector<int32_t> gq, gk;
    const std::vector<int32_t>*pgq = nullptr, *pgk = nullptr;
    if (axes == RopeAxes::Axes2D && coords_q && coords_kv) {
        for (const auto& c : *coords_q) gq.push_back(c.t);
        for (const auto& c : *coords_kv) gk.push_back(c.t);
        pgq = &gq;
        pgk = &gk;
    }
    const std::vector<uint8_t> active(q_seq.dim(0), uint8_t(1));
    auto out = graph::attention_core(to2d(qr), to2d(kr), to2d(kv_seq), n_heads, attn_mask, active,
                                     pgq, pgk);
    Tensor<T> v = out->value;
    return Tensor<T>::from_data(q_seq.shape(), std::move(v.raw()));
}

// The spec-level AdaLN operation: project t_emb to 12*d_model and return the
// four (scale, shift, gate) triples as a [4,3,d_model] tensor.
template <typename T>
Tensor<T> adaln_params(const Tensor<T>& t_emb, const Tensor<T>& w, const Tensor<T>& b) {
    const size_t d = t_emb.size();
    if (w.dim(0) != d || w.dim(1) != 12 * d || b.size() != 12 * d)
        throw ShapeError("adaln projection must map d_model -> 12*d_model");
    Tensor<T> te = t_emb;
    auto row = ad::constant(Tensor<T>::from_data({size_t(1), d}, std::move(te.raw())));
    Tensor<T> bias = b;
    auto bias_node =
        ad::constant(Tensor<T>::from_data({size_t(1), 12 * d}, std::move(bias.raw())));
    auto all = ad::add_rowwise(ad::matmul(row, ad::constant(w)), bias_node);
    Tensor<T> out({size_t(4), size_t(3), d});
    std::copy(all->value.raw().begin(), all->value.raw().end(), out.raw().begin());
    return out;
}

// One block on plain tensors (embeddings already at d_model).
template <typename T>
Tensor<T> fulldit_block(const Tensor<T>& x, const std::vector<tok::Coord3>& coords,
                        const std::vector<uint8_t>& attn_mask, const Tensor<T>& text_emb,
                        const Tensor<T>& t_emb, const ModelParams& params, size_t layer,
                        const ModelConfig& cfg) {
    auto leaves = graph::lift_params<T>(params, false);
    graph::SequenceInfo info;
    info.coords = std::make_shared<std::vector<tok::Coord3>>(coords);
    info.frame_group = std::make_shared<std::vector<int32_t>>();
    for (const auto& c : coords) info.frame_group->push_back(c.t);
    info.attn_mask = attn_mask;

    Tensor<T> tc = t_emb;
    auto t_node = ad::constant(Tensor<T>::from_data({size_t(1), t_emb.size()}, std::move(tc.raw())));
    auto out = graph::block_node(ad::constant(x), ad::constant(text_emb), t_node, leaves, layer,
                                 cfg, info);
    return out->value;
}

}  // namespace fulldit::model
