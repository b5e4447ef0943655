#pragma once

#include <functional>
#include <memory>
#include <unordered_set>
#include <vector>

#include "fulldit/errors.hpp"
#include "fulldit/tensor.hpp"

namespace fulldit::ad {

// Reverse-mode tape over 2-d tensors. Nodes hold values eagerly; backward()
// walks the graph in reverse topological order and runs each node's backprop
// closure. Granularity is one node per matmul/attention/norm, so closure
// overhead is negligible next to the math.

template <typename T>
struct Node {
    Tensor<T> value;
    Tensor<T> grad;  // allocated on first accumulation
    bool needs_grad = false;
    std::vector<std::shared_ptr<Node<T>>> parents;
    std::function<void(Node<T>&)> backprop;
};

template <typename T>
using Ptr = std::shared_ptr<Node<T>>;

template <typename T>
Ptr<T> constant(Tensor<T> value) {
    auto n = std::make_shared<Node<T>>();
    n->value = std::move(value);
    return n;
}

template <typename T>
Ptr<T> leaf(Tensor<T> value) {
    auto n = std::make_shared<Node<T>>();
    n->value = std::move(value);
    n->needs_grad = true;
    return n;
}

template <typename T>
Tensor<T>& grad_of(const Ptr<T>& n) {
    if (n->grad.empty()) n->grad = Tensor<T>::zeros(n->value.shape());
    return n->grad;
}

namespace detail {

template <typename T>
Ptr<T> make_op(Tensor<T> value, std::vector<Ptr<T>> parents,
               std::function<void(Node<T>&)> backprop) {
    auto n = std::make_shared<Node<T>>();
    n->value = std::move(value);
    n->parents = std::move(parents);
    for (const auto& p : n->parents) n->needs_grad |= p->needs_grad;
    if (n->needs_grad) n->backprop = std::move(backprop);
    return n;
}

template <typename T>
size_t rows(const Ptr<T>& n) { return n->value.dim(0); }
template <typename T>
size_t cols(const Ptr<T>& n) { return n->value.dim(1); }

}  // namespace detail

// ---- elementwise / broadcast ----

template <typename T>
Ptr<T> add(const Ptr<T>& a, const Ptr<T>& b) {
    if (!a->value.same_shape(b->value)) throw ShapeError("add: shape mismatch");
    Tensor<T> out = a->value;
    as_rows(out) += as_rows(b->value);
    return detail::make_op<T>(std::move(out), {a, b}, [a, b](Node<T>& n) {
        if (a->needs_grad) as_rows(grad_of(a)) += as_rows(n.grad);
        if (b->needs_grad) as_rows(grad_of(b)) += as_rows(n.grad);
    });
}

template <typename T>
Ptr<T> scale(const Ptr<T>& a, T c) {
    Tensor<T> out = a->value;
    as_rows(out) *= c;
    return detail::make_op<T>(std::move(out), {a}, [a, c](Node<T>& n) {
        if (a->needs_grad) as_rows(grad_of(a)) += c * as_rows(n.grad);
    });
}

// x [L,d] + bias [1,d]
template <typename T>
Ptr<T> add_rowwise(const Ptr<T>& x, const Ptr<T>& b) {
    if (detail::cols(x) != detail::cols(b) || detail::rows(b) != 1)
        throw ShapeError("add_rowwise: bias must be [1,d]");
    Tensor<T> out = x->value;
    as_rows(out).rowwise() += as_rows(b->value).row(0);
    return detail::make_op<T>(std::move(out), {x, b}, [x, b](Node<T>& n) {
        if (x->needs_grad) as_rows(grad_of(x)) += as_rows(n.grad);
        if (b->needs_grad) as_rows(grad_of(b)).row(0) += as_rows(n.grad).colwise().sum();
    });
}

// x [L,d] * v [1,d], broadcast over rows
template <typename T>
Ptr<T> mul_rowwise(const Ptr<T>& x, const Ptr<T>& v) {
    if (detail::cols(x) != detail::cols(v) || detail::rows(v) != 1)
        throw ShapeError("mul_rowwise: vector must be [1,d]");
    Tensor<T> out = x->value;
    as_rows(out) = as_rows(out).array().rowwise() * as_rows(v->value).row(0).array();
    return detail::make_op<T>(std::move(out), {x, v}, [x, v](Node<T>& n) {
        if (x->needs_grad)
            as_rows(grad_of(x)).array() +=
                as_rows(n.grad).array().rowwise() * as_rows(v->value).row(0).array();
        if (v->needs_grad)
            as_rows(grad_of(v)).row(0).array() +=
                (as_rows(n.grad).array() * as_rows(x->value).array()).colwise().sum();
    });
}

// xn * (1 + scale) + shift, scale/shift broadcast [1,d]
template <typename T>
Ptr<T> modulate(const Ptr<T>& xn, const Ptr<T>& sc, const Ptr<T>& sh) {
    if (detail::cols(xn) != detail::cols(sc) || detail::cols(xn) != detail::cols(sh))
        throw ShapeError("modulate: width mismatch");
    Tensor<T> out = xn->value;
    as_rows(out).array() =
        as_rows(out).array().rowwise() * (as_rows(sc->value).row(0).array() + T(1));
    as_rows(out).rowwise() += as_rows(sh->value).row(0);
    return detail::make_op<T>(std::move(out), {xn, sc, sh}, [xn, sc, sh](Node<T>& n) {
        if (xn->needs_grad)
            as_rows(grad_of(xn)).array() +=
                as_rows(n.grad).array().rowwise() * (as_rows(sc->value).row(0).array() + T(1));
        if (sc->needs_grad)
            as_rows(grad_of(sc)).row(0).array() +=
                (as_rows(n.grad).array() * as_rows(xn->value).array()).colwise().sum();
        if (sh->needs_grad)
            as_rows(grad_of(sh)).row(0) += as_rows(n.grad).colwise().sum();
    });
}

// x + y * gate, gate broadcast [1,d]; the AdaLN-Zero residual join
template <typename T>
Ptr<T> gate_residual(const Ptr<T>& x, const Ptr<T>& y, const Ptr<T>& gate) {
    if (!x->value.same_shape(y->value) || detail::cols(x) != detail::cols(gate))
        throw ShapeError("gate_residual: shape mismatch");
    Tensor<T> out = x->value;
    as_rows(out).array() +=
        as_rows(y->value).array().rowwise() * as_rows(gate->value).row(0).array();
    return detail::make_op<T>(std::move(out), {x, y, gate}, [x, y, gate](Node<T>& n) {
        if (x->needs_grad) as_rows(grad_of(x)) += as_rows(n.grad);
        if (y->needs_grad)
            as_rows(grad_of(y)).array() +=
                as_rows(n.grad).array().rowwise() * as_rows(gate->value).row(0).array();
        if (gate->needs_grad)
            as_rows(grad_of(gate)).row(0).array() +=
                (as_rows(n.grad).array() * as_rows(y->value).array()).colwise().sum();
    });
}

template <typename T>
Ptr<T> silu(const Ptr<T>& x) {
    Tensor<T> out = x->value;
    for (auto& v : out.raw()) v = v / (T(1) + std::exp(-v));
    return detail::make_op<T>(std::move(out), {x}, [x](Node<T>& n) {
        if (!x->needs_grad) return;
        auto& g = grad_of(x);
        for (size_t i = 0; i < g.size(); ++i) {
            const T v = x->value[i];
            const T sig = T(1) / (T(1) + std::exp(-v));
            g[i] += n.grad[i] * sig * (T(1) + v * (T(1) - sig));
        }
    });
}

// RMS normalization per row, no learned gain.
template <typename T>
Ptr<T> rmsnorm(const Ptr<T>& x, T eps = T(1e-6)) {
    const size_t L = detail::rows(x), d = detail::cols(x);
    Tensor<T> out({L, d});
    auto inv_rms = std::make_shared<std::vector<T>>(L);
    for (size_t i = 0; i < L; ++i) {
        T ms = T(0);
        const T* row = &x->value.at2(i, 0);
        for (size_t j = 0; j < d; ++j) ms += row[j] * row[j];
        const T r = T(1) / std::sqrt(ms / T(d) + eps);
        (*inv_rms)[i] = r;
        for (size_t j = 0; j < d; ++j) out.at2(i, j) = row[j] * r;
    }
    return detail::make_op<T>(std::move(out), {x}, [x, inv_rms, d](Node<T>& n) {
        if (!x->needs_grad) return;
        auto& g = grad_of(x);
        const size_t L = n.value.dim(0);
        for (size_t i = 0; i < L; ++i) {
            const T r = (*inv_rms)[i];
            const T* y = &n.value.at2(i, 0);
            const T* dy = &n.grad.at2(i, 0);
            T dot = T(0);
            for (size_t j = 0; j < d; ++j) dot += dy[j] * y[j];
            dot /= T(d);
            T* gx = &g.at2(i, 0);
            for (size_t j = 0; j < d; ++j) gx[j] += r * (dy[j] - y[j] * dot);
        }
    });
}

// ---- shape ops ----

template <typename T>
Ptr<T> matmul(const Ptr<T>& a, const Ptr<T>& b) {
    const size_t m = detail::rows(a), k = detail::cols(a), n_ = detail::cols(b);
    if (detail::rows(b) != k) throw ShapeError("matmul: inner dims differ");
    Tensor<T> out({m, n_});
    as_matrix(out, m, n_).noalias() = as_rows(a->value) * as_rows(b->value);
    return detail::make_op<T>(std::move(out), {a, b}, [a, b](Node<T>& n) {
        const auto dC = as_rows(n.grad);
        if (a->needs_grad) as_rows(grad_of(a)).noalias() += dC * as_rows(b->value).transpose();
        if (b->needs_grad) as_rows(grad_of(b)).noalias() += as_rows(a->value).transpose() * dC;
    });
}

template <typename T>
Ptr<T> slice_rows(const Ptr<T>& x, size_t begin, size_t count) {
    const size_t d = detail::cols(x);
    if (begin + count > detail::rows(x)) throw ShapeError("slice_rows: out of range");
    Tensor<T> out({count, d});
    as_rows(out) = as_rows(x->value).middleRows(Eigen::Index(begin), Eigen::Index(count));
    return detail::make_op<T>(std::move(out), {x}, [x, begin, count](Node<T>& n) {
        if (x->needs_grad)
            as_rows(grad_of(x)).middleRows(Eigen::Index(begin), Eigen::Index(count)) +=
                as_rows(n.grad);
    });
}

template <typename T>
Ptr<T> slice_cols(const Ptr<T>& x, size_t begin, size_t count) {
    const size_t L = detail::rows(x);
    if (begin + count > detail::cols(x)) throw ShapeError("slice_cols: out of range");
    Tensor<T> out({L, count});
    as_rows(out) = as_rows(x->value).middleCols(Eigen::Index(begin), Eigen::Index(count));
    return detail::make_op<T>(std::move(out), {x}, [x, begin, count](Node<T>& n) {
        if (x->needs_grad)
            as_rows(grad_of(x)).middleCols(Eigen::Index(begin), Eigen::Index(count)) +=
                as_rows(n.grad);
    });
}

template <typename T>
Ptr<T> concat_rows(const std::vector<Ptr<T>>& parts) {
    if (parts.empty()) throw ShapeError("concat_rows: no parts");
    const size_t d = detail::cols(parts[0]);
    size_t total = 0;
    for (const auto& p : parts) {
        if (detail::cols(p) != d) throw ShapeError("concat_rows: width mismatch");
        total += detail::rows(p);
    }
    Tensor<T> out({total, d});
    size_t at = 0;
    for (const auto& p : parts) {
        as_rows(out).middleRows(Eigen::Index(at), Eigen::Index(detail::rows(p))) =
            as_rows(p->value);
        at += detail::rows(p);
    }
    return detail::make_op<T>(std::move(out), parts, [parts](Node<T>& n) {
        size_t at = 0;
        for (const auto& p : parts) {
            const size_t r = p->value.dim(0);
            if (p->needs_grad)
                as_rows(grad_of(p)) +=
                    as_rows(n.grad).middleRows(Eigen::Index(at), Eigen::Index(r));
            at += r;
        }
    });
}

// table [V,d] gathered by ids -> [n,d]
template <typename T>
Ptr<T> embed_rows(const Ptr<T>& table, std::vector<int32_t> ids) {
    const size_t v = detail::rows(table), d = detail::cols(table);
    Tensor<T> out({ids.size(), d});
    for (size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || size_t(ids[i]) >= v) throw ShapeError("embed_rows: id out of range");
        as_rows(out).row(Eigen::Index(i)) = as_rows(table->value).row(ids[i]);
    }
    return detail::make_op<T>(std::move(out), {table},
                              [table, ids = std::move(ids)](Node<T>& n) {
                                  if (!table->needs_grad) return;
                                  auto g = as_rows(grad_of(table));
                                  for (size_t i = 0; i < ids.size(); ++i)
                                      g.row(ids[i]) += as_rows(n.grad).row(Eigen::Index(i));
                              });
}

// mean squared error over rows with mask bit 1; rows with bit 0 contribute
// exactly nothing. Output is [1,1].
template <typename T>
Ptr<T> masked_mse(const Ptr<T>& pred, const Tensor<T>& target, std::vector<uint8_t> row_mask) {
    if (!pred->value.same_shape(target)) throw ShapeError("masked_mse: shape mismatch");
    const size_t L = detail::rows(pred), d = detail::cols(pred);
    if (row_mask.size() != L) throw ShapeError("masked_mse: mask length mismatch");
    size_t active = 0;
    for (auto m : row_mask) active += m ? 1 : 0;
    if (active == 0) throw EmptyLossMask("loss mask selects no rows");

    T sum = T(0);
    for (size_t i = 0; i < L; ++i) {
        if (!row_mask[i]) continue;
        for (size_t j = 0; j < d; ++j) {
            const T diff = pred->value.at2(i, j) - target.at2(i, j);
            sum += diff * diff;
        }
    }
    Tensor<T> out({1, 1});
    out[0] = sum / T(active * d);
    const T inv = T(2) / T(active * d);
    return detail::make_op<T>(
        std::move(out), {pred},
        [pred, target, inv, row_mask = std::move(row_mask)](Node<T>& n) {
            if (!pred->needs_grad) return;
            auto& g = grad_of(pred);
            const T go = n.grad[0];
            const size_t L = target.dim(0), d = target.dim(1);
            for (size_t i = 0; i < L; ++i) {
                if (!row_mask[i]) continue;
                for (size_t j = 0; j < d; ++j)
                    g.at2(i, j) += go * inv * (pred->value.at2(i, j) - target.at2(i, j));
            }
        });
}

// ---- driver ----

template <typename T>
void backward(const Ptr<T>& loss) {
    std::vector<Node<T>*> order;
    std::unordered_set<Node<T>*> seen;
    std::vector<std::pair<Node<T>*, size_t>> stack;
    stack.push_back({loss.get(), 0});
    seen.insert(loss.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node<T>* p = node->parents[next++].get();
            if (p->needs_grad && seen.insert(p).second) stack.push_back({p, 0});
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
    loss->grad = Tensor<T>(loss->value.shape(), T(1));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node<T>* n = *it;
        if (n->backprop && !n->grad.empty()) n->backprop(*n);
    }
}

}  // namespace fulldit::ad
