#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "fulldit/errors.hpp"

namespace fulldit {

// Dense row-major n-d array. All bulk numeric data in the project lives in
// one of these; Eigen maps provide the matrix views for linear algebra.
template <typename T>
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<size_t> shape, T fill = T(0))
        : shape_(std::move(shape)), data_(count(shape_), fill) {}

    Tensor(std::initializer_list<size_t> shape, T fill = T(0))
        : Tensor(std::vector<size_t>(shape), fill) {}

    static Tensor zeros(std::vector<size_t> shape) { return Tensor(std::move(shape)); }

    static Tensor from_data(std::vector<size_t> shape, std::vector<T> data) {
        if (count(shape) != data.size()) throw ShapeError("data size does not match shape");
        Tensor t;
        t.shape_ = std::move(shape);
        t.data_ = std::move(data);
        return t;
    }

    size_t ndim() const { return shape_.size(); }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }
    const std::vector<size_t>& shape() const { return shape_; }
    size_t dim(size_t i) const { return shape_.at(i); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& raw() { return data_; }
    const std::vector<T>& raw() const { return data_; }

    T& operator[](size_t i) { return data_[i]; }
    const T& operator[](size_t i) const { return data_[i]; }

    T& at2(size_t i, size_t j) { return data_[i * shape_[1] + j]; }
    const T& at2(size_t i, size_t j) const { return data_[i * shape_[1] + j]; }

    T& at3(size_t i, size_t j, size_t k) {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    const T& at3(size_t i, size_t j, size_t k) const {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }

    T& at4(size_t i, size_t j, size_t k, size_t l) {
        return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
    }
    const T& at4(size_t i, size_t j, size_t k, size_t l) const {
        return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
    }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    template <typename U>
    Tensor<U> cast() const {
        Tensor<U> out;
        out = Tensor<U>::from_data(shape_, std::vector<U>(data_.begin(), data_.end()));
        return out;
    }

    std::string shape_str() const {
        std::string s = "[";
        for (size_t i = 0; i < shape_.size(); ++i)
            s += (i ? "," : "") + std::to_string(shape_[i]);
        return s + "]";
    }

    static size_t count(const std::vector<size_t>& shape) {
        return std::accumulate(shape.begin(), shape.end(), size_t(1), std::multiplies<>());
    }

private:
    std::vector<size_t> shape_;
    std::vector<T> data_;
};

using Tensorf = Tensor<float>;
using Tensord = Tensor<double>;

template <typename T>
using MatRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
Eigen::Map<MatRM<T>> as_matrix(Tensor<T>& t, size_t rows, size_t cols) {
    if (t.size() != rows * cols) throw ShapeError("matrix view size mismatch " + t.shape_str());
    return Eigen::Map<MatRM<T>>(t.data(), Eigen::Index(rows), Eigen::Index(cols));
}

template <typename T>
Eigen::Map<const MatRM<T>> as_matrix(const Tensor<T>& t, size_t rows, size_t cols) {
    if (t.size() != rows * cols) throw ShapeError("matrix view size mismatch " + t.shape_str());
    return Eigen::Map<const MatRM<T>>(t.data(), Eigen::Index(rows), Eigen::Index(cols));
}

// 2-d view with the leading dim collapsed: [d0, d1, ..., dk] -> d0 x rest.
template <typename T>
Eigen::Map<const MatRM<T>> as_rows(const Tensor<T>& t) {
    const size_t rows = t.ndim() ? t.dim(0) : 1;
    return as_matrix(t, rows, rows ? t.size() / rows : 0);
}

template <typename T>
Eigen::Map<MatRM<T>> as_rows(Tensor<T>& t) {
    const size_t rows = t.ndim() ? t.dim(0) : 1;
    return as_matrix(t, rows, rows ? t.size() / rows : 0);
}

}  // namespace fulldit
