#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "itct/common.hpp"

namespace itct {

// Dense row-major matrix. float for training/inference, double for gradient
// checks; both instantiations share one code path.
template <class T>
class Mat {
  public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, T(0)) {}
    Mat(int rows, int cols, std::vector<T> data) : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != static_cast<size_t>(rows_) * cols_)
            throw std::invalid_argument("Mat: data length does not match shape");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    const T& operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    T* row_ptr(int r) { return data_.data() + static_cast<size_t>(r) * cols_; }
    const T* row_ptr(int r) const { return data_.data() + static_cast<size_t>(r) * cols_; }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& vec() { return data_; }
    const std::vector<T>& vec() const { return data_; }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }
    void zero() { fill(T(0)); }

    bool same_shape(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    std::string shape_str() const { return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")"; }

    bool all_finite() const {
        for (const T& v : data_)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

    double l2_norm() const {
        double s = 0.0;
        for (const T& v : data_) s += static_cast<double>(v) * static_cast<double>(v);
        return std::sqrt(s);
    }

    template <class U>
    Mat<U> cast() const {
        Mat<U> out(rows_, cols_);
        for (size_t i = 0; i < data_.size(); ++i) out.data()[i] = static_cast<U>(data_[i]);
        return out;
    }

    bool operator==(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_; }

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

// Learnable tensor: value plus gradient accumulator of the same shape.
template <class T>
struct ParamTensor {
    std::string name;
    Mat<T> value;
    Mat<T> grad;

    ParamTensor() = default;
    ParamTensor(std::string n, int rows, int cols) : name(std::move(n)), value(rows, cols), grad(rows, cols) {}

    void zero_grad() { grad.zero(); }
    int64_t count() const { return static_cast<int64_t>(value.size()); }
};

template <class T>
void accumulate(Mat<T>& dst, const Mat<T>& src) {
    if (!dst.same_shape(src))
        throw std::invalid_argument("accumulate: shape mismatch " + dst.shape_str() + " vs " + src.shape_str());
    for (size_t i = 0; i < dst.size(); ++i) dst.data()[i] += src.data()[i];
}

}  // namespace itct
