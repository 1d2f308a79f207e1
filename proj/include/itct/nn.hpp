#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "itct/common.hpp"
#include "itct/tensor.hpp"

namespace itct::nn {

template <class T>
void check_finite(const Mat<T>& m, const char* tag) {
    if (!m.all_finite()) throw NumericError(std::string("non-finite values in ") + tag);
}

inline void shape_error(const char* op, const std::string& a, const std::string& b) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + a + " vs " + b);
}

// ---------------------------------------------------------------------------
// matmul and friends

template <class T>
Mat<T> matmul(const Mat<T>& a, const Mat<T>& b) {
    if (a.cols() != b.rows()) shape_error("matmul", a.shape_str(), b.shape_str());
    Mat<T> c(a.rows(), b.cols());
    const int n = a.rows(), k = a.cols(), m = b.cols();
    for (int i = 0; i < n; ++i) {
        T* crow = c.row_ptr(i);
        const T* arow = a.row_ptr(i);
        for (int p = 0; p < k; ++p) {
            const T aik = arow[p];
            const T* brow = b.row_ptr(p);
            for (int j = 0; j < m; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

// C = A * B^T
template <class T>
Mat<T> matmul_nt(const Mat<T>& a, const Mat<T>& b) {
    if (a.cols() != b.cols()) shape_error("matmul_nt", a.shape_str(), b.shape_str());
    Mat<T> c(a.rows(), b.rows());
    const int k = a.cols();
    for (int i = 0; i < a.rows(); ++i) {
        const T* arow = a.row_ptr(i);
        T* crow = c.row_ptr(i);
        for (int j = 0; j < b.rows(); ++j) {
            const T* brow = b.row_ptr(j);
            T s = 0;
            for (int p = 0; p < k; ++p) s += arow[p] * brow[p];
            crow[j] = s;
        }
    }
    return c;
}

// C = A^T * B
template <class T>
Mat<T> matmul_tn(const Mat<T>& a, const Mat<T>& b) {
    if (a.rows() != b.rows()) shape_error("matmul_tn", a.shape_str(), b.shape_str());
    Mat<T> c(a.cols(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        const T* arow = a.row_ptr(i);
        const T* brow = b.row_ptr(i);
        for (int p = 0; p < a.cols(); ++p) {
            const T aip = arow[p];
            T* crow = c.row_ptr(p);
            for (int j = 0; j < b.cols(); ++j) crow[j] += aip * brow[j];
        }
    }
    return c;
}

// dA = dC * B^T, dB = A^T * dC
template <class T>
std::pair<Mat<T>, Mat<T>> matmul_backward(const Mat<T>& a, const Mat<T>& b, const Mat<T>& dc) {
    return {matmul_nt(dc, b), matmul_tn(a, dc)};
}

template <class T>
Mat<T> add_bias(const Mat<T>& x, const Mat<T>& bias) {
    if (bias.rows() != 1 || bias.cols() != x.cols()) shape_error("add_bias", x.shape_str(), bias.shape_str());
    Mat<T> y = x;
    for (int i = 0; i < y.rows(); ++i) {
        T* row = y.row_ptr(i);
        const T* b = bias.row_ptr(0);
        for (int j = 0; j < y.cols(); ++j) row[j] += b[j];
    }
    return y;
}

// db = column sums of dY; dX = dY (identity, returned implicitly by caller reuse)
template <class T>
Mat<T> bias_grad(const Mat<T>& dy) {
    Mat<T> db(1, dy.cols());
    for (int i = 0; i < dy.rows(); ++i) {
        const T* row = dy.row_ptr(i);
        for (int j = 0; j < dy.cols(); ++j) db(0, j) += row[j];
    }
    return db;
}

// Z = [X | Y] along the feature axis.
template <class T>
Mat<T> concat_rows_features(const Mat<T>& x, const Mat<T>& y) {
    if (x.rows() != y.rows()) shape_error("concat_rows_features", x.shape_str(), y.shape_str());
    Mat<T> z(x.rows(), x.cols() + y.cols());
    for (int i = 0; i < x.rows(); ++i) {
        T* row = z.row_ptr(i);
        const T* xr = x.row_ptr(i);
        const T* yr = y.row_ptr(i);
        for (int j = 0; j < x.cols(); ++j) row[j] = xr[j];
        for (int j = 0; j < y.cols(); ++j) row[x.cols() + j] = yr[j];
    }
    return z;
}

template <class T>
std::pair<Mat<T>, Mat<T>> concat_rows_features_backward(const Mat<T>& dz, int x_cols) {
    Mat<T> dx(dz.rows(), x_cols);
    Mat<T> dy(dz.rows(), dz.cols() - x_cols);
    for (int i = 0; i < dz.rows(); ++i) {
        const T* row = dz.row_ptr(i);
        for (int j = 0; j < x_cols; ++j) dx(i, j) = row[j];
        for (int j = x_cols; j < dz.cols(); ++j) dy(i, j - x_cols) = row[j];
    }
    return {std::move(dx), std::move(dy)};
}

// ---------------------------------------------------------------------------
// softmax

template <class T>
Mat<T> softmax_rows(const Mat<T>& x) {
    Mat<T> y(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i) {
        const T* xr = x.row_ptr(i);
        T* yr = y.row_ptr(i);
        T mx = xr[0];
        for (int j = 1; j < x.cols(); ++j) mx = std::max(mx, xr[j]);
        T sum = 0;
        for (int j = 0; j < x.cols(); ++j) {
            yr[j] = std::exp(xr[j] - mx);
            sum += yr[j];
        }
        for (int j = 0; j < x.cols(); ++j) yr[j] /= sum;
    }
    return y;
}

// dX_ij = Y_ij * (dY_ij - sum_k dY_ik Y_ik)
template <class T>
Mat<T> softmax_rows_backward(const Mat<T>& y, const Mat<T>& dy) {
    if (!y.same_shape(dy)) shape_error("softmax_rows_backward", y.shape_str(), dy.shape_str());
    Mat<T> dx(y.rows(), y.cols());
    for (int i = 0; i < y.rows(); ++i) {
        const T* yr = y.row_ptr(i);
        const T* dyr = dy.row_ptr(i);
        T dot = 0;
        for (int j = 0; j < y.cols(); ++j) dot += dyr[j] * yr[j];
        T* dxr = dx.row_ptr(i);
        for (int j = 0; j < y.cols(); ++j) dxr[j] = yr[j] * (dyr[j] - dot);
    }
    return dx;
}

// ---------------------------------------------------------------------------
// layer normalization (per row, population variance)

template <class T>
struct LayerNormCache {
    Mat<T> x_hat;
    std::vector<T> inv_std;
};

template <class T>
Mat<T> layer_norm(const Mat<T>& x, const Mat<T>& gamma, const Mat<T>& beta, T eps, LayerNormCache<T>* cache = nullptr) {
    if (gamma.rows() != 1 || gamma.cols() != x.cols()) shape_error("layer_norm gamma", x.shape_str(), gamma.shape_str());
    if (beta.rows() != 1 || beta.cols() != x.cols()) shape_error("layer_norm beta", x.shape_str(), beta.shape_str());
    const int c = x.cols();
    Mat<T> y(x.rows(), c);
    Mat<T> x_hat(x.rows(), c);
    std::vector<T> inv_std(x.rows());
    for (int i = 0; i < x.rows(); ++i) {
        const T* xr = x.row_ptr(i);
        T mean = 0;
        for (int j = 0; j < c; ++j) mean += xr[j];
        mean /= static_cast<T>(c);
        T var = 0;
        for (int j = 0; j < c; ++j) {
            const T d = xr[j] - mean;
            var += d * d;
        }
        var /= static_cast<T>(c);
        const T istd = T(1) / std::sqrt(var + eps);
        inv_std[i] = istd;
        T* xh = x_hat.row_ptr(i);
        T* yr = y.row_ptr(i);
        for (int j = 0; j < c; ++j) {
            xh[j] = (xr[j] - mean) * istd;
            yr[j] = gamma(0, j) * xh[j] + beta(0, j);
        }
    }
    if (cache) {
        cache->x_hat = std::move(x_hat);
        cache->inv_std = std::move(inv_std);
    }
    return y;
}

template <class T>
Mat<T> layer_norm_backward(const Mat<T>& dy, const Mat<T>& gamma, const LayerNormCache<T>& cache, Mat<T>& dgamma,
                           Mat<T>& dbeta) {
    const int c = dy.cols();
    Mat<T> dx(dy.rows(), c);
    for (int i = 0; i < dy.rows(); ++i) {
        const T* dyr = dy.row_ptr(i);
        const T* xh = cache.x_hat.row_ptr(i);
        for (int j = 0; j < c; ++j) {
            dgamma(0, j) += dyr[j] * xh[j];
            dbeta(0, j) += dyr[j];
        }
        T m1 = 0, m2 = 0;
        for (int j = 0; j < c; ++j) {
            const T dxh = dyr[j] * gamma(0, j);
            m1 += dxh;
            m2 += dxh * xh[j];
        }
        m1 /= static_cast<T>(c);
        m2 /= static_cast<T>(c);
        T* dxr = dx.row_ptr(i);
        for (int j = 0; j < c; ++j) {
            const T dxh = dyr[j] * gamma(0, j);
            dxr[j] = cache.inv_std[i] * (dxh - m1 - xh[j] * m2);
        }
    }
    return dx;
}

// ---------------------------------------------------------------------------
// activations

enum class Activation { relu, gelu, sigmoid };

template <class T>
T activate_scalar(T x, Activation kind) {
    switch (kind) {
        case Activation::relu:
            return x > T(0) ? x : T(0);
        case Activation::gelu: {
            const double xd = static_cast<double>(x);
            return static_cast<T>(0.5 * xd * (1.0 + std::erf(xd * 0.7071067811865475244)));
        }
        case Activation::sigmoid: {
            const double xd = static_cast<double>(x);
            const double s = xd >= 0.0 ? 1.0 / (1.0 + std::exp(-xd)) : std::exp(xd) / (1.0 + std::exp(xd));
            return static_cast<T>(s);
        }
    }
    return x;
}

template <class T>
T activate_grad_scalar(T x, Activation kind) {
    switch (kind) {
        case Activation::relu:
            return x > T(0) ? T(1) : T(0);
        case Activation::gelu: {
            const double xd = static_cast<double>(x);
            const double phi = 0.5 * (1.0 + std::erf(xd * 0.7071067811865475244));
            const double pdf = std::exp(-0.5 * xd * xd) * 0.3989422804014326779;
            return static_cast<T>(phi + xd * pdf);
        }
        case Activation::sigmoid: {
            const double s = static_cast<double>(activate_scalar(x, Activation::sigmoid));
            return static_cast<T>(s * (1.0 - s));
        }
    }
    return T(1);
}

template <class T>
Mat<T> activation(const Mat<T>& x, Activation kind) {
    Mat<T> y(x.rows(), x.cols());
    for (size_t i = 0; i < x.size(); ++i) y.data()[i] = activate_scalar(x.data()[i], kind);
    return y;
}

template <class T>
Mat<T> activation_backward(const Mat<T>& x, const Mat<T>& dy, Activation kind) {
    if (!x.same_shape(dy)) shape_error("activation_backward", x.shape_str(), dy.shape_str());
    Mat<T> dx(x.rows(), x.cols());
    for (size_t i = 0; i < x.size(); ++i) dx.data()[i] = dy.data()[i] * activate_grad_scalar(x.data()[i], kind);
    return dx;
}

// ---------------------------------------------------------------------------
// inverted dropout; mask entries are 0 or 1/(1-rate) so E[Y] = X.

template <class T>
struct DropoutResult {
    Mat<T> y;
    Mat<T> mask;  // empty when dropout was a no-op
};

template <class T>
DropoutResult<T> dropout_with_mask(const Mat<T>& x, double rate, uint64_t seed, bool train_mode) {
    if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout: rate must be in [0,1)");
    if (!train_mode || rate == 0.0) return {x, Mat<T>()};
    Rng rng(seed);
    const T scale = static_cast<T>(1.0 / (1.0 - rate));
    Mat<T> mask(x.rows(), x.cols());
    Mat<T> y(x.rows(), x.cols());
    for (size_t i = 0; i < x.size(); ++i) {
        const T m = rng.uniform() < rate ? T(0) : scale;
        mask.data()[i] = m;
        y.data()[i] = x.data()[i] * m;
    }
    return {std::move(y), std::move(mask)};
}

template <class T>
Mat<T> dropout(const Mat<T>& x, double rate, uint64_t seed, bool train_mode) {
    return dropout_with_mask(x, rate, seed, train_mode).y;
}

template <class T>
Mat<T> dropout_backward(const Mat<T>& dy, const Mat<T>& mask) {
    if (mask.empty()) return dy;
    if (!dy.same_shape(mask)) shape_error("dropout_backward", dy.shape_str(), mask.shape_str());
    Mat<T> dx(dy.rows(), dy.cols());
    for (size_t i = 0; i < dy.size(); ++i) dx.data()[i] = dy.data()[i] * mask.data()[i];
    return dx;
}

// ---------------------------------------------------------------------------
// multi-head self-attention
//
// Per-head projections are stored packed: wq/wk/wv are d x d with head h
// owning the column block [h*d_head, (h+1)*d_head); wo is (H*d_head) x d.

template <class T>
struct AttentionWeights {
    int d = 0;
    int heads = 0;
    ParamTensor<T> wq, wk, wv, wo;

    AttentionWeights() = default;
    AttentionWeights(const std::string& prefix, int dim, int n_heads)
        : d(dim),
          heads(n_heads),
          wq(prefix + ".wq", dim, dim),
          wk(prefix + ".wk", dim, dim),
          wv(prefix + ".wv", dim, dim),
          wo(prefix + ".wo", dim, dim) {
        if (n_heads <= 0 || dim % n_heads != 0)
            throw std::invalid_argument("attention: d=" + std::to_string(dim) + " not divisible by heads=" +
                                        std::to_string(n_heads));
    }

    int d_head() const { return d / heads; }

    // d x d_head slice of a packed projection, for inspection and tests
    Mat<T> head_slice(const Mat<T>& packed, int h) const {
        Mat<T> out(d, d_head());
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d_head(); ++j) out(i, j) = packed(i, h * d_head() + j);
        return out;
    }
};

template <class T>
struct AttentionCache {
    Mat<T> x, q, k, v;
    Mat<T> concat;
    std::vector<Mat<T>> attn;       // softmax outputs, one per (group, head)
    std::vector<Mat<T>> drop_mask;  // aligned with attn; empty mats when inactive
    int group_len = 0;
};

// X is n x d, treated as n/group_len independent sequences of group_len
// tokens. group_len == n gives a single sequence.
template <class T>
Mat<T> multi_head_attention(const Mat<T>& x, const AttentionWeights<T>& w, int group_len, double drop_rate,
                            uint64_t seed, bool train_mode, AttentionCache<T>* cache = nullptr) {
    if (x.cols() != w.d) shape_error("multi_head_attention", x.shape_str(), w.wq.value.shape_str());
    if (group_len <= 0 || x.rows() % group_len != 0)
        throw std::invalid_argument("multi_head_attention: rows " + std::to_string(x.rows()) +
                                    " not a multiple of group_len " + std::to_string(group_len));
    const int dh = w.d_head();
    const int groups = x.rows() / group_len;
    const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));

    Mat<T> q = matmul(x, w.wq.value);
    Mat<T> k = matmul(x, w.wk.value);
    Mat<T> v = matmul(x, w.wv.value);
    Mat<T> concat(x.rows(), w.d);

    std::vector<Mat<T>> attn_store;
    std::vector<Mat<T>> mask_store;
    if (cache) {
        attn_store.reserve(static_cast<size_t>(groups) * w.heads);
        mask_store.reserve(static_cast<size_t>(groups) * w.heads);
    }

    Mat<T> qs(group_len, dh), ks(group_len, dh), vs(group_len, dh);
    for (int g = 0; g < groups; ++g) {
        const int r0 = g * group_len;
        for (int h = 0; h < w.heads; ++h) {
            const int c0 = h * dh;
            for (int i = 0; i < group_len; ++i)
                for (int j = 0; j < dh; ++j) {
                    qs(i, j) = q(r0 + i, c0 + j);
                    ks(i, j) = k(r0 + i, c0 + j);
                    vs(i, j) = v(r0 + i, c0 + j);
                }
            Mat<T> scores = matmul_nt(qs, ks);
            for (size_t t = 0; t < scores.size(); ++t) scores.data()[t] *= scale;
            Mat<T> a = softmax_rows(scores);
            auto dropped = dropout_with_mask(a, drop_rate, mix_seed(seed, g, h), train_mode);
            Mat<T> out = matmul(dropped.y, vs);
            for (int i = 0; i < group_len; ++i)
                for (int j = 0; j < dh; ++j) concat(r0 + i, c0 + j) = out(i, j);
            if (cache) {
                attn_store.push_back(std::move(a));
                mask_store.push_back(std::move(dropped.mask));
            }
        }
    }

    Mat<T> y = matmul(concat, w.wo.value);
    if (cache) {
        cache->x = x;
        cache->q = std::move(q);
        cache->k = std::move(k);
        cache->v = std::move(v);
        cache->concat = std::move(concat);
        cache->attn = std::move(attn_store);
        cache->drop_mask = std::move(mask_store);
        cache->group_len = group_len;
    }
    return y;
}

// Accumulates weight gradients into w's ParamTensors; returns dX.
template <class T>
Mat<T> multi_head_attention_backward(const Mat<T>& dy, AttentionWeights<T>& w, const AttentionCache<T>& cache) {
    const int dh = w.d_head();
    const int group_len = cache.group_len;
    const int groups = cache.x.rows() / group_len;
    const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));

    accumulate(w.wo.grad, matmul_tn(cache.concat, dy));
    Mat<T> dconcat = matmul_nt(dy, w.wo.value);

    Mat<T> dq(cache.x.rows(), w.d), dk(cache.x.rows(), w.d), dv(cache.x.rows(), w.d);
    Mat<T> qs(group_len, dh), ks(group_len, dh), vs(group_len, dh), dout(group_len, dh);
    for (int g = 0; g < groups; ++g) {
        const int r0 = g * group_len;
        for (int h = 0; h < w.heads; ++h) {
            const int c0 = h * dh;
            for (int i = 0; i < group_len; ++i)
                for (int j = 0; j < dh; ++j) {
                    qs(i, j) = cache.q(r0 + i, c0 + j);
                    ks(i, j) = cache.k(r0 + i, c0 + j);
                    vs(i, j) = cache.v(r0 + i, c0 + j);
                    dout(i, j) = dconcat(r0 + i, c0 + j);
                }
            const Mat<T>& a = cache.attn[static_cast<size_t>(g) * w.heads + h];
            const Mat<T>& mask = cache.drop_mask[static_cast<size_t>(g) * w.heads + h];
            Mat<T> a_dropped = mask.empty() ? a : [&] {
                Mat<T> ad(a.rows(), a.cols());
                for (size_t t = 0; t < a.size(); ++t) ad.data()[t] = a.data()[t] * mask.data()[t];
                return ad;
            }();
            Mat<T> da_dropped = matmul_nt(dout, vs);
            Mat<T> dvs = matmul_tn(a_dropped, dout);
            Mat<T> da = dropout_backward(da_dropped, mask);
            Mat<T> dscores = softmax_rows_backward(a, da);
            for (size_t t = 0; t < dscores.size(); ++t) dscores.data()[t] *= scale;
            Mat<T> dqs = matmul(dscores, ks);
            Mat<T> dks = matmul_tn(dscores, qs);
            for (int i = 0; i < group_len; ++i)
                for (int j = 0; j < dh; ++j) {
                    dq(r0 + i, c0 + j) = dqs(i, j);
                    dk(r0 + i, c0 + j) = dks(i, j);
                    dv(r0 + i, c0 + j) = dvs(i, j);
                }
        }
    }

    accumulate(w.wq.grad, matmul_tn(cache.x, dq));
    accumulate(w.wk.grad, matmul_tn(cache.x, dk));
    accumulate(w.wv.grad, matmul_tn(cache.x, dv));

    Mat<T> dx = matmul_nt(dq, w.wq.value);
    accumulate(dx, matmul_nt(dk, w.wk.value));
    accumulate(dx, matmul_nt(dv, w.wv.value));
    return dx;
}

}  // namespace itct::nn
