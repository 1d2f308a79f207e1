#pragma once

#include <cmath>
#include <functional>

#include "itct/tensor.hpp"

namespace itct::test {

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1e-8, std::abs(a) + std::abs(b)); }

template <class T>
double max_rel_err(const Mat<T>& a, const Mat<T>& b) {
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, rel_err(static_cast<double>(a.data()[i]), static_cast<double>(b.data()[i])));
    return worst;
}

template <class T>
void fill_random(Mat<T>& m, Rng& rng, double lo = -1.0, double hi = 1.0) {
    for (size_t i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(rng.uniform_range(lo, hi));
}

// central finite differences of a scalar loss with respect to every entry of x
inline Mat<double> finite_diff(Mat<double>& x, const std::function<double()>& loss, double h = 1e-5) {
    Mat<double> grad(x.rows(), x.cols());
    for (size_t i = 0; i < x.size(); ++i) {
        const double orig = x.data()[i];
        x.data()[i] = orig + h;
        const double up = loss();
        x.data()[i] = orig - h;
        const double down = loss();
        x.data()[i] = orig;
        grad.data()[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

// weighted sum of all entries turns a matrix output into a scalar loss
inline double weighted_sum(const Mat<double>& y, const Mat<double>& w) {
    double s = 0.0;
    for (size_t i = 0; i < y.size(); ++i) s += y.data()[i] * w.data()[i];
    return s;
}

}  // namespace itct::test
