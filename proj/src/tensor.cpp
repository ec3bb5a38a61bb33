#include "igo/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace igo {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& s) {
    std::size_t p = 1;
    for (std::size_t d : s) p *= d;
    return p;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> s, std::vector<double> d)
    : shape(std::move(s)), data(std::move(d)) {
    if (shape_product(shape) != data.size()) {
        throw ShapeMismatch("tensor init: shape " + shape_str() +
                            " does not hold " + std::to_string(data.size()) +
                            " entries");
    }
}

Tensor Tensor::zeros(std::vector<std::size_t> s) {
    std::size_t n = shape_product(s);
    return Tensor(std::move(s), std::vector<double>(n, 0.0));
}

Tensor Tensor::vector(std::vector<double> d) {
    std::size_t n = d.size();
    return Tensor({n}, std::move(d));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> d) {
    return Tensor({rows, cols}, std::move(d));
}

Tensor Tensor::full(std::vector<std::size_t> s, double value) {
    std::size_t n = shape_product(s);
    return Tensor(std::move(s), std::vector<double>(n, value));
}

std::size_t Tensor::rows() const {
    if (rank() != 2) throw ShapeMismatch("rows(): tensor " + shape_str() + " is not rank-2");
    return shape[0];
}

std::size_t Tensor::cols() const {
    if (rank() != 2) throw ShapeMismatch("cols(): tensor " + shape_str() + " is not rank-2");
    return shape[1];
}

double& Tensor::at(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }
double Tensor::at(std::size_t r, std::size_t c) const { return data[r * shape[1] + c]; }

bool Tensor::all_finite() const noexcept {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

std::vector<double> Tensor::row(std::size_t r) const {
    const std::size_t c = cols();
    return std::vector<double>(data.begin() + r * c, data.begin() + (r + 1) * c);
}

void Tensor::set_row(std::size_t r, const std::vector<double>& v) {
    const std::size_t c = cols();
    if (v.size() != c) {
        throw ShapeMismatch("set_row: row of length " + std::to_string(v.size()) +
                            " into tensor " + shape_str());
    }
    std::copy(v.begin(), v.end(), data.begin() + r * c);
}

void Tensor::fill(double value) { std::fill(data.begin(), data.end(), value); }

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ",";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

void require_same_shape(const Tensor& a, const Tensor& b,
                        const std::string& where) {
    if (!a.same_shape(b)) {
        throw ShapeMismatch(std::string(where) + ": shapes " + a.shape_str() +
                            " vs " + b.shape_str());
    }
}

void require_finite(const Tensor& t, const std::string& where) {
    if (!t.all_finite()) {
        throw NumericError(std::string(where) + ": non-finite entry in tensor " +
                           t.shape_str());
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

std::vector<double> sub(const std::vector<double>& a,
                        const std::vector<double>& b) {
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

std::vector<double> add(const std::vector<double>& a,
                        const std::vector<double>& b) {
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

std::vector<double> scaled(const std::vector<double>& a, double c) {
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * c;
    return r;
}

std::vector<double> matvec(const Tensor& A, const std::vector<double>& x) {
    const std::size_t m = A.rows();
    const std::size_t n = A.cols();
    if (x.size() != n) {
        throw ShapeMismatch("matvec: matrix " + A.shape_str() + " times vector of length " +
                            std::to_string(x.size()));
    }
    std::vector<double> y(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < n; ++c) s += A.at(r, c) * x[c];
        y[r] = s;
    }
    return y;
}

}  // namespace igo
