#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "igo/errors.hpp"

namespace igo {

// Dense row-major tensor of 64-bit floats. Rank 1 and 2 cover everything this
// project needs; the shape vector is kept general for the checkpoint format.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<std::size_t> s, std::vector<double> d);

    static Tensor zeros(std::vector<std::size_t> s);
    static Tensor vector(std::vector<double> d);
    static Tensor matrix(std::size_t rows, std::size_t cols,
                         std::vector<double> d);
    static Tensor full(std::vector<std::size_t> s, double value);

    std::size_t size() const noexcept { return data.size(); }
    std::size_t rank() const noexcept { return shape.size(); }

    std::size_t rows() const;
    std::size_t cols() const;

    double& at(std::size_t r, std::size_t c);
    double at(std::size_t r, std::size_t c) const;

    bool same_shape(const Tensor& other) const { return shape == other.shape; }
    bool all_finite() const noexcept;

    // Row r of a rank-2 tensor as a plain vector.
    std::vector<double> row(std::size_t r) const;
    void set_row(std::size_t r, const std::vector<double>& v);

    void fill(double value);
    std::string shape_str() const;
};

// Throws ShapeMismatch naming both shapes when they differ.
void require_same_shape(const Tensor& a, const Tensor& b,
                        const std::string& where);

// Throws NumericError naming the operation if any entry is non-finite.
void require_finite(const Tensor& t, const std::string& where);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);
std::vector<double> sub(const std::vector<double>& a,
                        const std::vector<double>& b);
std::vector<double> add(const std::vector<double>& a,
                        const std::vector<double>& b);
std::vector<double> scaled(const std::vector<double>& a, double c);

// y = A x for rank-2 A (m x n) and x of length n. Handles m == 0.
std::vector<double> matvec(const Tensor& A, const std::vector<double>& x);

}  // namespace igo
