#pragma once

#include <cstddef>
#include <vector>

#include "util/error.hpp"

namespace pdsp {

// Just enough dense linear algebra for the closed-form ridge fit. Row-major.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

// Solves A x = b by Gaussian elimination with partial pivoting.
std::vector<double> solve_linear(Matrix a, std::vector<double> b);

} // namespace pdsp
