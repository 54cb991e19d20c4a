#include "ml/linalg.hpp"

#include <cmath>

namespace pdsp {

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw_invalid("matmul dimension mismatch");
    Matrix out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            double aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols; ++j) out.at(i, j) += aik * b.at(k, j);
        }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) out.at(j, i) = a.at(i, j);
    return out;
}

std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
    if (a.rows != a.cols || b.size() != a.rows) throw_invalid("solve_linear shape mismatch");
    const std::size_t n = a.rows;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a.at(r, col)) > std::abs(a.at(pivot, col))) pivot = r;
        if (std::abs(a.at(pivot, col)) < 1e-12)
            throw Error(ErrorCode::Training, "singular system in linear solve");
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a.at(col, j), a.at(pivot, j));
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = a.at(r, col) / a.at(col, col);
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a.at(r, j) -= f * a.at(col, j);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= a.at(i, j) * x[j];
        x[i] = acc / a.at(i, i);
    }
    return x;
}

} // namespace pdsp
