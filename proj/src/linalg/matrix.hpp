#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "linalg/scalar.hpp"

namespace kvt::lin {

// Dense row-major matrix of exact scalars. Zero-row and zero-column shapes
// are first-class; the scalar mode is carried explicitly so empty matrices
// still know which field they live over.
class Matrix {
  public:
    Matrix() : rows_(0), cols_(0), mode_{0} {}
    Matrix(std::size_t rows, std::size_t cols, ScalarMode mode);

    static Matrix identity(std::size_t n, ScalarMode mode);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    ScalarMode mode() const { return mode_; }

    ExactScalar& at(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    const ExactScalar& at(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    bool operator==(const Matrix& o) const;
    bool operator!=(const Matrix& o) const { return !(*this == o); }

    bool is_identity() const;

    std::string str() const;

  private:
    std::size_t rows_, cols_;
    ScalarMode mode_;
    std::vector<ExactScalar> e_;
};

Matrix mat_mul(const Matrix& a, const Matrix& b);
Matrix kron(const Matrix& a, const Matrix& b);
Matrix direct_sum(const Matrix& a, const Matrix& b);
ExactScalar mat_trace(const Matrix& a);

// Sends basis vector e_i to e_{perm[i]}, so column i has its 1 in row perm[i]
// and P(sigma after tau) = P(sigma) * P(tau).
Matrix permutation_matrix(const std::vector<std::size_t>& perm, ScalarMode mode);

Matrix transpose(const Matrix& a);

}  // namespace kvt::lin
