#include "linalg/matrix.hpp"

#include <sstream>
#include <stdexcept>

#include "linalg/fp_kernel.hpp"

namespace kvt::lin {

namespace {

void require_same_mode(const Matrix& a, const Matrix& b, const char* op) {
    if (!(a.mode() == b.mode()))
        throw std::invalid_argument(std::string(op) + ": mixed scalar modes " +
                                    to_string(a.mode()) + " vs " +
                                    to_string(b.mode()));
}

// The packed kernels want residues in uint32 lanes with headroom for a
// widening product, so they only engage for small moduli and shapes large
// enough to amortize the packing.
constexpr std::uint64_t kPackedModulusBound = 46341;
constexpr std::size_t kPackedWorkThreshold = 32768;

bool use_packed_kernel(const Matrix& a, const Matrix& b) {
    const std::uint64_t p = a.mode().p;
    if (p == 0 || p >= kPackedModulusBound) return false;
    return a.rows() * a.cols() * b.cols() >= kPackedWorkThreshold;
}

Matrix mat_mul_packed(const Matrix& a, const Matrix& b) {
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    const std::uint64_t p = a.mode().p;
    std::vector<std::uint32_t> pa(m * k), pb(k * n), pc(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t t = 0; t < k; ++t)
            pa[i * k + t] = static_cast<std::uint32_t>(a.at(i, t).residue());
    for (std::size_t t = 0; t < k; ++t)
        for (std::size_t j = 0; j < n; ++j)
            pb[t * n + j] = static_cast<std::uint32_t>(b.at(t, j).residue());
    select_fp_kernel()(pa.data(), pb.data(), pc.data(), m, k, n, p);
    Matrix c(m, n, a.mode());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            c.at(i, j) = ExactScalar::from_residue(pc[i * n + j], p);
    return c;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, ScalarMode mode)
    : rows_(rows), cols_(cols), mode_(mode),
      e_(rows * cols, ExactScalar::zero(mode)) {}

Matrix Matrix::identity(std::size_t n, ScalarMode mode) {
    Matrix m(n, n, mode);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = ExactScalar::one(mode);
    return m;
}

bool Matrix::operator==(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_ || !(mode_ == o.mode_))
        return false;
    return e_ == o.e_;
}

bool Matrix::is_identity() const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) {
            const bool diag = (i == j);
            if (diag ? !at(i, j).is_one() : !at(i, j).is_zero()) return false;
        }
    return true;
}

std::string Matrix::str() const {
    std::ostringstream os;
    os << rows_ << "x" << cols_ << " over " << to_string(mode_) << "\n";
    for (std::size_t i = 0; i < rows_; ++i) {
        os << "[";
        for (std::size_t j = 0; j < cols_; ++j) {
            if (j) os << ", ";
            os << at(i, j).str();
        }
        os << "]\n";
    }
    return os.str();
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
    require_same_mode(a, b, "mat_mul");
    if (a.cols() != b.rows())
        throw std::invalid_argument("mat_mul: inner dimensions " +
                                    std::to_string(a.cols()) + " vs " +
                                    std::to_string(b.rows()));
    if (use_packed_kernel(a, b)) return mat_mul_packed(a, b);
    Matrix c(a.rows(), b.cols(), a.mode());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t t = 0; t < a.cols(); ++t) {
            const ExactScalar& av = a.at(i, t);
            if (av.is_zero()) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                const ExactScalar& bv = b.at(t, j);
                if (bv.is_zero()) continue;
                c.at(i, j) += av * bv;
            }
        }
    return c;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    require_same_mode(a, b, "kron");
    // Left factor is the major index: entry ((i*b.rows+k), (j*b.cols+l)).
    Matrix c(a.rows() * b.rows(), a.cols() * b.cols(), a.mode());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const ExactScalar& av = a.at(i, j);
            if (av.is_zero()) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    c.at(i * b.rows() + k, j * b.cols() + l) = av * b.at(k, l);
        }
    return c;
}

Matrix direct_sum(const Matrix& a, const Matrix& b) {
    require_same_mode(a, b, "direct_sum");
    Matrix c(a.rows() + b.rows(), a.cols() + b.cols(), a.mode());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c.at(i, j) = a.at(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j)
            c.at(a.rows() + i, a.cols() + j) = b.at(i, j);
    return c;
}

ExactScalar mat_trace(const Matrix& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("mat_trace: matrix is " +
                                    std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()));
    ExactScalar t = ExactScalar::zero(a.mode());
    for (std::size_t i = 0; i < a.rows(); ++i) t += a.at(i, i);
    return t;
}

Matrix permutation_matrix(const std::vector<std::size_t>& perm,
                          ScalarMode mode) {
    const std::size_t n = perm.size();
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (perm[i] >= n || seen[perm[i]])
            throw std::invalid_argument(
                "permutation_matrix: not a permutation at index " +
                std::to_string(i));
        seen[perm[i]] = true;
    }
    Matrix m(n, n, mode);
    for (std::size_t i = 0; i < n; ++i)
        m.at(perm[i], i) = ExactScalar::one(mode);
    return m;
}

Matrix transpose(const Matrix& a) {
    Matrix c(a.cols(), a.rows(), a.mode());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c.at(j, i) = a.at(i, j);
    return c;
}

}  // namespace kvt::lin
