#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace nrd {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major, value semantics. Sizes in this library
/// stay tiny (dilation outputs reach a few dozen rows), so every operation
/// is a straightforward O(n^3)-or-less loop with no storage tricks.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols);
    /// Row-major entries; throws std::invalid_argument on size mismatch or
    /// non-finite values.
    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    static CMatrix identity(std::size_t n);
    static CMatrix zero(std::size_t rows, std::size_t cols);
    static CMatrix diag(const std::vector<cplx>& d);
    /// Nested-list literal, e.g. from_rows({{1, 2}, {3, 4}}).
    static CMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<cplx>& data() const noexcept { return data_; }

    CMatrix operator+(const CMatrix& o) const;
    CMatrix operator-(const CMatrix& o) const;
    CMatrix operator-() const;
    CMatrix operator*(const CMatrix& o) const;
    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);

    friend CMatrix operator*(cplx s, const CMatrix& m);
    friend CMatrix operator*(double s, const CMatrix& m);
    CMatrix operator*(cplx s) const;
    CMatrix operator*(double s) const;

    /// Conjugate transpose.
    CMatrix adjoint() const;
    cplx trace() const;
    double frobenius_norm() const;
    double max_abs() const;

    /// Copy of the r0..r0+nr, c0..c0+nc submatrix; bounds-checked.
    CMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    void set_block(std::size_t r0, std::size_t c0, const CMatrix& b);

    bool all_finite() const noexcept;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

/// Kronecker product a (x) b.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Block-diagonal sum diag(a, b).
CMatrix direct_sum(const CMatrix& a, const CMatrix& b);

/// Hermitian part (m + m*)/2.
CMatrix herm_part(const CMatrix& m);

/// Skew part divided by i: (m - m*)/(2i), again Hermitian.
CMatrix skew_part_over_i(const CMatrix& m);

bool is_hermitian(const CMatrix& m, double tol);

} // namespace nrd
