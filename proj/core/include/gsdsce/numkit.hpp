#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "gsdsce/error.hpp"

/// Small dense complex kernels used by the estimators. Everything here is a
/// pure function of its arguments.
namespace gsdsce::numkit {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// Dense row-major complex matrix.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    /// Throws ErrorKind::dimension if entries.size() != rows * cols or an
    /// entry is not finite.
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    /// Builds a matrix whose j-th column is columns[j]. All columns must have
    /// equal length.
    static ComplexMatrix from_columns(std::span<const CVector> columns);
    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const cplx> entries() const noexcept { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

/// Polynomial with coefficients ordered from the highest-degree term down to
/// the constant term.
class ComplexPolynomial {
public:
    /// Leading coefficients at or below this fraction of the largest
    /// coefficient magnitude are treated as zero.
    static constexpr double kLeadingZeroThreshold = 1e-14;

    /// Throws ErrorKind::degenerate_polynomial for fewer than two
    /// coefficients or a vanishing leading coefficient.
    explicit ComplexPolynomial(CVector coefficients);

    /// Expands prod_k (z - roots[k]) into a monic polynomial.
    static ComplexPolynomial from_roots(std::span<const cplx> roots);

    std::size_t degree() const noexcept { return coeffs_.size() - 1; }
    std::span<const cplx> coefficients() const noexcept { return coeffs_; }

    cplx operator()(cplx z) const noexcept;
    double max_coefficient_magnitude() const noexcept;

private:
    CVector coeffs_;
};

/// Raised by poly_roots when the simultaneous iteration fails the residual
/// check; carries the last iterate.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, CVector best_iterate, int iterations)
        : Error(ErrorKind::convergence, what),
          best_(std::move(best_iterate)),
          iterations_(iterations) {}

    const CVector& best_iterate() const noexcept { return best_; }
    int iterations() const noexcept { return iterations_; }

private:
    CVector best_;
    int iterations_;
};

/// Raised by solve_least_squares when the triangular factor loses rank.
class RankError : public Error {
public:
    RankError(const std::string& what, std::size_t effective_rank)
        : Error(ErrorKind::rank_deficient, what), rank_(effective_rank) {}

    std::size_t effective_rank() const noexcept { return rank_; }

private:
    std::size_t rank_;
};

struct RootOptions {
    double update_tolerance = 1e-13;
    int max_iterations = 500;
    double residual_tolerance = 1e-9;
};

/// Determinant by LU factorization with partial pivoting.
cplx det_complex(const ComplexMatrix& m);

/// All roots of p (with multiplicity) by Durand-Kerner iteration on the monic
/// normalization, seeded with (0.4 + 0.9i)^k.
CVector poly_roots(const ComplexPolynomial& p, const RootOptions& opts = {});

/// Relative threshold on |R_ii| / max |R_ii| below which a least-squares
/// system is declared rank deficient.
inline constexpr double kRankThreshold = 1e-10;

/// Minimizes ||a x - b||_2 with Householder QR. Requires a.rows() >= a.cols().
CVector solve_least_squares(const ComplexMatrix& a, std::span<const cplx> b);

inline constexpr double kDefaultEpsGeo = 1e-6;
inline constexpr double kDefaultEpsZero = 1e-9;

/// Non-zero geometric sequence test: every term exceeds eps_zero * max|seq|
/// and every consecutive ratio is within eps_geo * |q0| of q0 = seq[1]/seq[0].
bool is_geometric(std::span<const cplx> seq, double eps_geo = kDefaultEpsGeo,
                  double eps_zero = kDefaultEpsZero);

/// Largest |q_k - q0| / |q0| over consecutive ratios; +inf when a term is
/// zero. Used for detection diagnostics.
double ratio_dispersion(std::span<const cplx> seq);

}  // namespace gsdsce::numkit
