#include "gsdsce/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gsdsce::numkit {

namespace {

bool finite(cplx z) noexcept { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw Error(ErrorKind::dimension, "matrix entry count " + std::to_string(data_.size()) +
                                              " does not match " + std::to_string(rows_) + "x" +
                                              std::to_string(cols_));
    }
    if (!std::all_of(data_.begin(), data_.end(), finite)) {
        throw Error(ErrorKind::invalid_argument, "matrix entries must be finite");
    }
}

ComplexMatrix ComplexMatrix::from_columns(std::span<const CVector> columns) {
    const std::size_t cols = columns.size();
    const std::size_t rows = cols == 0 ? 0 : columns.front().size();
    ComplexMatrix m(rows, cols);
    for (std::size_t c = 0; c < cols; ++c) {
        if (columns[c].size() != rows) {
            throw Error(ErrorKind::dimension, "columns must have equal length");
        }
        for (std::size_t r = 0; r < rows; ++r) m(r, c) = columns[c][r];
    }
    return m;
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexPolynomial::ComplexPolynomial(CVector coefficients) : coeffs_(std::move(coefficients)) {
    if (coeffs_.size() < 2) {
        throw Error(ErrorKind::degenerate_polynomial, "polynomial degree must be at least 1");
    }
    const double largest = max_coefficient_magnitude();
    if (!(std::abs(coeffs_.front()) > kLeadingZeroThreshold * largest)) {
        throw Error(ErrorKind::degenerate_polynomial, "leading coefficient is numerically zero");
    }
}

ComplexPolynomial ComplexPolynomial::from_roots(std::span<const cplx> roots) {
    CVector c{1.0};
    for (const cplx root : roots) {
        CVector next(c.size() + 1);
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k] += c[k];
            next[k + 1] -= c[k] * root;
        }
        c = std::move(next);
    }
    return ComplexPolynomial(std::move(c));
}

cplx ComplexPolynomial::operator()(cplx z) const noexcept {
    cplx acc = 0.0;
    for (const cplx c : coeffs_) acc = acc * z + c;
    return acc;
}

double ComplexPolynomial::max_coefficient_magnitude() const noexcept {
    double m = 0.0;
    for (const cplx c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

cplx det_complex(const ComplexMatrix& m) {
    if (!m.is_square() || m.rows() == 0) {
        throw Error(ErrorKind::dimension, "determinant requires a non-empty square matrix, got " +
                                              std::to_string(m.rows()) + "x" +
                                              std::to_string(m.cols()));
    }
    const std::size_t n = m.rows();
    ComplexMatrix lu = m;
    cplx det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        double best = std::abs(lu(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            const double mag = std::abs(lu(r, k));
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (pivot != k) {
            for (std::size_t c = k; c < n; ++c) std::swap(lu(k, c), lu(pivot, c));
            det = -det;
        }
        const cplx diag = lu(k, k);
        det *= diag;
        for (std::size_t r = k + 1; r < n; ++r) {
            const cplx factor = lu(r, k) / diag;
            if (factor == cplx{}) continue;
            for (std::size_t c = k + 1; c < n; ++c) lu(r, c) -= factor * lu(k, c);
        }
    }
    return det;
}

CVector poly_roots(const ComplexPolynomial& p, const RootOptions& opts) {
    const auto coeffs = p.coefficients();
    const std::size_t n = p.degree();
    CVector monic(coeffs.begin(), coeffs.end());
    const cplx lead = monic.front();
    for (cplx& c : monic) c /= lead;

    if (n == 1) return {-monic[1]};

    auto eval = [&](cplx z) {
        cplx acc = 0.0;
        for (const cplx c : monic) acc = acc * z + c;
        return acc;
    };

    CVector z(n);
    const cplx seed{0.4, 0.9};
    cplx power = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = power;
        power *= seed;
    }

    int iterations = 0;
    for (; iterations < opts.max_iterations; ++iterations) {
        double max_update = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cplx denom = 1.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) denom *= z[i] - z[j];
            }
            if (denom == cplx{}) {
                // Coincident iterates: nudge off the collision.
                z[i] += cplx{1e-8, 1e-8};
                max_update = std::numeric_limits<double>::infinity();
                continue;
            }
            const cplx step = eval(z[i]) / denom;
            z[i] -= step;
            max_update = std::max(max_update, std::abs(step));
        }
        if (max_update < opts.update_tolerance) {
            ++iterations;
            break;
        }
    }

    const double scale = p.max_coefficient_magnitude();
    for (const cplx root : z) {
        const double residual = std::abs(p(root)) / scale;
        if (!(residual < opts.residual_tolerance)) {
            throw ConvergenceError("root iteration did not converge after " +
                                       std::to_string(iterations) + " iterations (residual " +
                                       std::to_string(residual) + ")",
                                   z, iterations);
        }
    }
    return z;
}

CVector solve_least_squares(const ComplexMatrix& a, std::span<const cplx> b) {
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    if (b.size() != rows) {
        throw Error(ErrorKind::dimension, "right-hand side length " + std::to_string(b.size()) +
                                              " does not match " + std::to_string(rows) + " rows");
    }
    if (cols == 0 || rows < cols) {
        throw Error(ErrorKind::dimension, "least squares needs rows >= cols >= 1, got " +
                                              std::to_string(rows) + "x" + std::to_string(cols));
    }

    ComplexMatrix qr = a;
    CVector rhs(b.begin(), b.end());
    CVector diag(cols);
    CVector v(rows);

    for (std::size_t k = 0; k < cols; ++k) {
        double norm_sq = 0.0;
        for (std::size_t r = k; r < rows; ++r) norm_sq += std::norm(qr(r, k));
        const double norm = std::sqrt(norm_sq);
        if (norm == 0.0) {
            diag[k] = 0.0;
            continue;
        }
        const cplx x0 = qr(k, k);
        const cplx phase = x0 == cplx{} ? cplx{1.0} : x0 / std::abs(x0);
        const cplx alpha = -phase * norm;

        double v_norm_sq = 0.0;
        for (std::size_t r = k; r < rows; ++r) {
            v[r] = qr(r, k);
            if (r == k) v[r] -= alpha;
            v_norm_sq += std::norm(v[r]);
        }
        diag[k] = alpha;
        if (v_norm_sq == 0.0) continue;

        // Apply H = I - 2 v v^H / (v^H v) to the trailing columns and rhs.
        for (std::size_t c = k + 1; c < cols; ++c) {
            cplx dot = 0.0;
            for (std::size_t r = k; r < rows; ++r) dot += std::conj(v[r]) * qr(r, c);
            const cplx f = 2.0 * dot / v_norm_sq;
            for (std::size_t r = k; r < rows; ++r) qr(r, c) -= f * v[r];
        }
        cplx dot = 0.0;
        for (std::size_t r = k; r < rows; ++r) dot += std::conj(v[r]) * rhs[r];
        const cplx f = 2.0 * dot / v_norm_sq;
        for (std::size_t r = k; r < rows; ++r) rhs[r] -= f * v[r];
    }

    double largest = 0.0;
    for (const cplx d : diag) largest = std::max(largest, std::abs(d));
    std::size_t rank = 0;
    for (const cplx d : diag) {
        if (std::abs(d) > kRankThreshold * largest) ++rank;
    }
    if (rank < cols) {
        throw RankError("least-squares system is rank deficient (effective rank " +
                            std::to_string(rank) + " of " + std::to_string(cols) + ")",
                        rank);
    }

    CVector x(cols);
    for (std::size_t i = cols; i-- > 0;) {
        cplx acc = rhs[i];
        for (std::size_t c = i + 1; c < cols; ++c) acc -= qr(i, c) * x[c];
        x[i] = acc / diag[i];
    }
    return x;
}

bool is_geometric(std::span<const cplx> seq, double eps_geo, double eps_zero) {
    if (seq.size() < 3) {
        throw Error(ErrorKind::insufficient_samples,
                    "geometric test needs at least 3 terms, got " + std::to_string(seq.size()));
    }
    double largest = 0.0;
    for (const cplx s : seq) largest = std::max(largest, std::abs(s));
    if (!(largest > 0.0) || !std::isfinite(largest)) return false;
    for (const cplx s : seq) {
        if (!(std::abs(s) > eps_zero * largest)) return false;
    }
    const cplx q0 = seq[1] / seq[0];
    const double bound = eps_geo * std::abs(q0);
    for (std::size_t k = 1; k + 1 < seq.size(); ++k) {
        const cplx q = seq[k + 1] / seq[k];
        if (!(std::abs(q - q0) <= bound)) return false;
    }
    return true;
}

double ratio_dispersion(std::span<const cplx> seq) {
    if (seq.size() < 3) {
        throw Error(ErrorKind::insufficient_samples,
                    "ratio dispersion needs at least 3 terms, got " + std::to_string(seq.size()));
    }
    for (const cplx s : seq) {
        if (s == cplx{}) return std::numeric_limits<double>::infinity();
    }
    const cplx q0 = seq[1] / seq[0];
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < seq.size(); ++k) {
        worst = std::max(worst, std::abs(seq[k + 1] / seq[k] - q0) / std::abs(q0));
    }
    return worst;
}

}  // namespace gsdsce::numkit
