#include "biloc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace biloc {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cx> entries)
    : rows_(rows), cols_(cols), e_(std::move(entries)) {
    if (e_.size() != rows_ * cols_) {
        throw std::invalid_argument("ComplexMatrix: entry count does not match rows*cols");
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::zero(std::size_t rows, std::size_t cols) {
    return ComplexMatrix(rows, cols);
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("matrix add: dimension mismatch");
    }
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += other.e_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("matrix subtract: dimension mismatch");
    }
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] -= other.e_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cx scalar) {
    for (auto& v : e_) v *= scalar;
    return *this;
}

bool ComplexMatrix::is_hermitian(double tol) const {
    if (rows_ != cols_) return false;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = r; c < cols_; ++c) {
            if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) return false;
        }
    }
    return true;
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("max_abs_diff: dimension mismatch");
    }
    double m = 0.0;
    for (std::size_t i = 0; i < e_.size(); ++i) {
        m = std::max(m, std::abs(e_[i] - other.e_[i]));
    }
    return m;
}

PureState::PureState(std::vector<cx> amplitudes) : amp_(std::move(amplitudes)) {
    if (amp_.empty()) throw std::invalid_argument("PureState: empty amplitude vector");
    double n2 = 0.0;
    for (const auto& a : amp_) n2 += std::norm(a);
    if (std::abs(n2 - 1.0) > 1e-12) {
        throw std::invalid_argument("PureState: norm^2 = " + std::to_string(n2) +
                                    " deviates from 1 beyond 1e-12");
    }
}

cx PureState::inner(const PureState& other) const {
    if (dim() != other.dim()) throw std::invalid_argument("inner: dimension mismatch");
    cx s = 0.0;
    for (std::size_t i = 0; i < amp_.size(); ++i) s += std::conj(amp_[i]) * other.amp_[i];
    return s;
}

ComplexMatrix PureState::projector() const {
    ComplexMatrix m(dim(), dim());
    for (std::size_t r = 0; r < dim(); ++r) {
        for (std::size_t c = 0; c < dim(); ++c) {
            m(r, c) = amp_[r] * std::conj(amp_[c]);
        }
    }
    return m;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cx arv = a(r, k);
            if (arv == cx{}) continue;
            for (std::size_t c = 0; c < b.cols(); ++c) {
                out(r, c) += arv * b(k, c);
            }
        }
    }
    return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar) {
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const cx av = a(ar, ac);
            if (av == cx{}) continue;
            for (std::size_t br = 0; br < b.rows(); ++br) {
                for (std::size_t bc = 0; bc < b.cols(); ++bc) {
                    out(ar * b.rows() + br, ac * b.cols() + bc) = av * b(br, bc);
                }
            }
        }
    }
    return out;
}

PureState kron(const PureState& a, const PureState& b) {
    std::vector<cx> amp(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < b.dim(); ++j) {
            amp[i * b.dim() + j] = a[i] * b[j];
        }
    }
    return PureState(std::move(amp));
}

ComplexMatrix dagger(const ComplexMatrix& a) {
    ComplexMatrix out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            out(c, r) = std::conj(a(r, c));
        }
    }
    return out;
}

cx trace(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("trace: matrix not square");
    cx s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, i);
    return s;
}

cx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols()) {
        throw std::invalid_argument("trace_of_product: dimension mismatch");
    }
    cx s = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            s += a(r, c) * b(c, r);
        }
    }
    return s;
}

double expectation(const ComplexMatrix& op, const ComplexMatrix& rho) {
    const cx v = trace_of_product(op, rho);
    if (std::abs(v.imag()) > 1e-10) {
        throw std::invalid_argument("expectation: imaginary residue " +
                                    std::to_string(v.imag()) +
                                    " exceeds 1e-10 (operator not Hermitian?)");
    }
    return v.real();
}

namespace {

std::vector<std::size_t> index_strides(const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> strides(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;) {
        strides[i - 1] = strides[i] * dims[i];
    }
    return strides;
}

// Map a flat input index to the flat output index under the permutation.
std::vector<std::size_t> permutation_map(const std::vector<std::size_t>& dims,
                                         const std::vector<std::size_t>& perm) {
    const std::size_t n = dims.size();
    if (perm.size() != n) throw std::invalid_argument("permute_subsystems: perm size mismatch");
    std::vector<bool> seen(n, false);
    for (std::size_t p : perm) {
        if (p >= n || seen[p]) throw std::invalid_argument("permute_subsystems: perm not a bijection");
        seen[p] = true;
    }
    std::size_t total = 1;
    for (std::size_t d : dims) {
        if (d == 0) throw std::invalid_argument("permute_subsystems: zero dimension");
        total *= d;
    }
    std::vector<std::size_t> out_dims(n);
    for (std::size_t k = 0; k < n; ++k) out_dims[k] = dims[perm[k]];
    const auto in_strides = index_strides(dims);
    const auto out_strides = index_strides(out_dims);

    std::vector<std::size_t> map(total);
    std::vector<std::size_t> digits(n);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i;
        for (std::size_t s = 0; s < n; ++s) {
            digits[s] = rem / in_strides[s];
            rem %= in_strides[s];
        }
        std::size_t j = 0;
        for (std::size_t k = 0; k < n; ++k) j += digits[perm[k]] * out_strides[k];
        map[i] = j;
    }
    return map;
}

} // namespace

ComplexMatrix permute_subsystems(const ComplexMatrix& m,
                                 const std::vector<std::size_t>& dims,
                                 const std::vector<std::size_t>& perm) {
    std::size_t total = 1;
    for (std::size_t d : dims) total *= d;
    if (m.rows() != total || m.cols() != total) {
        throw std::invalid_argument("permute_subsystems: dims product does not match matrix size");
    }
    const auto map = permutation_map(dims, perm);
    ComplexMatrix out(total, total);
    for (std::size_t r = 0; r < total; ++r) {
        for (std::size_t c = 0; c < total; ++c) {
            out(map[r], map[c]) = m(r, c);
        }
    }
    return out;
}

PureState permute_subsystems(const PureState& s,
                             const std::vector<std::size_t>& dims,
                             const std::vector<std::size_t>& perm) {
    std::size_t total = 1;
    for (std::size_t d : dims) total *= d;
    if (s.dim() != total) {
        throw std::invalid_argument("permute_subsystems: dims product does not match state size");
    }
    const auto map = permutation_map(dims, perm);
    std::vector<cx> amp(total);
    for (std::size_t i = 0; i < total; ++i) amp[map[i]] = s[i];
    return PureState(std::move(amp));
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("hermitian_eigenvalues: not square");
    if (!a.is_hermitian(1e-9)) {
        throw std::invalid_argument("hermitian_eigenvalues: matrix not Hermitian");
    }
    const std::size_t n = a.rows();
    ComplexMatrix w = a;

    // Cyclic Jacobi with complex plane rotations; terminates when the
    // off-diagonal mass is negligible relative to the matrix scale.
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(w(i, i)));
    scale = std::max(scale, 1.0);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(w(p, q));
        }
        if (std::sqrt(off) < 1e-14 * scale) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cx apq = w(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double app = w(p, p).real();
                const double aqq = w(q, q).real();
                const cx phase = apq / std::abs(apq);
                const double theta = 0.5 * std::atan2(2.0 * std::abs(apq), app - aqq);
                const double c = std::cos(theta);
                const cx s = std::sin(theta) * std::conj(phase);

                // w <- J^H w J with J acting on rows/cols p,q
                for (std::size_t k = 0; k < n; ++k) {
                    const cx wkp = w(k, p), wkq = w(k, q);
                    w(k, p) = c * wkp + s * wkq;
                    w(k, q) = -std::conj(s) * wkp + c * wkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cx wpk = w(p, k), wqk = w(q, k);
                    w(p, k) = c * wpk + std::conj(s) * wqk;
                    w(q, k) = -s * wpk + c * wqk;
                }
            }
        }
    }

    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = w(i, i).real();
    std::sort(eig.begin(), eig.end());
    return eig;
}

double min_eigenvalue(const ComplexMatrix& a) {
    return hermitian_eigenvalues(a).front();
}

} // namespace biloc
