// Dense complex linear algebra for the 2-, 4- and 16-dimensional Hilbert
// spaces of the two-source three-node network. Row-major storage; the
// largest object handled is a 16x16 operator, so everything is plain
// dense arithmetic on std::complex<double>.

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace biloc {

using cx = std::complex<double>;

class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), e_(rows * cols) {}
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cx> entries);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix zero(std::size_t rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cx& operator()(std::size_t r, std::size_t c) { return e_[r * cols_ + c]; }
    const cx& operator()(std::size_t r, std::size_t c) const { return e_[r * cols_ + c]; }

    const std::vector<cx>& entries() const { return e_; }

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(cx scalar);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cx s) { return a *= s; }
    friend ComplexMatrix operator*(cx s, ComplexMatrix a) { return a *= s; }

    bool is_hermitian(double tol = 1e-10) const;
    double max_abs_diff(const ComplexMatrix& other) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cx> e_;
};

// Normalized state vector. Construction checks sum |amplitude|^2 = 1.
class PureState {
public:
    explicit PureState(std::vector<cx> amplitudes);
    PureState(std::initializer_list<cx> amplitudes)
        : PureState(std::vector<cx>(amplitudes)) {}

    std::size_t dim() const { return amp_.size(); }
    const cx& operator[](std::size_t i) const { return amp_[i]; }
    const std::vector<cx>& amplitudes() const { return amp_; }

    cx inner(const PureState& other) const;

    // |psi><psi|
    ComplexMatrix projector() const;

private:
    std::vector<cx> amp_;
};

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
PureState kron(const PureState& a, const PureState& b);
ComplexMatrix dagger(const ComplexMatrix& a);
cx trace(const ComplexMatrix& a);

// tr(a*b) without forming the product.
cx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b);

// Tr[op * rho] for a Hermitian op: the imaginary residue must stay below
// 1e-10 or the operator was not Hermitian and the call throws.
double expectation(const ComplexMatrix& op, const ComplexMatrix& rho);

// Reorders tensor factors. dims are the input subsystem dimensions in
// order; output subsystem k is input subsystem perm[k]. Applied to both
// the row and the column multi-index.
ComplexMatrix permute_subsystems(const ComplexMatrix& m,
                                 const std::vector<std::size_t>& dims,
                                 const std::vector<std::size_t>& perm);
PureState permute_subsystems(const PureState& s,
                             const std::vector<std::size_t>& dims,
                             const std::vector<std::size_t>& perm);

// Eigenvalues of a Hermitian matrix, ascending, via cyclic Jacobi.
// Enough for PSD checks and the small spectra the tests pin down.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a);
double min_eigenvalue(const ComplexMatrix& a);

} // namespace biloc
