#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qproc {

using Cplx = std::complex<double>;
using Mat  = Eigen::MatrixXcd;
using Cvec = Eigen::VectorXcd;
using Rvec = Eigen::VectorXd;

// Global numeric tolerances. Everything handled here is O(1) in magnitude and
// dimensions stay at desk scale (<= 64), so fixed absolute tolerances suffice.
inline constexpr double kHermTol = 1e-10;  // max entrywise |m - m^dag|
inline constexpr double kPsdTol  = 1e-9;   // eigenvalue nonnegativity floor
inline constexpr double kCptpTol = 1e-8;   // Kraus closure / trace preservation
inline constexpr double kProbTol = 1e-9;   // probability normalization

// Raised when a value fails one of its type invariants. The message names the
// violated invariant so callers (and the CLI) can report it directly.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/*
 * Index convention, fixed once for the whole library:
 * subsystems are ordered, and the composite index is subsystem-major
 * lexicographic. For dims (d0, d1, ...), the flat index of (i0, i1, ...) is
 *   i0 * (d1*d2*...) + i1 * (d2*...) + ...
 * Kronecker products are a-major, i.e. tensor(a, b) puts a's index first.
 */

// Ordered subsystem dimensions with optional labels. The product must equal
// the dimension of the matrix it annotates.
struct DimFactorization {
  std::vector<int> dims;
  std::vector<std::string> labels;  // empty, or one label per subsystem

  DimFactorization() = default;
  explicit DimFactorization(std::vector<int> d, std::vector<std::string> l = {});

  int total() const;
  int count() const { return static_cast<int>(dims.size()); }
};

Mat identity(int d);
Mat zeros(int rows, int cols);
// |v><v|
Mat projector(const Cvec& v);
// Computational basis state |k> in dimension d.
Cvec basis_ket(int d, int k);

Mat tensor(const Mat& a, const Mat& b);
Cvec tensor_vec(const Cvec& a, const Cvec& b);

// Trace out every subsystem not listed in `keep`; kept subsystems remain in
// their original relative order.
Mat partial_trace(const Mat& m, const std::vector<int>& dims,
                  const std::vector<int>& keep);

// Transpose the indices of one tensor factor. Involutive.
Mat partial_transpose(const Mat& m, const std::vector<int>& dims, int subsystem);

// Reorder tensor factors: slot k of the result holds old subsystem perm[k].
Mat permute_systems(const Mat& m, const std::vector<int>& dims,
                    const std::vector<int>& perm);
Cvec permute_systems_vec(const Cvec& v, const std::vector<int>& dims,
                         const std::vector<int>& perm);

struct HermitianEig {
  Rvec values;  // ascending
  Mat vectors;  // columns, matching order
};

// Eigendecomposition of a Hermitian matrix. Throws ValidationError if the
// input deviates from Hermiticity by more than kHermTol entrywise.
HermitianEig eig_hermitian(const Mat& m);

double herm_deviation(const Mat& m);
bool is_hermitian(const Mat& m, double tol = kHermTol);
double min_eigenvalue(const Mat& m);
bool is_psd(const Mat& m, double tol = kPsdTol);

// Hermitian square root of a PSD matrix (negative ripples clipped at zero).
Mat psd_sqrt(const Mat& m);
// Moore-Penrose-style inverse square root on the support of a PSD matrix.
Mat psd_inv_sqrt(const Mat& m, double rank_tol = 1e-12);

}  // namespace qproc
