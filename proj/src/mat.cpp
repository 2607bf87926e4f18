#include "qproc/mat.hpp"

#include <algorithm>
#include <numeric>

namespace qproc {

DimFactorization::DimFactorization(std::vector<int> d, std::vector<std::string> l)
    : dims(std::move(d)), labels(std::move(l)) {
  for (int x : dims) {
    if (x < 1) throw ValidationError("DimFactorization: all dimensions must be >= 1");
  }
  if (!labels.empty() && labels.size() != dims.size()) {
    throw ValidationError("DimFactorization: label count must match dimension count");
  }
}

int DimFactorization::total() const {
  int t = 1;
  for (int x : dims) t *= x;
  return t;
}

Mat identity(int d) { return Mat::Identity(d, d); }

Mat zeros(int rows, int cols) { return Mat::Zero(rows, cols); }

Mat projector(const Cvec& v) { return v * v.adjoint(); }

Cvec basis_ket(int d, int k) {
  if (k < 0 || k >= d) throw ValidationError("basis_ket: index out of range");
  Cvec v = Cvec::Zero(d);
  v(k) = 1.0;
  return v;
}

Mat tensor(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Cvec tensor_vec(const Cvec& a, const Cvec& b) {
  Cvec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

namespace {

void check_dims(const Mat& m, const std::vector<int>& dims) {
  int t = 1;
  for (int d : dims) {
    if (d < 1) throw ValidationError("subsystem dimensions must be >= 1");
    t *= d;
  }
  if (m.rows() != m.cols() || m.rows() != t) {
    throw ValidationError("dimension mismatch: matrix size does not factor as given dims");
  }
}

// Decompose a flat index into per-subsystem digits (subsystem-major).
void unflatten(int idx, const std::vector<int>& dims, std::vector<int>& out) {
  const int n = static_cast<int>(dims.size());
  out.resize(n);
  for (int k = n - 1; k >= 0; --k) {
    out[k] = idx % dims[k];
    idx /= dims[k];
  }
}

int flatten(const std::vector<int>& digits, const std::vector<int>& dims) {
  int idx = 0;
  for (size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + digits[k];
  return idx;
}

}  // namespace

Mat partial_trace(const Mat& m, const std::vector<int>& dims,
                  const std::vector<int>& keep) {
  check_dims(m, dims);
  const int n = static_cast<int>(dims.size());
  std::vector<bool> kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n) throw ValidationError("partial_trace: subsystem index out of range");
    kept[k] = true;
  }
  std::vector<int> keep_dims, drop_dims, keep_idx, drop_idx;
  for (int k = 0; k < n; ++k) {
    (kept[k] ? keep_dims : drop_dims).push_back(dims[k]);
    (kept[k] ? keep_idx : drop_idx).push_back(k);
  }
  const int dk = std::accumulate(keep_dims.begin(), keep_dims.end(), 1, std::multiplies<>());
  const int dd = std::accumulate(drop_dims.begin(), drop_dims.end(), 1, std::multiplies<>());

  Mat out = Mat::Zero(dk, dk);
  std::vector<int> row(n), col(n), a(keep_dims.size()), b(keep_dims.size()), e(drop_dims.size());
  for (int i = 0; i < dk; ++i) {
    unflatten(i, keep_dims, a);
    for (int j = 0; j < dk; ++j) {
      unflatten(j, keep_dims, b);
      Cplx acc = 0.0;
      for (int t = 0; t < dd; ++t) {
        unflatten(t, drop_dims, e);
        for (size_t k = 0; k < keep_idx.size(); ++k) {
          row[keep_idx[k]] = a[k];
          col[keep_idx[k]] = b[k];
        }
        for (size_t k = 0; k < drop_idx.size(); ++k) {
          row[drop_idx[k]] = e[k];
          col[drop_idx[k]] = e[k];
        }
        acc += m(flatten(row, dims), flatten(col, dims));
      }
      out(i, j) = acc;
    }
  }
  return out;
}

Mat partial_transpose(const Mat& m, const std::vector<int>& dims, int subsystem) {
  check_dims(m, dims);
  const int n = static_cast<int>(dims.size());
  if (subsystem < 0 || subsystem >= n)
    throw ValidationError("partial_transpose: subsystem index out of range");
  const int total = m.rows();
  Mat out(total, total);
  std::vector<int> row(n), col(n);
  for (int i = 0; i < total; ++i) {
    unflatten(i, dims, row);
    for (int j = 0; j < total; ++j) {
      unflatten(j, dims, col);
      std::vector<int> r = row, c = col;
      std::swap(r[subsystem], c[subsystem]);
      out(flatten(r, dims), flatten(c, dims)) = m(i, j);
    }
  }
  return out;
}

Mat permute_systems(const Mat& m, const std::vector<int>& dims,
                    const std::vector<int>& perm) {
  check_dims(m, dims);
  const int n = static_cast<int>(dims.size());
  if (static_cast<int>(perm.size()) != n)
    throw ValidationError("permute_systems: permutation size mismatch");
  std::vector<bool> seen(n, false);
  std::vector<int> new_dims(n);
  for (int k = 0; k < n; ++k) {
    if (perm[k] < 0 || perm[k] >= n || seen[perm[k]])
      throw ValidationError("permute_systems: not a permutation");
    seen[perm[k]] = true;
    new_dims[k] = dims[perm[k]];
  }
  const int total = m.rows();
  // map[old flat index] -> new flat index
  std::vector<int> map(total);
  std::vector<int> digits(n), nd(n);
  for (int i = 0; i < total; ++i) {
    unflatten(i, dims, digits);
    for (int k = 0; k < n; ++k) nd[k] = digits[perm[k]];
    map[i] = flatten(nd, new_dims);
  }
  Mat out(total, total);
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j) out(map[i], map[j]) = m(i, j);
  return out;
}

Cvec permute_systems_vec(const Cvec& v, const std::vector<int>& dims,
                         const std::vector<int>& perm) {
  const int n = static_cast<int>(dims.size());
  int t = 1;
  for (int d : dims) t *= d;
  if (v.size() != t) throw ValidationError("permute_systems_vec: dimension mismatch");
  std::vector<int> new_dims(n);
  for (int k = 0; k < n; ++k) new_dims[k] = dims[perm[k]];
  Cvec out(t);
  std::vector<int> digits(n), nd(n);
  for (int i = 0; i < t; ++i) {
    unflatten(i, dims, digits);
    for (int k = 0; k < n; ++k) nd[k] = digits[perm[k]];
    out(flatten(nd, new_dims)) = v(i);
  }
  return out;
}

double herm_deviation(const Mat& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Mat& m, double tol) {
  return m.rows() == m.cols() && herm_deviation(m) <= tol;
}

HermitianEig eig_hermitian(const Mat& m) {
  if (m.rows() != m.cols()) throw ValidationError("eig_hermitian: matrix must be square");
  if (!is_hermitian(m)) throw ValidationError("eig_hermitian: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> solver((m + m.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success)
    throw ValidationError("eig_hermitian: eigensolver failed to converge");
  return HermitianEig{solver.eigenvalues(), solver.eigenvectors()};
}

double min_eigenvalue(const Mat& m) { return eig_hermitian(m).values(0); }

bool is_psd(const Mat& m, double tol) {
  return is_hermitian(m) && min_eigenvalue(m) >= -tol;
}

Mat psd_sqrt(const Mat& m) {
  HermitianEig e = eig_hermitian(m);
  Rvec s = e.values.cwiseMax(0.0).cwiseSqrt();
  return e.vectors * s.asDiagonal() * e.vectors.adjoint();
}

Mat psd_inv_sqrt(const Mat& m, double rank_tol) {
  HermitianEig e = eig_hermitian(m);
  Rvec s = Rvec::Zero(e.values.size());
  const double cutoff = rank_tol * std::max(1.0, e.values.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (e.values(i) > cutoff) s(i) = 1.0 / std::sqrt(e.values(i));
  }
  return e.vectors * s.asDiagonal() * e.vectors.adjoint();
}

}  // namespace qproc
