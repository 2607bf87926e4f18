#include "qproc/quantum.hpp"

#include <cmath>
#include <random>

namespace qproc {

DensityMatrix::DensityMatrix(Mat m, DimFactorization d) : rho(std::move(m)), dims(std::move(d)) {
  if (rho.rows() != rho.cols() || rho.rows() != dims.total())
    throw ValidationError("DensityMatrix: dims product must equal matrix dimension");
  if (!is_hermitian(rho))
    throw ValidationError("DensityMatrix: matrix is not Hermitian");
  if (!is_psd(rho))
    throw ValidationError("DensityMatrix: matrix is not positive semidefinite");
  if (std::abs(rho.trace().real() - 1.0) > kProbTol || std::abs(rho.trace().imag()) > kProbTol)
    throw ValidationError("DensityMatrix: trace must equal 1");
}

Povm::Povm(std::vector<Mat> e, DimFactorization d) : effects(std::move(e)), dims(std::move(d)) {
  if (effects.empty()) throw ValidationError("Povm: needs at least one effect");
  const int dim = dims.total();
  Mat sum = Mat::Zero(dim, dim);
  for (const Mat& m : effects) {
    if (m.rows() != dim || m.cols() != dim)
      throw ValidationError("Povm: effect dimension mismatch");
    if (!is_hermitian(m)) throw ValidationError("Povm: effect is not Hermitian");
    if (!is_psd(m)) throw ValidationError("Povm: effect is not positive semidefinite");
    sum += m;
  }
  if ((sum - identity(dim)).cwiseAbs().maxCoeff() > kProbTol)
    throw ValidationError("Povm: effects must sum to the identity");
}

namespace {

// Column vector of J for a single Kraus operator: v[(i,o)] = K(o,i),
// in-major flattening.
Cvec choi_vec(const Mat& k) {
  const int din = static_cast<int>(k.cols());
  const int dout = static_cast<int>(k.rows());
  Cvec v(din * dout);
  for (int i = 0; i < din; ++i)
    for (int o = 0; o < dout; ++o) v(i * dout + o) = k(o, i);
  return v;
}

Mat choi_sum(const std::vector<Mat>& kraus, int din, int dout) {
  Mat j = Mat::Zero(din * dout, din * dout);
  for (const Mat& k : kraus) {
    Cvec v = choi_vec(k);
    j += v * v.adjoint();
  }
  return j;
}

}  // namespace

QuantumChannel::QuantumChannel(Mat j, int a0, int b0, int a1, int b1,
                               std::optional<std::vector<Mat>> k)
    : choi(std::move(j)), dA0(a0), dB0(b0), dA1(a1), dB1(b1), kraus(std::move(k)) {
  if (dA0 < 1 || dB0 < 1 || dA1 < 1 || dB1 < 1)
    throw ValidationError("QuantumChannel: dimensions must be >= 1");
  const int total = din() * dout();
  if (choi.rows() != total || choi.cols() != total)
    throw ValidationError("QuantumChannel: Choi size does not match dims");
  if (!is_psd(choi))
    throw ValidationError("QuantumChannel: Choi matrix is not positive semidefinite");
  // Trace preservation: Tr_out J = I_in.
  Mat tr_out = partial_trace(choi, choi_dims(), {0, 1});
  if ((tr_out - identity(din())).cwiseAbs().maxCoeff() > kCptpTol)
    throw ValidationError("QuantumChannel: partial trace over outputs must equal the input identity");
  if (kraus) {
    Mat closure = Mat::Zero(din(), din());
    for (const Mat& op : *kraus) {
      if (op.rows() != dout() || op.cols() != din())
        throw ValidationError("QuantumChannel: Kraus operator has wrong shape");
      closure += op.adjoint() * op;
    }
    if ((closure - identity(din())).cwiseAbs().maxCoeff() > kCptpTol)
      throw ValidationError("QuantumChannel: Kraus closure sum K^dag K != I");
    if ((choi_sum(*kraus, din(), dout()) - choi).cwiseAbs().maxCoeff() > kCptpTol)
      throw ValidationError("QuantumChannel: Kraus list does not reproduce the Choi matrix");
  }
}

namespace {

Mat unvec_kraus(const Cvec& v, int din, int dout) {
  Mat k(dout, din);
  for (int i = 0; i < din; ++i)
    for (int o = 0; o < dout; ++o) k(o, i) = v(i * dout + o);
  return k;
}

std::mt19937_64 rng_for(std::uint64_t seed) { return std::mt19937_64(seed); }

Mat random_gaussian(int rows, int cols, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = Cplx(n(gen), n(gen));
  return g;
}

}  // namespace

QuantumChannel kraus_to_choi(const std::vector<Mat>& kraus, int dA0, int dB0,
                             int dA1, int dB1) {
  const int din = dA0 * dB0;
  const int dout = dA1 * dB1;
  if (kraus.empty()) throw ValidationError("kraus_to_choi: empty Kraus list");
  Mat closure = Mat::Zero(din, din);
  for (const Mat& k : kraus) {
    if (k.rows() != dout || k.cols() != din)
      throw ValidationError("kraus_to_choi: Kraus operator has wrong shape");
    closure += k.adjoint() * k;
  }
  if ((closure - identity(din)).cwiseAbs().maxCoeff() > kCptpTol)
    throw ValidationError("kraus_to_choi: Kraus set is not trace preserving");
  return QuantumChannel(choi_sum(kraus, din, dout), dA0, dB0, dA1, dB1, kraus);
}

std::vector<Mat> choi_to_kraus(const QuantumChannel& c) {
  HermitianEig e = eig_hermitian(c.choi);
  const double cutoff = 1e-12 * std::max(1.0, e.values.cwiseAbs().maxCoeff());
  std::vector<Mat> kraus;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (e.values(i) > cutoff) {
      Cvec v = std::sqrt(e.values(i)) * e.vectors.col(i);
      kraus.push_back(unvec_kraus(v, c.din(), c.dout()));
    }
  }
  return kraus;
}

Mat apply_channel_via_choi(const QuantumChannel& c, const Mat& in) {
  // N(rho) = Tr_in[(rho^T (x) I_out) J]
  Mat op = tensor(in.transpose(), identity(c.dout())) * c.choi;
  std::vector<int> dims = {c.din(), c.dout()};
  return partial_trace(op, dims, {1});
}

Mat apply_channel_via_kraus(const QuantumChannel& c, const Mat& in) {
  std::vector<Mat> kraus = c.kraus ? *c.kraus : choi_to_kraus(c);
  Mat out = Mat::Zero(c.dout(), c.dout());
  for (const Mat& k : kraus) out += k * in * k.adjoint();
  return out;
}

DensityMatrix apply_channel(const QuantumChannel& c, const DensityMatrix& in) {
  if (in.dim() != c.din())
    throw ValidationError("apply_channel: input dimension mismatch");
  Mat out = apply_channel_via_choi(c, in.rho);
  // Clean numerical ripple before revalidating.
  out = (out + out.adjoint()) / 2.0;
  DimFactorization out_dims({c.dA1, c.dB1}, {"A1", "B1"});
  return DensityMatrix(out, out_dims);
}

Signalling is_signalling(const QuantumChannel& c) {
  Signalling s;
  {
    // A -> B: compare Tr_{A1} J against I^{A0} (x) sigma^{B0 B1}.
    Mat red = partial_trace(c.choi, c.choi_dims(), {0, 1, 3});  // [A0,B0,B1]
    Mat sigma = partial_trace(red, {c.dA0, c.dB0, c.dB1}, {1, 2}) / c.dA0;
    s.a_to_b = (red - tensor(identity(c.dA0), sigma)).cwiseAbs().maxCoeff() > kCptpTol;
  }
  {
    Mat red = partial_trace(c.choi, c.choi_dims(), {0, 1, 2});  // [A0,B0,A1]
    // Reorder to [B0, A0, A1] so the pattern check mirrors the A->B case.
    Mat perm = permute_systems(red, {c.dA0, c.dB0, c.dA1}, {1, 0, 2});
    Mat sigma = partial_trace(perm, {c.dB0, c.dA0, c.dA1}, {1, 2}) / c.dB0;
    s.b_to_a = (perm - tensor(identity(c.dB0), sigma)).cwiseAbs().maxCoeff() > kCptpTol;
  }
  return s;
}

QuantumChannel identity_channel(int dA, int dB) {
  std::vector<Mat> kraus = {identity(dA * dB)};
  return kraus_to_choi(kraus, dA, dB, dA, dB);
}

QuantumChannel replacement_channel(const DensityMatrix& rho, int dA0, int dB0) {
  if (rho.dims.count() != 2)
    throw ValidationError("replacement_channel: output state needs bipartite dims [A1,B1]");
  const int din = dA0 * dB0;
  // J = I_in (x) rho
  Mat j = tensor(identity(din), rho.rho);
  return QuantumChannel(std::move(j), dA0, dB0, rho.dims.dims[0], rho.dims.dims[1]);
}

QuantumChannel product_channel(const QuantumChannel& a, const QuantumChannel& b) {
  if (a.dB0 != 1 || a.dB1 != 1 || b.dA0 != 1 || b.dA1 != 1)
    throw ValidationError("product_channel: factors must be single-party channels");
  std::vector<Mat> ka = a.kraus ? *a.kraus : choi_to_kraus(a);
  std::vector<Mat> kb = b.kraus ? *b.kraus : choi_to_kraus(b);
  std::vector<Mat> kraus;
  kraus.reserve(ka.size() * kb.size());
  for (const Mat& x : ka)
    for (const Mat& y : kb) kraus.push_back(tensor(x, y));
  return kraus_to_choi(kraus, a.dA0, b.dB0, a.dA1, b.dB1);
}

QuantumChannel swap_channel() {
  Mat s = Mat::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s(j * 2 + i, i * 2 + j) = 1.0;
  return kraus_to_choi({s}, 2, 2, 2, 2);
}

QuantumChannel mix_channels(const std::vector<double>& weights,
                            const std::vector<QuantumChannel>& members) {
  if (weights.size() != members.size() || members.empty())
    throw ValidationError("mix_channels: weights and members must match and be nonempty");
  double total = 0.0;
  for (double w : weights) {
    if (w < -1e-12) throw ValidationError("mix_channels: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > kProbTol)
    throw ValidationError("mix_channels: weights must sum to 1");
  Mat j = Mat::Zero(members[0].choi.rows(), members[0].choi.cols());
  for (size_t i = 0; i < members.size(); ++i) {
    const QuantumChannel& m = members[i];
    if (m.dA0 != members[0].dA0 || m.dB0 != members[0].dB0 ||
        m.dA1 != members[0].dA1 || m.dB1 != members[0].dB1)
      throw ValidationError("mix_channels: member dims mismatch");
    j += weights[i] * m.choi;
  }
  return QuantumChannel(std::move(j), members[0].dA0, members[0].dB0,
                        members[0].dA1, members[0].dB1);
}

QuantumChannel compose_channels(const QuantumChannel& second, const QuantumChannel& first) {
  if (second.din() != first.dout())
    throw ValidationError("compose_channels: dimensions do not chain");
  std::vector<Mat> k1 = first.kraus ? *first.kraus : choi_to_kraus(first);
  std::vector<Mat> k2 = second.kraus ? *second.kraus : choi_to_kraus(second);
  std::vector<Mat> kraus;
  kraus.reserve(k1.size() * k2.size());
  for (const Mat& b : k2)
    for (const Mat& a : k1) kraus.push_back(b * a);
  return kraus_to_choi(kraus, first.dA0, first.dB0, second.dA1, second.dB1);
}

DensityMatrix random_state(const std::vector<int>& dims, std::uint64_t seed) {
  auto gen = rng_for(seed);
  int d = 1;
  for (int x : dims) d *= x;
  Mat g = random_gaussian(d, d, gen);
  Mat rho = g * g.adjoint();
  rho /= rho.trace();
  rho = (rho + rho.adjoint()) / 2.0;
  return DensityMatrix(rho, DimFactorization(dims));
}

Povm random_povm(const std::vector<int>& dims, int n_effects, std::uint64_t seed) {
  if (n_effects < 1) throw ValidationError("random_povm: need at least one effect");
  auto gen = rng_for(seed);
  int d = 1;
  for (int x : dims) d *= x;
  std::vector<Mat> raw;
  Mat total = Mat::Zero(d, d);
  for (int i = 0; i < n_effects; ++i) {
    Mat g = random_gaussian(d, d, gen);
    raw.push_back(g * g.adjoint());
    total += raw.back();
  }
  Mat w = psd_inv_sqrt(total);
  std::vector<Mat> effects;
  for (Mat& m : raw) {
    Mat e = w * m * w;
    effects.push_back((e + e.adjoint()) / 2.0);
  }
  return Povm(std::move(effects), DimFactorization(dims));
}

QuantumChannel random_channel(int dA0, int dB0, int dA1, int dB1, std::uint64_t seed) {
  auto gen = rng_for(seed);
  const int din = dA0 * dB0;
  const int dout = dA1 * dB1;
  const int denv = din;  // generic full-rank environment
  Mat g = random_gaussian(dout * denv, din, gen);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = Mat(qr.householderQ()).leftCols(din);  // isometry: q^dag q = I_din
  std::vector<Mat> kraus;
  for (int e = 0; e < denv; ++e) {
    Mat k(dout, din);
    for (int o = 0; o < dout; ++o) k.row(o) = q.row(o * denv + e);
    kraus.push_back(k);
  }
  return kraus_to_choi(kraus, dA0, dB0, dA1, dB1);
}

Cvec random_pure_state(int dim, std::uint64_t seed) {
  auto gen = rng_for(seed);
  Mat g = random_gaussian(dim, 1, gen);
  Cvec v = g.col(0);
  return v / v.norm();
}

Cvec phi_plus_ket(int d) {
  Cvec v = Cvec::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = 1.0;
  return v;
}

DensityMatrix phi_plus_state() {
  Cvec v = phi_plus_ket(2) / std::sqrt(2.0);
  return DensityMatrix(projector(v), DimFactorization({2, 2}, {"A", "B"}));
}

DensityMatrix werner_state(double p) {
  if (p < 0.0 || p > 1.0) throw ValidationError("werner_state: p must lie in [0,1]");
  Mat rho = p * phi_plus_state().rho + (1.0 - p) * identity(4) / 4.0;
  return DensityMatrix(rho, DimFactorization({2, 2}, {"A", "B"}));
}

}  // namespace qproc
