#include "qproc/witness.hpp"

#include <cmath>

namespace qproc {

namespace {

void check_pure(const Mat& state, const char* which) {
  if (!is_hermitian(state) || !is_psd(state))
    throw ValidationError(std::string(which) + ": input state must be Hermitian PSD");
  if (std::abs(state.trace().real() - 1.0) > kProbTol)
    throw ValidationError(std::string(which) + ": input state must have unit trace");
  double purity = (state * state).trace().real();
  if (std::abs(purity - 1.0) > 1e-8)
    throw ValidationError(std::string(which) + ": input state must be pure");
}

}  // namespace

double WitnessOperator::coefficient(int x1, int y1, int x0, int y0) const {
  const double delta = (((x1 ^ y1) == (x0 & y0)) ? 1.0 : 0.0);
  switch (normalization) {
    case WitnessNormalization::Paper316:
      return 3.0 / 16.0 - delta;
    case WitnessNormalization::Corrected316DeltaQuarter:
    default:
      return 3.0 / 16.0 - delta / 4.0;
  }
}

WitnessOperator build_chsh_povm_witness(const std::vector<Mat>& psi,
                                        const std::vector<Mat>& phi,
                                        WitnessNormalization normalization) {
  if (psi.size() != 2 || phi.size() != 2)
    throw ValidationError("build_chsh_povm_witness: need two input states per party");
  for (const Mat& s : psi) check_pure(s, "build_chsh_povm_witness(psi)");
  for (const Mat& s : phi) check_pure(s, "build_chsh_povm_witness(phi)");

  WitnessOperator w;
  w.psi = psi;
  w.phi = phi;
  w.normalization = normalization;
  w.dA = static_cast<int>(psi[0].rows());
  w.dB = static_cast<int>(phi[0].rows());
  for (int x1 = 0; x1 < 2; ++x1) {
    for (int y1 = 0; y1 < 2; ++y1) {
      Mat block = Mat::Zero(w.dA * w.dB, w.dA * w.dB);
      for (int x0 = 0; x0 < 2; ++x0)
        for (int y0 = 0; y0 < 2; ++y0)
          block += w.coefficient(x1, y1, x0, y0) * tensor(psi[x0], phi[y0]);
      w.blocks[x1 * 2 + y1] = std::move(block);
    }
  }
  return w;
}

WitnessOperator standard_chsh_povm_witness(WitnessNormalization normalization) {
  std::vector<Mat> psi = {projector(basis_ket(2, 0)), projector(basis_ket(2, 1))};
  std::vector<Mat> phi = psi;
  return build_chsh_povm_witness(psi, phi, normalization);
}

std::vector<Mat> qc_channel_effects(const QuantumChannel& qc) {
  const int din = qc.din();
  const int dout = qc.dout();
  // For N(rho) = sum_o Tr[Pi_o rho] |o><o| the Choi matrix is
  // sum_o Pi_o^T (x) |o><o| in [in, out] grouping; reorder to read the blocks.
  Mat j = permute_systems(qc.choi, {din, dout}, {1, 0});  // [out, in]
  std::vector<Mat> effects(dout);
  for (int o = 0; o < dout; ++o) {
    effects[o] = j.block(o * din, o * din, din, din).transpose();
    for (int o2 = 0; o2 < dout; ++o2) {
      if (o2 == o) continue;
      if (j.block(o * din, o2 * din, din, din).cwiseAbs().maxCoeff() > kCptpTol)
        throw ValidationError("qc_channel_effects: output register is not classical");
    }
  }
  return effects;
}

double evaluate_witness(const WitnessOperator& w, const QuantumChannel& qc) {
  if (qc.dout() != 4)
    throw ValidationError("evaluate_witness: channel must have four classical outcomes");
  if (qc.din() != w.dA * w.dB)
    throw ValidationError("evaluate_witness: channel input dimension mismatch");
  std::vector<Mat> effects = qc_channel_effects(qc);
  double value = 0.0;
  for (int x1 = 0; x1 < 2; ++x1)
    for (int y1 = 0; y1 < 2; ++y1) {
      // Output index convention: outcome (x1, y1) at x1 * |Y1| + y1.
      const Mat& pi = effects[x1 * qc.dB1 + y1];
      for (int x0 = 0; x0 < 2; ++x0)
        for (int y0 = 0; y0 < 2; ++y0) {
          double p = (pi * tensor(w.psi[x0], w.phi[y0])).trace().real();
          value += w.coefficient(x1, y1, x0, y0) * p;
        }
    }
  return value;
}

double witness_choi_value(const WitnessOperator& w, const QuantumChannel& qc) {
  if (qc.dout() != 4 || qc.din() != w.dA * w.dB)
    throw ValidationError("witness_choi_value: dimension mismatch");
  const int din = qc.din();
  Mat full = Mat::Zero(din * 4, din * 4);
  for (int o = 0; o < 4; ++o) {
    Mat marker = Mat::Zero(4, 4);
    marker(o, o) = 1.0;
    full += tensor(w.blocks[o], marker);
  }
  // Witness lives on (input (x) output); the Choi is stored the same way.
  return (full * qc.choi).trace().real();
}

double losr_min_witness_value(const WitnessOperator& w) {
  auto orthonormal = [](const std::vector<Mat>& pair) {
    return std::abs((pair[0] * pair[1]).trace().real()) < 1e-9;
  };
  if (!orthonormal(w.psi) || !orthonormal(w.phi))
    throw ValidationError(
        "losr_min_witness_value: requires orthonormal input pairs (general POVM "
        "optimization is out of scope)");
  double best = 1e300;
  // Deterministic strategies x1 = f(x0), y1 = g(y0), all 4 x 4 of them.
  for (int f = 0; f < 4; ++f)
    for (int g = 0; g < 4; ++g) {
      double v = 0.0;
      for (int x0 = 0; x0 < 2; ++x0)
        for (int y0 = 0; y0 < 2; ++y0) {
          int x1 = (f >> x0) & 1;
          int y1 = (g >> y0) & 1;
          v += w.coefficient(x1, y1, x0, y0);
        }
      best = std::min(best, v);
    }
  return best;
}

SeparabilityVerdict choi_separability(const QuantumChannel& c,
                                      const std::optional<LosrDecomposition>& decomposition) {
  // Reorder [A0, B0, A1, B1] -> [A0, A1, B0, B1] and test PPT across the
  // party cut.
  Mat grouped = permute_systems(c.choi, c.choi_dims(), {0, 2, 1, 3});
  const int da = c.dA0 * c.dA1;
  const int db = c.dB0 * c.dB1;
  Mat pt = partial_transpose(grouped, {da, db}, 1);
  double min_eig = min_eigenvalue(pt);

  SeparabilityVerdict v;
  v.min_pt_eigenvalue = min_eig;
  if (min_eig < -kPsdTol) {
    v.verdict = SeparabilityVerdict::Entangled;
    v.evidence = "NPT: negative partial-transpose eigenvalue";
    return v;
  }

  const int lo = std::min(da, db);
  const int hi = std::max(da, db);
  if (lo == 1 || (lo == 2 && hi <= 3)) {
    v.verdict = SeparabilityVerdict::Separable;
    v.evidence = "PPT at a dimension where PPT is exact";
    return v;
  }

  bool diagonal = true;
  for (int i = 0; i < grouped.rows() && diagonal; ++i)
    for (int j = 0; j < grouped.cols(); ++j)
      if (i != j && std::abs(grouped(i, j)) > kCptpTol) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    v.verdict = SeparabilityVerdict::Separable;
    v.evidence = "diagonal Choi matrix (explicit product-basis decomposition)";
    return v;
  }

  if (decomposition) {
    const LosrDecomposition& d = *decomposition;
    if (d.weights.size() != d.locals_a.size() || d.weights.size() != d.locals_b.size())
      throw ValidationError("choi_separability: malformed decomposition");
    Mat rebuilt = Mat::Zero(c.choi.rows(), c.choi.cols());
    for (size_t k = 0; k < d.weights.size(); ++k) {
      QuantumChannel prod = product_channel(d.locals_a[k], d.locals_b[k]);
      if (prod.choi.rows() != c.choi.rows())
        throw ValidationError("choi_separability: decomposition dims mismatch");
      rebuilt += d.weights[k] * prod.choi;
    }
    if ((rebuilt - c.choi).cwiseAbs().maxCoeff() <= kCptpTol) {
      v.verdict = SeparabilityVerdict::Separable;
      v.evidence = "verified explicit convex decomposition into product channels";
      return v;
    }
    throw ValidationError("choi_separability: supplied decomposition does not reproduce the Choi");
  }

  v.verdict = SeparabilityVerdict::Inconclusive;
  v.evidence = "PPT but beyond the PPT-exact dimensions, no decomposition supplied";
  return v;
}

WitnessChannelReport witness_to_channel_construction(const Mat& w,
                                                     const QuantumChannel& channel) {
  const int da = channel.dA0 * channel.dA1;  // Alice's witness factor A0'
  const int db = channel.dB0 * channel.dB1;
  if (w.rows() != da * db || w.cols() != da * db)
    throw ValidationError("witness_to_channel_construction: witness dimension mismatch");
  if (!is_hermitian(w))
    throw ValidationError("witness_to_channel_construction: witness must be Hermitian");
  if (w.cwiseAbs().maxCoeff() < 1e-14)
    throw ValidationError("witness_to_channel_construction: degenerate witness W = 0");

  // W = r eta - t zeta from the eigendecomposition.
  HermitianEig eig = eig_hermitian(w);
  Mat pos = Mat::Zero(w.rows(), w.cols());
  Mat neg = Mat::Zero(w.rows(), w.cols());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    Mat term = eig.values(i) * projector(eig.vectors.col(i));
    if (eig.values(i) >= 0.0) {
      pos += term;
    } else {
      neg -= term;
    }
  }
  WitnessChannelReport report;
  report.r = pos.trace().real();
  report.t = neg.trace().real();

  // Physical probability of the (phi+, phi+) measurement outcome when the
  // Fig.-style wiring is fed `input` on A0'B0'.
  auto outcome_prob = [&](const Mat& input) {
    const int a0 = channel.dA0, b0 = channel.dB0, a1 = channel.dA1, b1 = channel.dB1;
    // Systems: [A0', B0', A0, tA0, B0, tB0]; the channel later eats the tails.
    Mat pre = tensor(input, tensor(projector(phi_plus_ket(a0)) / a0,
                                   projector(phi_plus_ket(b0)) / b0));
    std::vector<int> dims = {da, db, a0, a0, b0, b0};
    // -> [A0', B0', A0, B0, tA0, tB0] so the tails sit last.
    Mat arranged = permute_systems(pre, dims, {0, 1, 2, 4, 3, 5});
    std::vector<Mat> kraus = channel.kraus ? *channel.kraus : choi_to_kraus(channel);
    const int head = da * db * a0 * b0;
    Mat post = Mat::Zero(head * a1 * b1, head * a1 * b1);
    for (const Mat& k : kraus) {
      Mat e = tensor(identity(head), k);
      post += e * arranged * e.adjoint();
    }
    // Order now [A0', B0', A0, B0, A1, B1]; group per party and project both
    // (A0', A0 A1) and (B0', B0 B1) onto phi+.
    std::vector<int> dims2 = {da, db, a0, b0, a1, b1};
    Mat grouped = permute_systems(post, dims2, {0, 2, 4, 1, 3, 5});
    Mat proj_a = projector(phi_plus_ket(da)) / da;
    Mat proj_b = projector(phi_plus_ket(db)) / db;
    return (tensor(proj_a, proj_b) * grouped).trace().real();
  };

  report.p_eta = report.r > 0.0 ? outcome_prob((pos / report.r).transpose()) : 0.0;
  report.p_zeta = report.t > 0.0 ? outcome_prob((neg / report.t).transpose()) : 0.0;

  // The projective outcome carries a 1/(|A0'||B0'|) normalization relative to
  // the unnormalized-phi+ chain; undo it so the value lands on Tr[rho_J W].
  report.value = (report.r * report.p_eta - report.t * report.p_zeta) *
                 static_cast<double>(da) * static_cast<double>(db);

  Mat grouped_choi = permute_systems(channel.choi, channel.choi_dims(), {0, 2, 1, 3});
  report.trace_value = (grouped_choi / channel.din() * w).trace().real();
  report.outcome_x = 0;
  report.outcome_y = 0;
  if (std::abs(report.value - report.trace_value) > 1e-8)
    throw ValidationError(
        "witness_to_channel_construction: construction value does not match Tr[rho_J W]");
  return report;
}

}  // namespace qproc
