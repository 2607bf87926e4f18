#include "qproc/process.hpp"

#include <cmath>

#include "qproc/witness.hpp"

namespace qproc {

Process::Process(QuantumChannel c, double dt, bool sep)
    : channel(std::move(c)), delay(dt), spatially_separated(sep) {
  if (!(delay >= 0.0)) throw ValidationError("Process: delay must be >= 0");
}

Process::Process(Behavior b, double dt, bool sep)
    : channel(std::move(b)), delay(dt), spatially_separated(sep) {
  if (!(delay >= 0.0)) throw ValidationError("Process: delay must be >= 0");
}

Signalling Process::signalling() const {
  return is_classical() ? behavior_signalling(behavior()) : is_signalling(quantum());
}

bool check_realizable(const Process& p) {
  if (!p.instantaneous() || !p.spatially_separated) return true;
  Signalling s = p.signalling();
  return !(s.a_to_b || s.b_to_a);
}

ProcessClassification classify(const Process& p) {
  ProcessClassification c;
  c.instantaneous = p.instantaneous();

  if (p.is_classical()) {
    if (!c.instantaneous) {
      // A classical channel always has an LOCC realization at positive delay.
      c.free = Verdict::Yes;
      c.resource_kind = ResourceKind::None;
      return c;
    }
    LocalTestResult lr = is_local(p.behavior());
    c.free = lr.local ? Verdict::Yes : Verdict::No;
    c.resource_kind = lr.local ? ResourceKind::None : ResourceKind::BellNonlocality;
    return c;
  }

  const QuantumChannel& n = p.quantum();
  // Diagonal Choi == classical channel in disguise; use the classical rules.
  bool diagonal = true;
  for (int i = 0; i < n.choi.rows() && diagonal; ++i)
    for (int j = 0; j < n.choi.cols(); ++j)
      if (i != j && std::abs(n.choi(i, j)) > kCptpTol) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    return classify(Process(channel_to_behavior(n), p.delay, p.spatially_separated));
  }

  SeparabilityVerdict sep = choi_separability(n);
  if (sep.verdict == SeparabilityVerdict::Entangled) {
    // NPT excludes any LOCC realization (LOCC is inside SEP), at any delay.
    c.free = Verdict::No;
    c.resource_kind = ResourceKind::Entanglement;
    return c;
  }
  Signalling sig = is_signalling(n);
  if (sep.verdict == SeparabilityVerdict::Separable && !sig.a_to_b && !sig.b_to_a) {
    c.free = Verdict::Yes;
    c.resource_kind = ResourceKind::None;
    return c;
  }
  // PPT Choi beyond the exact dimensions: try the POVM-channel witness before
  // giving up. A strictly negative value rules out LOSR.
  if (c.instantaneous && n.din() == 4 && n.dout() == 4 && n.dA0 == 2 && n.dB0 == 2) {
    try {
      WitnessOperator w =
          standard_chsh_povm_witness(WitnessNormalization::Corrected316DeltaQuarter);
      if (evaluate_witness(w, n) < -1e-9) {
        c.free = Verdict::No;
        c.resource_kind = ResourceKind::Entanglement;
        return c;
      }
    } catch (const ValidationError&) {
      // not a qc channel; fall through to unknown
    }
  }
  c.free = Verdict::Unknown;
  c.resource_kind = ResourceKind::Unknown;
  return c;
}

SuperprocessForm Superprocess::form() const {
  switch (impl.index()) {
    case 0:
    case 1: return SuperprocessForm::LosrForm;
    case 2: return SuperprocessForm::PreLoccForm;
    default: return SuperprocessForm::General;
  }
}

bool theorem1_form_check(SuperprocessForm form, double in_delay, double out_delay) {
  const bool instantaneous_case =
      in_delay == 0.0 && out_delay == 0.0 &&
      (form == SuperprocessForm::LosrForm || form == SuperprocessForm::PreLoccForm);
  const bool annihilating_case =
      in_delay > 0.0 && out_delay == 0.0 && form == SuperprocessForm::PreLoccForm;
  const bool non_decreasing_case =
      out_delay >= in_delay && form == SuperprocessForm::General;
  return instantaneous_case || annihilating_case || non_decreasing_case;
}

namespace {

// Unitary reordering the tensor factors: P |i, old order> = |i, new order>.
Mat permutation_matrix(const std::vector<int>& dims, const std::vector<int>& perm) {
  int total = 1;
  for (int d : dims) total *= d;
  Mat p = Mat::Zero(total, total);
  for (int i = 0; i < total; ++i)
    p.col(i) = permute_systems_vec(basis_ket(total, i), dims, perm);
  return p;
}

// Kraus operators appending a fixed state: rho -> rho (x) omega.
std::vector<Mat> append_state_kraus(int d_front, const Mat& omega) {
  HermitianEig e = eig_hermitian(omega);
  std::vector<Mat> kraus;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (e.values(i) > 1e-14) {
      Mat col = std::sqrt(e.values(i)) * e.vectors.col(i);
      kraus.push_back(tensor(identity(d_front), col));
    }
  }
  return kraus;
}

std::vector<Mat> kraus_of(const QuantumChannel& c) {
  return c.kraus ? *c.kraus : choi_to_kraus(c);
}

Process apply_losr(const LosrSuperprocess& sp, const Process& p) {
  if (p.is_classical())
    throw ValidationError("apply_superprocess: LOSR form here acts on quantum processes");
  const QuantumChannel& n = p.quantum();
  if (sp.members.empty()) throw ValidationError("apply_superprocess: empty LOSR mixture");

  std::vector<QuantumChannel> transformed;
  std::vector<double> weights;
  for (const auto& m : sp.members) {
    QuantumChannel pre = product_channel(m.pre_a, m.pre_b);
    QuantumChannel post = product_channel(m.post_a, m.post_b);
    Signalling s = is_signalling(pre);
    Signalling s2 = is_signalling(post);
    if (s.a_to_b || s.b_to_a || s2.a_to_b || s2.b_to_a)
      throw ValidationError("apply_superprocess: LOSR member stages must be non-signalling");
    if (m.pre_a.dout() != m.mem_a * n.dA0 || m.pre_b.dout() != m.mem_b * n.dB0)
      throw ValidationError("apply_superprocess: LOSR pre stage does not match channel inputs");
    if (m.post_a.din() != m.mem_a * n.dA1 || m.post_b.din() != m.mem_b * n.dB1)
      throw ValidationError("apply_superprocess: LOSR post stage does not match channel outputs");

    // [E_A, A0, E_B, B0] -> [E_A, E_B, A0, B0]
    Mat p1 = permutation_matrix({m.mem_a, n.dA0, m.mem_b, n.dB0}, {0, 2, 1, 3});
    // [E_A, E_B, A1, B1] -> [E_A, A1, E_B, B1]
    Mat p2 = permutation_matrix({m.mem_a, m.mem_b, n.dA1, n.dB1}, {0, 2, 1, 3});

    std::vector<Mat> kraus;
    for (const Mat& kpre : kraus_of(pre))
      for (const Mat& kn : kraus_of(n))
        for (const Mat& kpost : kraus_of(post)) {
          Mat step = kpost * p2 * tensor(identity(m.mem_a * m.mem_b), kn) * p1 * kpre;
          kraus.push_back(step);
        }
    transformed.push_back(kraus_to_choi(kraus, m.pre_a.dA0, m.pre_b.dB0,
                                        m.post_a.dA1, m.post_b.dB1));
    weights.push_back(m.weight);
  }
  return Process(mix_channels(weights, transformed), p.delay, p.spatially_separated);
}

Process apply_prelocc(const PreLoccSuperprocess& sp, const Process& p) {
  if (p.is_classical())
    throw ValidationError("apply_superprocess: pre-LOCC form here acts on quantum processes");
  DensityMatrix mid = prelocc_intermediate_state(sp, p.quantum());
  Behavior b = behavior_from_state(mid, sp.post_a, sp.post_b);
  return Process(std::move(b), 0.0, p.spatially_separated);
}

Process apply_general(const GeneralSuperprocess& sp, const Process& p) {
  if (p.is_classical())
    throw ValidationError("apply_superprocess: general form here acts on quantum processes");
  const QuantumChannel& n = p.quantum();
  if (sp.pre.dout() != sp.env_dim * n.din())
    throw ValidationError("apply_superprocess: pre stage does not match channel input");
  if (sp.post.din() != sp.env_dim * n.dout())
    throw ValidationError("apply_superprocess: post stage does not match channel output");
  std::vector<Mat> kraus;
  for (const Mat& kpre : kraus_of(sp.pre))
    for (const Mat& kn : kraus_of(n))
      for (const Mat& kpost : kraus_of(sp.post))
        kraus.push_back(kpost * tensor(identity(sp.env_dim), kn) * kpre);
  QuantumChannel out = kraus_to_choi(kraus, sp.out_dA0, sp.out_dB0, sp.out_dA1, sp.out_dB1);
  return Process(std::move(out), sp.pre_delay + p.delay + sp.post_delay,
                 p.spatially_separated);
}

}  // namespace

DensityMatrix prelocc_intermediate_state(const PreLoccSuperprocess& sp,
                                         const QuantumChannel& n) {
  const auto& d = sp.pre_state.dims.dims;
  if (d.size() != 4 || d[0] != n.dA0 || d[1] != n.dB0 || d[2] != sp.mem_a || d[3] != sp.mem_b)
    throw ValidationError("prelocc_intermediate_state: pre state dims must be [A0,B0,memA,memB]");
  const int mem = sp.mem_a * sp.mem_b;
  Mat sigma = Mat::Zero(n.dout() * mem, n.dout() * mem);
  for (const Mat& k : (n.kraus ? *n.kraus : choi_to_kraus(n))) {
    Mat e = tensor(k, identity(mem));
    sigma += e * sp.pre_state.rho * e.adjoint();
  }
  // [A1, B1, memA, memB] -> [A1, memA, B1, memB]
  sigma = permute_systems(sigma, {n.dA1, n.dB1, sp.mem_a, sp.mem_b}, {0, 2, 1, 3});
  sigma = (sigma + sigma.adjoint()) / 2.0;
  return DensityMatrix(sigma, DimFactorization({n.dA1 * sp.mem_a, n.dB1 * sp.mem_b},
                                               {"A1~", "B1~"}));
}

Process apply_superprocess(const Superprocess& sp, const Process& p) {
  if (std::holds_alternative<LosrBehaviorMap>(sp.impl)) {
    if (!p.is_classical())
      throw ValidationError("apply_superprocess: classical LOSR map needs a classical process");
    return Process(std::get<LosrBehaviorMap>(sp.impl).apply(p.behavior()), p.delay,
                   p.spatially_separated);
  }
  if (std::holds_alternative<LosrSuperprocess>(sp.impl))
    return apply_losr(std::get<LosrSuperprocess>(sp.impl), p);
  if (std::holds_alternative<PreLoccSuperprocess>(sp.impl))
    return apply_prelocc(std::get<PreLoccSuperprocess>(sp.impl), p);
  return apply_general(std::get<GeneralSuperprocess>(sp.impl), p);
}

Process lose_construct(const DensityMatrix& omega, const QuantumChannel& local_a,
                       const QuantumChannel& local_b, int dA0, int dB0) {
  if (omega.dims.count() != 2)
    throw ValidationError("lose_construct: shared state needs bipartite dims [A2,B2]");
  const int dA2 = omega.dims.dims[0];
  const int dB2 = omega.dims.dims[1];
  if (local_a.din() != dA0 * dA2)
    throw ValidationError("lose_construct: A-side channel input must be A0 (x) A2");
  if (local_b.din() != dB0 * dB2)
    throw ValidationError("lose_construct: B-side channel input must be B0 (x) B2");

  // rho -> rho (x) omega, then [A0,B0,A2,B2] -> [A0,A2,B0,B2], then E (x) F.
  Mat reorder = permutation_matrix({dA0, dB0, dA2, dB2}, {0, 2, 1, 3});
  std::vector<Mat> kraus;
  for (const Mat& app : append_state_kraus(dA0 * dB0, omega.rho))
    for (const Mat& ka : kraus_of(local_a))
      for (const Mat& kb : kraus_of(local_b))
        kraus.push_back(tensor(ka, kb) * reorder * app);
  QuantumChannel out = kraus_to_choi(kraus, dA0, dB0, local_a.dout(), local_b.dout());
  return Process(std::move(out), 0.0, true);
}

QuantumChannel conditioned_measurement_channel(const std::vector<Povm>& povms,
                                               int d_share) {
  const int n_settings = static_cast<int>(povms.size());
  if (n_settings < 1) throw ValidationError("conditioned_measurement_channel: no POVMs");
  const int n_outcomes = povms[0].n_outcomes();
  for (const Povm& m : povms) {
    if (m.dims.total() != d_share || m.n_outcomes() != n_outcomes)
      throw ValidationError("conditioned_measurement_channel: POVM shape mismatch");
  }
  // Effects on (setting register (x) share): Pi_o = sum_s |s><s| (x) M^s_o,
  // then the classical outcome is written into a fresh register.
  const int din = n_settings * d_share;
  std::vector<Mat> kraus;
  for (int o = 0; o < n_outcomes; ++o) {
    Mat effect = Mat::Zero(din, din);
    for (int s = 0; s < n_settings; ++s) {
      Mat marker = Mat::Zero(n_settings, n_settings);
      marker(s, s) = 1.0;
      effect += tensor(marker, povms[s].effects[o]);
    }
    HermitianEig e = eig_hermitian(effect);
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
      if (e.values(i) > 1e-14) {
        Mat row = std::sqrt(e.values(i)) * e.vectors.col(i).adjoint();
        kraus.push_back(basis_ket(n_outcomes, o) * row);
      }
    }
  }
  return kraus_to_choi(kraus, din, 1, n_outcomes, 1);
}

Process tsirelson_lose_process() {
  const double pi = std::acos(-1.0);
  std::vector<Povm> a = {angle_povm(0.0), angle_povm(pi / 2.0)};
  std::vector<Povm> b = {angle_povm(pi / 4.0), angle_povm(-pi / 4.0)};
  QuantumChannel ea = conditioned_measurement_channel(a, 2);
  QuantumChannel eb = conditioned_measurement_channel(b, 2);
  return lose_construct(phi_plus_state(), ea, eb, 2, 2);
}

}  // namespace qproc
