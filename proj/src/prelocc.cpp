#include "qproc/prelocc.hpp"

#include <cmath>

namespace qproc {

Instrument::Instrument(std::vector<std::vector<Mat>> b, int d) : branches(std::move(b)), dim(d) {
  if (branches.empty()) throw ValidationError("Instrument: needs at least one branch");
  Mat closure = Mat::Zero(dim, dim);
  for (const auto& kraus : branches) {
    for (const Mat& k : kraus) {
      if (k.rows() != dim || k.cols() != dim)
        throw ValidationError("Instrument: Kraus operator dimension mismatch");
      closure += k.adjoint() * k;
    }
  }
  if ((closure - identity(dim)).cwiseAbs().maxCoeff() > kCptpTol)
    throw ValidationError("Instrument: branches do not sum to a CPTP map");
}

Instrument filter_instrument(const Mat& f) {
  const int d = static_cast<int>(f.rows());
  if (f.cols() != d) throw ValidationError("filter_instrument: filter must be square");
  Mat gram = f.adjoint() * f;
  if (min_eigenvalue(identity(d) - gram) < -kPsdTol)
    throw ValidationError("filter_instrument: filter must satisfy F^dag F <= I");
  Mat complement = psd_sqrt(identity(d) - gram);
  return Instrument({{f}, {complement}}, d);
}

Instrument shared_randomness_instrument(const std::vector<double>& probs, int dim) {
  std::vector<std::vector<Mat>> branches;
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw ValidationError("shared_randomness_instrument: negative probability");
    branches.push_back({std::sqrt(p) * identity(dim)});
    total += p;
  }
  if (std::abs(total - 1.0) > kProbTol)
    throw ValidationError("shared_randomness_instrument: probabilities must sum to 1");
  return Instrument(std::move(branches), dim);
}

size_t PreLoccProtocol::n_transcripts() const {
  // Upper bound on transcript count assuming outcome counts do not depend on
  // the transcript path (true for all protocols built here).
  size_t n = 1;
  for (const Round& r : rounds) n *= r.instruments.empty() ? 1 : r.instruments[0].n_outcomes();
  return n;
}

namespace {

Mat embed_local(const Mat& k, Party party, int da, int db) {
  return party == Party::A ? tensor(k, identity(db)) : tensor(identity(da), k);
}

void walk(const DensityMatrix& state, const PreLoccProtocol& protocol, size_t round_idx,
          size_t flat_transcript, double prob, const Mat& current,
          std::vector<ProtocolLeaf>& leaves) {
  if (round_idx == protocol.rounds.size()) {
    ProtocolLeaf leaf;
    leaf.probability = prob;
    if (prob > 0.0) leaf.state = current / prob;
    leaves.push_back(std::move(leaf));
    return;
  }
  const auto& round = protocol.rounds[round_idx];
  const Instrument& inst = round.for_transcript(flat_transcript);
  const int da = state.dims.dims[0];
  const int db = state.dims.dims[1];
  if (inst.dim != (round.party == Party::A ? da : db))
    throw ValidationError("behavior_from_prelocc: instrument dimension does not match its party");
  for (int outcome = 0; outcome < inst.n_outcomes(); ++outcome) {
    Mat next = Mat::Zero(current.rows(), current.cols());
    for (const Mat& k : inst.branches[outcome]) {
      Mat e = embed_local(k, round.party, da, db);
      next += e * current * e.adjoint();
    }
    double p = next.trace().real();
    walk(state, protocol, round_idx + 1, flat_transcript * inst.n_outcomes() + outcome,
         p, next, leaves);
  }
}

}  // namespace

std::vector<ProtocolLeaf> run_protocol(const DensityMatrix& state,
                                       const PreLoccProtocol& protocol) {
  if (state.dims.count() != 2)
    throw ValidationError("run_protocol: state must carry bipartite dims");
  std::vector<ProtocolLeaf> leaves;
  walk(state, protocol, 0, 0, 1.0, state.rho, leaves);
  return leaves;
}

Behavior behavior_from_prelocc(
    const DensityMatrix& state, const PreLoccProtocol& protocol,
    const std::vector<std::vector<Povm>>& a_povms_by_transcript,
    const std::vector<std::vector<Povm>>& b_povms_by_transcript) {
  std::vector<ProtocolLeaf> leaves = run_protocol(state, protocol);
  if (a_povms_by_transcript.empty() || b_povms_by_transcript.empty())
    throw ValidationError("behavior_from_prelocc: measurement lists must be nonempty");

  auto a_for = [&](size_t t) -> const std::vector<Povm>& {
    return a_povms_by_transcript.size() == 1 ? a_povms_by_transcript[0]
                                             : a_povms_by_transcript.at(t);
  };
  auto b_for = [&](size_t t) -> const std::vector<Povm>& {
    return b_povms_by_transcript.size() == 1 ? b_povms_by_transcript[0]
                                             : b_povms_by_transcript.at(t);
  };

  std::vector<double> table;
  Scenario sc;
  bool first = true;
  for (size_t t = 0; t < leaves.size(); ++t) {
    const ProtocolLeaf& leaf = leaves[t];
    if (leaf.probability <= 0.0) continue;
    DensityMatrix cond(((leaf.state + leaf.state.adjoint()) / 2.0), state.dims);
    Behavior bt = behavior_from_state(cond, a_for(t), b_for(t));
    if (first) {
      sc = bt.sc;
      table.assign(sc.table_size(), 0.0);
      first = false;
    } else if (!(bt.sc == sc)) {
      throw ValidationError("behavior_from_prelocc: transcripts produce inconsistent scenarios");
    }
    for (size_t i = 0; i < table.size(); ++i) table[i] += leaf.probability * bt.p[i];
  }
  if (first) throw ValidationError("behavior_from_prelocc: all transcripts have zero probability");
  return Behavior(sc, std::move(table));
}

HiddenNonlocalityReport demo_hidden_nonlocality() {
  // Mix a partially entangled pure state cos(t)|00> + sin(t)|11> with junk on
  // the {|01>,|10>} subspace. The mixture stays below the CHSH bound, while
  // the local filters diag(sqrt(tan t), 1) steer the surviving branch to a
  // nearly maximally entangled state.
  const double weight = 0.75;
  const double theta = 0.5 * std::asin(0.9);

  Cvec psi = Cvec::Zero(4);
  psi(0) = std::cos(theta);
  psi(3) = std::sin(theta);
  Mat junk = Mat::Zero(4, 4);
  junk(1, 1) = 0.5;
  junk(2, 2) = 0.5;
  Mat rho = weight * projector(psi) + (1.0 - weight) * junk;
  DensityMatrix state(rho, DimFactorization({2, 2}, {"A", "B"}));

  Mat f(2, 2);
  f << std::sqrt(std::tan(theta)), 0.0, 0.0, 1.0;

  PreLoccProtocol protocol;
  protocol.rounds.push_back({Party::A, {filter_instrument(f)}});
  protocol.rounds.push_back({Party::B, {filter_instrument(f)}});

  std::vector<ProtocolLeaf> leaves = run_protocol(state, protocol);
  // Transcript 0 = both filters succeeded.
  const ProtocolLeaf& success = leaves.at(0);
  DensityMatrix filtered((success.state + success.state.adjoint()) / 2.0, state.dims);

  HiddenNonlocalityReport report;
  report.pre_chsh = horodecki_chsh(state);
  report.post_chsh = horodecki_chsh(filtered);
  report.filter_success_prob = success.probability;
  report.state = state;
  report.filtered_state = filtered;
  return report;
}

}  // namespace qproc
