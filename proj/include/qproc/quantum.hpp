#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qproc/mat.hpp"

namespace qproc {

// Hermitian, PSD, unit-trace matrix with tensor-factor metadata.
struct DensityMatrix {
  Mat rho;
  DimFactorization dims;

  DensityMatrix() = default;
  DensityMatrix(Mat m, DimFactorization d);  // validates

  int dim() const { return static_cast<int>(rho.rows()); }
};

// Positive operator-valued measure: effects are Hermitian PSD and sum to I.
struct Povm {
  std::vector<Mat> effects;
  DimFactorization dims;

  Povm() = default;
  Povm(std::vector<Mat> e, DimFactorization d);  // validates

  int n_outcomes() const { return static_cast<int>(effects.size()); }
};

/*
 * CPTP map between bipartite systems A0B0 -> A1B1 (either party's factor may
 * be trivial). Canonical representation is the unnormalized Choi matrix
 *   J = sum_{ij} |i><j| (x) N(|i><j|)
 * on (A0 B0) (x) (A1 B1), with Tr J = |A0||B0|. The normalized rho_J =
 * J / (|A0||B0|) used by the witness machinery is computed on demand.
 */
struct QuantumChannel {
  Mat choi;
  int dA0 = 1, dB0 = 1, dA1 = 1, dB1 = 1;
  std::optional<std::vector<Mat>> kraus;

  QuantumChannel() = default;
  QuantumChannel(Mat j, int a0, int b0, int a1, int b1,
                 std::optional<std::vector<Mat>> k = std::nullopt);  // validates

  int din() const { return dA0 * dB0; }
  int dout() const { return dA1 * dB1; }
  // Index order of the Choi factors: [A0, B0, A1, B1].
  std::vector<int> choi_dims() const { return {dA0, dB0, dA1, dB1}; }
  Mat normalized_choi() const { return choi / static_cast<double>(din()); }
};

// C-J correspondence. Kraus operators are dout x din; requires sum K^dag K = I
// within kCptpTol.
QuantumChannel kraus_to_choi(const std::vector<Mat>& kraus, int dA0, int dB0,
                             int dA1, int dB1);

// Spectral Kraus decomposition of the Choi matrix; at most rank(J) operators.
std::vector<Mat> choi_to_kraus(const QuantumChannel& c);

DensityMatrix apply_channel(const QuantumChannel& c, const DensityMatrix& in);

// Both contraction routes, exposed so they can be cross-checked.
Mat apply_channel_via_choi(const QuantumChannel& c, const Mat& in);
Mat apply_channel_via_kraus(const QuantumChannel& c, const Mat& in);

struct Signalling {
  bool a_to_b = false;
  bool b_to_a = false;
};

// Whether one party's input can influence the other party's output marginal,
// decided on the Choi matrix: N does not signal A->B iff Tr_{A1} J factors as
// I^{A0} (x) (reduced B-channel Choi).
Signalling is_signalling(const QuantumChannel& c);

// Convenience constructors.
QuantumChannel identity_channel(int dA, int dB);
// N_rho(X) = Tr[X] rho, with rho on the A1B1 factors.
QuantumChannel replacement_channel(const DensityMatrix& rho, int dA0, int dB0);
// Product channel E (x) F from single-party channels (B factors of `a` and A
// factors of `b` must be trivial).
QuantumChannel product_channel(const QuantumChannel& a, const QuantumChannel& b);
QuantumChannel swap_channel();  // two-qubit SWAP
// Convex mixture of channels with identical dims.
QuantumChannel mix_channels(const std::vector<double>& weights,
                            const std::vector<QuantumChannel>& members);
// Sequential composition: (second ∘ first); dims must chain.
QuantumChannel compose_channels(const QuantumChannel& second, const QuantumChannel& first);

// Deterministic test-harness generators; outputs satisfy their invariants.
DensityMatrix random_state(const std::vector<int>& dims, std::uint64_t seed);
Povm random_povm(const std::vector<int>& dims, int n_effects, std::uint64_t seed);
QuantumChannel random_channel(int dA0, int dB0, int dA1, int dB1, std::uint64_t seed);
Cvec random_pure_state(int dim, std::uint64_t seed);

// Common fixed states.
DensityMatrix phi_plus_state();                      // |phi+><phi+| on 2x2
Cvec phi_plus_ket(int d);                            // unnormalized sum_i |ii>
DensityMatrix werner_state(double p);                // p phi+ + (1-p) I/4

}  // namespace qproc
