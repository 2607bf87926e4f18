#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qproc/quantum.hpp"

namespace qproc {

// Coefficient convention for the CHSH witness blocks. `Paper316` uses
// (3/16 - delta), which vertex enumeration shows dips to -9/4 on deterministic
// local strategies; `Corrected316DeltaQuarter` uses (3/16 - delta/4), whose
// minimum over local strategies is exactly 0. Both stay available.
enum class WitnessNormalization { Paper316, Corrected316DeltaQuarter };

/*
 * Block-diagonal witness W = sum_{x1,y1} W_{x1y1} (x) |x1 y1><x1 y1| acting on
 * the Choi space of a POVM channel, with blocks
 *   W_{x1y1} = sum_{x0,y0} coeff(x1,y1,x0,y0) (psi_{x0} (x) phi_{y0}).
 */
struct WitnessOperator {
  std::array<Mat, 4> blocks;  // indexed x1 * 2 + y1, each on A0 (x) B0
  std::vector<Mat> psi;       // Alice input states psi_0, psi_1 (pure)
  std::vector<Mat> phi;       // Bob input states phi_0, phi_1 (pure)
  WitnessNormalization normalization = WitnessNormalization::Corrected316DeltaQuarter;
  int dA = 2, dB = 2;

  double coefficient(int x1, int y1, int x0, int y0) const;
};

WitnessOperator build_chsh_povm_witness(const std::vector<Mat>& psi,
                                        const std::vector<Mat>& phi,
                                        WitnessNormalization normalization);
// Default witness on the computational bases of two qubits.
WitnessOperator standard_chsh_povm_witness(WitnessNormalization normalization);

// POVM elements of a quantum-to-classical channel, recovered from its Choi
// blocks. Throws if the output register is not classical.
std::vector<Mat> qc_channel_effects(const QuantumChannel& qc);

// sum_{x0,y0,x1,y1} p(x1,y1|x0,y0) coeff(...) with p from the Born rule on
// the channel's POVM elements and the witness input states.
double evaluate_witness(const WitnessOperator& w, const QuantumChannel& qc);
// Same number via the full contraction Tr[W J]; the two routes must agree on
// real-valued input states.
double witness_choi_value(const WitnessOperator& w, const QuantumChannel& qc);

// Minimum of evaluate_witness over the 16 deterministic local strategies
// (linearity puts the polytope minimum on a vertex). Requires orthonormal
// psi and phi pairs, otherwise local responses are not exhausted by classical
// strategies and the enumeration would not be a valid bound.
double losr_min_witness_value(const WitnessOperator& w);

// Explicit convex decomposition into product channels, used as separability
// evidence beyond the PPT-exact dimensions.
struct LosrDecomposition {
  std::vector<double> weights;
  std::vector<QuantumChannel> locals_a;  // single-party A channels
  std::vector<QuantumChannel> locals_b;  // single-party B channels
};

struct SeparabilityVerdict {
  enum Kind { Separable, Entangled, Inconclusive };
  Kind verdict = Inconclusive;
  std::string evidence;
  double min_pt_eigenvalue = 0.0;  // across the (A0A1 | B0B1) cut
};

// PPT test of the Choi matrix across the (A0A1 | B0B1) cut. NPT certifies
// entanglement; PPT certifies separability only at 2x2 and 2x3 cut dimensions
// or for diagonal Choi matrices; a verified explicit decomposition certifies
// it anywhere. Everything else is inconclusive.
SeparabilityVerdict choi_separability(
    const QuantumChannel& c,
    const std::optional<LosrDecomposition>& decomposition = std::nullopt);

struct WitnessChannelReport {
  double value = 0.0;        // r p(x,y|eta^T) - t p(x,y|zeta^T), rescaled
  double trace_value = 0.0;  // Tr[rho_J W]
  int outcome_x = 0, outcome_y = 0;
  double p_eta = 0.0, p_zeta = 0.0;  // physical outcome probabilities
  double r = 0.0, t = 0.0;           // W = r eta - t zeta
};

/*
 * Realizes a Choi-space witness as a measurable quantity: split W into
 * r eta - t zeta (positive/negative parts, trace-normalized), feed eta^T and
 * zeta^T to the channel wired with maximally entangled pre-states, and project
 * both sides onto phi+. The (0,0) outcome probabilities recover Tr[rho_J W]
 * after undoing the projector normalization; the report carries both routes so
 * their agreement can be checked.
 */
WitnessChannelReport witness_to_channel_construction(const Mat& w,
                                                     const QuantumChannel& channel);

}  // namespace qproc
