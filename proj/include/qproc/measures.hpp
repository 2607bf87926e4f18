#pragma once

#include <cstdint>

#include "qproc/behavior.hpp"
#include "qproc/prelocc.hpp"

namespace qproc {

// Kullback-Leibler divergence in bits. +infinity exactly when p has support
// where q does not; 0 log 0 = 0. Both arguments must be normalized.
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);

// Channel divergence of two behaviors over the same scenario: the maximum of
// the KL divergence between output distributions over all input pairs.
double channel_divergence(const Behavior& n, const Behavior& m);

struct MeasureResult {
  double value = 0.0;            // bits, clamped at 0
  std::vector<double> weights;   // vertex weights of the best local model
  double gap = 0.0;              // optimality-gap estimate
  int iterations = 0;
  bool converged = false;
};

struct RelEntConfig {
  int restarts = 8;
  int max_iters = 4000;
  std::uint64_t seed = 1;
  bool polish = true;  // Newton refinement of the minimax KKT system
};

/*
 * Relative entropy of Bell nonlocality: the minimum over the local polytope of
 * the worst-case-input KL divergence to the behavior. Local behaviors short-
 * circuit through the LP (the minimizer is the behavior itself); otherwise a
 * projected subgradient method on the log-sum-exp smoothed objective
 * (temperature tau_k = 1/sqrt(k), weights floored at 1e-12 and renormalized,
 * uniform-mixture start, multi-restart) runs twice with independent seeds, and
 * the reported gap compares the two runs. A KKT Newton polish sharpens the
 * winner when its active set can be verified.
 */
MeasureResult rel_entropy_nonlocality(const Behavior& b, const RelEntConfig& cfg = {});

/*
 * Independent cross-check: entropic mirror ascent on the input-weight simplex
 * with an exact inner EM solve per step (saddle-point route). Returns a
 * bracketed value; `gap` is the primal-dual width, a sound bound on its own
 * error.
 */
MeasureResult rel_entropy_nonlocality_oracle(const Behavior& b, const RelEntConfig& cfg = {});

struct MinExtConfig {
  int n_settings = 2;
  int restarts = 16;
  int seesaw_rounds = 6;
  bool enable_filter = false;
  std::uint64_t seed = 1;
  RelEntConfig inner{2, 800, 1, true};   // budget during the search
  RelEntConfig final_eval{4, 4000, 1, true};
};

/*
 * Lower bound on the minimal extension of the relative entropy of Bell
 * nonlocality to a bipartite state: seesaw ascent over parametrized local
 * POVMs (one quadratic square-root-completion block per effect) and,
 * optionally, one local filter round per party, maximizing the measure of the
 * induced behavior. Every evaluation point is a feasible LOCC image, so any
 * returned value is a valid lower bound. Restart 0 starts at the CHSH-optimal
 * angles for two-qubit states.
 */
MeasureResult minimal_extension_state(const DensityMatrix& rho, const MinExtConfig& cfg = {});

// Data-processing inequality check: measure of the transformed behavior must
// not exceed the measure of the original beyond twice the solver gap.
bool dpi_monotonicity_check(const Behavior& b, const LosrBehaviorMap& sp,
                            const RelEntConfig& cfg = {});

// Certificate upper bound on the maximal extension: if `n` equals the image of
// a classical channel `c` under the local map `upsilon` (verified within 1e-8),
// the measure of `c` bounds every extension of the measure at `n` from above.
double losr_image_certificate(const Behavior& n, const Behavior& c,
                              const LosrBehaviorMap& upsilon, const RelEntConfig& cfg = {});

}  // namespace qproc
