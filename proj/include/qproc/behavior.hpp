#pragma once

#include <optional>
#include <vector>

#include "qproc/quantum.hpp"

namespace qproc {

// Bell scenario: input alphabet sizes (x0, y0) and output alphabet sizes
// (x1, y1) for the two parties.
struct Scenario {
  int nx0 = 1, ny0 = 1, nx1 = 1, ny1 = 1;

  bool operator==(const Scenario&) const = default;
  int n_inputs() const { return nx0 * ny0; }
  int n_outputs() const { return nx1 * ny1; }
  int table_size() const { return n_inputs() * n_outputs(); }
};

// Conditional probability table p(x1,y1|x0,y0). Entries are stored flat in
// (x0, y0, x1, y1) order. Each input pair's distribution must be normalized;
// negative ripple within -1e-12 is clamped to zero, anything worse is an
// error.
struct Behavior {
  Scenario sc;
  std::vector<double> p;

  Behavior() = default;
  Behavior(Scenario s, std::vector<double> table);  // validates + clamps

  static int index(const Scenario& s, int x0, int y0, int x1, int y1);
  double at(int x0, int y0, int x1, int y1) const;
  double& at(int x0, int y0, int x1, int y1);

  // Distribution over (x1,y1) for one input pair.
  std::vector<double> conditional(int x0, int y0) const;
};

// Linear functional on behaviors together with its maximum over the
// deterministic local vertices.
struct BellFunctional {
  Scenario sc;
  std::vector<double> c;  // same indexing as Behavior::p
  double bound = 0.0;

  double value(const Behavior& b) const;
};

// All deterministic product strategies of the scenario. Exactly
// nx1^nx0 * ny1^ny0 behaviors, ordered (A-strategy major).
std::vector<Behavior> enumerate_local_vertices(const Scenario& sc);
long long local_vertex_count(const Scenario& sc);

struct LocalTestResult {
  bool local = false;
  // Vertex weights reproducing the table (present iff local).
  std::vector<double> weights;
  // Separating functional (present iff nonlocal): value(b) > bound by the
  // reported violation.
  std::optional<BellFunctional> certificate;
  double residual = 0.0;   // L-inf table reproduction error when local
  double violation = 0.0;  // certificate value - bound when nonlocal
};

// LP membership test for the local (LOSR/LHV) polytope, solved by a
// self-contained phase-1 simplex with Bland's rule; infeasibility is turned
// into a Farkas certificate, i.e. a Bell inequality the behavior violates.
LocalTestResult is_local(const Behavior& b);

// CHSH value: max |S| over the 8 sign/relabeling symmetries of
// S = E(0,0) + E(0,1) + E(1,0) - E(1,1). Requires the (2,2,2,2) scenario.
double chsh_value(const Behavior& b);
// All 8 symmetrized CHSH functionals as BellFunctionals (bound 2 each).
std::vector<BellFunctional> chsh_functionals();

// Born rule: p(x1,y1|x0,y0) = Tr[rho (M^{x0}_{x1} (x) N^{y0}_{y1})].
Behavior behavior_from_state(const DensityMatrix& rho,
                             const std::vector<Povm>& a_povms,
                             const std::vector<Povm>& b_povms);

// Largest CHSH value reachable from a two-qubit state with projective
// measurements: 2 sqrt(t1 + t2) for the two largest eigenvalues of T^T T,
// T_ij = Tr[rho sigma_i (x) sigma_j].
double horodecki_chsh(const DensityMatrix& rho);
// The correlation matrix T itself.
Eigen::Matrix3d correlation_matrix(const DensityMatrix& rho);

// Projective qubit POVM for a measurement direction in the x-z plane:
// outcome 0 is the +1 eigenspace of cos(angle) sigma_z + sin(angle) sigma_x.
Povm angle_povm(double angle);
// Full Bloch-sphere direction (theta, phi).
Povm direction_povm(double theta, double phi);

Behavior pr_box();
// phi+ measured at the CHSH-optimal angles (value 2 sqrt 2).
Behavior tsirelson_behavior();
Behavior uniform_behavior(const Scenario& sc);

// Classical signalling test on the table marginals.
Signalling behavior_signalling(const Behavior& b);

// Embed a behavior as a quantum channel with diagonal Choi matrix
// (inputs X0,Y0 and outputs X1,Y1 as computational basis labels).
QuantumChannel behavior_to_channel(const Behavior& b);
// Inverse of the embedding; requires a channel with diagonal Choi.
Behavior channel_to_behavior(const QuantumChannel& c);

/*
 * Local pre/post processing with shared randomness acting on behaviors:
 * a mixture of members, each wiring
 *   x0' --pre_a--> x0,  (x1, x0') --post_a--> x1'   (and same for B).
 * This is the classical form of a delay-preserving local superprocess.
 */
struct LosrBehaviorMap {
  struct Member {
    double weight = 1.0;
    // pre_a[x0'][x0] = p(x0 | x0'), row-stochastic; similarly pre_b.
    std::vector<std::vector<double>> pre_a, pre_b;
    // post_a[x0'][x1][x1'] = p(x1' | x1, x0'); similarly post_b.
    std::vector<std::vector<std::vector<double>>> post_a, post_b;
  };
  Scenario in_sc;   // scenario of the behavior being transformed
  Scenario out_sc;  // scenario of the result
  std::vector<Member> members;

  Behavior apply(const Behavior& b) const;
};

LosrBehaviorMap identity_losr_map(const Scenario& sc);
// Deterministic output coarse-graining x1 -> min(x1, cap-1) on both parties.
LosrBehaviorMap coarse_grain_outputs(const Scenario& sc, int cap);
LosrBehaviorMap random_losr_map(const Scenario& in_sc, const Scenario& out_sc,
                                int n_members, std::uint64_t seed);

}  // namespace qproc
