#include "qproc/behavior.hpp"

#include <cmath>
#include <random>

#include "qproc/lp.hpp"

namespace qproc {

Behavior::Behavior(Scenario s, std::vector<double> table) : sc(s), p(std::move(table)) {
  if (sc.nx0 < 1 || sc.ny0 < 1 || sc.nx1 < 1 || sc.ny1 < 1)
    throw ValidationError("Behavior: scenario sizes must be >= 1");
  if (static_cast<int>(p.size()) != sc.table_size())
    throw ValidationError("Behavior: table size does not match scenario");
  for (double& v : p) {
    if (v < -1e-12)
      throw ValidationError("Behavior: negative probability beyond clamp tolerance");
    if (v < 0.0) v = 0.0;
  }
  for (int x0 = 0; x0 < sc.nx0; ++x0) {
    for (int y0 = 0; y0 < sc.ny0; ++y0) {
      double sum = 0.0;
      for (int x1 = 0; x1 < sc.nx1; ++x1)
        for (int y1 = 0; y1 < sc.ny1; ++y1) sum += at(x0, y0, x1, y1);
      if (std::abs(sum - 1.0) > kProbTol)
        throw ValidationError("Behavior: conditional distribution is not normalized");
    }
  }
}

int Behavior::index(const Scenario& s, int x0, int y0, int x1, int y1) {
  return ((x0 * s.ny0 + y0) * s.nx1 + x1) * s.ny1 + y1;
}

double Behavior::at(int x0, int y0, int x1, int y1) const {
  return p[index(sc, x0, y0, x1, y1)];
}

double& Behavior::at(int x0, int y0, int x1, int y1) {
  return p[index(sc, x0, y0, x1, y1)];
}

std::vector<double> Behavior::conditional(int x0, int y0) const {
  std::vector<double> out(sc.n_outputs());
  for (int x1 = 0; x1 < sc.nx1; ++x1)
    for (int y1 = 0; y1 < sc.ny1; ++y1) out[x1 * sc.ny1 + y1] = at(x0, y0, x1, y1);
  return out;
}

double BellFunctional::value(const Behavior& b) const {
  if (!(b.sc == sc)) throw ValidationError("BellFunctional: scenario mismatch");
  double v = 0.0;
  for (size_t i = 0; i < c.size(); ++i) v += c[i] * b.p[i];
  return v;
}

long long local_vertex_count(const Scenario& sc) {
  auto ipow = [](long long base, int exp) {
    long long r = 1;
    for (int i = 0; i < exp; ++i) {
      r *= base;
      if (r > 2'000'000) return r;  // caller range-checks
    }
    return r;
  };
  return ipow(sc.nx1, sc.nx0) * ipow(sc.ny1, sc.ny0);
}

std::vector<Behavior> enumerate_local_vertices(const Scenario& sc) {
  const long long count = local_vertex_count(sc);
  if (count > 1'000'000)
    throw ValidationError("enumerate_local_vertices: scenario too large (> 1e6 vertices)");

  // A strategy is a function input -> output, encoded base-n_outputs.
  auto strategy_digit = [](long long code, int pos, int base) {
    for (int i = 0; i < pos; ++i) code /= base;
    return static_cast<int>(code % base);
  };

  long long na = 1;
  for (int i = 0; i < sc.nx0; ++i) na *= sc.nx1;
  long long nb = 1;
  for (int i = 0; i < sc.ny0; ++i) nb *= sc.ny1;

  std::vector<Behavior> verts;
  verts.reserve(static_cast<size_t>(count));
  for (long long a = 0; a < na; ++a) {
    for (long long b = 0; b < nb; ++b) {
      std::vector<double> table(sc.table_size(), 0.0);
      for (int x0 = 0; x0 < sc.nx0; ++x0) {
        int x1 = strategy_digit(a, x0, sc.nx1);
        for (int y0 = 0; y0 < sc.ny0; ++y0) {
          int y1 = strategy_digit(b, y0, sc.ny1);
          table[Behavior::index(sc, x0, y0, x1, y1)] = 1.0;
        }
      }
      verts.emplace_back(sc, std::move(table));
    }
  }
  return verts;
}

LocalTestResult is_local(const Behavior& b) {
  const std::vector<Behavior> verts = enumerate_local_vertices(b.sc);
  const int rows = b.sc.table_size() + 1;  // table equalities + weight normalization
  const int cols = static_cast<int>(verts.size());

  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd rhs(rows);
  for (int r = 0; r < rows - 1; ++r) {
    rhs(r) = b.p[r];
    for (int c = 0; c < cols; ++c) a(r, c) = verts[c].p[r];
  }
  a.row(rows - 1).setOnes();
  rhs(rows - 1) = 1.0;

  FeasibilityResult lp = solve_equality_feasibility(a, rhs, 1e-8);

  LocalTestResult res;
  if (lp.feasible) {
    res.local = true;
    res.weights = lp.x;
    double linf = 0.0;
    for (int r = 0; r < rows - 1; ++r) {
      double q = 0.0;
      for (int c = 0; c < cols; ++c) q += lp.x[c] * a(r, c);
      linf = std::max(linf, std::abs(q - rhs(r)));
    }
    res.residual = linf;
    if (linf > 1e-7)
      throw ValidationError("is_local: simplex returned weights with residual above 1e-7");
    return res;
  }

  // Farkas certificate: the table part of y is a Bell functional the behavior
  // violates. Normalize to sup-norm 1 for a tidy certificate.
  std::vector<double> c(lp.farkas_y.begin(), lp.farkas_y.end() - 1);
  double scale = 0.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  if (scale <= 0.0)
    throw ValidationError("is_local: LP reported infeasibility without a usable certificate");
  for (double& v : c) v /= scale;

  BellFunctional f;
  f.sc = b.sc;
  f.c = std::move(c);
  double bound = -1e300;
  for (const Behavior& v : verts) bound = std::max(bound, f.value(v));
  f.bound = bound;

  res.local = false;
  res.violation = f.value(b) - f.bound;
  res.certificate = std::move(f);
  if (res.violation < 1e-8)
    throw ValidationError("is_local: certificate violation below tolerance; LP did not converge");
  return res;
}

namespace {

double correlator(const Behavior& b, int x0, int y0) {
  double e = 0.0;
  for (int x1 = 0; x1 < 2; ++x1)
    for (int y1 = 0; y1 < 2; ++y1)
      e += (((x1 ^ y1) == 0) ? 1.0 : -1.0) * b.at(x0, y0, x1, y1);
  return e;
}

}  // namespace

double chsh_value(const Behavior& b) {
  if (!(b.sc == Scenario{2, 2, 2, 2}))
    throw ValidationError("chsh_value: requires the (2,2,2,2) scenario");
  double e[2][2];
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) e[x][y] = correlator(b, x, y);
  double best = 0.0;
  for (int mx = 0; mx < 2; ++mx) {
    for (int my = 0; my < 2; ++my) {
      // Minus sign at position (mx, my).
      double s = 0.0;
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) s += ((x == mx && y == my) ? -1.0 : 1.0) * e[x][y];
      best = std::max(best, std::abs(s));
    }
  }
  return best;
}

std::vector<BellFunctional> chsh_functionals() {
  Scenario sc{2, 2, 2, 2};
  std::vector<BellFunctional> out;
  for (int mx = 0; mx < 2; ++mx) {
    for (int my = 0; my < 2; ++my) {
      for (int sign = -1; sign <= 1; sign += 2) {
        BellFunctional f;
        f.sc = sc;
        f.c.assign(sc.table_size(), 0.0);
        for (int x0 = 0; x0 < 2; ++x0)
          for (int y0 = 0; y0 < 2; ++y0)
            for (int x1 = 0; x1 < 2; ++x1)
              for (int y1 = 0; y1 < 2; ++y1) {
                double term = (((x1 ^ y1) == 0) ? 1.0 : -1.0);
                if (x0 == mx && y0 == my) term = -term;
                f.c[Behavior::index(sc, x0, y0, x1, y1)] = sign * term;
              }
        f.bound = 2.0;
        out.push_back(std::move(f));
      }
    }
  }
  return out;
}

Behavior behavior_from_state(const DensityMatrix& rho,
                             const std::vector<Povm>& a_povms,
                             const std::vector<Povm>& b_povms) {
  if (rho.dims.count() != 2)
    throw ValidationError("behavior_from_state: state must carry bipartite dims");
  const int da = rho.dims.dims[0];
  const int db = rho.dims.dims[1];
  if (a_povms.empty() || b_povms.empty())
    throw ValidationError("behavior_from_state: each party needs at least one POVM");
  Scenario sc;
  sc.nx0 = static_cast<int>(a_povms.size());
  sc.ny0 = static_cast<int>(b_povms.size());
  sc.nx1 = a_povms[0].n_outcomes();
  sc.ny1 = b_povms[0].n_outcomes();
  for (const Povm& m : a_povms) {
    if (m.dims.total() != da || m.n_outcomes() != sc.nx1)
      throw ValidationError("behavior_from_state: A-side POVM dimension mismatch");
  }
  for (const Povm& m : b_povms) {
    if (m.dims.total() != db || m.n_outcomes() != sc.ny1)
      throw ValidationError("behavior_from_state: B-side POVM dimension mismatch");
  }

  std::vector<double> table(sc.table_size());
  for (int x0 = 0; x0 < sc.nx0; ++x0)
    for (int y0 = 0; y0 < sc.ny0; ++y0)
      for (int x1 = 0; x1 < sc.nx1; ++x1)
        for (int y1 = 0; y1 < sc.ny1; ++y1) {
          Cplx tr = (rho.rho * tensor(a_povms[x0].effects[x1], b_povms[y0].effects[y1])).trace();
          table[Behavior::index(sc, x0, y0, x1, y1)] = std::max(0.0, tr.real());
        }
  // Renormalize per input pair to absorb numerical ripple.
  for (int x0 = 0; x0 < sc.nx0; ++x0)
    for (int y0 = 0; y0 < sc.ny0; ++y0) {
      double sum = 0.0;
      for (int x1 = 0; x1 < sc.nx1; ++x1)
        for (int y1 = 0; y1 < sc.ny1; ++y1) sum += table[Behavior::index(sc, x0, y0, x1, y1)];
      if (std::abs(sum - 1.0) > 1e-6)
        throw ValidationError("behavior_from_state: Born probabilities are not normalized");
      for (int x1 = 0; x1 < sc.nx1; ++x1)
        for (int y1 = 0; y1 < sc.ny1; ++y1) table[Behavior::index(sc, x0, y0, x1, y1)] /= sum;
    }
  return Behavior(sc, std::move(table));
}

namespace {

Mat pauli(int i) {
  Mat m(2, 2);
  switch (i) {
    case 0: m << 0, 1, 1, 0; break;                        // sigma_x
    case 1: m << 0, Cplx(0, -1), Cplx(0, 1), 0; break;     // sigma_y
    default: m << 1, 0, 0, -1; break;                      // sigma_z
  }
  return m;
}

}  // namespace

Eigen::Matrix3d correlation_matrix(const DensityMatrix& rho) {
  if (rho.dim() != 4 || rho.dims.count() != 2 || rho.dims.dims[0] != 2)
    throw ValidationError("correlation_matrix: requires a two-qubit state");
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      t(i, j) = (rho.rho * tensor(pauli(i), pauli(j))).trace().real();
  return t;
}

double horodecki_chsh(const DensityMatrix& rho) {
  Eigen::Matrix3d t = correlation_matrix(rho);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(t.transpose() * t);
  const auto& ev = es.eigenvalues();  // ascending
  return 2.0 * std::sqrt(ev(1) + ev(2));
}

Povm angle_povm(double angle) {
  Mat obs = std::cos(angle) * pauli(2) + std::sin(angle) * pauli(0);
  std::vector<Mat> effects = {(identity(2) + obs) / 2.0, (identity(2) - obs) / 2.0};
  return Povm(std::move(effects), DimFactorization({2}));
}

Povm direction_povm(double theta, double phi) {
  Mat obs = std::sin(theta) * std::cos(phi) * pauli(0) +
            std::sin(theta) * std::sin(phi) * pauli(1) + std::cos(theta) * pauli(2);
  std::vector<Mat> effects = {(identity(2) + obs) / 2.0, (identity(2) - obs) / 2.0};
  return Povm(std::move(effects), DimFactorization({2}));
}

Behavior pr_box() {
  Scenario sc{2, 2, 2, 2};
  std::vector<double> table(sc.table_size(), 0.0);
  for (int x0 = 0; x0 < 2; ++x0)
    for (int y0 = 0; y0 < 2; ++y0)
      for (int x1 = 0; x1 < 2; ++x1)
        for (int y1 = 0; y1 < 2; ++y1)
          if ((x1 ^ y1) == (x0 & y0)) table[Behavior::index(sc, x0, y0, x1, y1)] = 0.5;
  return Behavior(sc, std::move(table));
}

Behavior tsirelson_behavior() {
  const double pi = std::acos(-1.0);
  std::vector<Povm> a = {angle_povm(0.0), angle_povm(pi / 2.0)};
  std::vector<Povm> b = {angle_povm(pi / 4.0), angle_povm(-pi / 4.0)};
  return behavior_from_state(phi_plus_state(), a, b);
}

Behavior uniform_behavior(const Scenario& sc) {
  std::vector<double> table(sc.table_size(), 1.0 / sc.n_outputs());
  return Behavior(sc, std::move(table));
}

Signalling behavior_signalling(const Behavior& b) {
  Signalling s;
  // A -> B: Bob's marginal p(y1 | x0, y0) must not depend on x0.
  for (int y0 = 0; y0 < b.sc.ny0 && !s.a_to_b; ++y0)
    for (int y1 = 0; y1 < b.sc.ny1 && !s.a_to_b; ++y1) {
      double ref = 0.0;
      for (int x1 = 0; x1 < b.sc.nx1; ++x1) ref += b.at(0, y0, x1, y1);
      for (int x0 = 1; x0 < b.sc.nx0; ++x0) {
        double m = 0.0;
        for (int x1 = 0; x1 < b.sc.nx1; ++x1) m += b.at(x0, y0, x1, y1);
        if (std::abs(m - ref) > kCptpTol) s.a_to_b = true;
      }
    }
  for (int x0 = 0; x0 < b.sc.nx0 && !s.b_to_a; ++x0)
    for (int x1 = 0; x1 < b.sc.nx1 && !s.b_to_a; ++x1) {
      double ref = 0.0;
      for (int y1 = 0; y1 < b.sc.ny1; ++y1) ref += b.at(x0, 0, x1, y1);
      for (int y0 = 1; y0 < b.sc.ny0; ++y0) {
        double m = 0.0;
        for (int y1 = 0; y1 < b.sc.ny1; ++y1) m += b.at(x0, y0, x1, y1);
        if (std::abs(m - ref) > kCptpTol) s.b_to_a = true;
      }
    }
  return s;
}

QuantumChannel behavior_to_channel(const Behavior& b) {
  const int din = b.sc.nx0 * b.sc.ny0;
  const int dout = b.sc.nx1 * b.sc.ny1;
  Mat j = Mat::Zero(din * dout, din * dout);
  for (int x0 = 0; x0 < b.sc.nx0; ++x0)
    for (int y0 = 0; y0 < b.sc.ny0; ++y0)
      for (int x1 = 0; x1 < b.sc.nx1; ++x1)
        for (int y1 = 0; y1 < b.sc.ny1; ++y1) {
          int i = x0 * b.sc.ny0 + y0;
          int o = x1 * b.sc.ny1 + y1;
          j(i * dout + o, i * dout + o) = b.at(x0, y0, x1, y1);
        }
  return QuantumChannel(std::move(j), b.sc.nx0, b.sc.ny0, b.sc.nx1, b.sc.ny1);
}

Behavior channel_to_behavior(const QuantumChannel& c) {
  Scenario sc{c.dA0, c.dB0, c.dA1, c.dB1};
  const int din = c.din();
  const int dout = c.dout();
  for (int r = 0; r < c.choi.rows(); ++r)
    for (int col = 0; col < c.choi.cols(); ++col)
      if (r != col && std::abs(c.choi(r, col)) > kCptpTol)
        throw ValidationError("channel_to_behavior: Choi matrix is not diagonal");
  std::vector<double> table(sc.table_size());
  for (int x0 = 0; x0 < sc.nx0; ++x0)
    for (int y0 = 0; y0 < sc.ny0; ++y0)
      for (int x1 = 0; x1 < sc.nx1; ++x1)
        for (int y1 = 0; y1 < sc.ny1; ++y1) {
          int i = x0 * sc.ny0 + y0;
          int o = x1 * sc.ny1 + y1;
          table[Behavior::index(sc, x0, y0, x1, y1)] =
              std::max(0.0, c.choi(i * dout + o, i * dout + o).real());
        }
  (void)din;
  return Behavior(sc, std::move(table));
}

Behavior LosrBehaviorMap::apply(const Behavior& b) const {
  if (!(b.sc == in_sc)) throw ValidationError("LosrBehaviorMap: input scenario mismatch");
  std::vector<double> table(out_sc.table_size(), 0.0);
  for (const Member& m : members) {
    for (int xp = 0; xp < out_sc.nx0; ++xp)
      for (int yp = 0; yp < out_sc.ny0; ++yp)
        for (int x0 = 0; x0 < in_sc.nx0; ++x0)
          for (int y0 = 0; y0 < in_sc.ny0; ++y0) {
            double pin = m.pre_a[xp][x0] * m.pre_b[yp][y0];
            if (pin == 0.0) continue;
            for (int x1 = 0; x1 < in_sc.nx1; ++x1)
              for (int y1 = 0; y1 < in_sc.ny1; ++y1) {
                double pb = b.at(x0, y0, x1, y1);
                if (pb == 0.0) continue;
                for (int xo = 0; xo < out_sc.nx1; ++xo)
                  for (int yo = 0; yo < out_sc.ny1; ++yo) {
                    table[Behavior::index(out_sc, xp, yp, xo, yo)] +=
                        m.weight * pin * pb * m.post_a[xp][x1][xo] * m.post_b[yp][y1][yo];
                  }
              }
          }
  }
  return Behavior(out_sc, std::move(table));
}

LosrBehaviorMap identity_losr_map(const Scenario& sc) {
  LosrBehaviorMap map;
  map.in_sc = sc;
  map.out_sc = sc;
  LosrBehaviorMap::Member m;
  m.weight = 1.0;
  m.pre_a.assign(sc.nx0, std::vector<double>(sc.nx0, 0.0));
  m.pre_b.assign(sc.ny0, std::vector<double>(sc.ny0, 0.0));
  for (int i = 0; i < sc.nx0; ++i) m.pre_a[i][i] = 1.0;
  for (int i = 0; i < sc.ny0; ++i) m.pre_b[i][i] = 1.0;
  m.post_a.assign(sc.nx0, std::vector<std::vector<double>>(
                              sc.nx1, std::vector<double>(sc.nx1, 0.0)));
  m.post_b.assign(sc.ny0, std::vector<std::vector<double>>(
                              sc.ny1, std::vector<double>(sc.ny1, 0.0)));
  for (int x0 = 0; x0 < sc.nx0; ++x0)
    for (int x1 = 0; x1 < sc.nx1; ++x1) m.post_a[x0][x1][x1] = 1.0;
  for (int y0 = 0; y0 < sc.ny0; ++y0)
    for (int y1 = 0; y1 < sc.ny1; ++y1) m.post_b[y0][y1][y1] = 1.0;
  map.members.push_back(std::move(m));
  return map;
}

LosrBehaviorMap coarse_grain_outputs(const Scenario& sc, int cap) {
  if (cap < 1 || cap > sc.nx1 || cap > sc.ny1)
    throw ValidationError("coarse_grain_outputs: cap out of range");
  LosrBehaviorMap map = identity_losr_map(sc);
  map.out_sc.nx1 = cap;
  map.out_sc.ny1 = cap;
  LosrBehaviorMap::Member& m = map.members[0];
  m.post_a.assign(sc.nx0, std::vector<std::vector<double>>(
                              sc.nx1, std::vector<double>(cap, 0.0)));
  m.post_b.assign(sc.ny0, std::vector<std::vector<double>>(
                              sc.ny1, std::vector<double>(cap, 0.0)));
  for (int x0 = 0; x0 < sc.nx0; ++x0)
    for (int x1 = 0; x1 < sc.nx1; ++x1) m.post_a[x0][x1][std::min(x1, cap - 1)] = 1.0;
  for (int y0 = 0; y0 < sc.ny0; ++y0)
    for (int y1 = 0; y1 < sc.ny1; ++y1) m.post_b[y0][y1][std::min(y1, cap - 1)] = 1.0;
  return map;
}

namespace {

std::vector<double> random_distribution(int n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> d(n);
  double sum = 0.0;
  for (double& v : d) {
    v = u(gen);
    sum += v;
  }
  for (double& v : d) v /= sum;
  return d;
}

}  // namespace

LosrBehaviorMap random_losr_map(const Scenario& in_sc, const Scenario& out_sc,
                                int n_members, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  LosrBehaviorMap map;
  map.in_sc = in_sc;
  map.out_sc = out_sc;
  std::vector<double> w = random_distribution(n_members, gen);
  for (int k = 0; k < n_members; ++k) {
    LosrBehaviorMap::Member m;
    m.weight = w[k];
    m.pre_a.resize(out_sc.nx0);
    for (auto& row : m.pre_a) row = random_distribution(in_sc.nx0, gen);
    m.pre_b.resize(out_sc.ny0);
    for (auto& row : m.pre_b) row = random_distribution(in_sc.ny0, gen);
    m.post_a.assign(out_sc.nx0, std::vector<std::vector<double>>(in_sc.nx1));
    for (auto& per_input : m.post_a)
      for (auto& row : per_input) row = random_distribution(out_sc.nx1, gen);
    m.post_b.assign(out_sc.ny0, std::vector<std::vector<double>>(in_sc.ny1));
    for (auto& per_input : m.post_b)
      for (auto& row : per_input) row = random_distribution(out_sc.ny1, gen);
    map.members.push_back(std::move(m));
  }
  return map;
}

}  // namespace qproc
