#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "qproc/prelocc.hpp"

using namespace qproc;

namespace {

Behavior random_local_mixture(const Scenario& sc, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<Behavior> verts = enumerate_local_vertices(sc);
  std::vector<double> table(sc.table_size(), 0.0);
  double total = 0.0;
  for (const Behavior& v : verts) {
    double w = u(gen);
    total += w;
    for (size_t i = 0; i < table.size(); ++i) table[i] += w * v.p[i];
  }
  for (double& x : table) x /= total;
  return Behavior(sc, std::move(table));
}

}  // namespace

TEST_CASE("vertex enumeration counts") {
  CHECK(enumerate_local_vertices({2, 2, 2, 2}).size() == 16);
  CHECK(enumerate_local_vertices({1, 1, 2, 2}).size() == 4);
  CHECK(enumerate_local_vertices({2, 1, 2, 2}).size() == 8);

  // No duplicates.
  std::set<std::vector<double>> seen;
  for (const Behavior& v : enumerate_local_vertices({2, 2, 2, 2})) seen.insert(v.p);
  CHECK(seen.size() == 16);

  CHECK_THROWS_AS(enumerate_local_vertices({8, 8, 8, 8}), ValidationError);
}

TEST_CASE("local membership: soundness and certificates") {
  Scenario sc{2, 2, 2, 2};
  LocalTestResult uniform = is_local(uniform_behavior(sc));
  CHECK(uniform.local);
  CHECK(uniform.residual < 1e-7);

  LocalTestResult pr = is_local(pr_box());
  CHECK(!pr.local);
  REQUIRE(pr.certificate.has_value());
  CHECK(pr.violation >= 1e-8);
  // The certificate's bound is the recomputable vertex maximum.
  double bound = -1e300;
  for (const Behavior& v : enumerate_local_vertices(sc))
    bound = std::max(bound, pr.certificate->value(v));
  CHECK(pr.certificate->bound == doctest::Approx(bound).epsilon(1e-12));
  CHECK(pr.certificate->value(pr_box()) - bound >= 1e-8);

  LocalTestResult ts = is_local(tsirelson_behavior());
  CHECK(!ts.local);
  CHECK(ts.violation >= 1e-8);

  // Vertices themselves are local, and so are random mixtures.
  for (const Behavior& v : enumerate_local_vertices(sc)) CHECK(is_local(v).local);
  for (std::uint64_t s = 0; s < 25; ++s) {
    CHECK(is_local(random_local_mixture(sc, s)).local);
  }
}

TEST_CASE("chsh value") {
  Scenario sc{2, 2, 2, 2};
  std::vector<double> det(sc.table_size(), 0.0);
  for (int x0 = 0; x0 < 2; ++x0)
    for (int y0 = 0; y0 < 2; ++y0) det[Behavior::index(sc, x0, y0, 0, 0)] = 1.0;
  CHECK(chsh_value(Behavior(sc, det)) == doctest::Approx(2.0).epsilon(1e-12));

  CHECK(chsh_value(pr_box()) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(chsh_value(tsirelson_behavior()) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));

  CHECK_THROWS_AS(chsh_value(uniform_behavior({1, 1, 2, 2})), ValidationError);
}

TEST_CASE("chsh matches the eight explicit symmetrized functionals") {
  std::vector<BellFunctional> fs = chsh_functionals();
  CHECK(fs.size() == 8);
  for (std::uint64_t s = 0; s < 20; ++s) {
    Behavior b = random_local_mixture({2, 2, 2, 2}, 100 + s);
    double by_functionals = 0.0;
    for (const BellFunctional& f : fs) by_functionals = std::max(by_functionals, f.value(b));
    CHECK(chsh_value(b) == doctest::Approx(by_functionals).epsilon(1e-9));
  }
  double pr_by_f = 0.0;
  for (const BellFunctional& f : chsh_functionals()) pr_by_f = std::max(pr_by_f, f.value(pr_box()));
  CHECK(pr_by_f == doctest::Approx(4.0));
}

TEST_CASE("local behaviors never beat the chsh facet") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    Behavior b = random_local_mixture({2, 2, 2, 2}, 500 + s);
    CHECK(chsh_value(b) <= 2.0 + 1e-7);
  }
}

TEST_CASE("born rule behaviors") {
  // Product state: the table factorizes.
  DensityMatrix a = random_state({2}, 11);
  DensityMatrix b = random_state({2}, 12);
  DensityMatrix prod(tensor(a.rho, b.rho), DimFactorization({2, 2}));
  std::vector<Povm> ma = {random_povm({2}, 2, 1), random_povm({2}, 2, 2)};
  std::vector<Povm> mb = {random_povm({2}, 2, 3), random_povm({2}, 2, 4)};
  Behavior beh = behavior_from_state(prod, ma, mb);
  for (int x0 = 0; x0 < 2; ++x0)
    for (int y0 = 0; y0 < 2; ++y0)
      for (int x1 = 0; x1 < 2; ++x1)
        for (int y1 = 0; y1 < 2; ++y1) {
          double pa = (a.rho * ma[x0].effects[x1]).trace().real();
          double pb = (b.rho * mb[y0].effects[y1]).trace().real();
          CHECK(beh.at(x0, y0, x1, y1) == doctest::Approx(pa * pb).epsilon(1e-10));
        }

  // Werner state at p = 1/2 under the optimal angles: sqrt 2 by linearity.
  const double pi = std::acos(-1.0);
  std::vector<Povm> opt_a = {angle_povm(0.0), angle_povm(pi / 2)};
  std::vector<Povm> opt_b = {angle_povm(pi / 4), angle_povm(-pi / 4)};
  Behavior w = behavior_from_state(werner_state(0.5), opt_a, opt_b);
  CHECK(chsh_value(w) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("horodecki criterion") {
  CHECK(horodecki_chsh(phi_plus_state()) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
  DensityMatrix mixed(identity(4) / 4.0, DimFactorization({2, 2}));
  CHECK(horodecki_chsh(mixed) == doctest::Approx(0.0));
  for (double p : {0.2, 0.5, 0.8}) {
    CHECK(horodecki_chsh(werner_state(p)) ==
          doctest::Approx(2.0 * std::sqrt(2.0) * p).epsilon(1e-10));
  }
}

TEST_CASE("werner threshold sits at 1/sqrt(2)") {
  double lo = 0.5, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    double mid = (lo + hi) / 2.0;
    (horodecki_chsh(werner_state(mid)) > 2.0 ? hi : lo) = mid;
  }
  CHECK(std::abs((lo + hi) / 2.0 - 1.0 / std::sqrt(2.0)) < 1e-6);
}

TEST_CASE("horodecki matches grid + refinement maximization") {
  for (std::uint64_t s = 0; s < 6; ++s) {
    DensityMatrix rho = random_state({2, 2}, 900 + s);
    double grid = testing::chsh_max_grid_refine(rho);
    CHECK(std::abs(grid - horodecki_chsh(rho)) < 1e-4);
  }
}

TEST_CASE("separable states only generate local behaviors") {
  for (std::uint64_t s = 0; s < 8; ++s) {
    DensityMatrix rho = testing::random_separable_two_qubit(s);
    for (std::uint64_t m = 0; m < 6; ++m) {
      std::vector<Povm> ma = {random_povm({2}, 2, 10 * s + m), random_povm({2}, 2, 10 * s + m + 1)};
      std::vector<Povm> mb = {random_povm({2}, 2, 10 * s + m + 2),
                              random_povm({2}, 2, 10 * s + m + 3)};
      CHECK(is_local(behavior_from_state(rho, ma, mb)).local);
    }
  }
}

TEST_CASE("empty pre-processing protocol reduces to the born rule") {
  DensityMatrix rho = random_state({2, 2}, 41);
  std::vector<Povm> ma = {random_povm({2}, 2, 42), random_povm({2}, 2, 43)};
  std::vector<Povm> mb = {random_povm({2}, 2, 44), random_povm({2}, 2, 45)};
  PreLoccProtocol empty;
  Behavior direct = behavior_from_state(rho, ma, mb);
  Behavior via = behavior_from_prelocc(rho, empty, {ma}, {mb});
  for (size_t i = 0; i < direct.p.size(); ++i)
    CHECK(via.p[i] == doctest::Approx(direct.p[i]).epsilon(1e-12));
}

TEST_CASE("shared randomness rounds mix born behaviors convexly") {
  DensityMatrix rho = random_state({2, 2}, 51);
  std::vector<double> probs = {0.3, 0.7};
  PreLoccProtocol proto;
  proto.rounds.push_back({Party::A, {shared_randomness_instrument(probs, 2)}});

  std::vector<Povm> ma0 = {random_povm({2}, 2, 52), random_povm({2}, 2, 53)};
  std::vector<Povm> ma1 = {random_povm({2}, 2, 54), random_povm({2}, 2, 55)};
  std::vector<Povm> mb0 = {random_povm({2}, 2, 56), random_povm({2}, 2, 57)};
  std::vector<Povm> mb1 = {random_povm({2}, 2, 58), random_povm({2}, 2, 59)};

  Behavior mixed = behavior_from_prelocc(rho, proto, {ma0, ma1}, {mb0, mb1});
  Behavior b0 = behavior_from_state(rho, ma0, mb0);
  Behavior b1 = behavior_from_state(rho, ma1, mb1);
  for (size_t i = 0; i < mixed.p.size(); ++i)
    CHECK(std::abs(mixed.p[i] - (0.3 * b0.p[i] + 0.7 * b1.p[i])) < 1e-9);
}

TEST_CASE("protocols that discard the state give local behaviors") {
  // Replace-with-fresh-product: measure out Alice's qubit destructively and
  // prepare |0>; the conditional states are product, so the behavior is local.
  Mat k0 = Mat::Zero(2, 2), k1 = Mat::Zero(2, 2);
  k0(0, 0) = 1.0;  // |0><0|
  k1(0, 1) = 1.0;  // |0><1|
  Instrument replace({{k0, k1}}, 2);
  PreLoccProtocol proto;
  proto.rounds.push_back({Party::A, {replace}});
  proto.rounds.push_back({Party::B, {replace}});

  DensityMatrix rho = phi_plus_state();
  const double pi = std::acos(-1.0);
  std::vector<Povm> ma = {angle_povm(0.0), angle_povm(pi / 2)};
  std::vector<Povm> mb = {angle_povm(pi / 4), angle_povm(-pi / 4)};
  Behavior b = behavior_from_prelocc(rho, proto, {ma}, {mb});
  CHECK(is_local(b).local);
}

TEST_CASE("local filters reveal hidden nonlocality") {
  HiddenNonlocalityReport r = demo_hidden_nonlocality();
  CHECK(r.pre_chsh <= 2.0 + 1e-9);
  CHECK(r.post_chsh >= 2.001);
  CHECK(r.filter_success_prob > 0.0);
  CHECK(r.filter_success_prob <= 1.0);

  // The full pre-LOCC behavior built from the same filters beats the
  // unfiltered one on the success branch by construction.
  CHECK(r.post_chsh > r.pre_chsh);

  // Cross-check both bounds through the Born path at the Horodecki-optimal
  // angle-free oracle.
  CHECK(testing::chsh_max_grid_refine(r.state) <= 2.0 + 1e-4);
  CHECK(testing::chsh_max_grid_refine(r.filtered_state) >= 2.001 - 1e-4);
}

TEST_CASE("filter protocol behavior exceeds the unfiltered chsh") {
  HiddenNonlocalityReport r = demo_hidden_nonlocality();
  // Measure the filtered conditional state at its Horodecki-optimal angles via
  // the protocol machinery: transcript 0 carries the improved correlations.
  Mat f(2, 2);
  double theta = 0.5 * std::asin(0.9);
  f << std::sqrt(std::tan(theta)), 0.0, 0.0, 1.0;
  PreLoccProtocol proto;
  proto.rounds.push_back({Party::A, {filter_instrument(f)}});
  proto.rounds.push_back({Party::B, {filter_instrument(f)}});

  // Angles tuned for the filtered state.
  const double pi = std::acos(-1.0);
  std::vector<Povm> ma = {angle_povm(0.0), angle_povm(pi / 2)};
  std::vector<Povm> mb = {angle_povm(pi / 4), angle_povm(-pi / 4)};
  std::vector<std::vector<Povm>> by_t(4, ma);
  std::vector<std::vector<Povm>> by_t_b(4, mb);
  Behavior filtered = behavior_from_prelocc(r.state, proto, by_t, by_t_b);
  // The mixture includes failed branches, so compare against the success
  // conditional only as a lower-bound sanity check.
  CHECK(chsh_value(filtered) <= r.post_chsh + 1e-9);
}

TEST_CASE("classical signalling detection on tables") {
  Scenario sc{2, 1, 1, 2};
  std::vector<double> t(sc.table_size(), 0.0);
  t[Behavior::index(sc, 0, 0, 0, 0)] = 1.0;
  t[Behavior::index(sc, 1, 0, 0, 1)] = 1.0;  // y1 copies x0
  Behavior copy(sc, t);
  Signalling s = behavior_signalling(copy);
  CHECK(s.a_to_b);
  CHECK(!s.b_to_a);

  Signalling pr = behavior_signalling(pr_box());
  CHECK(!pr.a_to_b);
  CHECK(!pr.b_to_a);
}

TEST_CASE("behavior channel embedding round trips") {
  Behavior b = pr_box();
  QuantumChannel c = behavior_to_channel(b);
  Behavior back = channel_to_behavior(c);
  for (size_t i = 0; i < b.p.size(); ++i) CHECK(back.p[i] == doctest::Approx(b.p[i]));
  // Diagonal requirement.
  CHECK_THROWS_AS(channel_to_behavior(identity_channel(2, 1)), ValidationError);
}

TEST_CASE("losr behavior maps") {
  Behavior b = pr_box();
  Behavior same = identity_losr_map(b.sc).apply(b);
  for (size_t i = 0; i < b.p.size(); ++i) CHECK(same.p[i] == doctest::Approx(b.p[i]));

  Behavior collapsed = coarse_grain_outputs(b.sc, 1).apply(b);
  CHECK(collapsed.sc.nx1 == 1);
  CHECK(is_local(collapsed).local);

  Behavior mapped = random_losr_map(b.sc, b.sc, 3, 9).apply(b);
  CHECK(mapped.sc == b.sc);  // normalization validated in the constructor
}

TEST_CASE("behavior validation") {
  Scenario sc{2, 2, 2, 2};
  std::vector<double> bad(sc.table_size(), 1.0 / 3.0);
  CHECK_THROWS_AS(Behavior(sc, bad), ValidationError);

  std::vector<double> neg(sc.table_size(), 0.25);
  neg[0] = -1e-6;
  CHECK_THROWS_AS(Behavior(sc, neg), ValidationError);

  // A clamp-scale negative is absorbed.
  std::vector<double> tiny(sc.table_size(), 0.25);
  tiny[0] = -5e-13;
  tiny[1] = tiny[2] = tiny[3] = (1.0 + 5e-13) / 3.0;
  Behavior ok(sc, tiny);
  CHECK(ok.p[0] == 0.0);
}
