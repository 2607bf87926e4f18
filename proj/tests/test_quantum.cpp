#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qproc/quantum.hpp"

using namespace qproc;

namespace {

Mat pauli_kraus(int which) {
  Mat m(2, 2);
  switch (which) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, Cplx(0, -1), Cplx(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

QuantumChannel depolarizing_qubit() {
  std::vector<Mat> kraus;
  for (int i = 0; i < 4; ++i) kraus.push_back(pauli_kraus(i) / 2.0);
  return kraus_to_choi(kraus, 2, 1, 2, 1);
}

}  // namespace

TEST_CASE("kraus to choi") {
  QuantumChannel id1 = identity_channel(2, 1);
  CHECK((id1.choi - 2.0 * phi_plus_state().rho).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(id1.choi.trace().real() == doctest::Approx(2.0));

  DensityMatrix rho = random_state({2, 2}, 5);
  QuantumChannel repl = replacement_channel(rho, 2, 2);
  CHECK((repl.choi - tensor(identity(4), rho.rho)).cwiseAbs().maxCoeff() < 1e-12);

  QuantumChannel dep = depolarizing_qubit();
  CHECK((dep.choi - tensor(identity(2), identity(2) / 2.0)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("choi to kraus and back") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    int da0 = 1 + static_cast<int>(seed % 3);
    int da1 = 1 + static_cast<int>((seed / 3) % 3);
    QuantumChannel c = random_channel(da0, 1, da1, 1, 1000 + seed);
    QuantumChannel back = kraus_to_choi(choi_to_kraus(c), c.dA0, c.dB0, c.dA1, c.dB1);
    CHECK((back.choi - c.choi).cwiseAbs().maxCoeff() < 1e-8);
  }

  // Identity channel: a single unitary Kraus operator (up to phase).
  std::vector<Mat> k = choi_to_kraus(identity_channel(2, 1));
  CHECK(k.size() == 1);
  CHECK((k[0].adjoint() * k[0] - identity(2)).cwiseAbs().maxCoeff() < 1e-12);

  // Replacement by a pure state: Kraus rank matches, channel reproduced on a basis.
  Cvec v = random_pure_state(2, 9);
  DensityMatrix pure(projector(v), DimFactorization({2, 1}));
  QuantumChannel repl = replacement_channel(pure, 2, 1);
  std::vector<Mat> rk = choi_to_kraus(repl);
  CHECK(rk.size() <= 2);
  for (int i = 0; i < 2; ++i) {
    Mat basis = Mat::Zero(2, 2);
    basis(i, i) = 1.0;
    Mat out = apply_channel_via_kraus(repl, basis);
    CHECK((out - pure.rho).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("apply channel") {
  DensityMatrix rho = random_state({2}, 17);
  DensityMatrix rho2(rho.rho, DimFactorization({2, 1}));
  QuantumChannel id1 = identity_channel(2, 1);
  CHECK((apply_channel(id1, rho2).rho - rho.rho).cwiseAbs().maxCoeff() < 1e-12);

  DensityMatrix target = random_state({2, 1}, 23);
  QuantumChannel repl = replacement_channel(target, 2, 1);
  CHECK((apply_channel(repl, rho2).rho - target.rho).cwiseAbs().maxCoeff() < 1e-10);

  Mat zero = Mat::Zero(2, 2);
  zero(0, 0) = 1.0;
  Mat out = apply_channel_via_kraus(depolarizing_qubit(), zero);
  CHECK((out - identity(2) / 2.0).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("choi and kraus application routes agree") {
  QuantumChannel c = random_channel(2, 2, 2, 2, 77);
  for (std::uint64_t s = 0; s < 20; ++s) {
    DensityMatrix rho = random_state({2, 2}, 300 + s);
    Mat via_choi = apply_channel_via_choi(c, rho.rho);
    Mat via_kraus = apply_channel_via_kraus(c, rho.rho);
    CHECK((via_choi - via_kraus).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("signalling analysis") {
  QuantumChannel ea = random_channel(2, 1, 2, 1, 3);
  QuantumChannel fb = random_channel(1, 2, 1, 2, 4);
  Signalling none = is_signalling(product_channel(ea, fb));
  CHECK(!none.a_to_b);
  CHECK(!none.b_to_a);

  Signalling both = is_signalling(swap_channel());
  CHECK(both.a_to_b);
  CHECK(both.b_to_a);

  // Classical one-way channel: Bob's output copies Alice's input.
  Mat j = Mat::Zero(4, 4);
  for (int x = 0; x < 2; ++x) j(x * 2 + x, x * 2 + x) = 1.0;
  QuantumChannel copy(j, 2, 1, 1, 2);
  Signalling one_way = is_signalling(copy);
  CHECK(one_way.a_to_b);
  CHECK(!one_way.b_to_a);
}

TEST_CASE("mixtures of product channels never signal") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::vector<QuantumChannel> members;
    std::vector<double> w;
    for (int j = 0; j < 3; ++j) {
      members.push_back(product_channel(random_channel(2, 1, 2, 1, 10 * seed + j),
                                        random_channel(1, 2, 1, 2, 10 * seed + j + 5)));
      w.push_back(1.0 / 3.0);
    }
    Signalling s = is_signalling(mix_channels(w, members));
    CHECK(!s.a_to_b);
    CHECK(!s.b_to_a);
  }
}

TEST_CASE("generators satisfy their invariants and are deterministic") {
  DensityMatrix s1 = random_state({2}, 1);
  DensityMatrix s2 = random_state({2}, 1);
  CHECK((s1.rho - s2.rho).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(s1.rho.trace().real() - 1.0) < 1e-12);

  Povm p = random_povm({2}, 3, 7);
  Mat sum = Mat::Zero(2, 2);
  for (const Mat& e : p.effects) sum += e;
  CHECK((sum - identity(2)).cwiseAbs().maxCoeff() < 1e-9);

  QuantumChannel c = random_channel(2, 2, 2, 2, 7);
  CHECK(c.choi.rows() == 16);  // constructor already validated CPTP
}

TEST_CASE("validation rejects broken objects") {
  // Trace-decreasing filter without its complement.
  Mat f = Mat::Zero(2, 2);
  f(0, 0) = 1.0;
  f(1, 1) = 0.5;
  CHECK_THROWS_AS(kraus_to_choi({f}, 2, 1, 2, 1), ValidationError);

  Mat not_psd = identity(4);
  not_psd(0, 0) = -0.1;
  CHECK_THROWS_AS(DensityMatrix(not_psd / not_psd.trace().real(), DimFactorization({2, 2})),
                  ValidationError);

  Mat unnormalized = identity(4);
  CHECK_THROWS_AS(DensityMatrix(unnormalized, DimFactorization({2, 2})), ValidationError);

  std::vector<Mat> effects = {identity(2), identity(2)};
  CHECK_THROWS_AS(Povm(effects, DimFactorization({2})), ValidationError);
}

TEST_CASE("werner family") {
  CHECK((werner_state(1.0).rho - phi_plus_state().rho).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((werner_state(0.0).rho - identity(4) / 4.0).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(werner_state(1.5), ValidationError);
}
