#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qproc/mat.hpp"

using namespace qproc;

namespace {

Mat sigma_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Mat random_hermitian(int d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Mat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Cplx(n(gen), n(gen));
  return (g + g.adjoint()) / 2.0;
}

Mat phi_plus_proj() {
  Cvec v = Cvec::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return projector(v);
}

}  // namespace

TEST_CASE("tensor products") {
  CHECK((tensor(identity(2), identity(2)) - identity(4)).cwiseAbs().maxCoeff() == 0.0);

  Mat d10 = Mat::Zero(2, 2), d01 = Mat::Zero(2, 2);
  d10(0, 0) = 1.0;
  d01(1, 1) = 1.0;
  Mat expect = Mat::Zero(4, 4);
  expect(1, 1) = 1.0;
  CHECK((tensor(d10, d01) - expect).cwiseAbs().maxCoeff() == 0.0);

  // sigma_x (x) sigma_x maps |00> to |11>.
  Cvec v00 = tensor_vec(basis_ket(2, 0), basis_ket(2, 0));
  Cvec v11 = tensor_vec(basis_ket(2, 1), basis_ket(2, 1));
  Cvec moved = tensor(sigma_x(), sigma_x()) * v00;
  CHECK((moved - v11).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("tensor associativity") {
  // Index bookkeeping is exact; the scalar products reassociate, so allow ulps.
  Mat a = random_hermitian(2, 7), b = random_hermitian(3, 8), c = random_hermitian(2, 9);
  CHECK((tensor(tensor(a, b), c) - tensor(a, tensor(b, c))).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("partial trace") {
  Mat red = partial_trace(phi_plus_proj(), {2, 2}, {0});
  CHECK((red - identity(2) / 2.0).cwiseAbs().maxCoeff() < 1e-14);

  Mat rho = random_hermitian(2, 1);
  Mat sig = random_hermitian(3, 2);
  Mat keep_a = partial_trace(tensor(rho, sig), {2, 3}, {0});
  CHECK((keep_a - rho * sig.trace()).cwiseAbs().maxCoeff() < 1e-12);

  Mat all_traced = partial_trace(tensor(rho, sig), {2, 3}, {});
  CHECK(all_traced.rows() == 1);
  CHECK(std::abs(all_traced(0, 0) - (rho.trace() * sig.trace())) < 1e-12);

  // Trace preserved in general.
  Mat m = random_hermitian(12, 3);
  CHECK(std::abs(partial_trace(m, {2, 3, 2}, {1}).trace() - m.trace()) < 1e-12);
}

TEST_CASE("partial transpose") {
  Mat rho = random_hermitian(2, 4);
  Mat sig = random_hermitian(2, 5);
  Mat pt = partial_transpose(tensor(rho, sig), {2, 2}, 1);
  CHECK((pt - tensor(rho, sig.transpose())).cwiseAbs().maxCoeff() < 1e-14);

  // State-normalized phi+ has partial-transpose spectrum {1/2, 1/2, 1/2, -1/2};
  // the unnormalized Choi convention doubles it.
  Mat ptp = partial_transpose(phi_plus_proj(), {2, 2}, 1);
  CHECK(min_eigenvalue(ptp) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(min_eigenvalue(2.0 * ptp) == doctest::Approx(-1.0).epsilon(1e-12));

  Mat m = random_hermitian(6, 6);
  CHECK((partial_transpose(partial_transpose(m, {2, 3}, 0), {2, 3}, 0) - m)
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("hermitian eigendecomposition") {
  Mat d = Mat::Zero(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  d(2, 2) = 2.0;
  HermitianEig e = eig_hermitian(d);
  CHECK(e.values(0) == doctest::Approx(1.0));
  CHECK(e.values(1) == doctest::Approx(2.0));
  CHECK(e.values(2) == doctest::Approx(3.0));

  HermitianEig ex = eig_hermitian(sigma_x());
  CHECK(ex.values(0) == doctest::Approx(-1.0));
  CHECK(ex.values(1) == doctest::Approx(1.0));

  Mat m = random_hermitian(8, 11);
  HermitianEig em = eig_hermitian(m);
  Mat rebuilt = em.vectors * em.values.asDiagonal() * em.vectors.adjoint();
  CHECK((rebuilt - m).norm() < 1e-8);

  Mat bad = Mat::Zero(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(eig_hermitian(bad), ValidationError);
}

TEST_CASE("psd predicate agrees with a Cholesky-style check") {
  std::mt19937_64 gen(42);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    int d = 2 + static_cast<int>(gen() % 5);
    Mat g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = Cplx(n(gen), n(gen));
    Mat gram = g * g.adjoint();
    CHECK(is_psd(gram));
    Eigen::LLT<Mat> llt(gram + 1e-12 * identity(d));
    CHECK(llt.info() == Eigen::Success);
  }
  // And a matrix with a genuinely negative direction fails both.
  Mat neg = identity(2);
  neg(1, 1) = -0.5;
  CHECK(!is_psd(neg));
  Eigen::LLT<Mat> llt(neg);
  CHECK(llt.info() != Eigen::Success);
}

TEST_CASE("trace of tensor against partial trace is tight") {
  Mat rho = random_hermitian(3, 21);
  Mat sig = random_hermitian(2, 22);
  Mat out = partial_trace(tensor(rho, sig), {3, 2}, {0});
  CHECK((out - rho * sig.trace()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("system permutation") {
  Mat a = random_hermitian(2, 31), b = random_hermitian(3, 32), c = random_hermitian(2, 33);
  Mat abc = tensor(tensor(a, b), c);
  Mat cab = permute_systems(abc, {2, 3, 2}, {2, 0, 1});
  CHECK((cab - tensor(tensor(c, a), b)).cwiseAbs().maxCoeff() < 1e-13);
  // Round trip through the inverse permutation.
  Mat back = permute_systems(cab, {2, 2, 3}, {1, 2, 0});
  CHECK((back - abc).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(permute_systems(abc, {2, 3, 2}, {0, 0, 1}), ValidationError);
}

TEST_CASE("dimension mismatches are rejected") {
  Mat m = identity(4);
  CHECK_THROWS_AS(partial_trace(m, {3, 2}, {0}), ValidationError);
  CHECK_THROWS_AS(partial_transpose(m, {2, 2}, 2), ValidationError);
  CHECK_THROWS_AS(DimFactorization({2, 0}), ValidationError);
}
