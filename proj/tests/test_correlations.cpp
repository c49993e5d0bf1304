#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qestkit/correlations.hpp"
#include "qestkit/error.hpp"
#include "qestkit/numkit.hpp"
#include "qestkit/states.hpp"
#include "test_helpers.hpp"

using namespace qestkit;
using testkit::max_abs_diff;

namespace {

DensityMatrix product_state(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.mat(), b.mat()));
}

// local unitary (U_A x U_B) rho (U_A x U_B)^dag
DensityMatrix local_rotate(const DensityMatrix& rho, const ComplexMatrix& ua,
                           const ComplexMatrix& ub) {
  const auto u = kron(ua, ub);
  return DensityMatrix(mat_mul(u, mat_mul(rho.mat(), u.dagger())));
}

double purity(const ComplexMatrix& m) { return mat_mul(m, m).trace().real(); }

}  // namespace

TEST_CASE("skew information basics") {
  std::mt19937_64 rng(601);
  for (int rep = 0; rep < 10; ++rep) {
    const auto rho = testkit::random_density(4, rng);
    const auto k = testkit::random_hermitian(4, rng);
    const double i = skew_information(rho, k);
    const double var = variance_observable(rho, k);
    CHECK(i >= 0.0);
    CHECK(i <= var + 1e-12);
  }

  // pure state: skew information equals the variance
  const auto psi = testkit::random_pure(3, rng);
  const auto rho = testkit::pure_density(psi);
  const auto k = testkit::random_hermitian(3, rng);
  CHECK(std::abs(skew_information(rho, k) - variance_observable(rho, k)) < 1e-10);

  // commuting observable carries no quantum uncertainty
  ComplexMatrix diag_rho(2, 2), diag_k(2, 2);
  diag_rho(0, 0) = 0.7;
  diag_rho(1, 1) = 0.3;
  diag_k(0, 0) = 2.0;
  diag_k(1, 1) = -1.0;
  CHECK(skew_information(DensityMatrix(diag_rho), diag_k) < 1e-14);
}

TEST_CASE("skew information is convex in the state") {
  std::mt19937_64 rng(602);
  for (int rep = 0; rep < 5; ++rep) {
    const auto r1 = testkit::random_density(3, rng);
    const auto r2 = testkit::random_density(3, rng);
    const auto k = testkit::random_hermitian(3, rng);
    auto mixm = r1.mat();
    mixm *= 0.5;
    auto half2 = r2.mat();
    half2 *= 0.5;
    mixm += half2;
    const DensityMatrix mix(std::move(mixm));
    CHECK(skew_information(mix, k) <=
          0.5 * skew_information(r1, k) + 0.5 * skew_information(r2, k) + 1e-10);
  }
}

TEST_CASE("qfi quarter sandwiches the skew information") {
  std::mt19937_64 rng(603);
  for (int rep = 0; rep < 20; ++rep) {
    const auto d = 2 + static_cast<std::size_t>(rep % 5);  // 2..6
    const auto rho = testkit::random_density(d, rng);
    const auto k = testkit::random_hermitian(d, rng);
    const double i = skew_information(rho, k);
    const double q = qfi_quarter(rho, k);
    CHECK(i <= q + 1e-9);
    CHECK(q <= 2 * i + 1e-9);
  }
}

TEST_CASE("hellinger distance and the root-of-unity identity") {
  std::mt19937_64 rng(604);
  const auto rho = testkit::random_density(4, rng);
  CHECK(hellinger_distance_sq(rho, rho) < 1e-12);

  // K = (s.sigma) x 1 with unit s squares to the identity; then
  // I(rho, K) = D_H^2(rho, K rho K)
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> s = {g(rng), g(rng), g(rng)};
  const double nrm = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
  const auto sigma = su_generators(2);
  ComplexMatrix ka(2, 2);
  for (int i = 0; i < 3; ++i) {
    auto t = sigma[i];
    t *= s[i] / nrm;
    ka += t;
  }
  const auto k = kron(ka, [] {
    ComplexMatrix eye(2, 2);
    eye(0, 0) = eye(1, 1) = 1;
    return eye;
  }());
  const auto rotated = DensityMatrix(mat_mul(k, mat_mul(rho.mat(), k)));
  CHECK(std::abs(skew_information(rho, k) - hellinger_distance_sq(rho, rotated)) < 1e-10);
}

TEST_CASE("lqu is 1 on bell pairs and 0 on products") {
  const auto bell = testkit::bell_state();
  const auto rep = lqu_qubit(bell, 2);
  CHECK(std::abs(rep.value - 1.0) < 1e-9);
  CHECK(rep.measure == std::string("lqu"));

  std::mt19937_64 rng(605);
  const auto pa = testkit::pure_density(testkit::random_pure(2, rng));
  const auto pb = testkit::pure_density(testkit::random_pure(2, rng));
  CHECK(lqu_qubit(product_state(pa, pb), 2).value < 1e-10);
}

TEST_CASE("lqu on pure states reduces to the linear entropy of the marginal") {
  std::mt19937_64 rng(606);
  for (int rep = 0; rep < 8; ++rep) {
    const auto psi = testkit::random_pure(4, rng);
    const auto rho = testkit::pure_density(psi);
    const auto rho_a = partial_trace(rho.mat(), {2, 2}, {0});
    const double want = 2.0 * (1.0 - purity(rho_a));
    CHECK(std::abs(lqu_qubit(rho, 2).value - want) < 1e-9);
  }
}

TEST_CASE("lqu closed form equals the direct minimization") {
  std::mt19937_64 rng(607);
  const auto rho = testkit::random_density(4, rng);
  const double closed = lqu_qubit(rho, 2).value;

  // dense sweep over K_A = s.sigma directions
  const auto sigma = su_generators(2);
  double brute = 1e300;
  const int n_th = 60, n_ph = 120;
  for (int a = 0; a <= n_th; ++a)
    for (int p = 0; p < n_ph; ++p) {
      const double th = M_PI * a / n_th, ph = 2 * M_PI * p / n_ph;
      const double s[3] = {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                           std::cos(th)};
      ComplexMatrix ka(2, 2);
      for (int i = 0; i < 3; ++i) {
        auto t = sigma[i];
        t *= s[i];
        ka += t;
      }
      brute = std::min(brute, skew_information(rho, kron(ka, [] {
                                                 ComplexMatrix eye(2, 2);
                                                 eye(0, 0) = eye(1, 1) = 1;
                                                 return eye;
                                               }())));
    }
  CHECK(closed <= brute + 1e-10);  // closed form is the true minimum
  CHECK(brute - closed < 2e-3);    // and the grid gets close to it
}

TEST_CASE("lqfi matches lqu on the benchmarks and obeys the sandwich") {
  const auto bell = testkit::bell_state();
  CHECK(std::abs(lqfi(bell, 2).value - 1.0) < 1e-9);

  std::mt19937_64 rng(608);
  const auto pa = testkit::pure_density(testkit::random_pure(2, rng));
  const auto pb = testkit::pure_density(testkit::random_pure(2, rng));
  CHECK(lqfi(product_state(pa, pb), 2).value < 1e-10);

  for (int rep = 0; rep < 10; ++rep) {
    const auto rho = testkit::random_density(4, rng);
    const double u = lqu_qubit(rho, 2).value;
    const double f = lqfi(rho, 2).value;
    CHECK(u <= f + 1e-9);
    CHECK(f <= 2 * u + 1e-9);
  }
}

TEST_CASE("lqfi needs a qubit on side a") {
  std::mt19937_64 rng(609);
  const auto rho = testkit::random_density(6, rng);
  CHECK_THROWS_WITH_AS((void)lqfi(rho, 4), doctest::Contains("NotAQubitSide"), Error);
  CHECK_NOTHROW((void)lqfi(rho, 3));  // 2 x 3 split works
}

TEST_CASE("local unitaries leave lqu and lqfi unchanged") {
  std::mt19937_64 rng(610);
  const auto rho = testkit::random_density(4, rng);
  const auto ua = testkit::random_unitary(2, rng);
  const auto ub = testkit::random_unitary(2, rng);
  const auto rotated = local_rotate(rho, ua, ub);
  CHECK(std::abs(lqu_qubit(rho, 2).value - lqu_qubit(rotated, 2).value) < 1e-8);
  CHECK(std::abs(lqfi(rho, 2).value - lqfi(rotated, 2).value) < 1e-8);
}

TEST_CASE("depolarizing the unmeasured side cannot create correlations") {
  std::mt19937_64 rng(611);
  const auto rho = testkit::random_density(4, rng);
  for (double p : {0.2, 0.6}) {
    const auto rho_a = partial_trace(rho.mat(), {2, 2}, {0});
    ComplexMatrix eye2(2, 2);
    eye2(0, 0) = eye2(1, 1) = 1;
    auto noisy = rho.mat();
    noisy *= 1.0 - p;
    auto leak = kron(rho_a, eye2);
    leak *= p / 2.0;
    noisy += leak;
    const DensityMatrix after(std::move(noisy));
    CHECK(lqu_qubit(after, 2).value <= lqu_qubit(rho, 2).value + 1e-10);
    CHECK(lqfi(after, 2).value <= lqfi(rho, 2).value + 1e-10);
  }
}

TEST_CASE("multiqubit average lqu") {
  const auto bell = testkit::bell_state();
  const auto rep = lqu_multiqubit_average(bell, 2);
  REQUIRE(rep.per_site.size() == 2);
  CHECK(std::abs(rep.per_site[0] - 1.0) < 1e-9);
  CHECK(std::abs(rep.per_site[1] - 1.0) < 1e-9);
  CHECK(std::abs(rep.average - 1.0) < 1e-9);

  const auto ghz = testkit::ghz_state(3);
  const auto rep3 = lqu_multiqubit_average(ghz, 3);
  REQUIRE(rep3.per_site.size() == 3);
  for (double v : rep3.per_site) CHECK(std::abs(v - 1.0) < 1e-9);

  std::mt19937_64 rng(612);
  const auto pa = testkit::pure_density(testkit::random_pure(2, rng));
  const auto pb = testkit::pure_density(testkit::random_pure(2, rng));
  CHECK(lqu_multiqubit_average(product_state(pa, pb), 2).average < 1e-10);

  CHECK_THROWS_AS((void)lqu_multiqubit_average(bell, 3), Error);  // 4 != 2^3
}

TEST_CASE("qudit lqu closed form") {
  std::mt19937_64 rng(613);
  const auto rho = testkit::random_density(6, rng);  // 3 x 2
  const auto rep = lqu_qudit(rho, 3, 2);
  CHECK(rep.value >= 0.0);
  CHECK(rep.value <= 2.0 / 3.0 + 1e-12);

  // the reported maximizer direction achieves the value exactly:
  // K = v.lambda with v the top eigenvector gives I(rho, K x 1) = 2/d1 - xi_max
  const auto w = real_sym_eigen(rep.optimizer_matrix);
  const std::size_t m = w.eigenvalues.size();
  REQUIRE(m == 8);
  const auto gens = su_generators(3);
  ComplexMatrix ka(3, 3);
  for (std::size_t i = 0; i < m; ++i) {
    auto t = gens[i];
    t *= w.eigenvectors(i, m - 1);  // top eigenvector, ascending order
    ka += t;
  }
  const auto k = kron(ka, [] {
    ComplexMatrix eye(2, 2);
    eye(0, 0) = eye(1, 1) = 1;
    return eye;
  }());
  CHECK(std::abs(skew_information(rho, k) - rep.value) < 1e-10);

  // no sampled direction does better than the closed-form minimum
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(m);
    double nrm = 0;
    for (auto& x : s) {
      x = g(rng);
      nrm += x * x;
    }
    nrm = std::sqrt(nrm);
    ComplexMatrix kt(3, 3);
    for (std::size_t i = 0; i < m; ++i) {
      auto t = gens[i];
      t *= s[i] / nrm;
      kt += t;
    }
    const auto kk = kron(kt, [] {
      ComplexMatrix eye(2, 2);
      eye(0, 0) = eye(1, 1) = 1;
      return eye;
    }());
    CHECK(skew_information(rho, kk) >= rep.value - 1e-10);
  }

  CHECK_THROWS_WITH_AS((void)lqu_qudit(rho, 4, 2), doctest::Contains("DimensionMismatch"),
                       Error);
}

TEST_CASE("qudit lqu reduces to the qubit form at d1 = 2") {
  std::mt19937_64 rng(614);
  const auto rho = testkit::random_density(4, rng);
  CHECK(std::abs(lqu_qudit(rho, 2, 2).value - lqu_qubit(rho, 2).value) < 1e-10);
}

TEST_CASE("precision chain") {
  const auto bell = testkit::bell_state();
  const auto chain = precision_chain(bell, 2);
  CHECK(std::abs(chain.lqu - 1.0) < 1e-9);
  CHECK(std::abs(chain.lqfi - 1.0) < 1e-9);
  CHECK(std::abs(chain.bound_lqu - 1.0) < 1e-9);
  CHECK(std::abs(chain.bound_lqfi - 1.0) < 1e-9);
  CHECK(chain.bound_lqfi <= chain.bound_lqu + 1e-12);  // lqfi >= lqu inverts the order
  CHECK_FALSE(chain.zero_correlation);

  std::mt19937_64 rng(615);
  const auto pa = testkit::pure_density(testkit::random_pure(2, rng));
  const auto pb = testkit::pure_density(testkit::random_pure(2, rng));
  const auto flat = precision_chain(product_state(pa, pb), 2);
  CHECK(flat.zero_correlation);
  CHECK(std::isinf(flat.bound_lqu));
  CHECK(std::isinf(flat.bound_lqfi));
}
