#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>

#include <random>

#include "qestkit/numkit.hpp"
#include "test_helpers.hpp"

// The OpenMP kernels split work across output elements only; each element is
// computed by one thread with the same inner-loop order as the serial twins.
// That makes the results bitwise reproducible, which these tests pin down so
// a future "optimization" that reorders sums can't silently change reports.

using namespace qestkit;

namespace {

bool bitwise_equal(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a(i, j).real() != b(i, j).real() || a(i, j).imag() != b(i, j).imag()) return false;
  return true;
}

}  // namespace

TEST_CASE("mat_mul parallel output is bitwise identical to serial") {
  std::mt19937_64 rng(701);
  omp_set_num_threads(4);
  for (std::size_t d : {1u, 2u, 17u, 33u, 64u}) {
    const auto a = testkit::random_ginibre(d, d, rng);
    const auto b = testkit::random_ginibre(d, d, rng);
    CHECK(bitwise_equal(mat_mul(a, b), ref::mat_mul(a, b)));
  }
  // rectangular shapes too
  const auto a = testkit::random_ginibre(5, 9, rng);
  const auto b = testkit::random_ginibre(9, 3, rng);
  CHECK(bitwise_equal(mat_mul(a, b), ref::mat_mul(a, b)));
}

TEST_CASE("kron parallel output is bitwise identical to serial") {
  std::mt19937_64 rng(702);
  omp_set_num_threads(4);
  for (std::size_t d : {1u, 3u, 8u, 16u}) {
    const auto a = testkit::random_ginibre(d, d, rng);
    const auto b = testkit::random_ginibre(d + 1, d + 1, rng);
    CHECK(bitwise_equal(kron(a, b), ref::kron(a, b)));
    CHECK(bitwise_equal(kron(b, a), ref::kron(b, a)));
  }
}

TEST_CASE("partial_trace parallel output is bitwise identical to serial") {
  std::mt19937_64 rng(703);
  omp_set_num_threads(4);
  for (std::size_t da : {2u, 3u, 5u}) {
    for (std::size_t db : {2u, 4u}) {
      const auto m = testkit::random_ginibre(da * db, da * db, rng);
      const std::vector<std::size_t> dims = {da, db};
      CHECK(bitwise_equal(partial_trace(m, dims, {0}), ref::partial_trace(m, dims, {0})));
      CHECK(bitwise_equal(partial_trace(m, dims, {1}), ref::partial_trace(m, dims, {1})));
    }
  }
  // three factors, keep the outer pair
  const auto m = testkit::random_ginibre(2 * 3 * 2, 2 * 3 * 2, rng);
  const std::vector<std::size_t> dims = {2, 3, 2};
  CHECK(bitwise_equal(partial_trace(m, dims, {0, 2}), ref::partial_trace(m, dims, {0, 2})));
}

TEST_CASE("thread count does not change results") {
  std::mt19937_64 rng(704);
  const auto a = testkit::random_ginibre(40, 40, rng);
  const auto b = testkit::random_ginibre(40, 40, rng);
  omp_set_num_threads(1);
  const auto r1 = mat_mul(a, b);
  omp_set_num_threads(7);
  const auto r7 = mat_mul(a, b);
  CHECK(bitwise_equal(r1, r7));
}
