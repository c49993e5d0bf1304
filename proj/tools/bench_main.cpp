// Times the OpenMP kernels against their serial reference twins and reports
// the speedup plus the largest entrywise deviation (which should print as 0:
// the parallel kernels reorder loops, not arithmetic).
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include <omp.h>

#include "qestkit/complex_matrix.hpp"
#include "qestkit/numkit.hpp"

using qestkit::ComplexMatrix;
using qestkit::cplx;

namespace {

ComplexMatrix random_matrix(std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = cplx(u(rng), u(rng));
  return m;
}

template <class F>
double best_seconds(F&& f, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  auto d = a;
  d -= b;
  return d.norm_inf();
}

void report(const char* kernel, std::size_t dim, double serial, double parallel, double diff) {
  std::printf("%-14s %6zu  %10.4f ms  %10.4f ms  %6.2fx  max|diff| %.3g\n", kernel, dim,
              serial * 1e3, parallel * 1e3, serial / parallel, diff);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-14s %6s  %13s  %13s  %7s\n", "kernel", "dim", "serial", "parallel", "speedup");
  std::mt19937_64 rng(20260816);

  for (std::size_t d : {96u, 192u, 384u}) {
    const auto a = random_matrix(d, rng);
    const auto b = random_matrix(d, rng);
    ComplexMatrix rs(1, 1), rp(1, 1);
    const double ts = best_seconds([&] { rs = qestkit::ref::mat_mul(a, b); }, 3);
    const double tp = best_seconds([&] { rp = qestkit::mat_mul(a, b); }, 3);
    report("mat_mul", d, ts, tp, max_diff(rs, rp));
  }

  for (std::size_t d : {24u, 30u}) {  // product side stays under the 1024 cap
    const auto a = random_matrix(d, rng);
    const auto b = random_matrix(d, rng);
    ComplexMatrix rs(1, 1), rp(1, 1);
    const double ts = best_seconds([&] { rs = qestkit::ref::kron(a, b); }, 3);
    const double tp = best_seconds([&] { rp = qestkit::kron(a, b); }, 3);
    report("kron", d * d, ts, tp, max_diff(rs, rp));
  }

  for (std::size_t d : {24u, 32u}) {
    const auto m = random_matrix(d * d, rng);
    const std::vector<std::size_t> dims = {d, d};
    const std::vector<std::size_t> keep = {0};
    ComplexMatrix rs(1, 1), rp(1, 1);
    const double ts = best_seconds([&] { rs = qestkit::ref::partial_trace(m, dims, keep); }, 3);
    const double tp = best_seconds([&] { rp = qestkit::partial_trace(m, dims, keep); }, 3);
    report("partial_trace", d * d, ts, tp, max_diff(rs, rp));
  }
  return 0;
}
