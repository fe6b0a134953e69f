#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "labtrick/kernels.hpp"

using namespace labtrick;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

void close(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

const kernels::KernelTable* simd() {
  const auto* t = kernels::avx2_kernels();
  return t && kernels::cpu_has_avx2_fma() ? t : nullptr;
}

}  // namespace

TEST_CASE("active kernel table") {
  const std::string name = kernels::active().name;
  CHECK((name == "scalar" || name == "avx2"));
  if (simd() && !std::getenv("LABTRICK_KERNELS")) CHECK(name == "avx2");
}

TEST_CASE("scalar reference kernels") {
  const auto& s = kernels::scalar_kernels();
  const double a[] = {1, 2, 3};
  const double b[] = {4, 5, 6};
  CHECK(s.dot(a, b, 3) == 32);
  double y[] = {1, 1, 1};
  s.axpy(2, a, y, 3);
  CHECK(y[2] == 7);
  double h[3];
  s.hadamard(a, b, h, 3);
  CHECK(h[1] == 10);
  // [1 2; 3 4] * [5; 6] = [17; 39]
  const double m[] = {1, 2, 3, 4};
  const double x[] = {5, 6};
  double c[] = {1, 1};
  s.gemm_nn(m, x, c, 2, 2, 1);
  CHECK(c[0] == 18);
  CHECK(c[1] == 40);
  double t[] = {0, 0};
  s.gemm_tn(m, x, t, 2, 2, 1);  // m^T x = [1*5+3*6, 2*5+4*6]
  CHECK(t[0] == 23);
  CHECK(t[1] == 34);
  double nt[] = {0, 0};
  s.gemm_nt(m, x, nt, 2, 1, 2);  // m x^T with x as a 1x2 row
  CHECK(nt[0] == 17);
  CHECK(nt[1] == 39);
}

TEST_CASE("avx2 kernels match the scalar reference") {
  const auto* v = simd();
  if (!v) {
    MESSAGE("no AVX2/FMA on this build or CPU; equivalence not exercised");
    return;
  }
  const auto& s = kernels::scalar_kernels();
  std::mt19937_64 rng(99);
  for (std::size_t n = 0; n <= 37; ++n) {
    auto a = random_vec(n, rng), b = random_vec(n, rng);
    CHECK(v->dot(a.data(), b.data(), n) == doctest::Approx(s.dot(a.data(), b.data(), n)).epsilon(1e-12));
    auto y1 = random_vec(n, rng);
    auto y2 = y1;
    s.axpy(0.37, a.data(), y1.data(), n);
    v->axpy(0.37, a.data(), y2.data(), n);
    close(y1, y2);
    std::vector<double> h1(n), h2(n);
    s.hadamard(a.data(), b.data(), h1.data(), n);
    v->hadamard(a.data(), b.data(), h2.data(), n);
    CHECK(h1 == h2);
  }
  for (std::size_t m : {1, 3, 8, 13}) {
    for (std::size_t k : {1, 4, 7, 32}) {
      for (std::size_t n : {1, 2, 5, 16, 33}) {
        CAPTURE(m);
        CAPTURE(k);
        CAPTURE(n);
        auto a = random_vec(m * k, rng), b = random_vec(k * n, rng), c0 = random_vec(m * n, rng);
        auto c1 = c0, c2 = c0;
        s.gemm_nn(a.data(), b.data(), c1.data(), m, k, n);
        v->gemm_nn(a.data(), b.data(), c2.data(), m, k, n);
        close(c1, c2);

        auto bt = random_vec(m * n, rng), t0 = random_vec(k * n, rng);
        auto t1 = t0, t2 = t0;
        s.gemm_tn(a.data(), bt.data(), t1.data(), m, k, n);
        v->gemm_tn(a.data(), bt.data(), t2.data(), m, k, n);
        close(t1, t2);

        auto x = random_vec(m * n, rng), w = random_vec(k * n, rng), r0 = random_vec(m * k, rng);
        auto r1 = r0, r2 = r0;
        s.gemm_nt(x.data(), w.data(), r1.data(), m, k, n);
        v->gemm_nt(x.data(), w.data(), r2.data(), m, k, n);
        close(r1, r2);
      }
    }
  }
}
