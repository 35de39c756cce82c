// Scalar reference vs. AVX2 kernel equivalence.

#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "millenv/simd/kernels.hpp"

using namespace millenv::simd;

namespace {

std::vector<cplx> random_complex(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (auto& c : v) c = {d(rng), d(rng)};
  return v;
}

std::vector<double> random_real(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& c : v) c = d(rng);
  return v;
}

double max_err(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

double max_err(const std::vector<double>& a, const std::vector<double>& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

// Lengths cover empty, sub-vector tails and longer runs.
constexpr std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 16, 31, 64, 257, 1000};

}  // namespace

TEST_CASE("dispatch", "[kernels]") {
  CHECK(scalar_kernels().isa == Isa::scalar);
  Isa isa{};
  CHECK(parse_isa("scalar", isa));
  CHECK(isa == Isa::scalar);
  CHECK(parse_isa("avx2", isa));
  CHECK(isa == Isa::avx2);
  CHECK_FALSE(parse_isa("neon", isa));
  CHECK(to_string(Isa::avx2) == "avx2");

  const auto& before = active();
  CHECK(select(Isa::scalar));
  CHECK(active().isa == Isa::scalar);
  if (avx2_kernels()) {
    CHECK(select(Isa::avx2));
    CHECK(active().isa == Isa::avx2);
  } else {
    CHECK_FALSE(select(Isa::avx2));
    CHECK(active().isa == Isa::scalar);
  }
  select(before.isa);
}

TEST_CASE("AVX2 kernels match the scalar reference", "[kernels]") {
  const KernelTable* v = avx2_kernels();
  if (!v) SKIP("AVX2 variant not available on this machine");
  const KernelTable& s = scalar_kernels();
  constexpr double tol = 1e-14;

  for (std::size_t n : kLengths) {
    CAPTURE(n);
    const auto x = random_complex(n, 1 + n), y = random_complex(n, 2 + n);
    const auto g = random_real(n, 3 + n);

    {  // butterfly
      auto a1 = x, b1 = y, a2 = x, b2 = y;
      const auto w = random_complex(n, 4 + n);
      s.butterfly(a1.data(), b1.data(), w.data(), n);
      v->butterfly(a2.data(), b2.data(), w.data(), n);
      CHECK(max_err(a1, a2) <= tol);
      CHECK(max_err(b1, b2) <= tol);
    }
    {  // complex multiply, including in-place use
      std::vector<cplx> o1(n), o2(n);
      s.complex_multiply(x.data(), y.data(), o1.data(), n);
      v->complex_multiply(x.data(), y.data(), o2.data(), n);
      CHECK(max_err(o1, o2) <= tol);
      auto in = x;
      v->complex_multiply(in.data(), y.data(), in.data(), n);
      CHECK(max_err(in, o1) <= tol);
    }
    {  // real scaling
      auto a1 = x, a2 = x;
      s.scale_by_real(a1.data(), g.data(), n);
      v->scale_by_real(a2.data(), g.data(), n);
      CHECK(max_err(a1, a2) == 0.0);
    }
    {  // magnitude
      std::vector<double> m1(n), m2(n);
      s.magnitude(x.data(), m1.data(), n);
      v->magnitude(x.data(), m2.data(), n);
      CHECK(max_err(m1, m2) <= tol);
    }
    {  // sum of squares
      const double r1 = s.sum_squares(g.data(), n), r2 = v->sum_squares(g.data(), n);
      CHECK(std::abs(r1 - r2) <= 1e-12 * std::max(1.0, r1));
    }
    {  // accumulate
      auto a1 = random_real(n, 9), a2 = a1;
      s.accumulate(a1.data(), g.data(), n);
      v->accumulate(a2.data(), g.data(), n);
      CHECK(max_err(a1, a2) == 0.0);
    }
    {  // cross spectra
      std::vector<cplx> sfx1(n, cplx{0.5, -0.25}), sfx2 = sfx1;
      std::vector<double> sff1(n, 1.0), sff2 = sff1, sxx1(n, 2.0), sxx2 = sxx1;
      s.cross_accumulate(x.data(), y.data(), sfx1.data(), sff1.data(), sxx1.data(), n);
      v->cross_accumulate(x.data(), y.data(), sfx2.data(), sff2.data(), sxx2.data(), n);
      CHECK(max_err(sfx1, sfx2) <= tol);
      CHECK(max_err(sff1, sff2) <= tol);
      CHECK(max_err(sxx1, sxx2) <= tol);
    }
  }
}

TEST_CASE("scalar kernels compute their definitions", "[kernels]") {
  const auto& s = scalar_kernels();
  std::vector<cplx> a{{1, 2}}, b{{3, -1}};
  const std::vector<cplx> w{{0, 1}};
  s.butterfly(a.data(), b.data(), w.data(), 1);
  // t = (3 - i) * i = 1 + 3i
  CHECK(a[0] == cplx(2, 5));
  CHECK(b[0] == cplx(0, -1));

  const std::vector<cplx> f{{1, 1}}, x{{2, 0}};
  std::vector<cplx> sfx{{0, 0}};
  std::vector<double> sff{0}, sxx{0};
  s.cross_accumulate(f.data(), x.data(), sfx.data(), sff.data(), sxx.data(), 1);
  CHECK(sfx[0] == cplx(2, -2));
  CHECK(sff[0] == 2.0);
  CHECK(sxx[0] == 4.0);

  const std::vector<double> r{3, 4};
  CHECK(s.sum_squares(r.data(), 2) == 25.0);
}
