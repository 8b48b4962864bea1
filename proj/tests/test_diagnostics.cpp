#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "diagnostics.hpp"
#include "oracles.hpp"
#include "rec.hpp"

using namespace recsp;

namespace {

RecTask gauss_task_1d(double mq, double sq, double mp, double sp) {
  return RecTask(FactorizedDistribution({Dim1Law::gaussian(mq, sq)}),
                 FactorizedDistribution({Dim1Law::gaussian(mp, sp)}));
}

RecTask uniform_task(double width) {
  return RecTask(FactorizedDistribution({Dim1Law::uniform(0, width)}),
                 FactorizedDistribution({Dim1Law::uniform(0, 1)}));
}

std::vector<std::vector<double>> gauss_cloud(size_t n, double mean, double sd, uint64_t seed,
                                             size_t dim = 1) {
  oracle::TestRng rng(seed);
  std::vector<std::vector<double>> out(n, std::vector<double>(dim));
  for (auto& p : out)
    for (auto& v : p) v = mean + sd * rng.normal();
  return out;
}

}  // namespace

TEST_CASE("epsilon_cost: exact zeros") {
  RecTask same = gauss_task_1d(0.4, 0.7, 0.4, 0.7);
  McEstimate e = epsilon_cost(same, 1, 2000, 1);
  CHECK(e.value == 0.0);
  CHECK(e.stderr_ == 0.0);

  // Uniform task: log2 r is constantly KL, so J <= 2^KL costs nothing.
  RecTask uni = uniform_task(0.125);  // KL = 3 bits
  CHECK(epsilon_cost(uni, 8, 2000, 2).value == 0.0);
  CHECK(epsilon_cost(uni, 7, 2000, 2).value == 0.0);
  CHECK(epsilon_cost(uni, 9, 2000, 2).value > 0.0);
}

TEST_CASE("epsilon_cost: gaussian tasks stay under 0.849 sqrt(KL)") {
  oracle::TestRng rng(71);
  for (int i = 0; i < 100; ++i) {
    std::vector<Dim1Law> qs, ps;
    for (int d = 0; d < 3; ++d) {
      double sp = rng.uniform(0.5, 1.3);
      ps.push_back(Dim1Law::gaussian(0, sp));
      qs.push_back(Dim1Law::gaussian(rng.uniform(-1.5, 1.5), rng.uniform(0.15, 0.95) * sp));
    }
    RecTask t{FactorizedDistribution(qs), FactorizedDistribution(ps)};
    double kl = kl_bits(t);
    uint64_t j = 1ull << static_cast<unsigned>(std::floor(kl));
    McEstimate e = epsilon_cost(t, j, 4000, 1000 + static_cast<uint64_t>(i));
    CHECK(e.value <= 0.849 * std::sqrt(kl) + 3.0 * e.stderr_);
  }
}

TEST_CASE("epsilon_cost: monotone in J under common random numbers") {
  RecTask t = gauss_task_1d(1.0, 0.5, 0, 1);
  double prev = -1.0;
  for (uint64_t j : {1ull, 2ull, 4ull, 8ull, 16ull, 64ull, 1024ull}) {
    McEstimate e = epsilon_cost(t, j, 3000, 555);  // same seed, same draws
    CHECK(e.value >= prev);
    prev = e.value;
  }
}

TEST_CASE("codelength_bound: frozen arithmetic") {
  // KL = 16 bits exactly.
  BoundReport r16 = codelength_bound(uniform_task(0x1.0p-16), 1, 0.0);
  CHECK(r16.kl_bits == doctest::Approx(16.0));
  CHECK(r16.codelength_bound_bits == doctest::Approx(24.0874628412503391).epsilon(1e-12));
  CHECK_FALSE(r16.epsilon_gaussian_cap.has_value());

  // KL = 48, J = 2^48: the log term vanishes.
  BoundReport r48 = codelength_bound(uniform_task(0x1.0p-48), 1ull << 48, 0.0);
  CHECK(r48.codelength_bound_bits == doctest::Approx(52.0).epsilon(1e-12));

  // Standard-REC reference: same routine at J = 1.
  RecTask g = gauss_task_1d(1.0, 0.5, 0, 1);
  BoundReport rg = codelength_bound(g, 1, 0.0);
  CHECK(rg.codelength_bound_bits ==
        doctest::Approx(rg.kl_bits + std::log2(rg.kl_bits + 1.0) + 4.0));
  CHECK(rg.epsilon_gaussian_cap.has_value());
  CHECK(*rg.epsilon_gaussian_cap == doctest::Approx(0.849 * std::sqrt(rg.kl_bits)).epsilon(1e-3));

  // Non-positive log argument.
  CHECK_THROWS_AS(codelength_bound(uniform_task(0.5), 1ull << 8, 0.0), Error);
}

TEST_CASE("tv_bounds: degenerate and limiting behavior") {
  RecTask same = gauss_task_1d(0, 1, 0, 1);
  TvBounds b0 = tv_bounds(same, 0.0, 2000, 7);
  CHECK(b0.tail_upper == 0.0);  // strict inequality in the upper tail
  CHECK(b0.tail_lower == 1.0);
  CHECK(b0.upper == doctest::Approx(4.0));
  CHECK(b0.lower == doctest::Approx(-1.0));

  RecTask t = gauss_task_1d(1.0, 0.5, 0, 1);
  TvBounds small_t = tv_bounds(t, 0.0, 4000, 8);
  CHECK(small_t.lower < 0.0);   // raw lower bound goes negative at small t
  CHECK(small_t.upper > 1.0);   // vacuous before clamping
  TvBounds big_t = tv_bounds(t, 60.0, 4000, 9);
  CHECK(big_t.upper < 0.03);
  CHECK(big_t.lower == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(tv_bounds(t, -1.0, 100, 1), Error);
}

TEST_CASE("mmd_rbf: nulls and separations") {
  auto a = gauss_cloud(1000, 0, 1, 11);
  auto a2 = a;
  MmdResult self = mmd_rbf(a, a2);
  CHECK(self.mmd2 <= 1e-12);  // unbiased estimator goes negative on identical sets

  auto b = gauss_cloud(1000, 0, 1, 22);
  CHECK(std::abs(mmd_rbf(a, b).mmd2) < 0.01);

  auto c = gauss_cloud(1000, 2, 1, 33);
  CHECK(mmd_rbf(a, c).mmd2 > 0.1);

  std::vector<std::vector<double>> ragged{{0.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(mmd_rbf(a, ragged), Error);
}

TEST_CASE("mmd permutation test: calibration") {
  auto a = gauss_cloud(300, 0, 1, 44);
  auto b = gauss_cloud(300, 0, 1, 45);
  CHECK(mmd_permutation_pvalue(a, b, 200, 1) > 0.01);

  auto c = gauss_cloud(300, 1.0, 1, 46);
  CHECK(mmd_permutation_pvalue(a, c, 200, 2) < 0.02);
}

TEST_CASE("standardize_by_target") {
  FactorizedDistribution target({Dim1Law::gaussian(2, 0.5), Dim1Law::gaussian(-1, 2)});
  std::vector<std::vector<double>> pts{{2.5, 1.0}, {2.0, -1.0}};
  auto s = standardize_by_target(target, pts);
  CHECK(s[0][0] == doctest::Approx(1.0));
  CHECK(s[0][1] == doctest::Approx(1.0));
  CHECK(s[1][0] == doctest::Approx(0.0));
  CHECK(s[1][1] == doctest::Approx(0.0));
}

TEST_CASE("empirical_tv_1d: discriminates target from prior samples") {
  RecTask t = gauss_task_1d(2.2156, 0.5, 0, 1);
  oracle::TestRng rng(99);
  std::vector<double> from_q, from_p;
  for (int i = 0; i < 10000; ++i) {
    from_q.push_back(2.2156 + 0.5 * rng.normal());
    from_p.push_back(rng.normal());
  }
  CHECK(empirical_tv_1d(from_q, t) < 0.07);
  CHECK(empirical_tv_1d(from_p, t) > 0.8);
}

TEST_CASE("ks_distance_1d against oracle implementation") {
  oracle::TestRng rng(123);
  std::vector<double> xs;
  for (int i = 0; i < 5000; ++i) xs.push_back(0.3 + 1.7 * rng.normal());
  Dim1Law law = Dim1Law::gaussian(0.3, 1.7);
  double got = ks_distance_1d(xs, law);
  double want = oracle::ks_distance(xs, [](double z) { return oracle::gauss_cdf(z, 0.3, 1.7); });
  CHECK(got == doctest::Approx(want).epsilon(1e-9));
  CHECK(got < 0.03);
}

TEST_CASE("diagnostic record JSON shape") {
  std::string js = diagnostic_record_json("epsilon", 0.25, 0.01, 1000, 42);
  CHECK(js == "{\"name\":\"epsilon\",\"value\":0.25,\"stderr\":0.01,\"n_mc\":1000,\"seed\":42}");
}
