#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "probesched/cost.hpp"
#include "probesched/kernels.hpp"
#include "probesched/rng.hpp"

using namespace probesched;

namespace {

struct Csr {
  std::vector<std::size_t> offsets{0};
  std::vector<NodeId> members;
};

Csr random_sets(std::size_t count, std::size_t n, CounterRng& rng) {
  Csr csr;
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t size = 1 + rng.below(9);
    for (std::size_t k = 0; k < size; ++k) csr.members.push_back(static_cast<NodeId>(rng.below(n)));
    csr.offsets.push_back(csr.members.size());
  }
  return csr;
}

void expect_bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(a[i]), std::bit_cast<std::uint64_t>(b[i])) << "index " << i;
  }
}

}  // namespace

TEST(Ipow, MatchesRepeatedMultiplication) {
  EXPECT_EQ(kernels::ipow(0.3, 0), 1.0);
  EXPECT_EQ(kernels::ipow(0.3, 1), 0.3);
  EXPECT_NEAR(kernels::ipow(0.9, 7), std::pow(0.9, 7), 1e-15);
  EXPECT_EQ(kernels::ipow(0.0, 3), 0.0);
}

TEST(ScalarKernel, SetMassesClampAndSum) {
  const std::vector<std::size_t> offsets{0, 1, 3, 6};
  const std::vector<NodeId> members{0, 0, 1, 0, 1, 2};
  const std::vector<double> p{0.5, 0.5, 0.25};
  std::vector<double> out(3);
  kernels::set_masses(kernels::scalar(), offsets, members, p, out);
  EXPECT_EQ(out[0], 0.5);
  EXPECT_EQ(out[1], 1.0);
  EXPECT_EQ(out[2], 1.0);
}

TEST(ScalarKernel, SetTermsFormula) {
  const std::vector<double> masses{0.0, 0.25, 1.0};
  std::vector<double> terms(3), coefs(3);
  kernels::set_terms(kernels::scalar(), masses, 0.5, 3, terms, coefs);
  for (std::size_t s = 0; s < 3; ++s) {
    const double q = 1.0 - masses[s];
    const double d = 1.0 - 0.5 * std::pow(q, 3);
    EXPECT_NEAR(terms[s], 1.0 / d, 1e-15);
    EXPECT_NEAR(coefs[s], 0.5 * 3 * q * q / (d * d), 1e-15);
  }
  EXPECT_EQ(terms[2], 1.0);
  EXPECT_EQ(coefs[2], 0.0);
}

class Avx2Kernel : public ::testing::Test {
 protected:
  void SetUp() override {
    if (kernels::avx2() == nullptr) GTEST_SKIP() << "AVX2 kernels unavailable on this CPU or build";
  }
};

TEST_F(Avx2Kernel, SetMassesBitIdenticalToScalar) {
  CounterRng rng(31);
  for (std::size_t count : {0u, 1u, 3u, 4u, 5u, 17u, 1000u}) {
    const std::size_t n = 1 + rng.below(300);
    const Csr csr = random_sets(count, n, rng);
    std::vector<double> p(n);
    double total = 0.0;
    for (double& x : p) total += (x = rng.uniform());
    for (double& x : p) x /= total;
    std::vector<double> a(count), b(count);
    kernels::set_masses(kernels::scalar(), csr.offsets, csr.members, p, a);
    kernels::set_masses(*kernels::avx2(), csr.offsets, csr.members, p, b);
    expect_bitwise_equal(a, b);
  }
}

TEST_F(Avx2Kernel, SetMassesHandlesOvershoot) {
  // Masses above 1 from a heavily repeated member must clamp identically.
  const std::vector<std::size_t> offsets{0, 4, 8, 9, 10, 14};
  const std::vector<NodeId> members{0, 0, 0, 0, 1, 1, 1, 1, 0, 1, 0, 1, 0, 1};
  const std::vector<double> p{0.3, 0.7};
  std::vector<double> a(5), b(5);
  kernels::set_masses(kernels::scalar(), offsets, members, p, a);
  kernels::set_masses(*kernels::avx2(), offsets, members, p, b);
  expect_bitwise_equal(a, b);
  EXPECT_EQ(b[1], 1.0);
}

TEST_F(Avx2Kernel, SetTermsBitIdenticalToScalar) {
  CounterRng rng(32);
  for (unsigned c : {1u, 2u, 3u, 5u, 8u, 31u}) {
    for (std::size_t count : {1u, 4u, 7u, 513u}) {
      std::vector<double> masses(count);
      for (double& m : masses) m = rng.uniform();
      masses[0] = rng.below(2) ? 0.0 : 1.0;
      const double theta = 0.01 + 0.98 * rng.uniform();
      std::vector<double> ta(count), ca(count), tb(count), cb(count);
      kernels::set_terms(kernels::scalar(), masses, theta, c, ta, ca);
      kernels::set_terms(*kernels::avx2(), masses, theta, c, tb, cb);
      expect_bitwise_equal(ta, tb);
      expect_bitwise_equal(ca, cb);
    }
  }
}

TEST_F(Avx2Kernel, EvaluateBitIdenticalToScalar) {
  CounterRng rng(33);
  std::vector<WeightedSet> sets;
  for (NodeId i = 0; i < 40; ++i) sets.push_back({NodeSet{i}, rng.uniform()});
  for (int k = 0; k < 200; ++k) {
    std::vector<NodeId> m;
    for (int j = 0; j < 3; ++j) m.push_back(static_cast<NodeId>(rng.below(40)));
    NodeSet s(m);
    bool dup = false;
    for (const WeightedSet& ws : sets) dup = dup || ws.set == s;
    if (!dup) sets.push_back({s, rng.uniform()});
  }
  const SetTable table = SetTable::from_process(GeneratingProcess(40, sets));
  std::vector<double> p(40);
  double total = 0.0;
  for (double& x : p) total += (x = rng.uniform());
  for (double& x : p) x /= total;
  const Evaluation a = evaluate(table, p, {0.8, 3}, kernels::scalar());
  const Evaluation b = evaluate(table, p, {0.8, 3}, *kernels::avx2());
  EXPECT_EQ(std::bit_cast<std::uint64_t>(a.cost), std::bit_cast<std::uint64_t>(b.cost));
  expect_bitwise_equal(a.weights.values, b.weights.values);
}

TEST(KernelDispatch, ActiveIsANamedTable) {
  const kernels::KernelTable& k = kernels::active();
  ASSERT_NE(k.name, nullptr);
  if (kernels::avx2() != nullptr && std::getenv("PROBESCHED_KERNEL") == nullptr) {
    EXPECT_STREQ(k.name, kernels::avx2()->name);
  }
}
