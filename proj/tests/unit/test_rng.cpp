#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "hetnet/rng.hpp"

using namespace hetnet;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

template <typename Draw>
Moments moments(std::size_t n, Draw&& draw) {
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = draw();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  return {mean, (sum_sq - n * mean * mean) / (n - 1)};
}

// Sample mean within 5 standard errors.
void expect_mean(const Moments& m, double mean, double var, std::size_t n) {
  EXPECT_NEAR(m.mean, mean, 5.0 * std::sqrt(var / n));
}

}  // namespace

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                        {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPiDigits) {
  const auto out = Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                        {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RandomStream, SameAddressSameSequence) {
  RandomStream a(7, 123, StreamId::fading);
  RandomStream b(7, 123, StreamId::fading);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, DrawingOtherStreamsDoesNotDisturb) {
  RandomStream a(7, 5, StreamId::marks);
  std::vector<double> first;
  for (int i = 0; i < 50; ++i) first.push_back(a.gamma(3.5));
  RandomStream noise(7, 5, StreamId::placement);
  for (int i = 0; i < 1000; ++i) noise.normal();
  RandomStream b(7, 5, StreamId::marks);
  for (int i = 0; i < 50; ++i) ASSERT_EQ(first[i], b.gamma(3.5));
}

TEST(RandomStream, DistinctAddressesDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed : {1u, 2u}) {
    for (std::uint64_t drop : {0u, 1u, 1000000u}) {
      for (std::uint32_t stream : {1u, 2u, ring_stream(0, 0), ring_stream(0, 1), ring_stream(1, 0)}) {
        RandomStream r(seed, drop, stream);
        EXPECT_TRUE(seen.insert(r.next_u64()).second) << seed << " " << drop << " " << stream;
      }
    }
  }
}

TEST(RandomStream, RingStreamsDoNotCollide) {
  EXPECT_NE(ring_stream(0, 4095), ring_stream(1, 0));
  EXPECT_GT(ring_stream(0, 0), static_cast<std::uint32_t>(StreamId::aux_channel));
}

TEST(RandomStream, UniformRangeAndMoments) {
  RandomStream r(1, 0, 1);
  const std::size_t n = 200000;
  double lo = 1.0, hi = 0.0;
  const auto m = moments(n, [&] {
    const double u = r.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    return u;
  });
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  expect_mean(m, 0.5, 1.0 / 12.0, n);
  EXPECT_NEAR(m.var, 1.0 / 12.0, 2e-3);
  RandomStream p(1, 0, 2);
  for (int i = 0; i < 10000; ++i) ASSERT_GT(p.uniform_positive(), 0.0);
}

TEST(RandomStream, ExponentialMoments) {
  RandomStream r(2, 0, 1);
  const std::size_t n = 200000;
  const auto m = moments(n, [&] { return r.exponential(); });
  expect_mean(m, 1.0, 1.0, n);
  EXPECT_NEAR(m.var, 1.0, 0.03);
}

TEST(RandomStream, NormalMoments) {
  RandomStream r(3, 0, 1);
  const std::size_t n = 200000;
  const auto m = moments(n, [&] { return r.normal(); });
  expect_mean(m, 0.0, 1.0, n);
  EXPECT_NEAR(m.var, 1.0, 0.02);
  RandomStream c(3, 1, 1);
  const auto mc = moments(n, [&] { return std::norm(c.complex_normal()); });
  expect_mean(mc, 1.0, 1.0, n);
}

TEST(RandomStream, GammaMoments) {
  for (double shape : {0.3, 1.0, 2.5, 11.0, 101.0}) {
    RandomStream r(4, static_cast<std::uint64_t>(shape * 10), 1);
    const std::size_t n = 100000;
    const auto m = moments(n, [&] { return r.gamma(shape); });
    expect_mean(m, shape, shape, n);
    EXPECT_NEAR(m.var / shape, 1.0, 0.05) << shape;
  }
}

TEST(RandomStream, PoissonMoments) {
  for (double mean : {0.5, 5.0, 50.0, 2000.0}) {
    RandomStream r(5, static_cast<std::uint64_t>(mean), 1);
    const std::size_t n = 100000;
    const auto m = moments(n, [&] { return static_cast<double>(r.poisson(mean)); });
    expect_mean(m, mean, mean, n);
    EXPECT_NEAR(m.var / mean, 1.0, 0.05) << mean;
  }
  RandomStream r(5, 9, 1);
  EXPECT_EQ(r.poisson(0.0), 0u);
}

TEST(RandomStream, PoissonSmallMeanProbabilities) {
  RandomStream r(6, 0, 1);
  const int n = 200000;
  int zeros = 0, twos = 0;
  for (int i = 0; i < n; ++i) {
    const auto k = r.poisson(1.5);
    zeros += k == 0;
    twos += k == 2;
  }
  const double p0 = std::exp(-1.5);
  const double p2 = std::exp(-1.5) * 1.125;
  EXPECT_NEAR(zeros / double(n), p0, 5.0 * std::sqrt(p0 * (1 - p0) / n));
  EXPECT_NEAR(twos / double(n), p2, 5.0 * std::sqrt(p2 * (1 - p2) / n));
}

TEST(RandomStream, BernoulliRate) {
  RandomStream r(8, 0, 1);
  const int n = 200000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += r.bernoulli(0.3);
  EXPECT_NEAR(hits / double(n), 0.3, 5.0 * std::sqrt(0.21 / n));
  RandomStream z(8, 1, 1);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_FALSE(z.bernoulli(0.0));
    ASSERT_TRUE(z.bernoulli(1.0));
  }
}
