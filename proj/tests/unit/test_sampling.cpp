#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "gosset/errors.hpp"
#include "gosset/sampling.hpp"
#include "oracles.hpp"

using namespace gosset;

namespace {

double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    return d;
}

}  // namespace

TEST(StreamSeed, DistinctAndDeterministic) {
    EXPECT_EQ(stream_seed(1, 2), stream_seed(1, 2));
    EXPECT_NE(stream_seed(1, 2), stream_seed(1, 3));
    EXPECT_NE(stream_seed(1, 2), stream_seed(2, 2));
}

TEST(SampleReturns, SerialAndParallelIdentical) {
    const auto d = ReturnDistribution::student_t(3.0);
    const std::size_t n = 3 * kSampleChunk + 17;
    EXPECT_EQ(sample_returns(d, n, 9), sample_returns_serial(d, n, 9));
    EXPECT_EQ(sample_returns(d, n, 9, 2.0), sample_returns_serial(d, n, 9, 2.0));
    EXPECT_NE(sample_returns(d, n, 9), sample_returns(d, n, 10));
    EXPECT_EQ(sample_returns(d, 0, 9).size(), 0u);
}

TEST(SampleReturns, PrefixStable) {
    const auto d = ReturnDistribution::normal();
    const auto a = sample_returns(d, 5000, 4);
    const auto b = sample_returns(d, 9000, 4);
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
}

TEST(SampleReturns, KolmogorovSmirnovAgainstBoost) {
    for (double nu : {1.0, 3.0, 8.0, oracle::kInf}) {
        const auto xs = sample_returns(ReturnDistribution::student_t(nu), 100000, 17);
        const double ks = ks_statistic(xs, [&](double x) { return oracle::t_cdf(nu, x); });
        EXPECT_LT(ks, 1.63 / std::sqrt(1e5)) << nu;
    }
}

TEST(SampleReturns, ScaleMultipliesDraws) {
    const auto d = ReturnDistribution::student_t(5.0);
    const auto a = sample_returns(d, 1000, 8);
    const auto b = sample_returns(d, 1000, 8, 3.0);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_DOUBLE_EQ(b[i], 3.0 * a[i]);
    EXPECT_THROW(sample_returns(d, 10, 8, 0.0), ValidationError);
}

TEST(SampleChi, MomentsAndInverse) {
    const ChiParams p{5.0, 2.0};
    const auto xs = sample_chi(p, 200000, 21);
    // E[X^2] = scale^2 k.
    double m2 = 0.0;
    for (double x : xs) m2 += x * x;
    m2 /= xs.size();
    EXPECT_NEAR(m2, 20.0, 4.0 * std::sqrt(2.0 * 5.0) * 4.0 / std::sqrt(2e5));
    const double ks = ks_statistic(xs, [&](double x) { return chi_cdf(p, x); });
    EXPECT_LT(ks, 1.63 / std::sqrt(2e5));

    const auto ys = sample_inverse_chi(ChiParams{21.0, 1.0}, 100000, 22);
    EXPECT_TRUE(std::all_of(ys.begin(), ys.end(), [](double y) { return y > 0.0; }));
    const double ks_inv = ks_statistic(ys, [](double y) { return inverse_chi_cdf(ChiParams{21.0, 1.0}, y); });
    EXPECT_LT(ks_inv, 1.63 / std::sqrt(1e5));
}
