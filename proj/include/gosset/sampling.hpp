#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "gosset/distributions.hpp"

namespace gosset {

/// Seed for an independent substream: splitmix64 of (seed, stream). Used so that
/// parallel and serial runs draw identical numbers regardless of thread count.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

/// Draws scale * xi with xi ~ t(nu) built as Z / sqrt(V / nu), Z standard
/// normal and V chi-squared(nu); the normal kernel draws Z directly.
class ReturnSampler {
public:
    explicit ReturnSampler(const ReturnDistribution& dist, double scale = 1.0);

    double operator()(std::mt19937_64& rng);

private:
    double nu_;
    double scale_;
    bool normal_;
    std::normal_distribution<double> gauss_{0.0, 1.0};
    std::gamma_distribution<double> chi_squared_;
};

/// Draws scale * chi_k as scale * sqrt(V), V ~ chi-squared(k).
class ChiSampler {
public:
    explicit ChiSampler(const ChiParams& params);

    double operator()(std::mt19937_64& rng) { return scale_ * std::sqrt(chi_squared_(rng)); }

private:
    double scale_;
    std::gamma_distribution<double> chi_squared_;
};

/// Samples drawn in fixed-size chunks, each chunk with its own substream.
inline constexpr std::size_t kSampleChunk = 4096;

std::vector<double> sample_returns(const ReturnDistribution& dist, std::size_t n,
                                   std::uint64_t seed, double scale = 1.0);
std::vector<double> sample_returns_serial(const ReturnDistribution& dist, std::size_t n,
                                          std::uint64_t seed, double scale = 1.0);

std::vector<double> sample_chi(const ChiParams& params, std::size_t n, std::uint64_t seed);

/// scale / chi_k draws: the reciprocal law behind inverse_chi_pdf.
std::vector<double> sample_inverse_chi(const ChiParams& params, std::size_t n,
                                       std::uint64_t seed);

}  // namespace gosset
