#include "gosset/sampling.hpp"

#include <cmath>

#include "gosset/errors.hpp"
#include "parallel.hpp"

namespace gosset {

namespace {

template <class Draw>
void fill_chunk(std::vector<double>& out, std::size_t chunk, std::uint64_t seed, Draw make) {
    const std::size_t begin = chunk * kSampleChunk;
    const std::size_t end = std::min(out.size(), begin + kSampleChunk);
    std::mt19937_64 rng(stream_seed(seed, chunk));
    auto draw = make();
    for (std::size_t i = begin; i < end; ++i) out[i] = draw(rng);
}

std::size_t chunk_count(std::size_t n) { return (n + kSampleChunk - 1) / kSampleChunk; }

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

ReturnSampler::ReturnSampler(const ReturnDistribution& dist, double scale)
    : nu_(dist.nu()),
      scale_(scale),
      normal_(dist.is_normal()),
      chi_squared_(normal_ ? 1.0 : 0.5 * dist.nu(), 2.0) {
    if (!(scale > 0.0 && std::isfinite(scale))) throw ValidationError("scale must be > 0");
}

double ReturnSampler::operator()(std::mt19937_64& rng) {
    const double z = gauss_(rng);
    if (normal_) return scale_ * z;
    return scale_ * z / std::sqrt(chi_squared_(rng) / nu_);
}

ChiSampler::ChiSampler(const ChiParams& params)
    : scale_(params.scale), chi_squared_(0.5 * params.k, 2.0) {}

std::vector<double> sample_returns(const ReturnDistribution& dist, std::size_t n,
                                   std::uint64_t seed, double scale) {
    ReturnSampler check(dist, scale);
    std::vector<double> out(n);
    detail::parallel_for(chunk_count(n), [&](std::size_t chunk) {
        fill_chunk(out, chunk, seed, [&] { return ReturnSampler(dist, scale); });
    });
    return out;
}

std::vector<double> sample_returns_serial(const ReturnDistribution& dist, std::size_t n,
                                          std::uint64_t seed, double scale) {
    ReturnSampler check(dist, scale);
    std::vector<double> out(n);
    for (std::size_t chunk = 0; chunk < chunk_count(n); ++chunk) {
        fill_chunk(out, chunk, seed, [&] { return ReturnSampler(dist, scale); });
    }
    return out;
}

std::vector<double> sample_chi(const ChiParams& params, std::size_t n, std::uint64_t seed) {
    std::vector<double> out(n);
    detail::parallel_for(chunk_count(n), [&](std::size_t chunk) {
        fill_chunk(out, chunk, seed, [&] { return ChiSampler(params); });
    });
    return out;
}

std::vector<double> sample_inverse_chi(const ChiParams& params, std::size_t n,
                                       std::uint64_t seed) {
    const ChiParams unit{params.k, 1.0};
    auto out = sample_chi(unit, n, seed);
    for (double& x : out) x = params.scale / x;
    return out;
}

}  // namespace gosset
