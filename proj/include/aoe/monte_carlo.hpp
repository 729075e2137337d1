#pragma once

// Sample-by-sample simulation of the genie policy. It draws a difficulty
// per sample, checks which models get it right and picks the cheapest
// correct feasible option, with no band integration. Used to cross-check
// genie_from_options.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aoe/effectiveness.hpp"
#include "aoe/parallel.hpp"

namespace aoe {

struct GenieEstimate {
  double effectiveness = 0.0;
  double expected_compute_flops = 0.0;
  double expected_activity_s = 0.0;
  double se_effectiveness = 0.0;
  double se_compute_flops = 0.0;
  double se_activity_s = 0.0;
  std::size_t samples = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Difficulty of sample `index` under `seed`, uniform on [0, 1).
inline double sample_difficulty(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t z = splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

// Running mean / M2 (Welford) with Chan's merge.
struct Moments {
  double n = 0.0, mean = 0.0, m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    const double total = n + o.n;
    const double delta = o.mean - mean;
    mean += delta * o.n / total;
    m2 += o.m2 + delta * delta * n * o.n / total;
    n = total;
  }

  double standard_error() const { return n > 1.0 ? std::sqrt(std::max(m2, 0.0) / (n - 1.0) / n) : 0.0; }
};

struct BlockMoments {
  Moments effectiveness, compute, activity;
};

}  // namespace detail

// Fixed block size: results depend only on (options, samples, seed),
// never on how blocks are spread over threads.
inline constexpr std::size_t mc_block_size = 4096;

inline GenieEstimate genie_oracle_mc(std::span<const ServiceOption> options, std::size_t samples, std::uint64_t seed,
                                     unsigned threads = 0) {
  if (samples == 0) throw config_error("Monte Carlo needs at least one sample");
  std::vector<ServiceOption> ranked;
  for (const auto& o : options)
    if (o.feasible) ranked.push_back(o);
  std::sort(ranked.begin(), ranked.end(), detail::cheaper);

  const std::size_t blocks = (samples + mc_block_size - 1) / mc_block_size;
  std::vector<detail::BlockMoments> partial(blocks);
  parallel_for(blocks, threads, [&](std::size_t b) {
    auto& m = partial[b];
    const std::size_t end = std::min(samples, (b + 1) * mc_block_size);
    for (std::size_t i = b * mc_block_size; i < end; ++i) {
      const double d = detail::sample_difficulty(seed, i);
      const ServiceOption* hit = nullptr;
      for (const auto& o : ranked) {
        if (o.model_accuracy >= d) {
          hit = &o;
          break;
        }
      }
      m.effectiveness.add(hit ? 1.0 : 0.0);
      m.compute.add(hit ? *hit->required_compute_flops : 0.0);
      m.activity.add(hit ? hit->tx_delay_s : 0.0);
    }
  });

  detail::BlockMoments total;
  for (const auto& m : partial) {
    total.effectiveness.merge(m.effectiveness);
    total.compute.merge(m.compute);
    total.activity.merge(m.activity);
  }
  GenieEstimate est;
  est.samples = samples;
  est.effectiveness = total.effectiveness.mean;
  est.expected_compute_flops = total.compute.mean;
  est.expected_activity_s = total.activity.mean;
  est.se_effectiveness = total.effectiveness.standard_error();
  est.se_compute_flops = total.compute.standard_error();
  est.se_activity_s = total.activity.standard_error();
  return est;
}

inline GenieEstimate genie_oracle_mc(std::size_t pixel, const RadioGrids& grids, const Scenario& s,
                                     std::size_t samples, std::uint64_t seed, unsigned threads = 0) {
  const auto options = service_options(pixel, grids, s);
  return genie_oracle_mc(options, samples, seed, threads);
}

// |exact - estimate| <= k standard errors on all three fields. A relative
// slack of 1e-12 absorbs rounding when the estimate has zero variance.
inline bool within_standard_errors(const PolicyOutcome& exact, const GenieEstimate& est, double k = 3.0) {
  auto ok = [k](double a, double b, double se) {
    return std::abs(a - b) <= k * se + 1e-12 * std::max(std::abs(a), std::abs(b));
  };
  return ok(exact.effectiveness, est.effectiveness, est.se_effectiveness) &&
         ok(exact.expected_compute_flops, est.expected_compute_flops, est.se_compute_flops) &&
         ok(exact.expected_activity_s, est.expected_activity_s, est.se_activity_s);
}

}  // namespace aoe
