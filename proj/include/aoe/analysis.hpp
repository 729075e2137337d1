#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aoe/effectiveness.hpp"
#include "aoe/error.hpp"
#include "aoe/grid.hpp"
#include "aoe/parallel.hpp"
#include "aoe/propagation.hpp"
#include "aoe/scenario.hpp"

namespace aoe {

struct PolicyMaps {
  GridMap effectiveness;
  GridMap compute_load;  // FLOPS/s
  GridMap activity;      // seconds
};

inline PolicyMaps build_policy_maps(Policy policy, const Scenario& s, const RadioGrids& grids, unsigned threads = 0) {
  PolicyMaps maps{grids.base.like(0.0, "probability"), grids.base.like(0.0, "FLOPS/s"), grids.base.like(0.0, "s")};
  parallel_for(grids.pixel_count(), threads, [&](std::size_t i) {
    if (!grids.valid(i)) return;
    const PolicyOutcome o = evaluate_policy(policy, i, grids, s);
    maps.effectiveness.values[i] = o.effectiveness;
    maps.compute_load.values[i] = o.expected_compute_flops;
    maps.activity.values[i] = o.expected_activity_s;
  });
  return maps;
}

struct AoeResult {
  GridMap map;  // 1 inside the area, 0 outside, masked elsewhere
  std::size_t pixels = 0;
  double area_m2 = 0.0;
  double fraction = 0.0;  // of the valid area
  double threshold = 0.0;
};

// Pixels whose effectiveness reaches q_th (inclusive).
inline AoeResult area_of_effectiveness(const GridMap& effectiveness, double q_th) {
  if (!(q_th >= 0.0 && q_th <= 1.0)) throw config_error("q_th must lie in [0, 1]");
  AoeResult r;
  r.threshold = q_th;
  r.map = effectiveness.like(0.0, "in AoE");
  for (std::size_t i = 0; i < effectiveness.size(); ++i) {
    if (!effectiveness.valid(i) || !(effectiveness.values[i] >= q_th)) continue;
    r.map.values[i] = 1.0;
    ++r.pixels;
  }
  const std::size_t valid = effectiveness.valid_count();
  r.area_m2 = static_cast<double>(r.pixels) * effectiveness.pixel_size_m * effectiveness.pixel_size_m;
  r.fraction = valid == 0 ? 0.0 : static_cast<double>(r.pixels) / static_cast<double>(valid);
  return r;
}

// Empirical CDF: F(x) = fraction of samples <= x.
class Ecdf {
public:
  explicit Ecdf(std::vector<double> samples) : sorted_(std::move(samples)) {
    if (sorted_.empty()) throw compute_error("empirical CDF of an empty sample");
    std::sort(sorted_.begin(), sorted_.end());
  }

  double operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
  }

  // (value, F(value)) at every distinct sample value.
  std::vector<std::pair<double, double>> points() const {
    std::vector<std::pair<double, double>> out;
    const double n = static_cast<double>(sorted_.size());
    for (std::size_t i = 0; i < sorted_.size(); ++i) {
      if (i + 1 < sorted_.size() && sorted_[i + 1] == sorted_[i]) continue;
      out.emplace_back(sorted_[i], static_cast<double>(i + 1) / n);
    }
    return out;
  }

  std::span<const double> samples() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }
  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }

private:
  std::vector<double> sorted_;
};

// ECDF over valid pixels; exclude_zero drops pixels whose value is 0.
inline Ecdf ecdf(const GridMap& map, bool exclude_zero = false) {
  std::vector<double> v;
  v.reserve(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (!map.valid(i)) continue;
    if (exclude_zero && map.values[i] == 0.0) continue;
    v.push_back(map.values[i]);
  }
  if (v.empty()) throw compute_error("empirical CDF of a map without valid pixels");
  return Ecdf(std::move(v));
}

// ---------------------------------------------------------------------------
// Model placement

using Assignment = std::map<int, std::string>;                // AP id -> model id
using CandidateSet = std::map<int, std::vector<std::string>>;  // AP id -> models

enum class SearchMode { exhaustive, greedy };

inline constexpr std::size_t max_exhaustive_assignments = 1'000'000;

struct PlacementResult {
  Assignment assignment;
  double fraction = 0.0;
  std::size_t evaluated = 0;
};

inline CandidateSet all_models_everywhere(const Scenario& s) {
  CandidateSet c;
  for (const auto& ap : s.access_points)
    for (const auto& [id, m] : s.models) c[ap.id].push_back(id);
  return c;
}

inline Scenario with_assignment(Scenario s, const Assignment& assignment) {
  for (auto& ap : s.access_points) {
    auto it = assignment.find(ap.id);
    if (it != assignment.end()) ap.model_id = it->second;
  }
  validate(s);
  return s;
}

// Genie AoE fraction when only the APs listed in `assignment` serve, each
// with its assigned model.
inline double placement_score(const Scenario& s, const RadioGrids& grids, const Assignment& assignment, double q_th,
                              unsigned threads = 0) {
  std::vector<std::pair<std::size_t, const InferenceModel*>> active;
  for (const auto& [ap_id, model_id] : assignment) {
    auto it = s.models.find(model_id);
    if (it == s.models.end()) throw config_error("unknown model '" + model_id + "' in assignment");
    active.emplace_back(grids.index_of(ap_id), &it->second);
  }
  GridMap eff = grids.base.like(0.0, "probability");
  parallel_for(grids.pixel_count(), threads, [&](std::size_t i) {
    if (!grids.valid(i)) return;
    std::vector<ServiceOption> options;
    for (const auto& [a, model] : active) {
      const auto& ap = s.access_points[a];
      options.push_back(make_service_option(ap.id, grids.capacity_bps[a].values[i], *model, s.application,
                                            ap.compute_capacity_flops));
    }
    eff.values[i] = genie_from_options(options).effectiveness;
  });
  return area_of_effectiveness(eff, q_th).fraction;
}

namespace detail {

// Pixel bitset of where (AP, model) alone lifts genie effectiveness to
// q_th. Genie effectiveness is the best feasible accuracy, so a pixel is
// in the AoE iff at least one active (AP, model) pair covers it.
class CoverageTable {
public:
  CoverageTable(const Scenario& s, const RadioGrids& grids, const CandidateSet& candidates, double q_th,
                unsigned threads)
      : words_((grids.pixel_count() + 63) / 64), valid_(grids.base.valid_count()) {
    for (const auto& ap : s.access_points) {
      auto it = candidates.find(ap.id);
      if (it == candidates.end() || it->second.empty())
        throw config_error("no candidate models for access point " + std::to_string(ap.id));
      auto models = it->second;
      std::sort(models.begin(), models.end());
      models.erase(std::unique(models.begin(), models.end()), models.end());
      for (const auto& m : models)
        if (!s.models.count(m)) throw config_error("unknown candidate model '" + m + "'");
      ap_ids_.push_back(ap.id);
      models_.push_back(std::move(models));
    }
    for (const auto& [ap_id, _] : candidates) s.ap_by_id(ap_id);

    bits_.resize(ap_ids_.size());
    for (std::size_t a = 0; a < ap_ids_.size(); ++a) bits_[a].assign(models_[a].size(), std::vector<std::uint64_t>(words_, 0));
    parallel_for(words_, threads, [&](std::size_t w) {
      for (std::size_t a = 0; a < ap_ids_.size(); ++a) {
        const auto& ap = s.access_points[a];
        for (std::size_t m = 0; m < models_[a].size(); ++m) {
          const auto& model = s.models.at(models_[a][m]);
          if (model.accuracy < q_th) continue;
          std::uint64_t word = 0;
          for (std::size_t bit = 0; bit < 64; ++bit) {
            const std::size_t i = w * 64 + bit;
            if (i >= grids.pixel_count() || !grids.valid(i)) continue;
            const auto o = make_service_option(ap.id, grids.capacity_bps[a].values[i], model, s.application,
                                               ap.compute_capacity_flops);
            if (o.feasible) word |= std::uint64_t{1} << bit;
          }
          bits_[a][m][w] = word;
        }
      }
    });
  }

  std::size_t ap_count() const { return ap_ids_.size(); }
  std::size_t model_count(std::size_t a) const { return models_[a].size(); }
  const std::string& model(std::size_t a, std::size_t m) const { return models_[a][m]; }
  int ap_id(std::size_t a) const { return ap_ids_[a]; }
  std::size_t words() const { return words_; }

  void merge_into(std::vector<std::uint64_t>& acc, std::size_t a, std::size_t m) const {
    for (std::size_t w = 0; w < words_; ++w) acc[w] |= bits_[a][m][w];
  }

  double fraction(const std::vector<std::uint64_t>& acc) const {
    std::size_t n = 0;
    for (auto w : acc) n += static_cast<std::size_t>(std::popcount(w));
    return valid_ == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(valid_);
  }

private:
  std::size_t words_;
  std::size_t valid_;
  std::vector<int> ap_ids_;
  std::vector<std::vector<std::string>> models_;
  std::vector<std::vector<std::vector<std::uint64_t>>> bits_;  // [ap][model][word]
};

}  // namespace detail

// Searches model-to-AP assignments for the largest genie AoE.
//   exhaustive: global maximum; ties go to the lexicographically smallest
//               assignment (model ids compared in ascending AP id order).
//   greedy:     APs fixed in ascending id order, each picking the model
//               with the largest AoE given the APs already placed (APs not
//               yet placed do not serve); ties go to the smallest model id.
inline PlacementResult placement_search(const Scenario& s, const RadioGrids& grids, const CandidateSet& candidates,
                                        double q_th, SearchMode mode, unsigned threads = 0) {
  if (!(q_th >= 0.0 && q_th <= 1.0)) throw config_error("q_th must lie in [0, 1]");
  const detail::CoverageTable table(s, grids, candidates, q_th, threads);
  const std::size_t n_ap = table.ap_count();
  PlacementResult result;

  if (mode == SearchMode::greedy) {
    std::vector<std::uint64_t> acc(table.words(), 0);
    for (std::size_t a = 0; a < n_ap; ++a) {
      std::size_t best = 0;
      double best_score = -1.0;
      for (std::size_t m = 0; m < table.model_count(a); ++m) {
        auto trial = acc;
        table.merge_into(trial, a, m);
        const double score = table.fraction(trial);
        ++result.evaluated;
        if (score > best_score) {
          best_score = score;
          best = m;
        }
      }
      table.merge_into(acc, a, best);
      result.assignment[table.ap_id(a)] = table.model(a, best);
    }
    result.fraction = table.fraction(acc);
    return result;
  }

  std::size_t total = 1;
  for (std::size_t a = 0; a < n_ap; ++a) {
    if (total > max_exhaustive_assignments / table.model_count(a))
      throw compute_error("search-space overflow: more than " + std::to_string(max_exhaustive_assignments) +
                          " assignments");
    total *= table.model_count(a);
  }

  // Mixed-radix index with the lowest AP id most significant, so index
  // order is lexicographic order.
  auto decode = [&](std::size_t k) {
    std::vector<std::size_t> digits(n_ap);
    for (std::size_t a = n_ap; a-- > 0;) {
      digits[a] = k % table.model_count(a);
      k /= table.model_count(a);
    }
    return digits;
  };
  std::vector<double> scores(total);
  parallel_for(total, threads, [&](std::size_t k) {
    const auto digits = decode(k);
    std::vector<std::uint64_t> acc(table.words(), 0);
    for (std::size_t a = 0; a < n_ap; ++a) table.merge_into(acc, a, digits[a]);
    scores[k] = table.fraction(acc);
  });
  std::size_t best = 0;
  for (std::size_t k = 1; k < total; ++k)
    if (scores[k] > scores[best]) best = k;

  const auto digits = decode(best);
  for (std::size_t a = 0; a < n_ap; ++a) result.assignment[table.ap_id(a)] = table.model(a, digits[a]);
  result.fraction = scores[best];
  result.evaluated = total;
  return result;
}

}  // namespace aoe
