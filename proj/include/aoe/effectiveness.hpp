#pragma once

// Goal-effectiveness of an edge inference service at one pixel.
//
// A sample of input_bits is sent over the uplink to an AP, classified by
// the model that AP hosts, and must finish within the deadline:
//
//   loop delay = input_bits / rate + model_flops / allocated_flops
//
// The AP allocates exactly the compute that makes the loop delay equal the
// deadline; the option fails if that exceeds the AP's compute capacity.
//
// Correctness across models is nested: each sample has a difficulty
// d ~ U(0,1) and a model of accuracy a is correct iff a >= d. The genie
// therefore reaches the best feasible accuracy, serving each accuracy band
// with the cheapest (lowest required FLOPS/s) option that is still correct.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aoe/error.hpp"
#include "aoe/propagation.hpp"
#include "aoe/scenario.hpp"

namespace aoe {

inline constexpr double infinite_delay = std::numeric_limits<double>::infinity();

inline double transmission_delay(double input_bits, double rate_bps) {
  if (!(rate_bps > 0.0)) return infinite_delay;
  return input_bits / rate_bps;
}

// Minimal FLOPS/s that meets the deadline, or nullopt when transmission
// alone already uses the whole budget (zero slack is infeasible).
inline std::optional<double> required_compute(double model_flops, double deadline_s, double tx_delay_s) {
  if (!(tx_delay_s < deadline_s)) return std::nullopt;
  return model_flops / (deadline_s - tx_delay_s);
}

inline double loop_delay(double input_bits, double rate_bps, double model_flops, double allocated_flops) {
  return input_bits / rate_bps + model_flops / allocated_flops;
}

// One (pixel, AP) link evaluated end to end.
struct ServiceOption {
  int ap_id = 0;
  double rate_bps = 0.0;
  double tx_delay_s = infinite_delay;
  double model_accuracy = 0.0;
  double model_flops = 0.0;
  std::optional<double> required_compute_flops;
  bool feasible = false;
};

inline ServiceOption make_service_option(int ap_id, double rate_bps, const InferenceModel& model,
                                         const Application& app, double compute_capacity_flops) {
  ServiceOption o;
  o.ap_id = ap_id;
  o.rate_bps = rate_bps;
  o.tx_delay_s = transmission_delay(app.input_bits, rate_bps);
  o.model_accuracy = model.accuracy;
  o.model_flops = model.flops;
  o.required_compute_flops = required_compute(model.flops, app.deadline_s, o.tx_delay_s);
  o.feasible = o.required_compute_flops.has_value() && *o.required_compute_flops <= compute_capacity_flops;
  return o;
}

inline ServiceOption service_option(const AccessPoint& ap, std::size_t pixel, const RadioGrids& grids,
                                    const Scenario& s) {
  const double rate = grids.capacity_bps[grids.index_of(ap.id)].values[pixel];
  return make_service_option(ap.id, rate, s.model_of(ap), s.application, ap.compute_capacity_flops);
}

// Options from every AP at `pixel`, in ascending AP id order.
inline std::vector<ServiceOption> service_options(std::size_t pixel, const RadioGrids& grids, const Scenario& s) {
  std::vector<ServiceOption> out;
  out.reserve(s.access_points.size());
  for (std::size_t a = 0; a < s.access_points.size(); ++a) {
    const auto& ap = s.access_points[a];
    out.push_back(make_service_option(ap.id, grids.capacity_bps[a].values[pixel], s.model_of(ap), s.application,
                                      ap.compute_capacity_flops));
  }
  return out;
}

enum class Policy { rss, best_model, genie };

inline constexpr Policy all_policies[] = {Policy::rss, Policy::best_model, Policy::genie};

inline std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::rss: return "rss";
    case Policy::best_model: return "best_model";
    case Policy::genie: return "genie";
  }
  return "?";
}

inline Policy parse_policy(std::string_view name) {
  if (name == "rss") return Policy::rss;
  if (name == "best_model") return Policy::best_model;
  if (name == "genie") return Policy::genie;
  throw config_error("unknown policy '" + std::string(name) + "'");
}

// Genie accuracy band (lower, upper] served by one AP.
struct BandChoice {
  double lower = 0.0;
  double upper = 0.0;
  int ap_id = 0;
};

struct PolicyOutcome {
  double effectiveness = 0.0;
  double expected_compute_flops = 0.0;
  double expected_activity_s = 0.0;
  // Probability that a sample is transmitted at all: 1 for a feasible
  // static policy, the top accuracy for the genie, 0 on failure.
  double transmit_probability = 0.0;
  std::optional<int> serving_ap;  // static policies
  std::vector<BandChoice> bands;  // genie

  // Mean activity of one transmitted sample; 0 when nothing is sent.
  double activity_per_transmission() const {
    return transmit_probability > 0.0 ? expected_activity_s / transmit_probability : 0.0;
  }
};

namespace detail {

inline PolicyOutcome static_outcome(const ServiceOption& o) {
  PolicyOutcome out;
  out.serving_ap = o.ap_id;
  if (!o.feasible) return out;
  out.effectiveness = o.model_accuracy;
  out.expected_compute_flops = *o.required_compute_flops;
  out.expected_activity_s = o.tx_delay_s;
  out.transmit_probability = 1.0;
  return out;
}

// Cheaper compute first, then lower AP id.
inline bool cheaper(const ServiceOption& a, const ServiceOption& b) {
  if (*a.required_compute_flops != *b.required_compute_flops)
    return *a.required_compute_flops < *b.required_compute_flops;
  return a.ap_id < b.ap_id;
}

}  // namespace detail

// AP hosting the most accurate model; ties go to the lowest id.
inline int best_model_ap(const Scenario& s) {
  if (s.access_points.empty()) throw validation_error("scenario has no access points");
  const AccessPoint* best = &s.access_points.front();
  for (const auto& ap : s.access_points) {
    const double acc = s.model_of(ap).accuracy;
    const double best_acc = s.model_of(*best).accuracy;
    if (acc > best_acc || (acc == best_acc && ap.id < best->id)) best = &ap;
  }
  return best->id;
}

// AP with the highest RSS at `pixel`; ties go to the lowest id.
inline int strongest_ap(std::size_t pixel, const RadioGrids& grids) {
  if (grids.ap_count() == 0) throw validation_error("scenario has no access points");
  std::size_t best = 0;
  for (std::size_t a = 1; a < grids.ap_count(); ++a) {
    const double v = grids.rss_dbm[a].values[pixel];
    const double b = grids.rss_dbm[best].values[pixel];
    if (v > b || (v == b && grids.ap_ids[a] < grids.ap_ids[best])) best = a;
  }
  return grids.ap_ids[best];
}

// Static association. A feasible serving AP always pays its full compute
// and airtime, whether or not its model classifies the sample correctly.
inline PolicyOutcome associate_static(Policy policy, std::size_t pixel, const RadioGrids& grids, const Scenario& s) {
  int ap_id = 0;
  switch (policy) {
    case Policy::rss: ap_id = strongest_ap(pixel, grids); break;
    case Policy::best_model: ap_id = best_model_ap(s); break;
    case Policy::genie: throw config_error("associate_static called with the genie policy");
  }
  return detail::static_outcome(service_option(s.ap_by_id(ap_id), pixel, grids, s));
}

// Closed-form genie outcome over a set of options. Samples harder than
// the best feasible accuracy are not transmitted and cost nothing.
inline PolicyOutcome genie_from_options(std::span<const ServiceOption> options) {
  std::vector<ServiceOption> feasible;
  for (const auto& o : options)
    if (o.feasible) feasible.push_back(o);
  PolicyOutcome out;
  if (feasible.empty()) return out;

  std::vector<double> levels;
  for (const auto& o : feasible) levels.push_back(o.model_accuracy);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  double lower = 0.0;
  for (double level : levels) {
    const ServiceOption* choice = nullptr;
    for (const auto& o : feasible) {
      if (o.model_accuracy < level) continue;
      if (choice == nullptr || detail::cheaper(o, *choice)) choice = &o;
    }
    const double width = level - lower;
    out.expected_compute_flops += width * *choice->required_compute_flops;
    out.expected_activity_s += width * choice->tx_delay_s;
    out.bands.push_back({lower, level, choice->ap_id});
    lower = level;
  }
  out.effectiveness = levels.back();
  out.transmit_probability = levels.back();
  return out;
}

inline PolicyOutcome genie_evaluate(std::size_t pixel, const RadioGrids& grids, const Scenario& s) {
  const auto options = service_options(pixel, grids, s);
  return genie_from_options(options);
}

inline PolicyOutcome evaluate_policy(Policy policy, std::size_t pixel, const RadioGrids& grids, const Scenario& s) {
  return policy == Policy::genie ? genie_evaluate(pixel, grids, s) : associate_static(policy, pixel, grids, s);
}

}  // namespace aoe
