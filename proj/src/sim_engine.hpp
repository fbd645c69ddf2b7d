#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "arch_model.hpp"
#include "workload.hpp"

// Transaction-level performance simulation: maps a network onto an
// accelerator instance under weight-stationary dataflow and accounts
// per-layer latency and energy analytically from the schedule geometry.
//
// Timing model (see the README modeling notes for the full rationale):
//  - The C = ceil(S/N) segments of one output (x slices on the analog
//    baselines) evaluate in parallel on a group of VDPEs; psum reduction is
//    a sequential accumulation chain at the reduction-network add latency,
//    and the group blocks until its result drains.
//  - SCONNA operand delivery is the per-OSM buffer + LUT fetch, hidden under
//    the 2^B-bit stream when shorter; the analog baselines stream operand
//    points through the per-VDPE eDRAM/DAC path at one point per access.
//  - MAM shares one DIV bank per VDPC, so depthwise layers keep only one
//    VDPE per VDPC usefully busy.

namespace sconna::engine {

struct LayerSchedule {
  std::string layer_name;
  workload::LayerKind kind = workload::LayerKind::conv;
  std::uint64_t flat_size = 0;       // S
  std::uint64_t segment_count = 0;   // C = ceil(S/N)
  std::uint64_t psums_per_result = 0;  // C x bit slices
  std::uint64_t psum_tree_depth = 0;   // ceil(log2(psums)), diagnostic
  std::uint64_t result_count = 0;      // H_out * W_out * L
  std::uint64_t concurrent_results = 0;  // result groups in flight
  std::uint64_t rounds_per_result = 0;   // > 1 when one group exceeds the array
  std::uint64_t waves = 0;               // ceil(results / groups)
  std::uint64_t weight_segments = 0;     // L * C * slices
};

struct Schedule {
  std::size_t mapped_vdpe_size = 0;
  std::vector<LayerSchedule> layers;
};

// Builds the weight-stationary schedule. vdpe_size must not exceed the
// instance's configured N; pool/activation layers map to peripheral events.
Schedule map_network(const workload::NetworkSpec& net,
                     const arch::Accelerator& acc, std::size_t vdpe_size);

struct LayerMetrics {
  std::string layer_name;
  double latency_ns = 0.0;
  double energy_nj = 0.0;
  std::uint64_t waves = 0;
  std::uint64_t psum_adds = 0;
  std::uint64_t adc_conversions = 0;
  std::uint64_t psum_tree_depth = 0;
};

struct SimMetrics {
  std::vector<LayerMetrics> layers;
  double total_latency_ns = 0.0;
  double total_energy_nj = 0.0;
  double average_power_w = 0.0;
  double area_mm2 = 0.0;
  double fps = 0.0;
  double fps_per_watt = 0.0;
  double fps_per_watt_per_mm2 = 0.0;
  std::uint64_t total_waves = 0;
  std::uint64_t total_psum_adds = 0;
  std::uint64_t total_adc_conversions = 0;
  std::uint64_t functional_checks = 0;
  std::uint64_t functional_check_failures = 0;
};

struct SimOptions {
  // Cross-validate the analytic psum accounting against bit-exact
  // stochastic evaluation on sampled dot products of each layer.
  bool bitexact_validation = false;
  std::uint64_t validation_samples_per_layer = 2;
  std::uint64_t seed = 1;
};

// Deterministic; throws std::invalid_argument on an empty network.
SimMetrics simulate(const workload::NetworkSpec& net,
                    const arch::Accelerator& acc, const Schedule& schedule,
                    const SimOptions& options = {});

// --- multi-accelerator comparison -----------------------------------------

struct ComparisonCell {
  std::string network;
  std::string accelerator;
  double fps = 0.0;
  double fps_per_watt = 0.0;
  double fps_per_watt_per_mm2 = 0.0;
  double latency_ns = 0.0;
};

struct RatioRow {
  std::string network;
  std::string baseline;  // reference accelerator is the first instance
  double fps_ratio = 0.0;
  double fps_per_watt_ratio = 0.0;
  double fps_per_watt_per_mm2_ratio = 0.0;
};

struct GmeanRow {
  std::string baseline;
  double fps_ratio = 0.0;
  double fps_per_watt_ratio = 0.0;
  double fps_per_watt_per_mm2_ratio = 0.0;
};

struct Comparison {
  std::vector<ComparisonCell> cells;   // networks x accelerators
  std::vector<RatioRow> ratios;        // first accelerator vs each other
  std::vector<GmeanRow> gmeans;        // geometric means across networks
};

// First instance is the reference (numerator of every ratio).
Comparison compare(std::span<const workload::NetworkSpec> networks,
                   std::span<const arch::Accelerator> accelerators,
                   const SimOptions& options = {});

double gmean(std::span<const double> values);

// --- serialization ----------------------------------------------------------

std::string per_layer_csv(const SimMetrics& m);
std::string metrics_to_json(const SimMetrics& m, const std::string& network,
                            const std::string& accelerator);
std::string comparison_to_json(const Comparison& c);
std::string comparison_ratio_csv(const Comparison& c);
// Plot-ready long format: network, accelerator, metric, value.
std::string comparison_long_csv(const Comparison& c);

}  // namespace sconna::engine
