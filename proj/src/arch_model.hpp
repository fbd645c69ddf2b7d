#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Accelerator instance descriptions as structured cost models: component
// inventories, per-component power/area/latency, bit-slicing behavior of the
// analog baselines, and area-proportionate scaling.

namespace sconna::arch {

// One system cycle; the recurring latency quantum of the peripheral table.
inline constexpr double kCycleNs = 0.78;

// Optical output power per laser diode.
inline constexpr double kLaserDiodeOpticalMw = 10.0;

// On-chip footprint of one OSM photonic block (add-drop ring, drivers and
// local operand periphery). Model constant calibrated so the reference
// instance reproduces the published area-proportionate VDPE counts; see the
// cost-model notes in the README.
inline constexpr double kOsmPhotonicAreaMm2 = 0.0215;

struct ComponentCost {
  double power_mw = 0.0;
  double area_mm2 = 0.0;
  double latency_ns = 0.0;
};

// Peripheral power/area/latency table. Defaults reproduce the published
// figures verbatim, cycle-denominated entries converted at kCycleNs.
struct PeripheralCosts {
  ComponentCost reduction_network{0.05, 3.0e-5, 3.125};
  ComponentCost activation_unit{0.52, 6.0e-4, 0.78};
  ComponentCost io_interface{140.18, 2.44e-2, 0.78};
  ComponentCost pooling_unit{0.4, 2.4e-4, 3.125};
  ComponentCost edram{41.1, 0.166, 1.56};
  ComponentCost bus{7.0, 9.0e-3, 5 * kCycleNs};
  ComponentCost router{42.0, 0.151, 2 * kCycleNs};
  ComponentCost dac{30.0, 0.034, 0.78};            // baselines only
  ComponentCost adc_baseline{29.0, 0.103, 0.78};
  ComponentCost adc_sconna{2.55, 0.002, 0.78};
  ComponentCost serializer_per_osm{5.0, 5.9, 0.03};
  ComponentCost lut_per_osm{0.06, 0.09, 2.0};
  ComponentCost pca{0.02, 0.28, 0.0};
};

enum class Family { sconna, mam, amm };

const char* family_name(Family f);
Family family_from_name(const std::string& name);

struct AcceleratorConfig {
  std::string name;
  Family family = Family::sconna;
  unsigned native_precision_bits = 8;  // B the VDPEs operate at
  std::size_t vdpe_size = 176;         // N
  std::size_t vdpes_per_vdpc = 176;    // M
  std::size_t vdpcs_per_tile = 4;
  std::size_t total_vdpes = 1024;
  double line_rate_hz = 30e9;          // bitrate (sconna) or symbol rate (baselines)
  unsigned bit_slices_per_result = 1;
  double wall_plug_efficiency = 0.1;

  std::size_t vdpc_count() const {
    return (total_vdpes + vdpes_per_vdpc - 1) / vdpes_per_vdpc;
  }
  std::size_t tile_count() const {
    return (vdpc_count() + vdpcs_per_tile - 1) / vdpcs_per_tile;
  }

  void validate() const;  // throws listing every offending field
};

// A built instance: the enumerated component inventory.
struct InventoryItem {
  std::string component;
  std::uint64_t count = 0;
  double unit_power_mw = 0.0;
  double unit_area_mm2 = 0.0;       // as priced in the peripheral table
  double unit_footprint_mm2 = 0.0;  // what enters the on-chip footprint
  std::string footprint_note;       // reason when footprint != priced area
};

struct Accelerator {
  AcceleratorConfig config;
  PeripheralCosts costs;
  std::vector<InventoryItem> inventory;
  std::uint64_t laser_diode_count = 0;
};

Accelerator build_accelerator(const AcceleratorConfig& config,
                              const PeripheralCosts& costs);

struct CostBreakdownRow {
  std::string component;
  std::uint64_t count = 0;
  double power_mw = 0.0;
  double area_mm2 = 0.0;
  std::string note;
};

struct CostSummary {
  double total_area_mm2 = 0.0;          // on-chip footprint
  double total_static_power_mw = 0.0;   // peripheral table components
  double laser_power_mw = 0.0;          // optical, diodes x 10 mW
  double laser_electrical_power_mw = 0.0;  // optical / eta_WPE
  std::vector<CostBreakdownRow> breakdown;

  double total_power_with_laser_mw() const {
    return total_static_power_mw + laser_electrical_power_mw;
  }
};

CostSummary cost_summary(const Accelerator& acc);

std::string cost_summary_to_json(const CostSummary& s);
std::string cost_summary_to_csv(const CostSummary& s);

// Largest VDPE count for the baseline family whose footprint fits the
// reference area. Returns 0 (with *warned = true) when even one VDPE
// does not fit.
std::size_t area_proportionate_scale(const AcceleratorConfig& baseline,
                                     const PeripheralCosts& costs,
                                     double reference_area_mm2,
                                     bool* warned = nullptr);

// Built-in instance presets.
AcceleratorConfig preset(const std::string& name);  // throws UnknownPresetError
std::vector<std::string> preset_names();

struct UnknownPresetError : std::invalid_argument {
  explicit UnknownPresetError(const std::string& name);
};

AcceleratorConfig parse_accelerator(const std::string& json_text);
AcceleratorConfig load_accelerator(const std::string& path);
std::string accelerator_to_json(const AcceleratorConfig& c);

}  // namespace sconna::arch
