#include "arch_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sconna::arch {

const char* family_name(Family f) {
  switch (f) {
    case Family::sconna: return "SCONNA";
    case Family::mam: return "MAM";
    case Family::amm: return "AMM";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "SCONNA" || name == "sconna") return Family::sconna;
  if (name == "MAM" || name == "mam") return Family::mam;
  if (name == "AMM" || name == "amm") return Family::amm;
  throw std::invalid_argument("unknown accelerator family \"" + name + "\"");
}

void AcceleratorConfig::validate() const {
  std::string bad;
  auto flag = [&bad](const char* field, const std::string& why) {
    if (!bad.empty()) bad += "; ";
    bad += std::string(field) + ": " + why;
  };
  if (vdpe_size < 1) flag("vdpe_size", "must be >= 1");
  if (vdpes_per_vdpc < 1) flag("vdpes_per_vdpc", "must be >= 1");
  if (vdpcs_per_tile < 1) flag("vdpcs_per_tile", "must be >= 1");
  if (total_vdpes < 1) flag("total_vdpes", "must be >= 1");
  if (line_rate_hz <= 0) flag("line_rate_hz", "must be positive");
  if (native_precision_bits < 1) flag("native_precision_bits", "must be >= 1");
  if (bit_slices_per_result < 1) flag("bit_slices_per_result", "must be >= 1");
  if (wall_plug_efficiency <= 0 || wall_plug_efficiency > 1)
    flag("wall_plug_efficiency", "must be in (0, 1]");
  if (family == Family::sconna && bit_slices_per_result != 1)
    flag("bit_slices_per_result", "SCONNA computes full precision in one pass");
  if (family != Family::sconna && native_precision_bits == 4 &&
      bit_slices_per_result != 2)
    flag("bit_slices_per_result",
         "4-bit analog baselines reach 8-bit precision with 2 slices");
  if (!bad.empty())
    throw std::invalid_argument("accelerator config \"" + name + "\": " + bad);
}

namespace {

constexpr const char* kSerializerAreaNote =
    "priced area is the standalone transceiver-die figure; the on-chip "
    "serializer sits in the OSM photonic block";
constexpr const char* kLutAreaNote =
    "priced area is a standalone macro figure; the operand table share is "
    "folded into the OSM photonic block";

void add(std::vector<InventoryItem>& inv, const std::string& component,
         std::uint64_t count, const ComponentCost& cost,
         double footprint = -1.0, const char* note = "") {
  InventoryItem item;
  item.component = component;
  item.count = count;
  item.unit_power_mw = cost.power_mw;
  item.unit_area_mm2 = cost.area_mm2;
  item.unit_footprint_mm2 = footprint < 0 ? cost.area_mm2 : footprint;
  item.footprint_note = note;
  inv.push_back(std::move(item));
}

}  // namespace

Accelerator build_accelerator(const AcceleratorConfig& config,
                              const PeripheralCosts& costs) {
  config.validate();
  Accelerator acc;
  acc.config = config;
  acc.costs = costs;

  const std::uint64_t vdpes = config.total_vdpes;
  const std::uint64_t vdpcs = config.vdpc_count();
  const std::uint64_t tiles = config.tile_count();
  auto& inv = acc.inventory;

  if (config.family == Family::sconna) {
    const std::uint64_t osms = vdpes * config.vdpe_size;
    add(inv, "osm_serializer", osms, costs.serializer_per_osm, 0.0,
        kSerializerAreaNote);
    add(inv, "osm_lut", osms, costs.lut_per_osm, 0.0, kLutAreaNote);
    add(inv, "osm_photonic_block", osms, ComponentCost{0.0, kOsmPhotonicAreaMm2, 0.0});
    add(inv, "pca", 2 * vdpes, costs.pca);
    add(inv, "adc", vdpes, costs.adc_sconna);
  } else {
    // one DAC per modulated ring: DKV bank per VDPE, plus for MAM the
    // per-VDPC DIV bank shared by its M VDPEs; AMM carries its own DIV bank
    // per VDPE. Ring optics themselves carry no marginal footprint here.
    const std::uint64_t dkv_dacs = vdpes * config.vdpe_size;
    const std::uint64_t div_dacs = config.family == Family::mam
                                       ? vdpcs * config.vdpe_size
                                       : vdpes * config.vdpe_size;
    add(inv, "dac", dkv_dacs + div_dacs, costs.dac);
    add(inv, "adc", vdpes, costs.adc_baseline);
  }

  // per-VDPE operand memory bank and interconnect port
  add(inv, "edram_bank", vdpes, costs.edram);
  add(inv, "router_port", vdpes, costs.router);

  // per-tile blocks
  add(inv, "reduction_network", tiles, costs.reduction_network);
  add(inv, "activation_unit", tiles, costs.activation_unit);
  add(inv, "pooling_unit", tiles, costs.pooling_unit);
  add(inv, "io_interface", tiles, costs.io_interface);
  add(inv, "bus", tiles, costs.bus);

  acc.laser_diode_count = vdpcs * config.vdpe_size;  // N diodes per VDPC
  return acc;
}

CostSummary cost_summary(const Accelerator& acc) {
  CostSummary s;
  for (const auto& item : acc.inventory) {
    CostBreakdownRow row;
    row.component = item.component;
    row.count = item.count;
    row.power_mw = static_cast<double>(item.count) * item.unit_power_mw;
    row.area_mm2 = static_cast<double>(item.count) * item.unit_footprint_mm2;
    row.note = item.footprint_note;
    s.total_static_power_mw += row.power_mw;
    s.total_area_mm2 += row.area_mm2;
    s.breakdown.push_back(std::move(row));
  }
  s.laser_power_mw =
      static_cast<double>(acc.laser_diode_count) * kLaserDiodeOpticalMw;
  s.laser_electrical_power_mw =
      s.laser_power_mw / acc.config.wall_plug_efficiency;
  return s;
}

std::string cost_summary_to_json(const CostSummary& s) {
  nlohmann::json j;
  j["total_area_mm2"] = s.total_area_mm2;
  j["total_static_power_mw"] = s.total_static_power_mw;
  j["laser_power_mw"] = s.laser_power_mw;
  j["laser_electrical_power_mw"] = s.laser_electrical_power_mw;
  j["breakdown"] = nlohmann::json::array();
  for (const auto& row : s.breakdown) {
    nlohmann::json r{{"component", row.component},
                     {"count", row.count},
                     {"power_mw", row.power_mw},
                     {"area_mm2", row.area_mm2}};
    if (!row.note.empty()) r["note"] = row.note;
    j["breakdown"].push_back(std::move(r));
  }
  return j.dump(1);
}

std::string cost_summary_to_csv(const CostSummary& s) {
  std::ostringstream out;
  out << "component,count,power_mw,area_mm2\n";
  char buf[128];
  for (const auto& row : s.breakdown) {
    std::snprintf(buf, sizeof buf, "%s,%llu,%.17g,%.17g\n", row.component.c_str(),
                  static_cast<unsigned long long>(row.count), row.power_mw,
                  row.area_mm2);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "total,,%.17g,%.17g\n", s.total_static_power_mw,
                s.total_area_mm2);
  out << buf;
  return out.str();
}

std::size_t area_proportionate_scale(const AcceleratorConfig& baseline,
                                     const PeripheralCosts& costs,
                                     double reference_area_mm2,
                                     bool* warned) {
  if (warned) *warned = false;
  auto area_of = [&](std::size_t count) {
    AcceleratorConfig c = baseline;
    c.total_vdpes = count;
    return cost_summary(build_accelerator(c, costs)).total_area_mm2;
  };
  if (area_of(1) > reference_area_mm2) {
    if (warned) *warned = true;
    return 0;
  }
  std::size_t lo = 1, hi = 2;
  while (area_of(hi) <= reference_area_mm2) {
    lo = hi;
    hi *= 2;
    if (hi > (std::size_t{1} << 32))
      throw std::invalid_argument(
          "area_proportionate_scale: per-VDPE incremental area is not positive");
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (area_of(mid) <= reference_area_mm2 ? lo : hi) = mid;
  }
  return lo;
}

AcceleratorConfig preset(const std::string& name) {
  AcceleratorConfig c;
  c.name = name;
  if (name == "sconna-paper") {
    c.family = Family::sconna;
    c.native_precision_bits = 8;
    c.vdpe_size = 176;
    c.vdpes_per_vdpc = 176;
    c.total_vdpes = 1024;
    c.line_rate_hz = 30e9;
    c.bit_slices_per_result = 1;
  } else if (name == "mam-holylight") {
    c.family = Family::mam;
    c.native_precision_bits = 4;
    c.vdpe_size = 22;
    c.vdpes_per_vdpc = 22;
    c.total_vdpes = 3971;  // area-matched against the 1024-VDPE reference
    c.line_rate_hz = 5e9;
    c.bit_slices_per_result = 2;
  } else if (name == "amm-deapcnn") {
    c.family = Family::amm;
    c.native_precision_bits = 4;
    c.vdpe_size = 16;
    c.vdpes_per_vdpc = 16;
    c.total_vdpes = 3172;  // area-matched against the 1024-VDPE reference
    c.line_rate_hz = 5e9;
    c.bit_slices_per_result = 2;
  } else {
    throw UnknownPresetError(name);
  }
  return c;
}

std::vector<std::string> preset_names() {
  return {"sconna-paper", "mam-holylight", "amm-deapcnn"};
}

UnknownPresetError::UnknownPresetError(const std::string& name)
    : std::invalid_argument([&name] {
        std::string msg = "unknown accelerator preset \"" + name +
                          "\"; available presets:";
        for (const auto& p : preset_names()) msg += " " + p;
        return msg;
      }()) {}

namespace {

AcceleratorConfig parse_accel_json(const nlohmann::json& j) {
  AcceleratorConfig c;
  if (j.contains("preset")) c = preset(j.at("preset").get<std::string>());
  for (const auto& [key, value] : j.items()) {
    if (key == "preset") continue;
    if (key == "name") c.name = value.get<std::string>();
    else if (key == "family") c.family = family_from_name(value.get<std::string>());
    else if (key == "native_precision_bits") c.native_precision_bits = value.get<unsigned>();
    else if (key == "vdpe_size") c.vdpe_size = value.get<std::size_t>();
    else if (key == "vdpes_per_vdpc") c.vdpes_per_vdpc = value.get<std::size_t>();
    else if (key == "vdpcs_per_tile") c.vdpcs_per_tile = value.get<std::size_t>();
    else if (key == "total_vdpes") c.total_vdpes = value.get<std::size_t>();
    else if (key == "line_rate_hz") c.line_rate_hz = value.get<double>();
    else if (key == "bit_slices_per_result") c.bit_slices_per_result = value.get<unsigned>();
    else if (key == "wall_plug_efficiency") c.wall_plug_efficiency = value.get<double>();
    else throw std::invalid_argument("accelerator config: unknown field \"" + key + "\"");
  }
  c.validate();
  return c;
}

}  // namespace

AcceleratorConfig parse_accelerator(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("accelerator config: JSON parse error: ") +
                                e.what());
  }
  return parse_accel_json(j);
}

AcceleratorConfig load_accelerator(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open accelerator file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_accelerator(buf.str());
}

std::string accelerator_to_json(const AcceleratorConfig& c) {
  nlohmann::json j{{"name", c.name},
                   {"family", family_name(c.family)},
                   {"native_precision_bits", c.native_precision_bits},
                   {"vdpe_size", c.vdpe_size},
                   {"vdpes_per_vdpc", c.vdpes_per_vdpc},
                   {"vdpcs_per_tile", c.vdpcs_per_tile},
                   {"total_vdpes", c.total_vdpes},
                   {"line_rate_hz", c.line_rate_hz},
                   {"bit_slices_per_result", c.bit_slices_per_result},
                   {"wall_plug_efficiency", c.wall_plug_efficiency}};
  return j.dump(1);
}

}  // namespace sconna::arch
