#include "sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sc_core.hpp"

namespace sconna::engine {

namespace {

// Operand scratchpad access ahead of the per-OSM lookup table.
constexpr double kScratchpadNs = 2.0;
// Pooling and activation units stream vectorized element batches.
constexpr std::uint64_t kPeripheralVectorWidth = 1024;

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
  return (a + b - 1) / b;
}

std::uint64_t log2_ceil(std::uint64_t n) {
  std::uint64_t depth = 0;
  while ((std::uint64_t{1} << depth) < n) ++depth;
  return depth;
}

struct WaveTiming {
  double operand_ns = 0.0;  // streaming + operand delivery, one round
  double adc_ns = 0.0;
  double reduce_ns = 0.0;
  double result_ns(std::uint64_t rounds) const {
    return operand_ns * static_cast<double>(rounds) + adc_ns + reduce_ns;
  }
};

WaveTiming wave_timing(const arch::Accelerator& acc,
                       const LayerSchedule& layer) {
  const auto& cfg = acc.config;
  const auto& costs = acc.costs;
  WaveTiming t;
  if (cfg.family == arch::Family::sconna) {
    const double stream_ns =
        static_cast<double>(std::uint64_t{1} << cfg.native_precision_bits) /
        cfg.line_rate_hz * 1e9;
    const double fetch_ns = kScratchpadNs + costs.lut_per_osm.latency_ns;
    t.operand_ns = std::max(stream_ns, fetch_ns) +
                   costs.serializer_per_osm.latency_ns;
    // PCA pair drains through the VDPE's single ADC
    t.adc_ns = 2.0 * costs.adc_sconna.latency_ns;
  } else {
    // one operand point per eDRAM access, DAC conversion pipelined behind it
    t.operand_ns = costs.dac.latency_ns +
                   static_cast<double>(cfg.vdpe_size) * costs.edram.latency_ns;
    t.adc_ns = costs.adc_baseline.latency_ns;
  }
  if (layer.psums_per_result > 1)
    t.reduce_ns = static_cast<double>(layer.psums_per_result - 1) *
                  costs.reduction_network.latency_ns;
  return t;
}

}  // namespace

Schedule map_network(const workload::NetworkSpec& net,
                     const arch::Accelerator& acc, std::size_t vdpe_size) {
  if (net.layers.empty())
    throw std::invalid_argument("map_network: network \"" + net.name +
                                "\" has no layers");
  if (vdpe_size > acc.config.vdpe_size)
    throw std::invalid_argument(
        "map_network: requested VDPE size " + std::to_string(vdpe_size) +
        " exceeds the instance's configured size " +
        std::to_string(acc.config.vdpe_size));
  if (vdpe_size == 0) vdpe_size = acc.config.vdpe_size;

  const std::uint64_t slices = acc.config.bit_slices_per_result;
  const std::uint64_t total_vdpes = acc.config.total_vdpes;

  Schedule schedule;
  schedule.mapped_vdpe_size = vdpe_size;
  for (const auto& layer : net.layers) {
    layer.validate();
    LayerSchedule ls;
    ls.layer_name = layer.name;
    ls.kind = layer.kind;
    if (!layer.bears_vdp()) {
      ls.result_count = static_cast<std::uint64_t>(layer.output_height()) *
                        layer.output_width() * layer.input_depth;
      schedule.layers.push_back(std::move(ls));
      continue;
    }
    ls.flat_size = layer.flat_size();
    ls.segment_count = workload::decompose(ls.flat_size, vdpe_size).segment_count;
    ls.psums_per_result = ls.segment_count * slices;
    ls.psum_tree_depth = log2_ceil(ls.segment_count);
    ls.result_count = layer.vdp_count();
    ls.weight_segments =
        static_cast<std::uint64_t>(layer.kernel_count) * ls.psums_per_result;

    // MAM broadcasts one DIV per VDPC; a depthwise kernel pairs with exactly
    // one channel, so only one VDPE per VDPC does useful work (a sliced
    // result draws its two psums from two VDPCs).
    std::uint64_t usable_vdpes = total_vdpes;
    if (acc.config.family == arch::Family::mam &&
        layer.kind == workload::LayerKind::depthwise_conv)
      usable_vdpes = acc.config.vdpc_count();

    ls.rounds_per_result = ceil_div(ls.psums_per_result, usable_vdpes);
    ls.concurrent_results =
        ls.rounds_per_result > 1
            ? 1
            : std::max<std::uint64_t>(1, usable_vdpes / ls.psums_per_result);
    ls.waves = ceil_div(ls.result_count, ls.concurrent_results);
    schedule.layers.push_back(std::move(ls));
  }
  return schedule;
}

SimMetrics simulate(const workload::NetworkSpec& net,
                    const arch::Accelerator& acc, const Schedule& schedule,
                    const SimOptions& options) {
  if (net.layers.empty())
    throw std::invalid_argument("simulate: network \"" + net.name +
                                "\" has no layers");
  if (schedule.layers.size() != net.layers.size())
    throw std::invalid_argument("simulate: schedule does not match network");

  const auto& costs = acc.costs;
  const arch::CostSummary summary = cost_summary(acc);
  const double power_mw = summary.total_power_with_laser_mw();

  SimMetrics m;
  m.area_mm2 = summary.total_area_mm2;
  m.average_power_w = power_mw * 1e-3;

  std::mt19937_64 validation_rng(options.seed);

  for (std::size_t li = 0; li < schedule.layers.size(); ++li) {
    const auto& ls = schedule.layers[li];
    LayerMetrics lm;
    lm.layer_name = ls.layer_name;
    lm.psum_tree_depth = ls.psum_tree_depth;

    if (ls.kind == workload::LayerKind::pool ||
        ls.kind == workload::LayerKind::activation) {
      const auto& unit = ls.kind == workload::LayerKind::pool
                             ? costs.pooling_unit
                             : costs.activation_unit;
      const std::uint64_t batches = ceil_div(
          std::max<std::uint64_t>(ls.result_count, 1),
          kPeripheralVectorWidth * acc.config.tile_count());
      lm.latency_ns = static_cast<double>(batches) * unit.latency_ns +
                      costs.bus.latency_ns + costs.router.latency_ns;
    } else {
      const WaveTiming t = wave_timing(acc, ls);
      const double compute_ns = static_cast<double>(ls.waves) *
                                t.result_ns(ls.rounds_per_result);
      // stationary weights load once per VDPE assignment round
      const double weight_ns =
          static_cast<double>(ceil_div(ls.weight_segments,
                                       acc.config.total_vdpes)) *
          t.operand_ns;
      lm.latency_ns = compute_ns + weight_ns + costs.activation_unit.latency_ns +
                      costs.bus.latency_ns + costs.router.latency_ns;
      lm.waves = ls.waves;
      lm.psum_adds = ls.result_count * (ls.psums_per_result - 1);
      lm.adc_conversions =
          ls.result_count *
          (acc.config.family == arch::Family::sconna ? 2 : ls.psums_per_result);

      if (options.bitexact_validation && ls.flat_size > 0) {
        // spot-check the analytic segment accounting against the bit-exact
        // datapath on sampled vectors
        const stoch::PrecisionConfig prec{8};
        std::uniform_int_distribution<std::uint32_t> level(0, 255);
        std::uniform_int_distribution<int> sign(0, 1);
        for (std::uint64_t s = 0; s < options.validation_samples_per_layer; ++s) {
          const std::size_t len = static_cast<std::size_t>(
              std::min<std::uint64_t>(ls.flat_size, 4608));
          std::vector<std::uint32_t> div(len);
          std::vector<stoch::SignedOperand> dkv(len);
          for (std::size_t i = 0; i < len; ++i) {
            div[i] = level(validation_rng);
            dkv[i] = {level(validation_rng), sign(validation_rng)
                                                 ? stoch::Sign::positive
                                                 : stoch::Sign::negative};
          }
          const auto task = workload::decompose(len, schedule.mapped_vdpe_size);
          double psum_total = 0.0;
          for (const auto& seg : task.segments) {
            auto dv = std::span<const std::uint32_t>(div).subspan(
                seg.begin, seg.size());
            auto kv = std::span<const stoch::SignedOperand>(dkv).subspan(
                seg.begin, seg.size());
            psum_total +=
                stoch::vdpe_dot(dv, kv, prec, schedule.mapped_vdpe_size).value;
          }
          const double exact = stoch::exact_dot_counts(div, dkv, prec);
          ++m.functional_checks;
          if (std::abs(psum_total - exact) > 0.5 * static_cast<double>(len))
            ++m.functional_check_failures;
        }
      }
    }
    lm.energy_nj = power_mw * lm.latency_ns * 1e-3;  // mW * ns = pJ
    m.total_latency_ns += lm.latency_ns;
    m.total_energy_nj += lm.energy_nj;
    m.total_waves += lm.waves;
    m.total_psum_adds += lm.psum_adds;
    m.total_adc_conversions += lm.adc_conversions;
    m.layers.push_back(std::move(lm));
  }

  m.fps = 1e9 / m.total_latency_ns;
  m.fps_per_watt = m.fps / m.average_power_w;
  m.fps_per_watt_per_mm2 = m.fps_per_watt / m.area_mm2;
  return m;
}

double gmean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double log_sum = 0.0;
  for (double v : values) log_sum += std::log(v);
  return std::exp(log_sum / static_cast<double>(values.size()));
}

Comparison compare(std::span<const workload::NetworkSpec> networks,
                   std::span<const arch::Accelerator> accelerators,
                   const SimOptions& options) {
  if (networks.empty())
    throw std::invalid_argument("compare: need at least one network");
  if (accelerators.size() < 2)
    throw std::invalid_argument("compare: need at least two accelerator instances");

  Comparison c;
  std::vector<std::vector<SimMetrics>> grid(networks.size());
  for (std::size_t ni = 0; ni < networks.size(); ++ni) {
    for (const auto& acc : accelerators) {
      const Schedule schedule =
          map_network(networks[ni], acc, acc.config.vdpe_size);
      const SimMetrics m = simulate(networks[ni], acc, schedule, options);
      grid[ni].push_back(m);
      c.cells.push_back({networks[ni].name, acc.config.name, m.fps,
                         m.fps_per_watt, m.fps_per_watt_per_mm2,
                         m.total_latency_ns});
    }
  }
  for (std::size_t ai = 1; ai < accelerators.size(); ++ai) {
    std::vector<double> fps_r, fpw_r, fpwa_r;
    for (std::size_t ni = 0; ni < networks.size(); ++ni) {
      RatioRow row;
      row.network = networks[ni].name;
      row.baseline = accelerators[ai].config.name;
      row.fps_ratio = grid[ni][0].fps / grid[ni][ai].fps;
      row.fps_per_watt_ratio =
          grid[ni][0].fps_per_watt / grid[ni][ai].fps_per_watt;
      row.fps_per_watt_per_mm2_ratio =
          grid[ni][0].fps_per_watt_per_mm2 / grid[ni][ai].fps_per_watt_per_mm2;
      fps_r.push_back(row.fps_ratio);
      fpw_r.push_back(row.fps_per_watt_ratio);
      fpwa_r.push_back(row.fps_per_watt_per_mm2_ratio);
      c.ratios.push_back(std::move(row));
    }
    c.gmeans.push_back({accelerators[ai].config.name, gmean(fps_r),
                        gmean(fpw_r), gmean(fpwa_r)});
  }
  return c;
}

std::string per_layer_csv(const SimMetrics& m) {
  std::ostringstream out;
  out << "layer,waves,latency_ns,energy_nj,psum_adds,adc_conversions,psum_tree_depth\n";
  char buf[256];
  for (const auto& l : m.layers) {
    std::snprintf(buf, sizeof buf, "%s,%llu,%.17g,%.17g,%llu,%llu,%llu\n",
                  l.layer_name.c_str(),
                  static_cast<unsigned long long>(l.waves), l.latency_ns,
                  l.energy_nj, static_cast<unsigned long long>(l.psum_adds),
                  static_cast<unsigned long long>(l.adc_conversions),
                  static_cast<unsigned long long>(l.psum_tree_depth));
    out << buf;
  }
  return out.str();
}

std::string metrics_to_json(const SimMetrics& m, const std::string& network,
                            const std::string& accelerator) {
  nlohmann::json j;
  j["network"] = network;
  j["accelerator"] = accelerator;
  j["total_latency_ns"] = m.total_latency_ns;
  j["total_energy_nj"] = m.total_energy_nj;
  j["average_power_w"] = m.average_power_w;
  j["area_mm2"] = m.area_mm2;
  j["fps"] = m.fps;
  j["fps_per_watt"] = m.fps_per_watt;
  j["fps_per_watt_per_mm2"] = m.fps_per_watt_per_mm2;
  j["total_waves"] = m.total_waves;
  j["total_psum_adds"] = m.total_psum_adds;
  j["total_adc_conversions"] = m.total_adc_conversions;
  if (m.functional_checks > 0) {
    j["functional_checks"] = m.functional_checks;
    j["functional_check_failures"] = m.functional_check_failures;
  }
  return j.dump(1);
}

std::string comparison_to_json(const Comparison& c) {
  nlohmann::json j;
  j["cells"] = nlohmann::json::array();
  for (const auto& cell : c.cells)
    j["cells"].push_back({{"network", cell.network},
                          {"accelerator", cell.accelerator},
                          {"fps", cell.fps},
                          {"fps_per_watt", cell.fps_per_watt},
                          {"fps_per_watt_per_mm2", cell.fps_per_watt_per_mm2},
                          {"latency_ns", cell.latency_ns}});
  j["ratios"] = nlohmann::json::array();
  for (const auto& r : c.ratios)
    j["ratios"].push_back({{"network", r.network},
                           {"baseline", r.baseline},
                           {"fps_ratio", r.fps_ratio},
                           {"fps_per_watt_ratio", r.fps_per_watt_ratio},
                           {"fps_per_watt_per_mm2_ratio",
                            r.fps_per_watt_per_mm2_ratio}});
  j["gmeans"] = nlohmann::json::array();
  for (const auto& g : c.gmeans)
    j["gmeans"].push_back({{"baseline", g.baseline},
                           {"fps_ratio", g.fps_ratio},
                           {"fps_per_watt_ratio", g.fps_per_watt_ratio},
                           {"fps_per_watt_per_mm2_ratio",
                            g.fps_per_watt_per_mm2_ratio}});
  return j.dump(1);
}

std::string comparison_ratio_csv(const Comparison& c) {
  std::ostringstream out;
  out << "network,baseline,fps_ratio,fps_per_watt_ratio,fps_per_watt_per_mm2_ratio\n";
  char buf[256];
  for (const auto& r : c.ratios) {
    std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.17g\n",
                  r.network.c_str(), r.baseline.c_str(), r.fps_ratio,
                  r.fps_per_watt_ratio, r.fps_per_watt_per_mm2_ratio);
    out << buf;
  }
  for (const auto& g : c.gmeans) {
    std::snprintf(buf, sizeof buf, "gmean,%s,%.17g,%.17g,%.17g\n",
                  g.baseline.c_str(), g.fps_ratio, g.fps_per_watt_ratio,
                  g.fps_per_watt_per_mm2_ratio);
    out << buf;
  }
  return out.str();
}

std::string comparison_long_csv(const Comparison& c) {
  std::ostringstream out;
  out << "network,accelerator,metric,value\n";
  char buf[256];
  for (const auto& cell : c.cells) {
    const std::pair<const char*, double> metrics[] = {
        {"fps", cell.fps},
        {"fps_per_watt", cell.fps_per_watt},
        {"fps_per_watt_per_mm2", cell.fps_per_watt_per_mm2}};
    for (const auto& [name, value] : metrics) {
      std::snprintf(buf, sizeof buf, "%s,%s,%s,%.17g\n", cell.network.c_str(),
                    cell.accelerator.c_str(), name, value);
      out << buf;
    }
  }
  return out.str();
}

}  // namespace sconna::engine
