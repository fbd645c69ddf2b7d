#include "sconna.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include <json.hpp>

#include "arch_model.hpp"
#include "optics.hpp"
#include "sc_core.hpp"
#include "sim_engine.hpp"
#include "workload.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sconna_status classify(const std::exception& e) {
  g_last_error = e.what();
  if (dynamic_cast<const sconna::arch::UnknownPresetError*>(&e))
    return SCONNA_ERR_UNKNOWN_PRESET;
  if (dynamic_cast<const sconna::optics::NoSolutionError*>(&e))
    return SCONNA_ERR_NO_SOLUTION;
  const std::string what = e.what();
  if (what.find("JSON parse error") != std::string::npos)
    return SCONNA_ERR_PARSE;
  if (what.find("cannot open") != std::string::npos ||
      what.find("short write") != std::string::npos)
    return SCONNA_ERR_IO;
  if (dynamic_cast<const std::invalid_argument*>(&e))
    return SCONNA_ERR_INVALID_ARGUMENT;
  return SCONNA_ERR_INTERNAL;
}

template <typename Fn>
sconna_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return classify(e);
  } catch (...) {
    g_last_error = "unknown error";
    return SCONNA_ERR_INTERNAL;
  }
}

sconna_status require(bool ok, const char* what) {
  if (ok) return SCONNA_OK;
  g_last_error = what;
  return SCONNA_ERR_INVALID_ARGUMENT;
}

}  // namespace

struct sconna_link_params {
  sconna::optics::OpticalLinkParams p;
};
struct sconna_network {
  sconna::workload::NetworkSpec net;
};
struct sconna_accelerator {
  sconna::arch::AcceleratorConfig config;
};

extern "C" {

const char* sconna_status_name(sconna_status status) {
  switch (status) {
    case SCONNA_OK: return "ok";
    case SCONNA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SCONNA_ERR_PARSE: return "parse error";
    case SCONNA_ERR_IO: return "i/o error";
    case SCONNA_ERR_VALIDATION: return "validation error";
    case SCONNA_ERR_NO_SOLUTION: return "no solution";
    case SCONNA_ERR_UNKNOWN_PRESET: return "unknown preset";
    case SCONNA_ERR_INTERNAL: return "internal error";
  }
  return "?";
}

const char* sconna_version(void) { return "1.0.0"; }

const char* sconna_last_error(void) { return g_last_error.c_str(); }

void sconna_string_free(char* s) { ::free(s); }

/* ---- link params ---------------------------------------------------------- */

sconna_status sconna_link_params_create(sconna_link_params** out) {
  if (auto st = require(out != nullptr, "null out-parameter")) return st;
  *out = new sconna_link_params{};
  return SCONNA_OK;
}

sconna_status sconna_link_params_from_json(const char* json_text,
                                           sconna_link_params** out) {
  if (auto st = require(json_text && out, "null argument")) return st;
  return guarded([&] {
    *out = new sconna_link_params{sconna::optics::parse_link_params(json_text)};
    return SCONNA_OK;
  });
}

sconna_status sconna_link_params_from_file(const char* path,
                                           sconna_link_params** out) {
  if (auto st = require(path && out, "null argument")) return st;
  return guarded([&] {
    *out = new sconna_link_params{sconna::optics::load_link_params(path)};
    return SCONNA_OK;
  });
}

sconna_status sconna_link_params_to_json(const sconna_link_params* p,
                                         char** json_out) {
  if (auto st = require(p && json_out, "null argument")) return st;
  return guarded([&] {
    *json_out = dup_string(sconna::optics::link_params_to_json(p->p));
    return SCONNA_OK;
  });
}

void sconna_link_params_free(sconna_link_params* p) { delete p; }

/* ---- solver ----------------------------------------------------------------- */

sconna_status sconna_noise_beta(const sconna_link_params* p, double pd_power_w,
                                double* beta_out) {
  if (auto st = require(p && beta_out, "null argument")) return st;
  return guarded([&] {
    *beta_out = sconna::optics::noise_beta(pd_power_w, p->p);
    return SCONNA_OK;
  });
}

sconna_status sconna_bit_resolution(const sconna_link_params* p,
                                    double pd_power_w, double data_rate_hz,
                                    double* bits_out) {
  if (auto st = require(p && bits_out, "null argument")) return st;
  return guarded([&] {
    *bits_out = sconna::optics::bit_resolution(pd_power_w, data_rate_hz, p->p);
    return SCONNA_OK;
  });
}

namespace {

sconna::optics::SolveConfig make_cfg(unsigned bits, double bitrate,
                                     sconna_dr_rule rule, double target) {
  sconna::optics::SolveConfig cfg;
  cfg.precision_bits = bits;
  cfg.bitrate_hz = bitrate;
  cfg.bit_resolution_target = target;
  cfg.dr_rule = rule == SCONNA_DR_BITRATE_ONLY
                    ? sconna::optics::DataRateRule::bitrate_only
                    : sconna::optics::DataRateRule::bitrate_times_2_pow_b;
  return cfg;
}

}  // namespace

sconna_status sconna_solve_pd_sensitivity(const sconna_link_params* p,
                                          unsigned precision_bits,
                                          double bitrate_hz,
                                          sconna_dr_rule dr_rule,
                                          double b_res_target,
                                          double* pd_dbm_out) {
  if (auto st = require(p && pd_dbm_out, "null argument")) return st;
  if (auto st = require(bitrate_hz > 0, "bitrate must be positive")) return st;
  return guarded([&] {
    *pd_dbm_out = sconna::optics::solve_pd_sensitivity(
        make_cfg(precision_bits, bitrate_hz, dr_rule, b_res_target), p->p);
    return SCONNA_OK;
  });
}

sconna_status sconna_laser_power_required(const sconna_link_params* p,
                                          size_t n, size_t m,
                                          double pd_power_dbm,
                                          int include_wall_plug,
                                          double* dbm_out) {
  if (auto st = require(p && dbm_out, "null argument")) return st;
  return guarded([&] {
    *dbm_out = sconna::optics::laser_power_required(n, m, pd_power_dbm, p->p,
                                                    include_wall_plug != 0)
                   .required_dbm();
    return SCONNA_OK;
  });
}

sconna_status sconna_max_supported_n(const sconna_link_params* p,
                                     double pd_power_dbm, int include_wall_plug,
                                     size_t* n_out) {
  if (auto st = require(p && n_out, "null argument")) return st;
  return guarded([&] {
    sconna::optics::SolveConfig cfg;
    cfg.include_wall_plug = include_wall_plug != 0;
    *n_out = sconna::optics::max_supported_n(cfg, p->p, pd_power_dbm);
    return SCONNA_OK;
  });
}

sconna_status sconna_solve_report(const sconna_link_params* p,
                                  unsigned precision_bits, double bitrate_hz,
                                  double b_res_target, double pin_pd_dbm,
                                  int include_wall_plug, char** json_out) {
  if (auto st = require(p && json_out, "null argument")) return st;
  if (auto st = require(bitrate_hz > 0, "bitrate must be positive")) return st;
  return guarded([&] {
    using namespace sconna::optics;
    nlohmann::json j;
    j["precision_bits"] = precision_bits;
    j["bitrate_hz"] = bitrate_hz;
    j["b_res_target"] = b_res_target;
    j["laser_power_dbm"] = p->p.laser_power_dbm;

    double operating_pd_dbm;
    if (!std::isnan(pin_pd_dbm)) {
      operating_pd_dbm = pin_pd_dbm;
      j["pd_sensitivity_dbm"] = {{"pinned", pin_pd_dbm}};
    } else {
      nlohmann::json solved;
      for (auto rule : {DataRateRule::bitrate_times_2_pow_b,
                        DataRateRule::bitrate_only}) {
        SolveConfig cfg = make_cfg(precision_bits, bitrate_hz,
                                   rule == DataRateRule::bitrate_only
                                       ? SCONNA_DR_BITRATE_ONLY
                                       : SCONNA_DR_BITRATE_TIMES_2_POW_B,
                                   b_res_target);
        const char* key = rule == DataRateRule::bitrate_only
                              ? "dr_equals_br"
                              : "dr_equals_br_times_2_pow_b";
        try {
          solved[key] = solve_pd_sensitivity(cfg, p->p);
        } catch (const NoSolutionError& e) {
          solved[key] = nullptr;
          solved[std::string(key) + "_error"] = e.what();
        }
      }
      j["pd_sensitivity_dbm"] = solved;
      // the budget uses the plain-bitrate root when available, else the other
      if (solved.contains("dr_equals_br") && !solved["dr_equals_br"].is_null())
        operating_pd_dbm = solved["dr_equals_br"].get<double>();
      else if (solved.contains("dr_equals_br_times_2_pow_b") &&
               !solved["dr_equals_br_times_2_pow_b"].is_null())
        operating_pd_dbm = solved["dr_equals_br_times_2_pow_b"].get<double>();
      else
        throw NoSolutionError(-60, 0, 0, 0);
    }
    j["operating_pd_dbm"] = operating_pd_dbm;

    SolveConfig cfg;
    cfg.include_wall_plug = include_wall_plug != 0;
    const std::size_t n_max = max_supported_n(cfg, p->p, operating_pd_dbm);
    j["n_max"] = n_max;

    const std::size_t n_ledger = n_max > 0 ? n_max : 1;
    const LaserBudget budget = laser_power_required(
        n_ledger, n_ledger, operating_pd_dbm, p->p, include_wall_plug != 0);
    j["budget_at_n_max"] = {
        {"n", n_ledger},
        {"pd_power_dbm", budget.pd_power_dbm},
        {"waveguide_db", budget.waveguide_db},
        {"splitter_fanout_db", budget.splitter_fanout_db},
        {"splitter_excess_db", budget.splitter_excess_db},
        {"through_db", budget.through_db},
        {"fixed_db", budget.fixed_db},
        {"wall_plug_db", budget.wall_plug_db},
        {"required_dbm", budget.required_dbm()}};
    j["feasible"] = n_max > 0;
    *json_out = dup_string(j.dump(1));
    return n_max > 0 ? SCONNA_OK : SCONNA_ERR_NO_SOLUTION;
  });
}

sconna_status sconna_solve_sweep(const sconna_link_params* p,
                                 unsigned precision_bits,
                                 const double* bitrates_hz, size_t n_bitrates,
                                 sconna_dr_rule dr_rule, double b_res_target,
                                 double pin_pd_dbm, char** csv_out) {
  if (auto st = require(p && bitrates_hz && csv_out, "null argument")) return st;
  if (auto st = require(n_bitrates > 0, "empty bitrate list")) return st;
  return guarded([&] {
    using namespace sconna::optics;
    std::string csv = "B,BR,DR,P_pd_dbm,N_max,P_laser_required_dbm\n";
    char buf[256];
    for (size_t i = 0; i < n_bitrates; ++i) {
      if (bitrates_hz[i] <= 0)
        throw std::invalid_argument("sweep: bitrate must be positive");
      SolveConfig cfg = make_cfg(precision_bits, bitrates_hz[i], dr_rule,
                                 b_res_target);
      const double pd_dbm = std::isnan(pin_pd_dbm)
                                ? solve_pd_sensitivity(cfg, p->p)
                                : pin_pd_dbm;
      const std::size_t n_max = max_supported_n(cfg, p->p, pd_dbm);
      const std::size_t n_ledger = n_max > 0 ? n_max : 1;
      const double required =
          laser_power_required(n_ledger, n_ledger, pd_dbm, p->p, false)
              .required_dbm();
      std::snprintf(buf, sizeof buf, "%u,%.17g,%.17g,%.17g,%zu,%.17g\n",
                    precision_bits, bitrates_hz[i], cfg.data_rate_hz(), pd_dbm,
                    n_max, required);
      csv += buf;
    }
    *csv_out = dup_string(csv);
    return SCONNA_OK;
  });
}

/* ---- networks ---------------------------------------------------------------- */

sconna_status sconna_network_from_json(const char* json_text,
                                       sconna_network** out) {
  if (auto st = require(json_text && out, "null argument")) return st;
  return guarded([&] {
    *out = new sconna_network{sconna::workload::parse_network(json_text)};
    return SCONNA_OK;
  });
}

sconna_status sconna_network_from_file(const char* path, sconna_network** out) {
  if (auto st = require(path && out, "null argument")) return st;
  return guarded([&] {
    *out = new sconna_network{sconna::workload::load_network(path)};
    return SCONNA_OK;
  });
}

sconna_status sconna_network_name(const sconna_network* net, char** name_out) {
  if (auto st = require(net && name_out, "null argument")) return st;
  *name_out = dup_string(net->net.name);
  return SCONNA_OK;
}

sconna_status sconna_network_layer_count(const sconna_network* net,
                                         size_t* count_out) {
  if (auto st = require(net && count_out, "null argument")) return st;
  *count_out = net->net.layers.size();
  return SCONNA_OK;
}

sconna_status sconna_network_stats(const sconna_network* net,
                                   uint64_t threshold, uint64_t* at_or_below,
                                   uint64_t* above) {
  if (auto st = require(net && at_or_below && above, "null argument")) return st;
  return guarded([&] {
    const auto counts = sconna::workload::tensor_stats(net->net, threshold);
    *at_or_below = counts.at_or_below;
    *above = counts.above;
    return SCONNA_OK;
  });
}

void sconna_network_free(sconna_network* net) { delete net; }

/* ---- accelerators -------------------------------------------------------------- */

sconna_status sconna_accelerator_from_preset(const char* preset_name,
                                             sconna_accelerator** out) {
  if (auto st = require(preset_name && out, "null argument")) return st;
  return guarded([&] {
    *out = new sconna_accelerator{sconna::arch::preset(preset_name)};
    return SCONNA_OK;
  });
}

sconna_status sconna_accelerator_from_json(const char* json_text,
                                           sconna_accelerator** out) {
  if (auto st = require(json_text && out, "null argument")) return st;
  return guarded([&] {
    *out = new sconna_accelerator{sconna::arch::parse_accelerator(json_text)};
    return SCONNA_OK;
  });
}

sconna_status sconna_accelerator_from_file(const char* path,
                                           sconna_accelerator** out) {
  if (auto st = require(path && out, "null argument")) return st;
  return guarded([&] {
    *out = new sconna_accelerator{sconna::arch::load_accelerator(path)};
    return SCONNA_OK;
  });
}

sconna_status sconna_accelerator_to_json(const sconna_accelerator* acc,
                                         char** json_out) {
  if (auto st = require(acc && json_out, "null argument")) return st;
  *json_out = dup_string(sconna::arch::accelerator_to_json(acc->config));
  return SCONNA_OK;
}

sconna_status sconna_preset_names(char** names_out) {
  if (auto st = require(names_out != nullptr, "null argument")) return st;
  std::string all;
  for (const auto& name : sconna::arch::preset_names()) {
    all += name;
    all += '\n';
  }
  *names_out = dup_string(all);
  return SCONNA_OK;
}

sconna_status sconna_accelerator_cost_summary(const sconna_accelerator* acc,
                                              int as_csv, char** out) {
  if (auto st = require(acc && out, "null argument")) return st;
  return guarded([&] {
    const auto built = sconna::arch::build_accelerator(
        acc->config, sconna::arch::PeripheralCosts{});
    const auto summary = sconna::arch::cost_summary(built);
    *out = dup_string(as_csv ? sconna::arch::cost_summary_to_csv(summary)
                             : sconna::arch::cost_summary_to_json(summary));
    return SCONNA_OK;
  });
}

sconna_status sconna_accelerator_area(const sconna_accelerator* acc,
                                      double* area_mm2_out) {
  if (auto st = require(acc && area_mm2_out, "null argument")) return st;
  return guarded([&] {
    const auto built = sconna::arch::build_accelerator(
        acc->config, sconna::arch::PeripheralCosts{});
    *area_mm2_out = sconna::arch::cost_summary(built).total_area_mm2;
    return SCONNA_OK;
  });
}

sconna_status sconna_area_proportionate_scale(const sconna_accelerator* baseline,
                                              double reference_area_mm2,
                                              size_t* count_out) {
  if (auto st = require(baseline && count_out, "null argument")) return st;
  return guarded([&] {
    *count_out = sconna::arch::area_proportionate_scale(
        baseline->config, sconna::arch::PeripheralCosts{}, reference_area_mm2);
    return SCONNA_OK;
  });
}

void sconna_accelerator_free(sconna_accelerator* acc) { delete acc; }

/* ---- functional study ------------------------------------------------------------ */

sconna_status sconna_functional_report(size_t length, unsigned precision_bits,
                                       uint64_t trials, uint64_t seed,
                                       int adc_enabled, char** json_out) {
  if (auto st = require(json_out != nullptr, "null argument")) return st;
  if (auto st = require(trials > 0, "trials must be >= 1")) return st;
  if (auto st = require(length > 0, "length must be >= 1")) return st;
  if (auto st = require(precision_bits >= 1 && precision_bits <= 16,
                        "precision bits must be in [1, 16]"))
    return st;
  return guarded([&] {
    using namespace sconna::stoch;
    const PrecisionConfig prec{precision_bits};
    AdcModel adc;
    adc.full_scale_counts = static_cast<std::uint64_t>(length)
                            << precision_bits;
    const VdpErrorStats stats =
        measure_vdp_error(trials, length, prec, adc, seed);
    nlohmann::json j;
    j["length"] = length;
    j["precision_bits"] = precision_bits;
    j["trials"] = trials;
    j["seed"] = seed;
    j["adc_enabled"] = adc_enabled != 0;
    j["rounding"] = {{"mape", stats.rounding_mape},
                     {"mean_abs_counts", stats.rounding_mean_abs},
                     {"max_abs_counts", stats.rounding_max_abs}};
    if (adc_enabled) {
      j["adc"] = {{"mape", stats.adc_mape},
                  {"mean_abs_counts", stats.adc_mean_abs},
                  {"max_abs_counts", stats.adc_max_abs},
                  {"target_mape", adc.target_mape},
                  {"noise_sigma", adc.noise_sigma}};
      j["adc_uniform_sweep_mape"] = measure_adc_mape(adc, 8192, adc.noise_seed);
    }
    j["zero_reference_trials"] = stats.zero_reference_trials;
    *json_out = dup_string(j.dump(1));
    return SCONNA_OK;
  });
}

sconna_status sconna_lut_export(unsigned precision_bits, const char* path) {
  if (auto st = require(path != nullptr, "null path")) return st;
  if (auto st = require(precision_bits >= 1 && precision_bits <= 12,
                        "precision bits must be in [1, 12] for export"))
    return st;
  return guarded([&] {
    const sconna::stoch::PrecisionConfig prec{precision_bits};
    sconna::stoch::build_lut(prec).export_binary(path);
    return SCONNA_OK;
  });
}

/* ---- simulation -------------------------------------------------------------------- */

namespace {

sconna_status classify_validation(const std::exception& e) {
  g_last_error = e.what();
  return SCONNA_ERR_VALIDATION;
}

}  // namespace

sconna_status sconna_simulate(const sconna_network* net,
                              const sconna_accelerator* acc,
                              int bitexact_validation, uint64_t seed,
                              char** summary_json_out, char** layer_csv_out) {
  if (auto st = require(net && acc, "null argument")) return st;
  try {
    const auto built = sconna::arch::build_accelerator(
        acc->config, sconna::arch::PeripheralCosts{});
    const auto schedule = sconna::engine::map_network(
        net->net, built, built.config.vdpe_size);
    sconna::engine::SimOptions options;
    options.bitexact_validation = bitexact_validation != 0;
    options.seed = seed;
    const auto metrics =
        sconna::engine::simulate(net->net, built, schedule, options);
    if (summary_json_out)
      *summary_json_out = dup_string(sconna::engine::metrics_to_json(
          metrics, net->net.name, acc->config.name));
    if (layer_csv_out)
      *layer_csv_out = dup_string(sconna::engine::per_layer_csv(metrics));
    return SCONNA_OK;
  } catch (const std::invalid_argument& e) {
    return classify_validation(e);
  } catch (const std::exception& e) {
    return classify(e);
  }
}

sconna_status sconna_compare(const sconna_network* const* networks,
                             size_t n_networks,
                             const sconna_accelerator* const* accelerators,
                             size_t n_accelerators, uint64_t seed,
                             char** json_out, char** ratio_csv_out,
                             char** long_csv_out) {
  if (auto st = require(networks && accelerators, "null argument")) return st;
  if (auto st = require(n_networks >= 1, "need at least one network")) return st;
  if (auto st = require(n_accelerators >= 2, "need at least two accelerators"))
    return st;
  try {
    std::vector<sconna::workload::NetworkSpec> nets;
    nets.reserve(n_networks);
    for (size_t i = 0; i < n_networks; ++i) {
      if (!networks[i]) return require(false, "null network handle");
      nets.push_back(networks[i]->net);
    }
    std::vector<sconna::arch::Accelerator> accs;
    accs.reserve(n_accelerators);
    for (size_t i = 0; i < n_accelerators; ++i) {
      if (!accelerators[i]) return require(false, "null accelerator handle");
      accs.push_back(sconna::arch::build_accelerator(
          accelerators[i]->config, sconna::arch::PeripheralCosts{}));
    }
    sconna::engine::SimOptions options;
    options.seed = seed;
    const auto comparison = sconna::engine::compare(nets, accs, options);
    if (json_out)
      *json_out = dup_string(sconna::engine::comparison_to_json(comparison));
    if (ratio_csv_out)
      *ratio_csv_out =
          dup_string(sconna::engine::comparison_ratio_csv(comparison));
    if (long_csv_out)
      *long_csv_out =
          dup_string(sconna::engine::comparison_long_csv(comparison));
    return SCONNA_OK;
  } catch (const std::invalid_argument& e) {
    return classify_validation(e);
  } catch (const std::exception& e) {
    return classify(e);
  }
}

}  // extern "C"
