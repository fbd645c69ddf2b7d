#include "optics.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace sconna::optics {

void OpticalLinkParams::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("link params: " + what);
  };
  if (responsivity_a_per_w <= 0) fail("responsivity must be positive");
  if (load_resistance_ohm <= 0) fail("load resistance must be positive");
  if (dark_current_a < 0) fail("dark current must be non-negative");
  if (temperature_k <= 0) fail("temperature must be positive");
  if (wall_plug_efficiency <= 0 || wall_plug_efficiency > 1)
    fail("wall-plug efficiency must be in (0, 1]");
  for (double loss : {il_smf_db, il_ec_db, il_wg_db_per_mm, el_splitter_db,
                      il_osm_db, obl_osm_db, il_mrr_db, obl_mrr_db,
                      il_penalty_db})
    if (loss < 0) fail("loss terms must be non-negative");
  if (osm_pitch_mm <= 0) fail("OSM pitch must be positive");
}

namespace {

struct FieldMap {
  const char* key;
  double OpticalLinkParams::*member;
};

// JSON field names mirror the published parameter table.
constexpr FieldMap kFields[] = {
    {"P_Laser_dBm", &OpticalLinkParams::laser_power_dbm},
    {"R_PD_A_per_W", &OpticalLinkParams::responsivity_a_per_w},
    {"R_L_Ohm", &OpticalLinkParams::load_resistance_ohm},
    {"I_d_A", &OpticalLinkParams::dark_current_a},
    {"T_K", &OpticalLinkParams::temperature_k},
    {"RIN_dB_per_Hz", &OpticalLinkParams::rin_db_per_hz},
    {"eta_WPE", &OpticalLinkParams::wall_plug_efficiency},
    {"IL_SMF_dB", &OpticalLinkParams::il_smf_db},
    {"IL_EC_dB", &OpticalLinkParams::il_ec_db},
    {"IL_WG_dB_per_mm", &OpticalLinkParams::il_wg_db_per_mm},
    {"EL_splitter_dB", &OpticalLinkParams::el_splitter_db},
    {"IL_OSM_dB", &OpticalLinkParams::il_osm_db},
    {"OBL_OSM_dB", &OpticalLinkParams::obl_osm_db},
    {"IL_MRR_dB", &OpticalLinkParams::il_mrr_db},
    {"OBL_MRR_dB", &OpticalLinkParams::obl_mrr_db},
    {"IL_penalty_dB", &OpticalLinkParams::il_penalty_db},
    {"d_OSM_mm", &OpticalLinkParams::osm_pitch_mm},
    {"q_C", &OpticalLinkParams::electron_charge_c},
    {"k_J_per_K", &OpticalLinkParams::boltzmann_j_per_k},
};

}  // namespace

OpticalLinkParams parse_link_params(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("link params: JSON parse error: ") +
                                e.what());
  }
  OpticalLinkParams p;
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto& f : kFields) {
      if (key == f.key) {
        p.*(f.member) = value.get<double>();
        known = true;
        break;
      }
    }
    if (!known)
      throw std::invalid_argument("link params: unknown field \"" + key + "\"");
  }
  p.validate();
  return p;
}

OpticalLinkParams load_link_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open parameter file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_link_params(buf.str());
}

std::string link_params_to_json(const OpticalLinkParams& p) {
  nlohmann::json j;
  for (const auto& f : kFields) j[f.key] = p.*(f.member);
  return j.dump(1);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }
double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts * 1e3); }

double noise_beta(double pd_power_w, const OpticalLinkParams& p) {
  if (pd_power_w <= 0)
    throw std::invalid_argument("noise_beta: photodetector power must be positive");
  const double photo_current = p.responsivity_a_per_w * pd_power_w;
  const double shot = 2.0 * p.electron_charge_c * (photo_current + p.dark_current_a);
  const double thermal =
      4.0 * p.boltzmann_j_per_k * p.temperature_k / p.load_resistance_ohm;
  const double rin_linear = db_to_linear(p.rin_db_per_hz);
  const double rin = photo_current * photo_current * rin_linear;
  return std::sqrt(shot + thermal + rin);
}

double bit_resolution(double pd_power_w, double data_rate_hz,
                      const OpticalLinkParams& p) {
  if (data_rate_hz <= 0)
    throw std::invalid_argument("bit_resolution: data rate must be positive");
  const double beta = noise_beta(pd_power_w, p);
  const double noise_bandwidth = data_rate_hz / std::sqrt(2.0);
  const double snr_arg = p.responsivity_a_per_w * pd_power_w /
                         (beta * std::sqrt(noise_bandwidth));
  if (snr_arg <= 0) return -std::numeric_limits<double>::infinity();
  return (20.0 * std::log10(snr_arg) - 1.76) / 6.02;
}

double solve_pd_sensitivity(const SolveConfig& cfg, const OpticalLinkParams& p,
                            double lo_dbm, double hi_dbm) {
  const double dr = cfg.data_rate_hz();
  auto residual = [&](double dbm) {
    return bit_resolution(dbm_to_watts(dbm), dr, p) - cfg.bit_resolution_target;
  };
  double f_lo = residual(lo_dbm);
  double f_hi = residual(hi_dbm);
  if (f_lo == 0.0) return lo_dbm;
  if (f_hi == 0.0) return hi_dbm;
  if ((f_lo > 0) == (f_hi > 0))
    throw NoSolutionError(lo_dbm, hi_dbm, f_lo, f_hi);

  double lo = lo_dbm, hi = hi_dbm;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = residual(mid);
    if (std::abs(f_mid) < 1e-6) return mid;
    if ((f_mid > 0) == (f_hi > 0)) {
      hi = mid;
      f_hi = f_mid;
    } else {
      lo = mid;
      f_lo = f_mid;
    }
  }
  return 0.5 * (lo + hi);
}

LaserBudget laser_power_required(std::size_t n, std::size_t m,
                                 double pd_power_dbm,
                                 const OpticalLinkParams& p,
                                 bool include_wall_plug) {
  if (n < 1 || m < 1)
    throw std::invalid_argument("laser_power_required: N and M must be >= 1");
  LaserBudget b;
  b.pd_power_dbm = pd_power_dbm;
  b.waveguide_db = p.il_wg_db_per_mm * static_cast<double>(n) * p.osm_pitch_mm;
  b.splitter_fanout_db = 10.0 * std::log10(static_cast<double>(m));
  b.splitter_excess_db = p.el_splitter_db * std::log2(static_cast<double>(m));
  b.through_db = (p.obl_osm_db + p.obl_mrr_db) * static_cast<double>(n - 1);
  b.fixed_db = p.il_ec_db + p.il_smf_db + p.il_osm_db + p.il_mrr_db + p.il_penalty_db;
  if (include_wall_plug) b.wall_plug_db = -10.0 * std::log10(p.wall_plug_efficiency);
  return b;
}

std::size_t max_supported_n(const SolveConfig& cfg, const OpticalLinkParams& p,
                            double pd_power_dbm) {
  auto fits = [&](std::size_t n) {
    const std::size_t m = cfg.m_equals_n ? n : 1;
    return laser_power_required(n, m, pd_power_dbm, p, cfg.include_wall_plug)
               .required_dbm() <= p.laser_power_dbm;
  };
  if (!fits(1)) return 0;
  // budget is strictly increasing in N, so grow then bisect
  std::size_t lo = 1, hi = 2;
  while (fits(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > (std::size_t{1} << 24)) return lo;  // unbounded in practice
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (fits(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace sconna::optics
