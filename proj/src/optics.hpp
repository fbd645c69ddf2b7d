#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

// Receiver-noise model, achievable bit resolution, per-laser power budget
// and the maximum-VDPE-size search for the optical link.

namespace sconna::optics {

struct OpticalLinkParams {
  double laser_power_dbm = 10.0;        // per diode
  double responsivity_a_per_w = 1.2;    // R
  double load_resistance_ohm = 50.0;    // R_L
  double dark_current_a = 35e-9;        // I_d
  double temperature_k = 300.0;         // T
  double rin_db_per_hz = -140.0;        // RIN
  double wall_plug_efficiency = 0.1;    // eta_WPE
  double il_smf_db = 0.0;
  double il_ec_db = 1.6;
  double il_wg_db_per_mm = 0.3;
  double el_splitter_db = 0.01;
  double il_osm_db = 4.0;
  double obl_osm_db = 0.01;
  double il_mrr_db = 0.01;
  // The published loss table prices the filter ring's insertion loss but not
  // its out-of-band through loss; the OSM figure is reused for it.
  double obl_mrr_db = 0.01;
  double il_penalty_db = 7.3;
  double osm_pitch_mm = 0.02;  // d_OSM
  double electron_charge_c = 1.602176634e-19;  // q
  double boltzmann_j_per_k = 1.380649e-23;     // k

  void validate() const;  // throws std::invalid_argument
};

OpticalLinkParams parse_link_params(const std::string& json_text);
OpticalLinkParams load_link_params(const std::string& path);
std::string link_params_to_json(const OpticalLinkParams& p);

enum class DataRateRule {
  bitrate_times_2_pow_b,  // DR = BR * 2^B
  bitrate_only,           // DR = BR
};

struct SolveConfig {
  unsigned precision_bits = 8;  // B
  double bitrate_hz = 30e9;     // BR
  double bit_resolution_target = 1.0;  // B_Res for digital bit-streams
  DataRateRule dr_rule = DataRateRule::bitrate_times_2_pow_b;
  bool m_equals_n = true;
  bool include_wall_plug = false;

  double data_rate_hz() const {
    return dr_rule == DataRateRule::bitrate_only
               ? bitrate_hz
               : bitrate_hz * static_cast<double>(std::size_t{1} << precision_bits);
  }
};

// dB <-> linear helpers (power ratios).
double db_to_linear(double db);
double linear_to_db(double ratio);
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

// Receiver noise density sqrt(2q(RP + I_d) + 4kT/R_L + R^2 P^2 RIN), A/sqrt(Hz).
// Requires pd_power_w > 0.
double noise_beta(double pd_power_w, const OpticalLinkParams& p);

// Achievable bit resolution of the receiver at photodetector power P and
// data rate DR; returns -infinity when the SNR argument is non-positive.
double bit_resolution(double pd_power_w, double data_rate_hz,
                      const OpticalLinkParams& p);

struct NoSolutionError : std::runtime_error {
  double lo_dbm, hi_dbm, f_lo, f_hi;
  NoSolutionError(double lo, double hi, double flo, double fhi)
      : std::runtime_error(
            "no photodetector-sensitivity root in bracket [" +
            std::to_string(lo) + ", " + std::to_string(hi) + "] dBm (residuals " +
            std::to_string(flo) + ", " + std::to_string(fhi) + ")"),
        lo_dbm(lo), hi_dbm(hi), f_lo(flo), f_hi(fhi) {}
};

// Bracketed bisection on the dBm scale for bit_resolution(P) = target,
// converged to 1e-6 bits.
double solve_pd_sensitivity(const SolveConfig& cfg, const OpticalLinkParams& p,
                            double lo_dbm = -60.0, double hi_dbm = 0.0);

// Itemized per-laser power budget in the dB domain.
struct LaserBudget {
  double pd_power_dbm = 0.0;
  double waveguide_db = 0.0;        // il_wg * N * d_osm
  double splitter_fanout_db = 0.0;  // 10 log10 M
  double splitter_excess_db = 0.0;  // el_splitter * log2 M
  double through_db = 0.0;          // (obl_osm + obl_mrr) * (N - 1)
  double fixed_db = 0.0;            // ec + smf + osm + mrr + penalty
  double wall_plug_db = 0.0;        // -10 log10 eta, electrical view only

  double required_dbm() const {
    return pd_power_dbm + waveguide_db + splitter_fanout_db +
           splitter_excess_db + through_db + fixed_db + wall_plug_db;
  }
};

LaserBudget laser_power_required(std::size_t n, std::size_t m,
                                 double pd_power_dbm,
                                 const OpticalLinkParams& p,
                                 bool include_wall_plug = false);

// Largest N (M = N when cfg.m_equals_n) whose budget fits the laser power;
// 0 when even N = 1 does not fit.
std::size_t max_supported_n(const SolveConfig& cfg, const OpticalLinkParams& p,
                            double pd_power_dbm);

}  // namespace sconna::optics
