/* sconna — stochastic-computing optical CNN accelerator simulator.
 *
 * C interface of the shared library. All functions return a status code;
 * results come back through out-parameters. Objects are opaque handles
 * released with their matching _free function. String results are allocated
 * by the library and released with sconna_string_free. Handles are not
 * thread-safe; distinct handles may be used from distinct threads.
 */

#ifndef SCONNA_H
#define SCONNA_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sconna_status {
  SCONNA_OK = 0,
  SCONNA_ERR_INVALID_ARGUMENT = 1,
  SCONNA_ERR_PARSE = 2,
  SCONNA_ERR_IO = 3,
  SCONNA_ERR_VALIDATION = 4,
  SCONNA_ERR_NO_SOLUTION = 5,
  SCONNA_ERR_UNKNOWN_PRESET = 6,
  SCONNA_ERR_INTERNAL = 7
} sconna_status;

const char* sconna_status_name(sconna_status status);
const char* sconna_version(void);

/* Human-readable detail of the most recent failure on this thread. */
const char* sconna_last_error(void);

void sconna_string_free(char* s);

/* ---- optical link parameters ------------------------------------------- */

typedef struct sconna_link_params sconna_link_params;

sconna_status sconna_link_params_create(sconna_link_params** out);
sconna_status sconna_link_params_from_json(const char* json_text,
                                           sconna_link_params** out);
sconna_status sconna_link_params_from_file(const char* path,
                                           sconna_link_params** out);
sconna_status sconna_link_params_to_json(const sconna_link_params* p,
                                         char** json_out);
void sconna_link_params_free(sconna_link_params* p);

/* ---- scalability solver -------------------------------------------------- */

/* data-rate interpretations for the receiver bandwidth */
typedef enum sconna_dr_rule {
  SCONNA_DR_BITRATE_TIMES_2_POW_B = 0,
  SCONNA_DR_BITRATE_ONLY = 1
} sconna_dr_rule;

sconna_status sconna_noise_beta(const sconna_link_params* p, double pd_power_w,
                                double* beta_out);
sconna_status sconna_bit_resolution(const sconna_link_params* p,
                                    double pd_power_w, double data_rate_hz,
                                    double* bits_out);
sconna_status sconna_solve_pd_sensitivity(const sconna_link_params* p,
                                          unsigned precision_bits,
                                          double bitrate_hz,
                                          sconna_dr_rule dr_rule,
                                          double b_res_target,
                                          double* pd_dbm_out);
sconna_status sconna_laser_power_required(const sconna_link_params* p,
                                          size_t n, size_t m,
                                          double pd_power_dbm,
                                          int include_wall_plug,
                                          double* dbm_out);
sconna_status sconna_max_supported_n(const sconna_link_params* p,
                                     double pd_power_dbm, int include_wall_plug,
                                     size_t* n_out);

/* Full report: solves (or pins) the photodetector sensitivity under both
 * data-rate interpretations, evaluates the dB ledger and the maximum N.
 * pin_pd_dbm – when non-NaN, skip the solve and use the given operating
 * point. JSON out; see the README for the schema. */
sconna_status sconna_solve_report(const sconna_link_params* p,
                                  unsigned precision_bits, double bitrate_hz,
                                  double b_res_target, double pin_pd_dbm,
                                  int include_wall_plug, char** json_out);

/* CSV sweep over bitrates: columns B,BR,DR,P_pd_dbm,N_max,P_laser_required_dbm.
 * bitrates_hz is an array of n_bitrates values. */
sconna_status sconna_solve_sweep(const sconna_link_params* p,
                                 unsigned precision_bits,
                                 const double* bitrates_hz, size_t n_bitrates,
                                 sconna_dr_rule dr_rule, double b_res_target,
                                 double pin_pd_dbm, char** csv_out);

/* ---- networks ------------------------------------------------------------- */

typedef struct sconna_network sconna_network;

sconna_status sconna_network_from_json(const char* json_text,
                                       sconna_network** out);
sconna_status sconna_network_from_file(const char* path, sconna_network** out);
sconna_status sconna_network_name(const sconna_network* net, char** name_out);
sconna_status sconna_network_layer_count(const sconna_network* net,
                                         size_t* count_out);
/* Kernel census against a flattened-size threshold. */
sconna_status sconna_network_stats(const sconna_network* net,
                                   uint64_t threshold, uint64_t* at_or_below,
                                   uint64_t* above);
void sconna_network_free(sconna_network* net);

/* ---- accelerator instances ------------------------------------------------ */

typedef struct sconna_accelerator sconna_accelerator;

sconna_status sconna_accelerator_from_preset(const char* preset_name,
                                             sconna_accelerator** out);
sconna_status sconna_accelerator_from_json(const char* json_text,
                                           sconna_accelerator** out);
sconna_status sconna_accelerator_from_file(const char* path,
                                           sconna_accelerator** out);
sconna_status sconna_accelerator_to_json(const sconna_accelerator* acc,
                                         char** json_out);
/* newline-separated preset names */
sconna_status sconna_preset_names(char** names_out);
sconna_status sconna_accelerator_cost_summary(const sconna_accelerator* acc,
                                              int as_csv, char** out);
sconna_status sconna_accelerator_area(const sconna_accelerator* acc,
                                      double* area_mm2_out);
/* Largest VDPE count of the baseline whose footprint fits reference_area. */
sconna_status sconna_area_proportionate_scale(const sconna_accelerator* baseline,
                                              double reference_area_mm2,
                                              size_t* count_out);
void sconna_accelerator_free(sconna_accelerator* acc);

/* ---- functional error study ---------------------------------------------- */

/* Random-trial stochastic VDP error statistics (JSON report). adc_enabled
 * selects whether the converter noise column is evaluated. */
sconna_status sconna_functional_report(size_t length, unsigned precision_bits,
                                       uint64_t trials, uint64_t seed,
                                       int adc_enabled, char** json_out);

/* Export the operand-pair lookup table as a binary sidecar file. */
sconna_status sconna_lut_export(unsigned precision_bits, const char* path);

/* ---- simulation ------------------------------------------------------------ */

/* Runs one network on one instance. Either output may be NULL when not
 * wanted. summary_json_out gets the metrics summary, layer_csv_out the
 * per-layer table. */
sconna_status sconna_simulate(const sconna_network* net,
                              const sconna_accelerator* acc,
                              int bitexact_validation, uint64_t seed,
                              char** summary_json_out, char** layer_csv_out);

/* Cross-product comparison; accelerators[0] is the reference. Outputs:
 * comparison JSON, the ratio CSV and the plot-ready long CSV (any may be
 * NULL). */
sconna_status sconna_compare(const sconna_network* const* networks,
                             size_t n_networks,
                             const sconna_accelerator* const* accelerators,
                             size_t n_accelerators, uint64_t seed,
                             char** json_out, char** ratio_csv_out,
                             char** long_csv_out);

#ifdef __cplusplus
}
#endif

#endif /* SCONNA_H */
