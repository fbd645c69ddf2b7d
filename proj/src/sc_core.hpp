#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

// Functional model of the stochastic-computing datapath: unipolar bitstream
// encoding, deterministic uncorrelated pair generation, LUT-backed operand
// storage, optical-AND multiplication, photo-charge accumulation and ADC
// conversion with a calibrated multiplicative error model.

namespace sconna::stoch {

struct PrecisionConfig {
  unsigned bits = 8;  // B; stream length is 2^B

  std::size_t stream_length() const { return std::size_t{1} << bits; }
  std::uint32_t max_level() const { return 1u << bits; }  // saturation code
};

// Fixed-length unipolar stochastic bitstream. The encoded value is
// popcount / length, in [0, 1].
class Bitstream {
 public:
  Bitstream() = default;
  explicit Bitstream(std::size_t length)
      : length_(length), words_((length + 63) / 64, 0) {}

  std::size_t length() const { return length_; }

  bool bit(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set_bit(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }

  std::size_t popcount() const;
  double value() const {
    return length_ == 0 ? 0.0 : static_cast<double>(popcount()) / length_;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

  bool operator==(const Bitstream&) const = default;

  friend Bitstream osm_multiply(const Bitstream&, const Bitstream&);

 private:
  std::size_t length_ = 0;
  std::vector<std::uint64_t> words_;
};

// Bitwise AND; the optical gate's drop-port transfer. Throws
// std::invalid_argument on length mismatch.
Bitstream osm_multiply(const Bitstream& input, const Bitstream& weight);

// round-to-nearest of a*b/denom with ties to even. denom must be a power of two.
std::uint64_t round_half_even_product(std::uint64_t a, std::uint64_t b,
                                      std::uint64_t denom);

// Stream with `level` ones, length 2^B, ones low-discrepancy spaced.
// Valid levels are 0..2^B inclusive; out of range throws std::invalid_argument.
Bitstream encode_unipolar(std::uint32_t level, const PrecisionConfig& precision);

// Deterministic pair (I, W) with popcounts (input_level, weight_level) whose
// AND popcount equals round_half_even_product(input_level, weight_level, 2^B).
std::pair<Bitstream, Bitstream> generate_uncorrelated_pair(
    std::uint32_t input_level, std::uint32_t weight_level,
    const PrecisionConfig& precision);

// Precomputed operand-pair table. The functional model keys entries by the
// full (input, weight) pair; the XOR-hash sizing of the hardware table is
// retained in the reported_* fields for the cost model only.
struct BitstreamLut {
  PrecisionConfig precision;
  std::vector<std::pair<Bitstream, Bitstream>> entries;  // [i * 2^B + w]
  std::size_t reported_hw_entry_count = 0;    // 2^B
  std::size_t reported_entry_width_bits = 0;  // 2 * 2^B

  const std::pair<Bitstream, Bitstream>& lookup(std::uint32_t input_level,
                                                std::uint32_t weight_level) const;

  // Binary sidecar: magic "OSML", u32 B, u64 entry count, then per entry the
  // two streams bit-packed little-endian, ceil(2^B/8) bytes each.
  void export_binary(const std::string& path) const;
};

BitstreamLut build_lut(const PrecisionConfig& precision);

// --- photo-charge accumulation -------------------------------------------

struct PcaResult {
  std::uint64_t ones = 0;
  bool overflow = false;
};

std::uint64_t pca_accumulate(std::span<const Bitstream> streams);
PcaResult pca_accumulate(std::span<const Bitstream> streams,
                         std::uint64_t capacity);

// --- ADC -------------------------------------------------------------------

// Multiplicative-noise scale that lands the uniform-sweep MAPE on the 1.3%
// target: for zero-mean gaussian eps, E|eps| = sigma * sqrt(2/pi).
inline constexpr double kAdcNoiseSigma = 0.0162930837851015;  // 0.013*sqrt(pi/2)

struct AdcModel {
  unsigned resolution_bits = 16;
  std::uint64_t full_scale_counts = 176ull * 256;  // N * 2^B design point
  double target_mape = 0.013;
  double noise_sigma = kAdcNoiseSigma;
  std::uint64_t noise_seed = 0x53434f4e;
};

struct AdcDiagnostics {
  std::uint64_t conversions = 0;
  std::uint64_t saturations = 0;
};

// Deterministic gaussian source (Box-Muller over mt19937_64); kept explicit
// so callers control sequencing and parallel evaluations stay independent.
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed) : rng_(seed) {}
  double gaussian();

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Mid-tread quantization of charge to the ADC code space; with noise the
// charge is scaled by (1 + sigma * g) first. Charge beyond full scale
// saturates and bumps the diagnostics counter.
std::uint32_t adc_convert(std::uint64_t charge, const AdcModel& adc,
                          bool noise_enabled, NoiseSource& noise,
                          AdcDiagnostics* diag = nullptr);
std::uint32_t adc_convert(std::uint64_t charge, const AdcModel& adc,
                          AdcDiagnostics* diag = nullptr);  // noise off

// Code back to integer charge counts (the fixed-point frame of the PCA).
std::uint64_t adc_reconstruct_counts(std::uint32_t code, const AdcModel& adc);

// Empirical MAPE of the noisy conversion over a uniform charge sweep.
double measure_adc_mape(const AdcModel& adc, std::uint64_t sweep_points,
                        std::uint64_t seed);

// --- signed vector dot product ------------------------------------------

enum class Sign : std::int8_t { positive = 1, negative = -1 };

struct SignedOperand {
  std::uint32_t magnitude = 0;  // 0 .. 2^B - 1
  Sign sign = Sign::positive;
};

struct VdpeResult {
  double value = 0.0;  // signed, in charge-count units (integer dot / 2^B)
  std::uint64_t positive_counts = 0;
  std::uint64_t negative_counts = 0;
  bool pca_overflow = false;
};

// One VDPE evaluation: per-element pair generation, optical AND, sign-routed
// accumulation onto the positive/negative PCA, then conversion. With
// adc == nullptr the counts pass through exactly (ideal conversion); the
// noise source is only consulted when adc != nullptr and noise_enabled.
VdpeResult vdpe_dot(std::span<const std::uint32_t> inputs,
                    std::span<const SignedOperand> weights,
                    const PrecisionConfig& precision, std::size_t vdpe_size,
                    const AdcModel* adc = nullptr, bool noise_enabled = false,
                    NoiseSource* noise = nullptr,
                    AdcDiagnostics* diag = nullptr);

// Exact reference in the same fixed-point frame.
double exact_dot_counts(std::span<const std::uint32_t> inputs,
                        std::span<const SignedOperand> weights,
                        const PrecisionConfig& precision);

// --- error study ----------------------------------------------------------

struct VdpErrorStats {
  std::uint64_t trials = 0;
  std::uint64_t zero_reference_trials = 0;  // excluded from MAPE
  double rounding_mape = 0.0;               // noise off
  double rounding_mean_abs = 0.0;
  double rounding_max_abs = 0.0;
  double adc_mape = 0.0;                    // noise on
  double adc_mean_abs = 0.0;
  double adc_max_abs = 0.0;
};

// Random-trial error statistics of the stochastic VDP against the exact dot
// product. Trials draw non-negative weights so the percentage error stays
// anchored to the converter's multiplicative error rather than to
// cancellation between the PCA pair.
VdpErrorStats measure_vdp_error(std::uint64_t trials, std::size_t length,
                                const PrecisionConfig& precision,
                                const AdcModel& adc, std::uint64_t seed);

}  // namespace sconna::stoch
