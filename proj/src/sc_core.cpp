#include "sc_core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sconna::stoch {

std::size_t Bitstream::popcount() const {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

Bitstream osm_multiply(const Bitstream& input, const Bitstream& weight) {
  if (input.length() != weight.length())
    throw std::invalid_argument("osm_multiply: stream length mismatch (" +
                                std::to_string(input.length()) + " vs " +
                                std::to_string(weight.length()) + ")");
  Bitstream out(input.length());
  for (std::size_t i = 0; i < out.words_.size(); ++i)
    out.words_[i] = input.words_[i] & weight.words_[i];
  return out;
}

std::uint64_t round_half_even_product(std::uint64_t a, std::uint64_t b,
                                      std::uint64_t denom) {
  const std::uint64_t prod = a * b;
  const std::uint64_t q = prod / denom;
  const std::uint64_t r = prod % denom;
  const std::uint64_t half = denom / 2;
  if (r > half) return q + 1;
  if (r == half) return q + (q & 1);  // ties to even
  return q;
}

Bitstream encode_unipolar(std::uint32_t level, const PrecisionConfig& precision) {
  const std::size_t len = precision.stream_length();
  if (level > precision.max_level())
    throw std::invalid_argument("encode_unipolar: level " + std::to_string(level) +
                                " out of range for B=" + std::to_string(precision.bits));
  Bitstream s(len);
  // Bresenham spacing: position p carries a one iff the accumulated rate
  // floor((p+1)*level/len) advances.
  std::size_t acc = 0;
  for (std::size_t p = 0; p < len; ++p) {
    const std::size_t next = ((p + 1) * static_cast<std::size_t>(level)) / len;
    if (next > acc) {
      s.set_bit(p);
      acc = next;
    }
  }
  return s;
}

namespace {

// Evenly spaced selection of `take` distinct elements from `from`.
void pick_evenly(const std::vector<std::uint32_t>& from, std::size_t take,
                 std::vector<std::uint32_t>& out) {
  const std::size_t n = from.size();
  for (std::size_t i = 0; i < take; ++i) out.push_back(from[(i * n) / take]);
}

}  // namespace

std::pair<Bitstream, Bitstream> generate_uncorrelated_pair(
    std::uint32_t input_level, std::uint32_t weight_level,
    const PrecisionConfig& precision) {
  const std::size_t len = precision.stream_length();
  if (input_level > precision.max_level() || weight_level > precision.max_level())
    throw std::invalid_argument("generate_uncorrelated_pair: operand out of range");

  Bitstream input = encode_unipolar(input_level, precision);

  // Exact overlap target. It always fits the Frechet bounds
  // max(0, a+b-len) <= t <= min(a, b) because a*b/len lies inside them.
  const std::uint64_t t =
      round_half_even_product(input_level, weight_level, len);

  std::vector<std::uint32_t> ones, zeros;
  ones.reserve(input_level);
  zeros.reserve(len - input_level);
  for (std::size_t p = 0; p < len; ++p)
    (input.bit(p) ? ones : zeros).push_back(static_cast<std::uint32_t>(p));

  std::vector<std::uint32_t> weight_positions;
  weight_positions.reserve(weight_level);
  pick_evenly(ones, static_cast<std::size_t>(t), weight_positions);
  pick_evenly(zeros, weight_level - static_cast<std::size_t>(t), weight_positions);

  Bitstream weight(len);
  for (std::uint32_t p : weight_positions) weight.set_bit(p);
  return {std::move(input), std::move(weight)};
}

BitstreamLut build_lut(const PrecisionConfig& precision) {
  BitstreamLut lut;
  lut.precision = precision;
  const std::uint32_t levels = 1u << precision.bits;  // stored operands are B-bit
  lut.entries.reserve(static_cast<std::size_t>(levels) * levels);
  for (std::uint32_t i = 0; i < levels; ++i)
    for (std::uint32_t w = 0; w < levels; ++w)
      lut.entries.push_back(generate_uncorrelated_pair(i, w, precision));
  lut.reported_hw_entry_count = levels;
  lut.reported_entry_width_bits = 2 * precision.stream_length();
  return lut;
}

const std::pair<Bitstream, Bitstream>& BitstreamLut::lookup(
    std::uint32_t input_level, std::uint32_t weight_level) const {
  const std::uint32_t levels = 1u << precision.bits;
  if (input_level >= levels || weight_level >= levels)
    throw std::invalid_argument("BitstreamLut::lookup: operand out of range");
  return entries[static_cast<std::size_t>(input_level) * levels + weight_level];
}

void BitstreamLut::export_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const char magic[4] = {'O', 'S', 'M', 'L'};
  out.write(magic, 4);
  const std::uint32_t b = precision.bits;
  out.write(reinterpret_cast<const char*>(&b), 4);
  const std::uint64_t count = entries.size();
  out.write(reinterpret_cast<const char*>(&count), 8);
  const std::size_t row_bytes = (precision.stream_length() + 7) / 8;
  std::vector<char> row(row_bytes);
  auto write_stream = [&](const Bitstream& s) {
    std::fill(row.begin(), row.end(), 0);
    for (std::size_t i = 0; i < s.length(); ++i)
      if (s.bit(i)) row[i >> 3] |= static_cast<char>(1 << (i & 7));
    out.write(row.data(), static_cast<std::streamsize>(row_bytes));
  };
  for (const auto& [iv, wv] : entries) {
    write_stream(iv);
    write_stream(wv);
  }
  if (!out) throw std::runtime_error("short write to " + path);
}

std::uint64_t pca_accumulate(std::span<const Bitstream> streams) {
  std::uint64_t total = 0;
  for (const auto& s : streams) total += s.popcount();
  return total;
}

PcaResult pca_accumulate(std::span<const Bitstream> streams,
                         std::uint64_t capacity) {
  PcaResult r;
  r.ones = pca_accumulate(streams);
  r.overflow = r.ones > capacity;
  return r;
}

double NoiseSource::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller on explicit uniforms; mt19937_64 output is fully specified,
  // so sequences reproduce across standard libraries.
  double u1, u2;
  do {
    u1 = (rng_() >> 11) * 0x1.0p-53;
  } while (u1 <= 0.0);
  u2 = (rng_() >> 11) * 0x1.0p-53;
  const double mag = std::sqrt(-2.0 * std::log(u1));
  spare_ = mag * std::sin(2.0 * M_PI * u2);
  have_spare_ = true;
  return mag * std::cos(2.0 * M_PI * u2);
}

namespace {

std::uint32_t quantize(double effective, const AdcModel& adc) {
  const double max_code =
      static_cast<double>((std::uint64_t{1} << adc.resolution_bits) - 1);
  return static_cast<std::uint32_t>(std::floor(
      effective * max_code / static_cast<double>(adc.full_scale_counts) + 0.5));
}

double saturate(std::uint64_t charge, const AdcModel& adc,
                AdcDiagnostics* diag) {
  if (diag) ++diag->conversions;
  if (charge > adc.full_scale_counts) {
    if (diag) ++diag->saturations;
    return static_cast<double>(adc.full_scale_counts);
  }
  return static_cast<double>(charge);
}

}  // namespace

std::uint32_t adc_convert(std::uint64_t charge, const AdcModel& adc,
                          bool noise_enabled, NoiseSource& noise,
                          AdcDiagnostics* diag) {
  double effective = saturate(charge, adc, diag);
  if (noise_enabled) {
    effective *= 1.0 + adc.noise_sigma * noise.gaussian();
    effective = std::clamp(effective, 0.0,
                           static_cast<double>(adc.full_scale_counts));
  }
  return quantize(effective, adc);
}

std::uint32_t adc_convert(std::uint64_t charge, const AdcModel& adc,
                          AdcDiagnostics* diag) {
  return quantize(saturate(charge, adc, diag), adc);
}

std::uint64_t adc_reconstruct_counts(std::uint32_t code, const AdcModel& adc) {
  const double max_code = static_cast<double>((std::uint64_t{1} << adc.resolution_bits) - 1);
  return static_cast<std::uint64_t>(std::floor(
      code * static_cast<double>(adc.full_scale_counts) / max_code + 0.5));
}

double measure_adc_mape(const AdcModel& adc, std::uint64_t sweep_points,
                        std::uint64_t seed) {
  NoiseSource noise(seed);
  double sum = 0.0;
  std::uint64_t n = 0;
  for (std::uint64_t k = 1; k <= sweep_points; ++k) {
    const std::uint64_t charge = k * adc.full_scale_counts / sweep_points;
    if (charge == 0) continue;
    const std::uint32_t code = adc_convert(charge, adc, true, noise);
    const double recon = static_cast<double>(adc_reconstruct_counts(code, adc));
    sum += std::abs(recon - static_cast<double>(charge)) /
           static_cast<double>(charge);
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

VdpeResult vdpe_dot(std::span<const std::uint32_t> inputs,
                    std::span<const SignedOperand> weights,
                    const PrecisionConfig& precision, std::size_t vdpe_size,
                    const AdcModel* adc, bool noise_enabled, NoiseSource* noise,
                    AdcDiagnostics* diag) {
  if (inputs.size() != weights.size())
    throw std::invalid_argument("vdpe_dot: operand vectors differ in length");
  if (inputs.size() > vdpe_size)
    throw std::invalid_argument(
        "vdpe_dot: vector length " + std::to_string(inputs.size()) +
        " exceeds VDPE size " + std::to_string(vdpe_size) +
        "; decompose the operands first");

  std::uint64_t positive = 0, negative = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto [iv, wv] = generate_uncorrelated_pair(inputs[i], weights[i].magnitude,
                                               precision);
    const std::uint64_t ones = osm_multiply(iv, wv).popcount();
    (weights[i].sign == Sign::positive ? positive : negative) += ones;
  }

  const std::uint64_t capacity = vdpe_size * precision.stream_length();
  VdpeResult r;
  r.positive_counts = positive;
  r.negative_counts = negative;
  r.pca_overflow = positive > capacity || negative > capacity;

  if (adc == nullptr) {
    r.value = static_cast<double>(positive) - static_cast<double>(negative);
    return r;
  }
  if (noise_enabled && noise == nullptr)
    throw std::invalid_argument("vdpe_dot: noise enabled without a noise source");
  auto convert = [&](std::uint64_t charge) {
    const std::uint32_t code = noise_enabled
                                   ? adc_convert(charge, *adc, true, *noise, diag)
                                   : adc_convert(charge, *adc, diag);
    return static_cast<double>(adc_reconstruct_counts(code, *adc));
  };
  r.value = convert(positive) - convert(negative);
  return r;
}

double exact_dot_counts(std::span<const std::uint32_t> inputs,
                        std::span<const SignedOperand> weights,
                        const PrecisionConfig& precision) {
  double acc = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const double term = static_cast<double>(inputs[i]) *
                        static_cast<double>(weights[i].magnitude) /
                        static_cast<double>(precision.stream_length());
    acc += weights[i].sign == Sign::positive ? term : -term;
  }
  return acc;
}

VdpErrorStats measure_vdp_error(std::uint64_t trials, std::size_t length,
                                const PrecisionConfig& precision,
                                const AdcModel& adc, std::uint64_t seed) {
  if (trials == 0)
    throw std::invalid_argument("measure_vdp_error: trials must be >= 1");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> level(0, (1u << precision.bits) - 1);
  NoiseSource noise(adc.noise_seed ^ seed);

  VdpErrorStats stats;
  stats.trials = trials;
  double round_sum_rel = 0, round_sum_abs = 0;
  double adc_sum_rel = 0, adc_sum_abs = 0;
  std::uint64_t rel_n = 0;

  std::vector<std::uint32_t> div(length);
  std::vector<SignedOperand> dkv(length);
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < length; ++i) {
      div[i] = level(rng);
      dkv[i] = {level(rng), Sign::positive};
    }
    const double exact = exact_dot_counts(div, dkv, precision);
    const VdpeResult ideal =
        vdpe_dot(div, dkv, precision, length, nullptr, false, nullptr);
    const VdpeResult noisy =
        vdpe_dot(div, dkv, precision, length, &adc, true, &noise);

    const double round_err = std::abs(ideal.value - exact);
    const double adc_err = std::abs(noisy.value - exact);
    round_sum_abs += round_err;
    adc_sum_abs += adc_err;
    stats.rounding_max_abs = std::max(stats.rounding_max_abs, round_err);
    stats.adc_max_abs = std::max(stats.adc_max_abs, adc_err);
    if (exact == 0.0) {
      ++stats.zero_reference_trials;
    } else {
      round_sum_rel += round_err / exact;
      adc_sum_rel += adc_err / exact;
      ++rel_n;
    }
  }
  const double n = static_cast<double>(trials);
  stats.rounding_mean_abs = round_sum_abs / n;
  stats.adc_mean_abs = adc_sum_abs / n;
  if (rel_n > 0) {
    stats.rounding_mape = round_sum_rel / static_cast<double>(rel_n);
    stats.adc_mape = adc_sum_rel / static_cast<double>(rel_n);
  }
  return stats;
}

}  // namespace sconna::stoch
