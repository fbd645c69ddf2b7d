#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

// CNN layer tables, the exact convolution reference, im2col-style
// flattening into input/kernel vector pairs, fixed-size decomposition into
// DIV/DKV segments, and the kernel-size census.

namespace sconna::workload {

enum class LayerKind { conv, depthwise_conv, fully_connected, pool, activation };

const char* layer_kind_name(LayerKind kind);
LayerKind layer_kind_from_name(const std::string& name);  // throws on unknown

struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::conv;
  int input_height = 0;  // H
  int input_width = 0;   // W
  int input_depth = 0;   // D
  int kernel_size = 1;   // K
  int kernel_count = 1;  // L
  int stride = 1;
  int padding = 0;

  int output_height() const {
    return (input_height + 2 * padding - kernel_size) / stride + 1;
  }
  int output_width() const {
    return (input_width + 2 * padding - kernel_size) / stride + 1;
  }
  // S = K*K*D, or K*K per channel for depthwise, or D for fully connected.
  std::uint64_t flat_size() const;
  std::uint64_t vdp_count() const;  // H_out * W_out * L for VDP-bearing kinds
  bool bears_vdp() const {
    return kind == LayerKind::conv || kind == LayerKind::depthwise_conv ||
           kind == LayerKind::fully_connected;
  }

  void validate() const;  // throws std::invalid_argument with the field name
};

struct NetworkSpec {
  std::string name;
  std::vector<LayerSpec> layers;
};

// Strict schema {name, layers:[{name, kind, H, W, D, K, L, stride, padding}]};
// unknown fields are rejected.
NetworkSpec parse_network(const std::string& json_text);
NetworkSpec load_network(const std::string& path);
std::string network_to_json(const NetworkSpec& net);

// --- exact convolution reference ------------------------------------------

// Dense integer H x W x D tensor, depth-minor storage.
struct Tensor3 {
  int height = 0, width = 0, depth = 0;
  std::vector<std::int32_t> data;

  Tensor3() = default;
  Tensor3(int h, int w, int d)
      : height(h), width(w), depth(d),
        data(static_cast<std::size_t>(h) * w * d, 0) {}

  std::int32_t& at(int h, int w, int d) {
    return data[(static_cast<std::size_t>(h) * width + w) * depth + d];
  }
  std::int32_t at(int h, int w, int d) const {
    return data[(static_cast<std::size_t>(h) * width + w) * depth + d];
  }
};

Tensor3 zero_pad(const Tensor3& t, int pad);

// O(i, j) for one kernel tensor: the exact triple sum over (r, q, d).
// Indices outside the derived output bounds throw std::out_of_range.
std::int64_t conv_output_oracle(const Tensor3& input, const Tensor3& kernel,
                                int stride, int out_row, int out_col);

// --- flattening -------------------------------------------------------------

// Flat index order is (r * K + q) * D + d: spatial row-major, depth minor.
std::vector<std::int32_t> flatten_patch(const Tensor3& input, int kernel_size,
                                        int stride, int out_row, int out_col);
std::vector<std::int32_t> flatten_kernel(const Tensor3& kernel);

struct FlattenedPair {
  std::vector<std::int32_t> input_vec;
  std::vector<std::int32_t> kernel_vec;
  int out_row = 0, out_col = 0;
  int kernel_index = 0;
};

// Streams every (input vector, kernel vector) pair of the layer; pair count
// is H_out * W_out * L. Input must already carry the layer's padding.
// Unsupported kinds (pool, activation) throw std::invalid_argument.
void flatten_layer(const LayerSpec& layer, const Tensor3& input,
                   std::span<const Tensor3> kernels,
                   const std::function<void(const FlattenedPair&)>& sink);

// --- decomposition ----------------------------------------------------------

struct VdpSegment {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;  // half-open
  std::uint64_t size() const { return end - begin; }
};

struct VdpTask {
  std::uint64_t flat_size = 0;     // S
  std::uint64_t segment_count = 0; // C = ceil(S / N)
  std::vector<VdpSegment> segments;
};

// Tiles [0, S) into ceil(S/N) segments of at most N points; the short final
// segment is zero-padded at evaluation time.
VdpTask decompose(std::uint64_t flat_size, std::uint64_t vdpe_size);

// --- kernel census ----------------------------------------------------------

struct CensusCounts {
  std::uint64_t at_or_below = 0;
  std::uint64_t above = 0;
  std::uint64_t total() const { return at_or_below + above; }
};

// Kernel-tensor census by flattened size S against a threshold, following
// the published extraction convention: conv layers contribute L kernels of
// S = K*K*D (K*K per channel for depthwise), fully-connected layers one
// kernel of S = D, and each pooling layer both its window (K*K) and its
// pooled volume (K*K*D).
CensusCounts tensor_stats(const NetworkSpec& net, std::uint64_t threshold);

}  // namespace sconna::workload
