#include "workload.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sconna::workload {

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv: return "conv";
    case LayerKind::depthwise_conv: return "depthwise_conv";
    case LayerKind::fully_connected: return "fully_connected";
    case LayerKind::pool: return "pool";
    case LayerKind::activation: return "activation";
  }
  return "?";
}

LayerKind layer_kind_from_name(const std::string& name) {
  if (name == "conv") return LayerKind::conv;
  if (name == "depthwise_conv") return LayerKind::depthwise_conv;
  if (name == "fully_connected") return LayerKind::fully_connected;
  if (name == "pool") return LayerKind::pool;
  if (name == "activation") return LayerKind::activation;
  throw std::invalid_argument("unknown layer kind \"" + name + "\"");
}

std::uint64_t LayerSpec::flat_size() const {
  const std::uint64_t k = static_cast<std::uint64_t>(kernel_size);
  switch (kind) {
    case LayerKind::depthwise_conv: return k * k;
    case LayerKind::fully_connected: return static_cast<std::uint64_t>(input_depth);
    default: return k * k * static_cast<std::uint64_t>(input_depth);
  }
}

std::uint64_t LayerSpec::vdp_count() const {
  if (!bears_vdp()) return 0;
  return static_cast<std::uint64_t>(output_height()) * output_width() *
         kernel_count;
}

void LayerSpec::validate() const {
  auto fail = [this](const std::string& what) {
    throw std::invalid_argument("layer \"" + name + "\": " + what);
  };
  if (input_height < 1) fail("H must be positive");
  if (input_width < 1) fail("W must be positive");
  if (input_depth < 1) fail("D must be positive");
  if (kernel_size < 1) fail("K must be positive");
  if (kernel_count < 1) fail("L must be positive");
  if (stride < 1) fail("stride must be positive");
  if (padding < 0) fail("padding must be non-negative");
  if (kind == LayerKind::fully_connected && kernel_size != 1)
    fail("fully_connected requires K = 1");
  if (kind != LayerKind::activation &&
      (output_height() < 1 || output_width() < 1))
    fail("derived output dimensions are empty");
}

namespace {

NetworkSpec parse_network_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("network: top level must be an object");
  for (const auto& [key, _] : j.items())
    if (key != "name" && key != "layers")
      throw std::invalid_argument("network: unknown top-level field \"" + key + "\"");
  NetworkSpec net;
  net.name = j.at("name").get<std::string>();
  for (const auto& lj : j.at("layers")) {
    static const char* known[] = {"name", "kind", "H", "W", "D",
                                  "K", "L", "stride", "padding"};
    for (const auto& [key, _] : lj.items()) {
      bool ok = false;
      for (const char* k : known) ok = ok || key == k;
      if (!ok)
        throw std::invalid_argument("network: unknown layer field \"" + key + "\"");
    }
    LayerSpec layer;
    layer.name = lj.at("name").get<std::string>();
    layer.kind = layer_kind_from_name(lj.at("kind").get<std::string>());
    layer.input_height = lj.at("H").get<int>();
    layer.input_width = lj.at("W").get<int>();
    layer.input_depth = lj.at("D").get<int>();
    layer.kernel_size = lj.at("K").get<int>();
    layer.kernel_count = lj.at("L").get<int>();
    layer.stride = lj.at("stride").get<int>();
    layer.padding = lj.value("padding", 0);
    layer.validate();
    net.layers.push_back(std::move(layer));
  }
  return net;
}

}  // namespace

NetworkSpec parse_network(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("network: JSON parse error: ") + e.what());
  }
  try {
    return parse_network_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("network: schema error: ") + e.what());
  }
}

NetworkSpec load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open network file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_network(buf.str());
}

std::string network_to_json(const NetworkSpec& net) {
  nlohmann::json j;
  j["name"] = net.name;
  j["layers"] = nlohmann::json::array();
  for (const auto& l : net.layers) {
    j["layers"].push_back({{"name", l.name},
                           {"kind", layer_kind_name(l.kind)},
                           {"H", l.input_height},
                           {"W", l.input_width},
                           {"D", l.input_depth},
                           {"K", l.kernel_size},
                           {"L", l.kernel_count},
                           {"stride", l.stride},
                           {"padding", l.padding}});
  }
  return j.dump(1);
}

Tensor3 zero_pad(const Tensor3& t, int pad) {
  if (pad == 0) return t;
  Tensor3 out(t.height + 2 * pad, t.width + 2 * pad, t.depth);
  for (int h = 0; h < t.height; ++h)
    for (int w = 0; w < t.width; ++w)
      for (int d = 0; d < t.depth; ++d)
        out.at(h + pad, w + pad, d) = t.at(h, w, d);
  return out;
}

std::int64_t conv_output_oracle(const Tensor3& input, const Tensor3& kernel,
                                int stride, int out_row, int out_col) {
  if (kernel.height != kernel.width)
    throw std::invalid_argument("conv_output_oracle: kernel must be square");
  if (kernel.depth != input.depth)
    throw std::invalid_argument("conv_output_oracle: depth mismatch");
  const int k = kernel.height;
  const int out_h = (input.height - k) / stride + 1;
  const int out_w = (input.width - k) / stride + 1;
  if (out_row < 0 || out_row >= out_h || out_col < 0 || out_col >= out_w)
    throw std::out_of_range("conv_output_oracle: output coordinate out of bounds");

  std::int64_t acc = 0;
  for (int d = 0; d < input.depth; ++d)
    for (int q = 0; q < k; ++q)
      for (int r = 0; r < k; ++r)
        acc += static_cast<std::int64_t>(kernel.at(r, q, d)) *
               input.at(out_row * stride + r, out_col * stride + q, d);
  return acc;
}

std::vector<std::int32_t> flatten_patch(const Tensor3& input, int kernel_size,
                                        int stride, int out_row, int out_col) {
  std::vector<std::int32_t> v;
  v.reserve(static_cast<std::size_t>(kernel_size) * kernel_size * input.depth);
  for (int r = 0; r < kernel_size; ++r)
    for (int q = 0; q < kernel_size; ++q)
      for (int d = 0; d < input.depth; ++d)
        v.push_back(input.at(out_row * stride + r, out_col * stride + q, d));
  return v;
}

std::vector<std::int32_t> flatten_kernel(const Tensor3& kernel) {
  std::vector<std::int32_t> v;
  v.reserve(static_cast<std::size_t>(kernel.height) * kernel.width * kernel.depth);
  for (int r = 0; r < kernel.height; ++r)
    for (int q = 0; q < kernel.width; ++q)
      for (int d = 0; d < kernel.depth; ++d) v.push_back(kernel.at(r, q, d));
  return v;
}

void flatten_layer(const LayerSpec& layer, const Tensor3& input,
                   std::span<const Tensor3> kernels,
                   const std::function<void(const FlattenedPair&)>& sink) {
  if (!layer.bears_vdp())
    throw std::invalid_argument("flatten_layer: layer kind " +
                                std::string(layer_kind_name(layer.kind)) +
                                " carries no vector dot products");
  if (kernels.size() != static_cast<std::size_t>(layer.kernel_count))
    throw std::invalid_argument("flatten_layer: kernel count mismatch");

  const Tensor3 padded = zero_pad(input, layer.padding);
  FlattenedPair pair;

  if (layer.kind == LayerKind::fully_connected) {
    pair.input_vec.clear();
    for (int h = 0; h < padded.height; ++h)
      for (int w = 0; w < padded.width; ++w)
        for (int d = 0; d < padded.depth; ++d)
          pair.input_vec.push_back(padded.at(h, w, d));
    for (int l = 0; l < layer.kernel_count; ++l) {
      pair.kernel_vec = flatten_kernel(kernels[l]);
      pair.out_row = 0;
      pair.out_col = 0;
      pair.kernel_index = l;
      sink(pair);
    }
    return;
  }

  const int out_h = layer.output_height();
  const int out_w = layer.output_width();
  for (int l = 0; l < layer.kernel_count; ++l) {
    if (layer.kind == LayerKind::depthwise_conv) {
      // channel l against its own K x K kernel
      Tensor3 channel(padded.height, padded.width, 1);
      for (int h = 0; h < padded.height; ++h)
        for (int w = 0; w < padded.width; ++w)
          channel.at(h, w, 0) = padded.at(h, w, l);
      pair.kernel_vec = flatten_kernel(kernels[l]);
      for (int i = 0; i < out_h; ++i)
        for (int j = 0; j < out_w; ++j) {
          pair.input_vec =
              flatten_patch(channel, layer.kernel_size, layer.stride, i, j);
          pair.out_row = i;
          pair.out_col = j;
          pair.kernel_index = l;
          sink(pair);
        }
    } else {
      pair.kernel_vec = flatten_kernel(kernels[l]);
      for (int i = 0; i < out_h; ++i)
        for (int j = 0; j < out_w; ++j) {
          pair.input_vec =
              flatten_patch(padded, layer.kernel_size, layer.stride, i, j);
          pair.out_row = i;
          pair.out_col = j;
          pair.kernel_index = l;
          sink(pair);
        }
    }
  }
}

VdpTask decompose(std::uint64_t flat_size, std::uint64_t vdpe_size) {
  if (flat_size < 1) throw std::invalid_argument("decompose: S must be >= 1");
  if (vdpe_size < 1) throw std::invalid_argument("decompose: N must be >= 1");
  VdpTask task;
  task.flat_size = flat_size;
  task.segment_count = (flat_size + vdpe_size - 1) / vdpe_size;
  task.segments.reserve(task.segment_count);
  for (std::uint64_t begin = 0; begin < flat_size; begin += vdpe_size)
    task.segments.push_back({begin, std::min(begin + vdpe_size, flat_size)});
  return task;
}

CensusCounts tensor_stats(const NetworkSpec& net, std::uint64_t threshold) {
  if (threshold < 1) throw std::invalid_argument("tensor_stats: threshold must be >= 1");
  CensusCounts counts;
  auto add = [&](std::uint64_t s, std::uint64_t n) {
    (s <= threshold ? counts.at_or_below : counts.above) += n;
  };
  for (const auto& l : net.layers) {
    const std::uint64_t k = static_cast<std::uint64_t>(l.kernel_size);
    switch (l.kind) {
      case LayerKind::conv:
      case LayerKind::depthwise_conv:
        add(l.flat_size(), static_cast<std::uint64_t>(l.kernel_count));
        break;
      case LayerKind::fully_connected:
        add(static_cast<std::uint64_t>(l.input_depth), 1);
        break;
      case LayerKind::pool:
        add(k * k, 1);
        add(k * k * static_cast<std::uint64_t>(l.input_depth), 1);
        break;
      case LayerKind::activation:
        break;
    }
  }
  return counts;
}

}  // namespace sconna::workload
