#include <doctest.h>

#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "workload.hpp"

using namespace sconna::workload;

#ifndef SCONNA_DATA_DIR
#define SCONNA_DATA_DIR "data"
#endif

namespace {

// Independently coded naive reference: plain six-loop convolution over all
// output points, sharing nothing with the library implementation.
std::vector<std::int64_t> naive_conv_all(const Tensor3& input,
                                         const std::vector<Tensor3>& kernels,
                                         int stride) {
  const int k = kernels[0].height;
  const int oh = (input.height - k) / stride + 1;
  const int ow = (input.width - k) / stride + 1;
  std::vector<std::int64_t> out;
  for (std::size_t l = 0; l < kernels.size(); ++l)
    for (int i = 0; i < oh; ++i)
      for (int j = 0; j < ow; ++j) {
        std::int64_t acc = 0;
        for (int r = 0; r < k; ++r)
          for (int q = 0; q < k; ++q)
            for (int d = 0; d < input.depth; ++d)
              acc += static_cast<std::int64_t>(kernels[l].at(r, q, d)) *
                     input.at(i * stride + r, j * stride + q, d);
        out.push_back(acc);
      }
  return out;
}

Tensor3 random_tensor(int h, int w, int d, std::mt19937_64& rng, int lo, int hi) {
  Tensor3 t(h, w, d);
  std::uniform_int_distribution<int> value(lo, hi);
  for (auto& x : t.data) x = value(rng);
  return t;
}

std::int64_t dot(const std::vector<std::int32_t>& a,
                 const std::vector<std::int32_t>& b) {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += static_cast<std::int64_t>(a[i]) * b[i];
  return acc;
}

}  // namespace

TEST_CASE("conv_output_oracle basics") {
  SUBCASE("1x1x1 kernel scales every point") {
    Tensor3 input(3, 3, 1);
    for (auto& x : input.data) x = 5;
    Tensor3 kernel(1, 1, 1);
    kernel.at(0, 0, 0) = 7;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(conv_output_oracle(input, kernel, 1, i, j) == 35);
  }
  SUBCASE("all-ones 3x3x2 kernel counts the window") {
    Tensor3 input(5, 5, 2);
    for (auto& x : input.data) x = 1;
    Tensor3 kernel(3, 3, 2);
    for (auto& x : kernel.data) x = 1;
    CHECK(conv_output_oracle(input, kernel, 1, 1, 1) == 18);
  }
  SUBCASE("out-of-bounds coordinates are rejected") {
    Tensor3 input(4, 4, 1), kernel(3, 3, 1);
    CHECK_THROWS_AS(conv_output_oracle(input, kernel, 1, 2, 0), std::out_of_range);
    CHECK_THROWS_AS(conv_output_oracle(input, kernel, 1, 0, -1), std::out_of_range);
  }
  SUBCASE("random tensors match the naive six-loop reference") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      const int k = 1 + trial % 3;
      const Tensor3 input = random_tensor(6, 7, 3, rng, -9, 9);
      std::vector<Tensor3> kernels;
      for (int l = 0; l < 2; ++l)
        kernels.push_back(random_tensor(k, k, 3, rng, -9, 9));
      const auto reference = naive_conv_all(input, kernels, 1);
      const int oh = (6 - k) + 1, ow = (7 - k) + 1;
      std::size_t idx = 0;
      for (std::size_t l = 0; l < kernels.size(); ++l)
        for (int i = 0; i < oh; ++i)
          for (int j = 0; j < ow; ++j)
            CHECK(conv_output_oracle(input, kernels[l], 1, i, j) ==
                  reference[idx++]);
    }
  }
}

TEST_CASE("flatten_layer geometry and oracle round trip") {
  SUBCASE("pair count and dot-product equivalence on a random conv layer") {
    std::mt19937_64 rng(23);
    LayerSpec layer;
    layer.name = "t";
    layer.kind = LayerKind::conv;
    layer.input_height = 6;
    layer.input_width = 5;
    layer.input_depth = 3;
    layer.kernel_size = 3;
    layer.kernel_count = 4;
    layer.stride = 2;
    layer.padding = 1;
    layer.validate();

    const Tensor3 input = random_tensor(6, 5, 3, rng, -7, 7);
    std::vector<Tensor3> kernels;
    for (int l = 0; l < 4; ++l) kernels.push_back(random_tensor(3, 3, 3, rng, -7, 7));

    const Tensor3 padded = zero_pad(input, 1);
    std::size_t pairs = 0;
    flatten_layer(layer, input, kernels, [&](const FlattenedPair& p) {
      ++pairs;
      CHECK(p.input_vec.size() == layer.flat_size());
      CHECK(dot(p.input_vec, p.kernel_vec) ==
            conv_output_oracle(padded, kernels[p.kernel_index], 2, p.out_row,
                               p.out_col));
    });
    CHECK(pairs == layer.vdp_count());
    CHECK(pairs == static_cast<std::size_t>(layer.output_height()) *
                       layer.output_width() * 4);
  }
  SUBCASE("1x1 conv with D=64 flattens to S=64") {
    LayerSpec layer;
    layer.name = "pointwise";
    layer.kind = LayerKind::conv;
    layer.input_height = 7;
    layer.input_width = 7;
    layer.input_depth = 64;
    layer.kernel_size = 1;
    layer.kernel_count = 8;
    layer.stride = 1;
    CHECK(layer.flat_size() == 64);
  }
  SUBCASE("depthwise layers flatten per channel") {
    std::mt19937_64 rng(29);
    LayerSpec layer;
    layer.name = "dw";
    layer.kind = LayerKind::depthwise_conv;
    layer.input_height = 5;
    layer.input_width = 5;
    layer.input_depth = 3;
    layer.kernel_size = 3;
    layer.kernel_count = 3;
    layer.stride = 1;
    CHECK(layer.flat_size() == 9);

    const Tensor3 input = random_tensor(5, 5, 3, rng, 0, 9);
    std::vector<Tensor3> kernels;
    for (int l = 0; l < 3; ++l) kernels.push_back(random_tensor(3, 3, 1, rng, -5, 5));
    flatten_layer(layer, input, kernels, [&](const FlattenedPair& p) {
      CHECK(p.input_vec.size() == 9);
      // per-channel oracle: lift channel l into its own tensor
      Tensor3 channel(5, 5, 1);
      for (int h = 0; h < 5; ++h)
        for (int w = 0; w < 5; ++w)
          channel.at(h, w, 0) = input.at(h, w, p.kernel_index);
      CHECK(dot(p.input_vec, p.kernel_vec) ==
            conv_output_oracle(channel, kernels[p.kernel_index], 1, p.out_row,
                               p.out_col));
    });
  }
  SUBCASE("unsupported kinds are rejected") {
    LayerSpec layer;
    layer.name = "pool";
    layer.kind = LayerKind::pool;
    layer.input_height = 4;
    layer.input_width = 4;
    layer.input_depth = 2;
    layer.kernel_size = 2;
    layer.kernel_count = 2;
    layer.stride = 2;
    Tensor3 input(4, 4, 2);
    CHECK_THROWS_AS(flatten_layer(layer, input, {}, [](const FlattenedPair&) {}),
                    std::invalid_argument);
  }
}

TEST_CASE("decompose") {
  SUBCASE("published anchor: ceil(4608/44) = 105") {
    CHECK(decompose(4608, 44).segment_count == 105);
  }
  SUBCASE("ceil(4608/176) = 27") {
    CHECK(decompose(4608, 176).segment_count == 27);
  }
  SUBCASE("no decomposition when S <= N") {
    const auto task = decompose(10, 44);
    CHECK(task.segment_count == 1);
    CHECK(task.segments[0].size() == 10);
  }
  SUBCASE("segments tile [0, S) exactly once") {
    for (std::uint64_t s = 1; s <= 64; ++s)
      for (std::uint64_t n = 1; n <= 16; ++n) {
        const auto task = decompose(s, n);
        CHECK(task.segment_count == (s + n - 1) / n);
        std::uint64_t cursor = 0;
        for (const auto& seg : task.segments) {
          CHECK(seg.begin == cursor);
          CHECK(seg.size() <= n);
          cursor = seg.end;
        }
        CHECK(cursor == s);
      }
  }
  SUBCASE("decomposition completeness: psums add up to the exact dot product") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> value(-50, 50);
    for (std::uint64_t s = 1; s <= 64; ++s)
      for (std::uint64_t n = 1; n <= 16; ++n) {
        std::vector<std::int32_t> a(s), b(s);
        for (auto& x : a) x = value(rng);
        for (auto& x : b) x = value(rng);
        std::int64_t whole = 0;
        for (std::uint64_t i = 0; i < s; ++i)
          whole += static_cast<std::int64_t>(a[i]) * b[i];
        std::int64_t from_psums = 0;
        for (const auto& seg : decompose(s, n).segments)
          for (std::uint64_t i = seg.begin; i < seg.end; ++i)
            from_psums += static_cast<std::int64_t>(a[i]) * b[i];
        CHECK(from_psums == whole);
      }
  }
}

TEST_CASE("tensor_stats census") {
  SUBCASE("bundled resnet50 reproduces the published split") {
    const NetworkSpec net =
        load_network(std::string(SCONNA_DATA_DIR) + "/networks/resnet50.json");
    const auto counts = tensor_stats(net, 44);
    CHECK(counts.at_or_below == 1);
    CHECK(counts.above == 26562);
  }
  SUBCASE("bundled googlenet reproduces the published split") {
    const NetworkSpec net =
        load_network(std::string(SCONNA_DATA_DIR) + "/networks/googlenet.json");
    const auto counts = tensor_stats(net, 44);
    CHECK(counts.at_or_below == 13);
    CHECK(counts.above == 7554);
  }
  SUBCASE("single small layer lands entirely at or below the threshold") {
    NetworkSpec net;
    net.name = "tiny";
    LayerSpec layer;
    layer.name = "c";
    layer.kind = LayerKind::conv;
    layer.input_height = 8;
    layer.input_width = 8;
    layer.input_depth = 1;
    layer.kernel_size = 3;
    layer.kernel_count = 5;
    layer.stride = 1;
    net.layers.push_back(layer);
    const auto counts = tensor_stats(net, 44);
    CHECK(counts.at_or_below == 5);
    CHECK(counts.above == 0);
  }
  SUBCASE("counts partition the census total") {
    for (const char* file : {"resnet50", "googlenet", "mobilenet_v2",
                             "shufflenet_v2"}) {
      const NetworkSpec net = load_network(std::string(SCONNA_DATA_DIR) +
                                           "/networks/" + file + ".json");
      const auto at_44 = tensor_stats(net, 44);
      const auto at_1 = tensor_stats(net, 1);
      const auto at_big = tensor_stats(net, 1u << 20);
      CHECK(at_44.total() == at_1.total());
      CHECK(at_44.total() == at_big.total());
      CHECK(at_big.at_or_below == at_big.total());
    }
  }
  SUBCASE("depthwise-heavy networks sit mostly at small S") {
    const NetworkSpec net = load_network(std::string(SCONNA_DATA_DIR) +
                                         "/networks/mobilenet_v2.json");
    const auto counts = tensor_stats(net, 44);
    CHECK(counts.at_or_below > counts.total() / 4);
  }
}

TEST_CASE("network JSON schema") {
  SUBCASE("bundled descriptors parse and validate") {
    const NetworkSpec net =
        load_network(std::string(SCONNA_DATA_DIR) + "/networks/resnet50.json");
    CHECK(net.name == "resnet50");
    CHECK(net.layers.size() == 55);
    // the deepest layer of the bundled descriptor reaches S = 4608
    std::uint64_t max_s = 0;
    for (const auto& l : net.layers)
      if (l.bears_vdp()) max_s = std::max(max_s, l.flat_size());
    CHECK(max_s == 4608);
  }
  SUBCASE("unknown fields are rejected") {
    const std::string text = R"({"name":"x","layers":[
      {"name":"a","kind":"conv","H":4,"W":4,"D":1,"K":1,"L":1,"stride":1,
       "padding":0,"bogus":3}]})";
    CHECK_THROWS_AS(parse_network(text), std::invalid_argument);
  }
  SUBCASE("unknown top-level fields are rejected") {
    CHECK_THROWS_AS(parse_network(R"({"name":"x","layers":[],"extra":1})"),
                    std::invalid_argument);
  }
  SUBCASE("malformed geometry is rejected") {
    const std::string text = R"({"name":"x","layers":[
      {"name":"a","kind":"conv","H":2,"W":2,"D":1,"K":5,"L":1,"stride":1,
       "padding":0}]})";
    CHECK_THROWS_AS(parse_network(text), std::invalid_argument);
  }
  SUBCASE("round trip") {
    const NetworkSpec net =
        load_network(std::string(SCONNA_DATA_DIR) + "/networks/googlenet.json");
    const NetworkSpec again = parse_network(network_to_json(net));
    CHECK(again.layers.size() == net.layers.size());
    CHECK(tensor_stats(again, 44).above == tensor_stats(net, 44).above);
  }
}
