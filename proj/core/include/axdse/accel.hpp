#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "axdse/cost.hpp"
#include "axdse/image.hpp"
#include "axdse/netlist.hpp"

namespace axdse {

// 3x3 convolution accelerator: 9 multiply nodes (8-bit pixel x 8-bit
// coefficient) feed a balanced 8-node 16-bit adder tree, followed by a
// shift-normalize stage.
struct TemplateNode {
  enum class Role { mult, add };
  Role role = Role::mult;
  std::array<int, 2> pred{-1, -1};  // node indices; multiply nodes have none
  int coeff = 0;                    // kernel coefficient (multiply nodes)
};

struct AcceleratorTemplate {
  std::array<std::array<int, 3>, 3> kernel{};
  int shift = 0;  // log2 of the kernel sum
  std::vector<TemplateNode> nodes;  // 9 multiply nodes then 8 adder nodes
  int root = 16;

  static constexpr int kMultNodes = 9;
  static constexpr int kAddNodes = 8;
};

// Kernel coefficients must be non-negative integers summing to a power of two.
AcceleratorTemplate build_template(const std::array<std::array<int, 3>, 3>& kernel);

inline AcceleratorTemplate default_gaussian_template() {
  return build_template({{{1, 2, 1}, {2, 4, 2}, {1, 2, 1}}});
}

struct PaletteEntry {
  std::string id;
  Netlist netlist;
  FpgaCost cost;
  double med_norm_pct = 0.0;
  // Multiplier components get a full 16-bit-input function table; adders are
  // simulated directly.
  std::vector<std::uint16_t> table;
};

struct ComponentPalette {
  std::vector<PaletteEntry> mult;  // 16 inputs, 16 outputs
  std::vector<PaletteEntry> add;   // 32 inputs, 17 outputs

  const std::vector<PaletteEntry>& role(TemplateNode::Role r) const {
    return r == TemplateNode::Role::mult ? mult : add;
  }
};

// Builds palette entries from component libraries whose element 0 is the
// exact reference. Errors are measured exhaustively when the input space
// allows it and by a seeded 65,536-sample sweep otherwise.
ComponentPalette build_palette(std::span<const Netlist> mult_lib,
                               std::span<const Netlist> add_lib, int lut_k = 6,
                               const OracleConfig& cfg = {});

// Keeps the (med_norm_pct, luts) pareto front of each role, capped to the
// given sizes; the reference entry always survives at index 0. Components
// whose error exceeds the per-role cap are excluded first: a single
// high-error component (an adder especially, sitting on every pixel's path)
// saturates the filter output into one degenerate image and makes the QoR
// landscape a step function. The default caps suit the 8-bit Gaussian filter.
void select_pareto(ComponentPalette& palette, std::size_t mult_max,
                   std::size_t add_max, double mult_med_cap = 1.0,
                   double add_med_cap = 0.05);

// Per-node palette assignment, template node order.
struct Configuration {
  std::vector<int> assign;

  bool operator==(const Configuration&) const = default;
};

Configuration all_exact_config(const AcceleratorTemplate& tmpl);
std::string config_to_string(const Configuration& cfg);
Configuration config_from_string(const std::string& s);

struct EvaluatedConfig {
  Configuration config;
  double ssim = 1.0;
  FpgaCost cost;
};

// Cost aggregate: luts and power are component sums, latency is the longest
// template path of component latencies.
FpgaCost aggregate_cost(const Configuration& cfg, const AcceleratorTemplate& tmpl,
                        const ComponentPalette& palette);

// Behavioral evaluation reusing the images' cached all-exact reference output.
class FilterContext {
public:
  FilterContext(AcceleratorTemplate tmpl, const ComponentPalette& palette,
                std::vector<Image> images);

  EvaluatedConfig evaluate(const Configuration& cfg) const;
  Image filter_image(const Configuration& cfg, const Image& img) const;

  const AcceleratorTemplate& accel_template() const { return tmpl_; }
  const ComponentPalette& palette() const { return *palette_; }
  std::span<const Image> images() const { return images_; }

private:
  AcceleratorTemplate tmpl_;
  const ComponentPalette* palette_;
  std::vector<Image> images_;
  std::vector<Image> reference_;
};

// One-shot convenience wrapper around FilterContext.
EvaluatedConfig evaluate_exact(const Configuration& cfg,
                               const AcceleratorTemplate& tmpl,
                               const ComponentPalette& palette,
                               std::span<const Image> images);

}  // namespace axdse
