#include "axdse/accel.hpp"

#include <algorithm>
#include <bit>
#include <unordered_set>

#include "axdse/error_metrics.hpp"
#include "axdse/library_gen.hpp"
#include "axdse/pareto.hpp"

namespace axdse {

AcceleratorTemplate build_template(const std::array<std::array<int, 3>, 3>& kernel) {
  AcceleratorTemplate t;
  t.kernel = kernel;
  int sum = 0;
  for (const auto& row : kernel) {
    for (int c : row) {
      if (c < 0) throw Error("kernel coefficients must be non-negative");
      sum += c;
    }
  }
  if (sum <= 0 || (sum & (sum - 1)) != 0)
    throw Error("kernel coefficients must sum to a power of two, got " +
                std::to_string(sum));
  t.shift = std::countr_zero(static_cast<unsigned>(sum));

  // Multiply nodes in kernel raster order.
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      TemplateNode n;
      n.role = TemplateNode::Role::mult;
      n.coeff = kernel[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      t.nodes.push_back(n);
    }
  }
  // Balanced adder tree over m0..m7, with m8 folded in at the top.
  auto add_node = [&](int a, int b) {
    TemplateNode n;
    n.role = TemplateNode::Role::add;
    n.pred = {a, b};
    t.nodes.push_back(n);
    return static_cast<int>(t.nodes.size()) - 1;
  };
  const int a0 = add_node(0, 1);
  const int a1 = add_node(2, 3);
  const int a2 = add_node(4, 5);
  const int a3 = add_node(6, 7);
  const int a4 = add_node(a0, a1);
  const int a5 = add_node(a2, a3);
  const int a6 = add_node(a4, a5);
  t.root = add_node(a6, 8);
  return t;
}

// --- palette ------------------------------------------------------------------

namespace {

void check_component_widths(const Netlist& nl, TemplateNode::Role role) {
  const int in = nl.num_inputs();
  const int out = nl.num_outputs();
  if (role == TemplateNode::Role::mult) {
    if (in != 16 || out != 16)
      throw Error("multiplier component '" + nl.name +
                  "' must have 16 inputs and 16 outputs");
  } else {
    if (in != 32 || out != 17)
      throw Error("adder component '" + nl.name +
                  "' must have 32 inputs and 17 outputs");
  }
}

std::vector<PaletteEntry> build_role(std::span<const Netlist> lib,
                                     TemplateNode::Role role, int lut_k,
                                     const OracleConfig& cfg) {
  if (lib.empty()) throw Error("component library is empty");
  // Element 0 is the reference component; every error is measured against it
  // and the all-exact configuration assigns it to every node.
  const Netlist& exact = lib[0];
  check_component_widths(exact, role);

  std::unordered_set<std::string> ids;
  for (const Netlist& nl : lib) {
    if (!ids.insert(nl.name).second)
      throw Error("duplicate component id '" + nl.name + "'");
  }

  std::vector<PaletteEntry> entries;
  for (std::size_t i = 0; i < lib.size(); ++i) {
    const Netlist& nl = lib[i];
    check_component_widths(nl, role);
    PaletteEntry e;
    e.id = nl.name;
    e.netlist = nl;
    const Activity act = activity(nl);
    e.cost = fpga_cost(lut_map(nl, lut_k), act, cfg);
    if (nl.num_inputs() <= 24) {
      e.med_norm_pct = error_metrics(nl, exact).med_norm_pct;
    } else {
      // 2^32 input words exceed the exhaustive cap; a seeded sample keeps the
      // estimate deterministic.
      e.med_norm_pct =
          sampled_error_metrics(nl, exact, 65536, 0x5eedull + i).med_norm_pct;
    }
    if (role == TemplateNode::Role::mult) {
      e.table.resize(1u << 16);
      const ExactOutputs table(nl);
      for (std::uint32_t w = 0; w < (1u << 16); ++w)
        e.table[w] = static_cast<std::uint16_t>(table.word(w));
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace

ComponentPalette build_palette(std::span<const Netlist> mult_lib,
                               std::span<const Netlist> add_lib, int lut_k,
                               const OracleConfig& cfg) {
  ComponentPalette p;
  p.mult = build_role(mult_lib, TemplateNode::Role::mult, lut_k, cfg);
  p.add = build_role(add_lib, TemplateNode::Role::add, lut_k, cfg);
  return p;
}

void select_pareto(ComponentPalette& palette, std::size_t mult_max,
                   std::size_t add_max, double mult_med_cap, double add_med_cap) {
  auto filter = [](std::vector<PaletteEntry>& entries, std::size_t max_n,
                   double med_cap) {
    if (max_n < 1) throw Error("palette size must be at least 1");
    std::vector<Point> points;
    for (const PaletteEntry& e : entries) {
      if (e.med_norm_pct > med_cap && &e != &entries[0]) continue;
      points.push_back({e.id, {e.med_norm_pct, static_cast<double>(e.cost.luts)}});
    }
    const Front front = pareto_front(points);
    std::vector<PaletteEntry> kept;
    // The reference component anchors index 0.
    kept.push_back(entries[0]);
    for (const Point& p : front.points) {
      if (kept.size() >= max_n) break;
      if (p.id == entries[0].id) continue;
      const auto it = std::find_if(entries.begin(), entries.end(),
                                   [&](const PaletteEntry& e) { return e.id == p.id; });
      kept.push_back(*it);
    }
    entries = std::move(kept);
  };
  filter(palette.mult, mult_max, mult_med_cap);
  filter(palette.add, add_max, add_med_cap);
}

// --- configurations -----------------------------------------------------------

Configuration all_exact_config(const AcceleratorTemplate& tmpl) {
  Configuration cfg;
  cfg.assign.assign(tmpl.nodes.size(), 0);
  return cfg;
}

std::string config_to_string(const Configuration& cfg) {
  std::string s;
  for (std::size_t i = 0; i < cfg.assign.size(); ++i) {
    if (i) s.push_back('-');
    s += std::to_string(cfg.assign[i]);
  }
  return s;
}

Configuration config_from_string(const std::string& s) {
  Configuration cfg;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t dash = s.find('-', pos);
    const std::string tok =
        s.substr(pos, dash == std::string::npos ? std::string::npos : dash - pos);
    try {
      cfg.assign.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw Error("malformed configuration string '" + s + "'");
    }
    if (dash == std::string::npos) break;
    pos = dash + 1;
  }
  return cfg;
}

namespace {

void check_config(const Configuration& cfg, const AcceleratorTemplate& tmpl,
                  const ComponentPalette& palette) {
  if (cfg.assign.size() != tmpl.nodes.size())
    throw Error("configuration length mismatch: got " +
                std::to_string(cfg.assign.size()) + ", expected " +
                std::to_string(tmpl.nodes.size()));
  for (std::size_t i = 0; i < cfg.assign.size(); ++i) {
    const auto& pal = palette.role(tmpl.nodes[i].role);
    if (cfg.assign[i] < 0 || static_cast<std::size_t>(cfg.assign[i]) >= pal.size())
      throw Error("palette index " + std::to_string(cfg.assign[i]) +
                  " invalid for node " + std::to_string(i));
  }
}

}  // namespace

FpgaCost aggregate_cost(const Configuration& cfg, const AcceleratorTemplate& tmpl,
                        const ComponentPalette& palette) {
  check_config(cfg, tmpl, palette);
  FpgaCost total;
  std::vector<double> path(tmpl.nodes.size(), 0.0);
  double latency = 0.0;
  for (std::size_t i = 0; i < tmpl.nodes.size(); ++i) {
    const TemplateNode& node = tmpl.nodes[i];
    const PaletteEntry& e =
        palette.role(node.role)[static_cast<std::size_t>(cfg.assign[i])];
    total.luts += e.cost.luts;
    total.power_mw += e.cost.power_mw;
    double in_path = 0.0;
    for (int p : node.pred)
      if (p >= 0) in_path = std::max(in_path, path[static_cast<std::size_t>(p)]);
    path[i] = in_path + e.cost.latency_ns;
    latency = std::max(latency, path[i]);
  }
  total.latency_ns = latency;
  return total;
}

// --- behavioral evaluation ------------------------------------------------------

namespace {

// Evaluates one adder component on a 32-bit operand pair, saturated to the
// 16-bit node width.
std::uint32_t eval_adder(BlockEvaluator& ev, const Netlist& nl, std::uint32_t a,
                         std::uint32_t b) {
  const std::uint64_t word = static_cast<std::uint64_t>(a) |
                             (static_cast<std::uint64_t>(b) << 16);
  const std::uint64_t in[1] = {word};
  ev.eval_gather(std::span<const std::uint64_t>(in, 1));
  std::uint32_t out = 0;
  for (std::size_t j = 0; j < nl.outputs.size(); ++j)
    out |= static_cast<std::uint32_t>(ev.net_val(nl.outputs[j]) & 1ull) << j;
  return std::min<std::uint32_t>(out, 0xffff);
}

}  // namespace

FilterContext::FilterContext(AcceleratorTemplate tmpl,
                             const ComponentPalette& palette,
                             std::vector<Image> images)
    : tmpl_(std::move(tmpl)), palette_(&palette), images_(std::move(images)) {
  if (images_.empty()) throw Error("at least one image is required");
  for (const Image& img : images_) {
    if (img.width < 8 || img.height < 8)
      throw Error("images must be at least 8x8");
  }
  const Configuration exact = all_exact_config(tmpl_);
  check_config(exact, tmpl_, *palette_);
  reference_.reserve(images_.size());
  for (const Image& img : images_) reference_.push_back(filter_image(exact, img));
}

Image FilterContext::filter_image(const Configuration& cfg, const Image& img) const {
  check_config(cfg, tmpl_, *palette_);
  const int w = img.width, h = img.height;
  Image out;
  out.width = w;
  out.height = h;
  out.pixels.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));

  // Per-node component bindings for this configuration.
  std::array<const PaletteEntry*, 17> comp{};
  std::vector<BlockEvaluator> adders;
  adders.reserve(AcceleratorTemplate::kAddNodes);
  for (std::size_t i = 0; i < tmpl_.nodes.size(); ++i) {
    comp[i] = &palette_->role(tmpl_.nodes[i].role)[static_cast<std::size_t>(cfg.assign[i])];
    if (tmpl_.nodes[i].role == TemplateNode::Role::add)
      adders.emplace_back(comp[i]->netlist);
  }

  std::array<std::uint32_t, 17> value{};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // Multiply nodes consume the clamped 3x3 neighbourhood in raster order.
      std::size_t add_idx = 0;
      for (std::size_t i = 0; i < tmpl_.nodes.size(); ++i) {
        const TemplateNode& node = tmpl_.nodes[i];
        if (node.role == TemplateNode::Role::mult) {
          const int r = static_cast<int>(i) / 3 - 1;
          const int c = static_cast<int>(i) % 3 - 1;
          const int xx = std::clamp(x + c, 0, w - 1);
          const int yy = std::clamp(y + r, 0, h - 1);
          const std::uint32_t word =
              static_cast<std::uint32_t>(img.at(xx, yy)) |
              (static_cast<std::uint32_t>(node.coeff) << 8);
          value[i] = comp[i]->table[word];
        } else {
          const std::uint32_t a = value[static_cast<std::size_t>(node.pred[0])];
          const std::uint32_t b = value[static_cast<std::size_t>(node.pred[1])];
          value[i] = eval_adder(adders[add_idx++], comp[i]->netlist, a, b);
        }
      }
      const std::uint32_t normalized =
          value[static_cast<std::size_t>(tmpl_.root)] >> tmpl_.shift;
      out.at(x, y) = static_cast<std::uint8_t>(std::min<std::uint32_t>(normalized, 255));
    }
  }
  return out;
}

EvaluatedConfig FilterContext::evaluate(const Configuration& cfg) const {
  EvaluatedConfig ec;
  ec.config = cfg;
  ec.cost = aggregate_cost(cfg, tmpl_, *palette_);
  double total = 0.0;
  for (std::size_t i = 0; i < images_.size(); ++i) {
    const Image filtered = filter_image(cfg, images_[i]);
    total += ssim(filtered, reference_[i]);
  }
  ec.ssim = total / static_cast<double>(images_.size());
  return ec;
}

EvaluatedConfig evaluate_exact(const Configuration& cfg,
                               const AcceleratorTemplate& tmpl,
                               const ComponentPalette& palette,
                               std::span<const Image> images) {
  FilterContext ctx(tmpl, palette, std::vector<Image>(images.begin(), images.end()));
  return ctx.evaluate(cfg);
}

}  // namespace axdse
