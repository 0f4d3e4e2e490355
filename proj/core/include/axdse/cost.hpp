#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "axdse/error_metrics.hpp"
#include "axdse/netlist.hpp"

namespace axdse {

// Deterministic oracle constants. The timing/power numbers are a desk-scale
// stand-in for a synthesis flow; they are configurable so externally
// calibrated tables can be swapped in via JSON.
struct OracleConfig {
  double t_lut = 0.5;     // ns per LUT level
  double t_route = 0.6;   // ns routing adder per level
  double p_static = 1.0;  // mW static floor
  double c_dyn = 0.2;     // mW per unit of LUT output toggle
  // Indexed by GateType: NOT BUF AND OR XOR NAND NOR XNOR CONST0 CONST1.
  std::array<double, kNumGateTypes> area{0.5, 0.25, 1.5, 1.5, 2.5,
                                         1.0, 1.0,  2.5, 0.0, 0.0};
  std::array<double, kNumGateTypes> delay{0.5, 0.5, 1.2, 1.2, 1.8,
                                          1.0, 1.0, 1.8, 0.0, 0.0};
};

// Loads {t_lut, t_route, p_static, c_dyn, area_table, delay_table}; the
// tables are objects keyed by gate-type name and may be partial.
OracleConfig load_oracle_config(const std::filesystem::path& path);

struct AsicCost {
  double area_units = 0.0;
  double delay_units = 0.0;
  double power_units = 0.0;
};

struct FpgaCost {
  int luts = 0;
  double latency_ns = 0.0;
  double power_mw = 0.0;
};

struct Measurement {
  std::string circuit_id;
  ErrorReport error;
  AsicCost asic;
  FpgaCost fpga;
};

// Per-net signal and toggle probabilities, indexed by net.
struct Activity {
  std::vector<double> prob;
  std::vector<double> toggle;
};

// Exact signal probabilities by exhaustive simulation up to 20 input bits;
// beyond that, probabilities are propagated through gate truth tables
// assuming independent uniform inputs.
Activity activity(const Netlist& nl);

AsicCost asic_cost(const Netlist& nl, const OracleConfig& cfg = {},
                   const Activity* act = nullptr);

struct Lut {
  std::int32_t out_net = -1;
  std::vector<std::int32_t> fanins;  // source-netlist nets, ascending
  std::uint64_t truth = 0;           // 2^|fanins| bits
};

struct LutNetwork {
  std::vector<Lut> luts;
  std::vector<std::int32_t> outputs;  // resolved output bindings
  int depth = 0;
  int k = 6;
};

// Deterministic greedy k-feasible cone covering (2 <= k <= 6). The mapped
// network is functionally equivalent to the input.
LutNetwork lut_map(const Netlist& nl, int k);

// Exhaustive equivalence of a mapped network against its source circuit.
bool check_equivalence(const LutNetwork& ln, const Netlist& source);

FpgaCost fpga_cost(const LutNetwork& ln, const Activity& act,
                   const OracleConfig& cfg = {});

// Bundles error_metrics + asic_cost + lut_map + fpga_cost.
Measurement measure(const Netlist& nl, const Netlist& exact_ref, int k,
                    const OracleConfig& cfg = {});
Measurement measure(const Netlist& nl, const ExactOutputs& exact_ref, int k,
                    const OracleConfig& cfg = {});

// Measurement CSV, also the export format:
// circuit_id,med_raw,med_norm_pct,worst_case,error_rate,asic_area,asic_delay,
// asic_power,fpga_luts,fpga_latency_ns,fpga_power_mw
std::vector<Measurement> load_measurements(const std::filesystem::path& path);
void save_measurements(std::span<const Measurement> rows,
                       const std::filesystem::path& path);

}  // namespace axdse
