#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "axdse/cost.hpp"
#include "axdse/netlist.hpp"

namespace axdse {

// Fixed circuit feature schema: structural counts plus the ASIC proxy costs,
// so the pure-ASIC regressions are special cases of the same pipeline.
inline constexpr std::size_t kNumFeatures = 15;
inline constexpr std::array<const char*, kNumFeatures> kFeatureNames = {
    "n_inputs",  "n_outputs", "total_gates", "logic_depth", "count_not",
    "count_buf", "count_and", "count_or",    "count_xor",   "count_nand",
    "count_nor", "count_xnor", "asic_area",  "asic_delay",  "asic_power"};

inline constexpr std::size_t kFeatureAsicArea = 12;
inline constexpr std::size_t kFeatureAsicDelay = 13;
inline constexpr std::size_t kFeatureAsicPower = 14;

using FeatureVector = std::array<double, kNumFeatures>;

FeatureVector featurize(const Netlist& nl, const AsicCost& asic);

// Labeled regression rows. Feature width is uniform per dataset; circuit
// datasets use the 15-entry schema above, accelerator datasets use their own.
struct DataRow {
  std::string id;
  std::vector<double> x;
  double y = 0.0;
};

struct Dataset {
  std::string target_name;
  std::vector<DataRow> rows;

  std::size_t dim() const { return rows.empty() ? 0 : rows.front().x.size(); }
  void validate() const;
};

// Deterministic shuffle split; train size = round(fraction * n), clamped so
// both sides keep at least one row.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed);

// CSV with columns: circuit_id, the 15 schema features, then the target
// column named by target_name.
void save_dataset_csv(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset_csv(const std::filesystem::path& path,
                         const std::string& target_name);

}  // namespace axdse
