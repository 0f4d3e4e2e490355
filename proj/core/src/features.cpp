#include "axdse/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <unordered_set>

#include "axdse/rng.hpp"
#include "csv_util.hpp"

namespace axdse {

FeatureVector featurize(const Netlist& nl, const AsicCost& asic) {
  FeatureVector f{};
  f[0] = nl.num_inputs();
  f[1] = nl.num_outputs();
  f[2] = nl.num_gates();

  // Gate-count longest input-to-output path.
  std::vector<int> depth(static_cast<std::size_t>(nl.net_count()), 0);
  std::size_t idx = 2 + nl.inputs.size();
  for (const Gate& g : nl.gates) {
    int d = 0;
    for (int i = 0; i < arity(g.type); ++i)
      d = std::max(d, depth[static_cast<std::size_t>(g.fanin[static_cast<std::size_t>(i)])]);
    depth[idx++] = d + 1;
  }
  int logic_depth = 0;
  for (std::int32_t out : nl.outputs)
    logic_depth = std::max(logic_depth, depth[static_cast<std::size_t>(out)]);
  f[3] = logic_depth;

  for (const Gate& g : nl.gates) {
    const int t = static_cast<int>(g.type);
    if (t < 8) f[static_cast<std::size_t>(4 + t)] += 1.0;
  }
  f[kFeatureAsicArea] = asic.area_units;
  f[kFeatureAsicDelay] = asic.delay_units;
  f[kFeatureAsicPower] = asic.power_units;
  return f;
}

void Dataset::validate() const {
  if (rows.empty()) throw Error("dataset '" + target_name + "' is empty");
  std::unordered_set<std::string> ids;
  const std::size_t d = rows.front().x.size();
  for (const DataRow& r : rows) {
    if (r.x.size() != d)
      throw Error("feature width mismatch at row '" + r.id + "'");
    if (!ids.insert(r.id).second) throw Error("duplicate row id '" + r.id + "'");
    for (double v : r.x) {
      if (!std::isfinite(v))
        throw Error("non-finite feature in row '" + r.id + "'");
    }
    if (!std::isfinite(r.y))
      throw Error("non-finite target in row '" + r.id + "'");
  }
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error("train fraction must lie strictly between 0 and 1");
  const std::size_t n = ds.rows.size();
  if (n < 2) throw Error("too few rows to split");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  shuffle_det(order, rng);

  auto train_n = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(n)));
  train_n = std::clamp<std::size_t>(train_n, 1, n - 1);

  Dataset train, valid;
  train.target_name = valid.target_name = ds.target_name;
  for (std::size_t i = 0; i < n; ++i) {
    (i < train_n ? train : valid).rows.push_back(ds.rows[order[i]]);
  }
  return {std::move(train), std::move(valid)};
}

void save_dataset_csv(const Dataset& ds, const std::filesystem::path& path) {
  if (ds.dim() != kNumFeatures)
    throw Error("dataset CSV export requires the circuit feature schema");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "circuit_id";
  for (const char* name : kFeatureNames) out << ',' << name;
  out << ',' << ds.target_name << '\n';
  for (const DataRow& r : ds.rows) {
    out << r.id;
    for (double v : r.x) out << ',' << detail::format_double(v);
    out << ',' << detail::format_double(r.y) << '\n';
  }
}

Dataset load_dataset_csv(const std::filesystem::path& path,
                         const std::string& target_name) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error("empty dataset file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_csv_line(line);

  std::vector<std::size_t> col(kNumFeatures);
  auto find_col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw Error("missing column '" + name + "' in " + path.string());
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t id_col = find_col("circuit_id");
  for (std::size_t i = 0; i < kNumFeatures; ++i) col[i] = find_col(kFeatureNames[i]);
  const std::size_t target_col = find_col(target_name);

  Dataset ds;
  ds.target_name = target_name;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw Error("wrong cell count on line " + std::to_string(line_no));
    const std::string ctx = path.string() + ":" + std::to_string(line_no);
    DataRow row;
    row.id = cells[id_col];
    row.x.reserve(kNumFeatures);
    for (std::size_t i = 0; i < kNumFeatures; ++i)
      row.x.push_back(detail::parse_double(cells[col[i]], ctx));
    row.y = detail::parse_double(cells[target_col], ctx);
    ds.rows.push_back(std::move(row));
  }
  ds.validate();
  return ds;
}

}  // namespace axdse
