#include "axdse/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "csv_util.hpp"

namespace axdse {

namespace {

void check_dims(std::span<const Point> points) {
  if (points.empty()) throw Error("empty point set");
  const std::size_t d = points.front().objectives.size();
  std::unordered_set<std::string> ids;
  for (const Point& p : points) {
    if (p.objectives.size() != d)
      throw Error("dimension mismatch at point '" + p.id + "'");
    if (!ids.insert(p.id).second) throw Error("duplicate point id '" + p.id + "'");
  }
}

bool lex_less(const Point& a, const Point& b) {
  if (a.objectives != b.objectives) return a.objectives < b.objectives;
  return a.id < b.id;
}

}  // namespace

std::vector<std::string> Front::ids() const {
  std::vector<std::string> out;
  out.reserve(points.size());
  for (const Point& p : points) out.push_back(p.id);
  return out;
}

bool dominates(const Point& a, const Point& b) {
  if (a.objectives.size() != b.objectives.size())
    throw Error("dimension mismatch between '" + a.id + "' and '" + b.id + "'");
  bool strict = false;
  for (std::size_t i = 0; i < a.objectives.size(); ++i) {
    if (a.objectives[i] > b.objectives[i]) return false;
    if (a.objectives[i] < b.objectives[i]) strict = true;
  }
  return strict;
}

Front pareto_front(std::span<const Point> points) {
  check_dims(points);
  // In lexicographic order a dominator always precedes anything it dominates,
  // so each point only needs to be checked against already accepted ones.
  std::vector<const Point*> sorted;
  sorted.reserve(points.size());
  for (const Point& p : points) sorted.push_back(&p);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Point* a, const Point* b) { return lex_less(*a, *b); });

  Front front;
  for (const Point* p : sorted) {
    bool dominated = false;
    for (const Point& q : front.points) {
      if (dominates(q, *p)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) front.points.push_back(*p);
  }
  return front;
}

std::vector<Front> peel_fronts(std::span<const Point> points, int m) {
  if (m < 1) throw Error("front count must be at least 1");
  check_dims(points);
  std::vector<Point> remaining(points.begin(), points.end());
  std::vector<Front> fronts;
  for (int level = 1; level <= m && !remaining.empty(); ++level) {
    Front f = pareto_front(remaining);
    f.level = level;
    std::unordered_set<std::string> taken;
    for (const Point& p : f.points) taken.insert(p.id);
    std::erase_if(remaining, [&](const Point& p) { return taken.count(p.id) > 0; });
    fronts.push_back(std::move(f));
  }
  return fronts;
}

std::vector<Point> union_fronts(std::span<const Front> fronts) {
  std::vector<Point> out;
  std::unordered_set<std::string> seen;
  for (const Front& f : fronts) {
    for (const Point& p : f.points) {
      if (seen.insert(p.id).second) out.push_back(p);
    }
  }
  return out;
}

namespace {

// -1, 0, +1 three-way relation with relative-eps equality.
int relation(double a, double b, double eps) {
  if (a == b) return 0;
  if (std::abs(a - b) <= eps * std::max(std::abs(a), std::abs(b))) return 0;
  return a < b ? -1 : 1;
}

}  // namespace

double fidelity(const std::map<std::string, double>& est,
                const std::map<std::string, double>& mes, double eps) {
  if (est.empty()) throw Error("fidelity over an empty set");
  if (est.size() != mes.size()) throw Error("fidelity id sets differ in size");
  std::vector<double> e, m;
  e.reserve(est.size());
  m.reserve(mes.size());
  for (const auto& [id, value] : est) {
    const auto it = mes.find(id);
    if (it == mes.end()) throw Error("fidelity id sets differ at '" + id + "'");
    e.push_back(value);
    m.push_back(it->second);
  }
  const std::size_t n = e.size();
  std::uint64_t agree = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      agree += relation(e[i], e[j], eps) == relation(m[i], m[j], eps);
    }
  }
  return static_cast<double>(agree) / (static_cast<double>(n) * static_cast<double>(n));
}

double coverage(const std::vector<std::string>& found, const Front& true_front) {
  if (true_front.points.empty()) throw Error("coverage against an empty front");
  std::unordered_set<std::string> have(found.begin(), found.end());
  std::size_t hit = 0;
  for (const Point& p : true_front.points) hit += have.count(p.id);
  return static_cast<double>(hit) / static_cast<double>(true_front.points.size());
}

double hypervolume2d(const Front& front, const Point& reference) {
  if (reference.objectives.size() != 2)
    throw Error("hypervolume2d expects a 2-D reference point");
  if (front.points.empty()) return 0.0;
  std::vector<const Point*> sorted;
  for (const Point& p : front.points) {
    if (p.objectives.size() != 2) throw Error("hypervolume2d expects 2-D points");
    if (p.objectives[0] > reference.objectives[0] ||
        p.objectives[1] > reference.objectives[1])
      throw Error("front point '" + p.id + "' lies beyond the reference point");
    sorted.push_back(&p);
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const Point* a, const Point* b) {
    return a->objectives[0] < b->objectives[0];
  });
  double area = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double x = sorted[i]->objectives[0];
    const double y = sorted[i]->objectives[1];
    const double next_x =
        i + 1 < sorted.size() ? sorted[i + 1]->objectives[0] : reference.objectives[0];
    area += (next_x - x) * (reference.objectives[1] - y);
  }
  return area;
}

void save_front_csv(const Front& front, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const std::size_t d =
      front.points.empty() ? 2 : front.points.front().objectives.size();
  out << "id";
  for (std::size_t i = 1; i <= d; ++i) out << ",obj" << i;
  out << ",level\n";
  for (const Point& p : front.points) {
    out << p.id;
    for (double v : p.objectives) out << ',' << detail::format_double(v);
    out << ',' << front.level << '\n';
  }
}

}  // namespace axdse
