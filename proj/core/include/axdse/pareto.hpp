#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "axdse/error.hpp"

namespace axdse {

// Objective vector under minimization.
struct Point {
  std::string id;
  std::vector<double> objectives;
};

// Non-dominated set, sorted ascending by first objective (objective/id
// lexicographic order as tie-break). level records which peel produced it.
struct Front {
  std::vector<Point> points;
  int level = 1;

  std::size_t size() const { return points.size(); }
  std::vector<std::string> ids() const;
};

// True iff a <= b componentwise with strict < in at least one component.
bool dominates(const Point& a, const Point& b);

Front pareto_front(std::span<const Point> points);

// F1 = front(C), F2 = front(C \ F1), ... up to m fronts or exhaustion.
std::vector<Front> peel_fronts(std::span<const Point> points, int m);

// Id-deduplicated union; first occurrence wins.
std::vector<Point> union_fronts(std::span<const Front> fronts);

// Fraction of ordered pairs (self-pairs included) whose <,>,= relation under
// est matches the relation under mes. Values within relative eps compare
// equal. Both maps must cover the same non-empty id set.
double fidelity(const std::map<std::string, double>& est,
                const std::map<std::string, double>& mes, double eps = 1e-9);

// |found ∩ ids(true_front)| / |true_front|.
double coverage(const std::vector<std::string>& found, const Front& true_front);

// Area dominated between a 2-D front and a reference point (all points must
// be componentwise <= reference).
double hypervolume2d(const Front& front, const Point& reference);

// CSV export: id,obj1,obj2[,...],level.
void save_front_csv(const Front& front, const std::filesystem::path& path);

}  // namespace axdse
