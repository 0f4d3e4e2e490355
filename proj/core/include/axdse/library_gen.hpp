#pragma once

#include <cstdint>
#include <vector>

#include "axdse/netlist.hpp"

namespace axdse {

// Removes gates not reachable from any output and renumbers nets; relative
// gate order (hence topological order) is preserved.
Netlist eliminate_dead_gates(const Netlist& nl);

// Synthesis-style cleanup: folds constant fan-ins through gate truth tables,
// collapses buffers and same-fan-in gates, then drops dead logic. Function
// preserving; a fixpoint of the rules (the pass leaves constant-free
// circuits untouched).
Netlist simplify(const Netlist& nl);

// Generates `count` structurally distinct variants of `base` by stacking
// seeded mutations: output truncation, gate-to-constant replacement,
// gate-type substitution (XOR<->OR, AND->BUF of first fan-in) and subtree
// pruning, each followed by the simplify() cleanup. Element 0 is always the
// unmodified base. Deterministic per (base, count, seed); mutations that
// would leave every output constant are rejected and resampled.
std::vector<Netlist> gen_library(const Netlist& base, std::size_t count,
                                 std::uint64_t seed);

}  // namespace axdse
