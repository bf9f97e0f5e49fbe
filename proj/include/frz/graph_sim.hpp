#pragma once

#include <cstdint>
#include <vector>

#include "frz/rng.hpp"

namespace frz {

// Discrete frozen random graph on n vertices: a stream of uniform random
// edges (self-loops and repeats allowed) is examined one at a time.
// An edge inside a tree freezes that component; an edge between two trees
// merges them; an edge touching two frozen components is discarded; an
// edge between a tree and a frozen component is kept (merging into a
// frozen component) with probability p, else discarded. A classical
// multigraph tracker consumes the identical edge stream with no discards,
// counting surplus edges per component.

enum class TransitionKind {
  TreeTreeMerge,
  TreeCycleFreeze,
  FrozenFrozenDiscard,
  TreeFrozenKept,
  TreeFrozenDiscarded,
};

struct GraphObservables {
  std::vector<std::int64_t> frozen_sizes;    // descending, ties by min id
  std::vector<std::int64_t> standard_sizes;  // descending, ties by min id
  double frozen_mass_rescaled = 0.0;         // frozen_vertices / n^{2/3}
  std::int64_t discarded = 0;
};

struct ClassicalObservables {
  std::int64_t surplus_vertices = 0;  // vertices in components with surplus
  std::vector<std::int64_t> classical_sizes;  // descending, ties by min id
};

class GraphState {
 public:
  GraphState(std::int64_t n, double p, std::uint64_t seed);

  std::int64_t n() const { return n_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }
  std::int64_t m() const { return m_; }
  std::int64_t frozen_vertices() const { return frozen_vertices_; }
  std::int64_t discarded() const { return discarded_; }
  std::int64_t surplus_vertices() const { return surplus_vertices_; }

  // Component root and record access (used by observables and tests).
  std::int32_t find(std::int32_t v);
  std::int32_t find_classical(std::int32_t v);
  bool is_frozen_root(std::int32_t root) const { return frozen_[root]; }
  std::int64_t size_of_root(std::int32_t root) const { return size_[root]; }
  std::int64_t kept_edges_of_root(std::int32_t root) const {
    return kept_[root];
  }
  std::int64_t classical_size_of_root(std::int32_t root) const {
    return c_size_[root];
  }
  std::int64_t classical_surplus_of_root(std::int32_t root) const {
    return c_surplus_[root];
  }

  // Draws the m-th edge and uniform mark from the counter stream and
  // applies one transition. The stream is a pure function of (seed, m).
  TransitionKind apply_edge();

  // Applies a caller-supplied edge and mark instead of drawing them; the
  // bookkeeping is identical (m advances). Intended for scripted tests.
  TransitionKind apply_edge_with(std::int32_t a, std::int32_t b, double u);

 private:
  std::int64_t n_;
  double p_;
  std::uint64_t seed_;
  std::int64_t m_ = 0;
  std::int64_t frozen_vertices_ = 0;
  std::int64_t discarded_ = 0;
  std::int64_t surplus_vertices_ = 0;

  // Frozen-graph union-find (union by size, path compression).
  std::vector<std::int32_t> parent_;
  std::vector<std::int64_t> size_;
  std::vector<std::int64_t> kept_;  // kept edges inside the component
  std::vector<std::uint8_t> frozen_;

  // Classical multigraph union-find over the same edge stream.
  std::vector<std::int32_t> c_parent_;
  std::vector<std::int64_t> c_size_;
  std::vector<std::int64_t> c_surplus_;
};

GraphState init_graph(std::int64_t n, double p, std::uint64_t seed);

TransitionKind apply_edge(GraphState& state);

// Critical-window edge count m(t) = floor(n/2 + (t/2) n^{2/3}), clamped at 0.
std::int64_t edges_for_time(std::int64_t n, double t);

// Advances the state to exactly edges_for_time(n, t) examined edges.
// Throws ordering_error if that target lies behind the current m.
void run_to_time(GraphState& state, double t);

GraphObservables observables(GraphState& state);
ClassicalObservables coupled_classical_observables(GraphState& state);

}  // namespace frz
