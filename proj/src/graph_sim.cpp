#include "frz/graph_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frz/errors.hpp"

namespace frz {

namespace {

// n^{2/3} with exact handling of perfect cubes, so that integer-critical
// window targets like n = 1000, t = 2 -> m = 600 come out exactly.
double two_thirds_power(std::int64_t n) {
  double cr = std::cbrt(static_cast<double>(n));
  const double r = std::nearbyint(cr);
  if (r * r * r == static_cast<double>(n)) cr = r;
  return cr * cr;
}

}  // namespace

GraphState::GraphState(std::int64_t n, double p, std::uint64_t seed)
    : n_(n), p_(p), seed_(seed) {
  if (n < 1 || n > std::numeric_limits<std::int32_t>::max() - 1)
    throw config_error("init_graph: n must be in [1, 2^31-2]");
  if (!(p >= 0.0 && p <= 1.0))
    throw config_error("init_graph: p must lie in [0, 1]");
  parent_.resize(n + 1);
  size_.assign(n + 1, 1);
  kept_.assign(n + 1, 0);
  frozen_.assign(n + 1, 0);
  c_parent_.resize(n + 1);
  c_size_.assign(n + 1, 1);
  c_surplus_.assign(n + 1, 0);
  for (std::int32_t v = 0; v <= n; ++v) parent_[v] = v, c_parent_[v] = v;
}

std::int32_t GraphState::find(std::int32_t v) {
  std::int32_t root = v;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[v] != root) {
    const std::int32_t next = parent_[v];
    parent_[v] = root;
    v = next;
  }
  return root;
}

std::int32_t GraphState::find_classical(std::int32_t v) {
  std::int32_t root = v;
  while (c_parent_[root] != root) root = c_parent_[root];
  while (c_parent_[v] != root) {
    const std::int32_t next = c_parent_[v];
    c_parent_[v] = root;
    v = next;
  }
  return root;
}

TransitionKind GraphState::apply_edge() {
  // Per-edge substream: endpoint draws use rejection sampling, so each
  // edge gets its own counter-derived generator to keep the (edge, mark)
  // stream a pure function of (seed, m).
  rng r(splitmix64_at(seed_, static_cast<std::uint64_t>(m_)));
  const auto a = static_cast<std::int32_t>(
      1 + r.next_below(static_cast<std::uint64_t>(n_)));
  const auto b = static_cast<std::int32_t>(
      1 + r.next_below(static_cast<std::uint64_t>(n_)));
  const double u = r.next_u01_open0();
  return apply_edge_with(a, b, u);
}

TransitionKind GraphState::apply_edge_with(std::int32_t a, std::int32_t b,
                                           double u) {
  if (a < 1 || a > n_ || b < 1 || b > n_)
    throw config_error("apply_edge_with: endpoint outside [1, n]");
  ++m_;

  // Classical tracker processes every edge: merge or surplus increment.
  {
    const std::int32_t ra = find_classical(a);
    const std::int32_t rb = find_classical(b);
    if (ra == rb) {
      if (c_surplus_[ra] == 0) surplus_vertices_ += c_size_[ra];
      ++c_surplus_[ra];
    } else {
      std::int32_t big = ra, small = rb;
      if (c_size_[big] < c_size_[small]) std::swap(big, small);
      if (c_surplus_[big] > 0 && c_surplus_[small] == 0)
        surplus_vertices_ += c_size_[small];
      else if (c_surplus_[small] > 0 && c_surplus_[big] == 0)
        surplus_vertices_ += c_size_[big];
      c_parent_[small] = big;
      c_size_[big] += c_size_[small];
      c_surplus_[big] += c_surplus_[small];
    }
  }

  const std::int32_t ra = find(a);
  const std::int32_t rb = find(b);

  if (ra == rb) {
    if (frozen_[ra]) {
      ++discarded_;
      return TransitionKind::FrozenFrozenDiscard;
    }
    frozen_[ra] = 1;
    frozen_vertices_ += size_[ra];
    ++kept_[ra];
    return TransitionKind::TreeCycleFreeze;
  }

  const bool fa = frozen_[ra] != 0;
  const bool fb = frozen_[rb] != 0;
  if (fa && fb) {
    ++discarded_;
    return TransitionKind::FrozenFrozenDiscard;
  }

  auto merge = [this](std::int32_t x, std::int32_t y) {
    std::int32_t big = x, small = y;
    if (size_[big] < size_[small]) std::swap(big, small);
    parent_[small] = big;
    size_[big] += size_[small];
    kept_[big] += kept_[small] + 1;
    frozen_[big] = frozen_[big] | frozen_[small];
    return big;
  };

  if (!fa && !fb) {
    merge(ra, rb);
    return TransitionKind::TreeTreeMerge;
  }

  // One tree, one frozen: kept with probability p via the uniform mark.
  if (u <= p_) {
    const std::int64_t tree_size = fa ? size_[rb] : size_[ra];
    merge(ra, rb);
    frozen_vertices_ += tree_size;
    return TransitionKind::TreeFrozenKept;
  }
  ++discarded_;
  return TransitionKind::TreeFrozenDiscarded;
}

GraphState init_graph(std::int64_t n, double p, std::uint64_t seed) {
  return GraphState(n, p, seed);
}

TransitionKind apply_edge(GraphState& state) { return state.apply_edge(); }

std::int64_t edges_for_time(std::int64_t n, double t) {
  const double raw =
      0.5 * static_cast<double>(n) + 0.5 * t * two_thirds_power(n);
  if (raw <= 0.0) return 0;
  return static_cast<std::int64_t>(std::floor(raw));
}

void run_to_time(GraphState& state, double t) {
  const std::int64_t target = edges_for_time(state.n(), t);
  if (target < state.m())
    throw ordering_error(
        "run_to_time: target edge count lies before the current state "
        "(the process cannot rewind)");
  while (state.m() < target) state.apply_edge();
}

namespace {

// Collect (size, min vertex id) per component; scanning v ascending makes
// the first visit to a root carry the component's minimal vertex id.
template <class FindFn, class KeepFn>
std::vector<std::int64_t> sorted_sizes(std::int64_t n, FindFn&& find,
                                       KeepFn&& keep) {
  std::vector<std::pair<std::int64_t, std::int32_t>> recs;
  std::vector<std::uint8_t> seen(n + 1, 0);
  for (std::int32_t v = 1; v <= n; ++v) {
    const std::int32_t root = find(v);
    if (seen[root]) continue;
    seen[root] = 1;
    if (auto sz = keep(root); sz > 0) recs.emplace_back(sz, v);
  }
  std::sort(recs.begin(), recs.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  });
  std::vector<std::int64_t> out;
  out.reserve(recs.size());
  for (const auto& rec : recs) out.push_back(rec.first);
  return out;
}

}  // namespace

GraphObservables observables(GraphState& state) {
  GraphObservables obs;
  obs.frozen_sizes = sorted_sizes(
      state.n(), [&](std::int32_t v) { return state.find(v); },
      [&](std::int32_t r) {
        return state.is_frozen_root(r) ? state.size_of_root(r) : 0;
      });
  obs.standard_sizes = sorted_sizes(
      state.n(), [&](std::int32_t v) { return state.find(v); },
      [&](std::int32_t r) {
        return state.is_frozen_root(r) ? 0 : state.size_of_root(r);
      });
  obs.frozen_mass_rescaled =
      static_cast<double>(state.frozen_vertices()) / two_thirds_power(state.n());
  obs.discarded = state.discarded();
  return obs;
}

ClassicalObservables coupled_classical_observables(GraphState& state) {
  ClassicalObservables obs;
  obs.surplus_vertices = state.surplus_vertices();
  obs.classical_sizes = sorted_sizes(
      state.n(), [&](std::int32_t v) { return state.find_classical(v); },
      [&](std::int32_t r) { return state.classical_size_of_root(r); });
  return obs;
}

}  // namespace frz
