#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace frz {

// One emitted observation. `time` doubles as the experiment's abscissa
// (process time, grid location, or parameter value, depending on the
// experiment); it is 0 when unused.
struct ResultRow {
  std::uint64_t replica = 0;
  double time = 0.0;
  std::string observable;
  double value = 0.0;
};

// Pass iff lo <= value <= hi and value is finite. One-sided bounds use
// +-infinity on the open side.
struct Verdict {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

struct ExperimentResult {
  std::string name;
  std::string config_echo;  // canonical JSON with defaults filled in
  std::uint64_t seed = 0;
  std::vector<ResultRow> rows;
  std::vector<Verdict> verdicts;

  bool all_pass() const;
};

// Runs one named experiment:
//   theorem1        linear growth of the limit process, deviation trend
//   stationarity-p0 stationary law of X_0(t) - t: KS stability + cubic tail
//   discrete-limit  rescaled frozen graph vs the limit process at fixed t
//   coupling-p1     frozen graph / classical graph coupling identities
//   lyapunov        drift condition A V <= -a V + b 1_C on a grid
//   lemma-suite     density, ratio, Airy, and kernel-integral inequalities
// The config supplies sizes and seeds; pass/fail thresholds are fixed
// constants of each experiment. Unknown names, unknown keys, or out-of-range
// values throw config_error. Replicas fan out across FRZ_THREADS workers
// (default 1); the row order is independent of the worker count.
ExperimentResult run_experiment(const std::string& name,
                                const nlohmann::json& config);

// Writes `name,seed,replica,time,observable,value` CSV (doubles at 15
// significant digits) plus `<out>.meta.json` with the config echo, toolkit
// version, and verdicts. Identical results produce byte-identical files.
void write_results(const ExperimentResult& result, const std::string& out);

}  // namespace frz
