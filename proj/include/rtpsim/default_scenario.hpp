#pragma once

#include <string>
#include <vector>

#include "rtpsim/scenario.hpp"

namespace rtpsim {

// The built-in benchmark scenario: one priced feeder node, 20 interruptible
// clusters, 10 sensitivity candidates, 64 candidate prices, and 10 daily
// targets. Every table is constructed from fixed dyadic constants so that
// structurally blind candidates produce bit-identical load moments, and the
// constructor cross-checks the separation/safety geometry the simulation
// depends on (throwing ConfigError when any check fails).
struct default_bundle {
  scenario_data data;

  std::vector<int> deck_ids;     // prices safe at level 1-mu under EVERY candidate
  std::vector<int> optimum_ids;  // per target id (1-based order), the optimum price id
  int a_probe_id = 0;   // deep slot-2 discount; separates slot-1/2 trade-offs
  int b_probe_id = 0;   // deep slot-4 discount; separates slot-3/4 trade-offs
  int spike_a_id = 0;   // source shape of target 9
  int spike_b_id = 0;   // source shape of target 10
  int fallback_id = 0;  // the demand-minimizing broadcast
};

// Builds the bundle in memory and validates it.
default_bundle make_default_bundle();

// Writes the same tables as a loadable data set in `dir`: network.csv,
// network37.csv, clusters.csv, prices.csv, targets.csv, thetas.csv, plus two
// ready-to-run scenario files (acceptance.scn, demo.scn). Regenerating over an
// existing copy is byte-identical.
void write_default_bundle(const std::string& dir);

}  // namespace rtpsim
