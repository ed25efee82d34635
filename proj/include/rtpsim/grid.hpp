#pragma once

#include <string>
#include <vector>

#include "rtpsim/csv.hpp"

namespace rtpsim {

// One distribution line. By convention line i is the unique line directly
// upstream of node i, so node ids and line ids coincide (1..N); node 0 is the
// substation root.
struct line_params {
  int index = 0;        // line id == fed node id
  int parent = 0;       // upstream node id (0 = substation)
  int child = 0;        // downstream node id (== index)
  double r_ohm = 0.0;   // series resistance, ohms
  double x_ohm = 0.0;   // series reactance, ohms
  double s_max_kva = 0.0;  // apparent-power limit, kVA
};

// Rooted radial network. Powers are carried in kW/kvar at the API boundary;
// voltage math runs in SI (W, ohm, V^2) internally.
struct network {
  int node_count = 0;  // N, excluding the root
  double v0_volts = 0.0;
  std::vector<line_params> lines;          // lines[i-1] feeds node i
  std::vector<int> parent;                 // parent[i], i in 1..N; parent[0] = -1
  std::vector<std::vector<int>> children;  // children[i], i in 0..N
  std::vector<int> topo_order;             // parents before children, root excluded
  std::vector<std::vector<int>> subtree;   // subtree[i-1]: nodes fed through line i

  // Sum over lines common to both nodes' root paths of 2*R (resp. 2*X), in
  // ohms. These are the coefficients that make squared voltage affine in the
  // nodal demands: u_a = v0^2 - sum_k coeff(a,k) * d_k[W] (active part).
  double common_path_2r(int node_a, int node_b) const;
  double common_path_2x(int node_a, int node_b) const;

  static network from_document(const csv_document& doc,
                               const std::string& origin);
  static network from_csv_file(const std::string& path);
};

// Nodal demand schedule, kW / kvar, indexed [node-1][slot].
struct demand_schedule {
  int slots = 0;
  std::vector<std::vector<double>> active;
  std::vector<std::vector<double>> reactive;  // empty means all-zero
};

// Line flows (kW / kvar, [line-1][slot]) and squared voltages (V^2,
// [node][slot] with row 0 = substation).
struct flow_solution {
  std::vector<std::vector<double>> flow_p;
  std::vector<std::vector<double>> flow_q;
  std::vector<std::vector<double>> u;
};

flow_solution solve_lindistflow(const network& net,
                                const demand_schedule& demand);

struct constraint_limits {
  double u_min_v2 = 0.0;
  double u_max_v2 = 0.0;

  // Default service band: +/-5% around a nominal voltage.
  static constraint_limits voltage_band(double v0_volts,
                                        double low_frac = 0.95,
                                        double high_frac = 1.05);
};

enum class violation_kind { voltage_low, voltage_high, flow_limit };

struct violation {
  violation_kind kind;
  int entity;  // node id for voltage, line id for flow
  int slot;    // 0-based
  double value;
  double limit;
};

struct violation_report {
  std::vector<violation> items;
  int voltage_low_count = 0;
  int voltage_high_count = 0;
  int flow_count = 0;
  bool empty() const { return items.empty(); }
  int total() const {
    return voltage_low_count + voltage_high_count + flow_count;
  }
};

// Non-strict limits: a value exactly on the boundary is not a violation.
violation_report check_constraints(const flow_solution& sol, const network& net,
                                   const constraint_limits& limits);

}  // namespace rtpsim
