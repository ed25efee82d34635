#include "rtpsim/grid.hpp"

#include <algorithm>
#include <deque>

#include "rtpsim/errors.hpp"

namespace rtpsim {

namespace {

// Collect the line ids (== node ids) on the path from `node` up to the root.
std::vector<int> root_path(const network& net, int node) {
  std::vector<int> path;
  int cur = node;
  while (cur != 0) {
    path.push_back(cur);
    cur = net.parent[cur];
  }
  return path;
}

}  // namespace

double network::common_path_2r(int node_a, int node_b) const {
  std::vector<int> pa = root_path(*this, node_a);
  std::vector<int> pb = root_path(*this, node_b);
  double acc = 0.0;
  for (int la : pa) {
    if (std::find(pb.begin(), pb.end(), la) != pb.end()) {
      acc += 2.0 * lines[la - 1].r_ohm;
    }
  }
  return acc;
}

double network::common_path_2x(int node_a, int node_b) const {
  std::vector<int> pa = root_path(*this, node_a);
  std::vector<int> pb = root_path(*this, node_b);
  double acc = 0.0;
  for (int la : pa) {
    if (std::find(pb.begin(), pb.end(), la) != pb.end()) {
      acc += 2.0 * lines[la - 1].x_ohm;
    }
  }
  return acc;
}

network network::from_document(const csv_document& doc,
                               const std::string& origin) {
  const auto& header = doc.rows.front();
  if (header.empty() || header[0] != "line_index") {
    throw_error(errc::parse_error,
                origin + ": expected header starting with 'line_index'");
  }
  auto v0 = comment_value(doc, "v0_volts");
  if (!v0) {
    throw_error(errc::parse_error, origin + ": missing '#v0_volts=' comment");
  }

  network net;
  net.v0_volts = cell_as_double(*v0, origin + " v0_volts");
  if (net.v0_volts <= 0.0) {
    throw_error(errc::parse_error, origin + ": v0_volts must be positive");
  }

  std::vector<line_params> parsed;
  int max_node = 0;
  for (std::size_t r = 1; r < doc.rows.size(); ++r) {
    const auto& row = doc.rows[r];
    const std::string ctx = origin + " row " + std::to_string(r + 1);
    if (row.size() != 6) {
      throw_error(errc::parse_error, ctx + ": expected 6 columns");
    }
    line_params lp;
    lp.index = static_cast<int>(cell_as_long(row[0], ctx + " line_index"));
    lp.parent = static_cast<int>(cell_as_long(row[1], ctx + " parent_node"));
    lp.child = static_cast<int>(cell_as_long(row[2], ctx + " child_node"));
    lp.r_ohm = cell_as_double(row[3], ctx + " R_ohm");
    lp.x_ohm = cell_as_double(row[4], ctx + " X_ohm");
    lp.s_max_kva = cell_as_double(row[5], ctx + " Smax_kVA");
    if (lp.index < 1) {
      throw_error(errc::parse_error, ctx + ": line_index must be >= 1");
    }
    if (lp.child != lp.index) {
      throw_error(errc::parse_error,
                  ctx + ": line i must feed node i (child_node == line_index)");
    }
    if (lp.parent == lp.child) {
      throw_error(errc::cycle_detected,
                  ctx + ": line's parent equals its child");
    }
    if (lp.r_ohm <= 0.0 || lp.x_ohm <= 0.0 || lp.s_max_kva <= 0.0) {
      throw_error(errc::non_positive_impedance,
                  ctx + ": R, X and Smax must be positive");
    }
    max_node = std::max({max_node, lp.index, lp.parent});
    parsed.push_back(lp);
  }

  net.node_count = max_node;
  net.lines.assign(max_node, line_params{});
  std::vector<bool> seen(max_node + 1, false);
  for (const line_params& lp : parsed) {
    if (seen[lp.index]) {
      throw_error(errc::duplicate_line,
                  origin + ": duplicate line " + std::to_string(lp.index));
    }
    seen[lp.index] = true;
    net.lines[lp.index - 1] = lp;
  }
  for (int i = 1; i <= max_node; ++i) {
    if (!seen[i]) {
      throw_error(errc::disconnected_node,
                  origin + ": node " + std::to_string(i) + " has no feeding line");
    }
  }

  net.parent.assign(max_node + 1, -1);
  net.children.assign(max_node + 1, {});
  for (const line_params& lp : net.lines) {
    if (lp.parent < 0 || lp.parent > max_node) {
      throw_error(errc::parse_error,
                  origin + ": line " + std::to_string(lp.index) +
                      " references unknown parent " + std::to_string(lp.parent));
    }
    net.parent[lp.child] = lp.parent;
    net.children[lp.parent].push_back(lp.child);
  }
  for (auto& kids : net.children) std::sort(kids.begin(), kids.end());

  // Breadth-first sweep from the substation; anything unreached sits on a
  // cycle (every node has exactly one parent, so an unreached node's whole
  // ancestor chain is unreached too).
  net.topo_order.clear();
  std::deque<int> queue(net.children[0].begin(), net.children[0].end());
  std::vector<bool> reached(max_node + 1, false);
  reached[0] = true;
  while (!queue.empty()) {
    int n = queue.front();
    queue.pop_front();
    reached[n] = true;
    net.topo_order.push_back(n);
    for (int c : net.children[n]) queue.push_back(c);
  }
  for (int i = 1; i <= max_node; ++i) {
    if (!reached[i]) {
      throw_error(errc::cycle_detected,
                  origin + ": node " + std::to_string(i) +
                      " is not reachable from the substation");
    }
  }

  // Subtree membership per line: node k is fed through line i exactly when i
  // lies on k's root path.
  net.subtree.assign(max_node, {});
  for (int k = 1; k <= max_node; ++k) {
    int cur = k;
    while (cur != 0) {
      net.subtree[cur - 1].push_back(k);
      cur = net.parent[cur];
    }
  }
  for (auto& s : net.subtree) std::sort(s.begin(), s.end());

  return net;
}

network network::from_csv_file(const std::string& path) {
  return from_document(read_csv_file(path), path);
}

flow_solution solve_lindistflow(const network& net,
                                const demand_schedule& demand) {
  const int n = net.node_count;
  const int slots = demand.slots;
  if (static_cast<int>(demand.active.size()) != n) {
    throw_error(errc::dimension_mismatch,
                "active demand rows != node count");
  }
  for (const auto& row : demand.active) {
    if (static_cast<int>(row.size()) != slots) {
      throw_error(errc::dimension_mismatch, "active demand row length != slots");
    }
  }
  const bool has_q = !demand.reactive.empty();
  if (has_q) {
    if (static_cast<int>(demand.reactive.size()) != n) {
      throw_error(errc::dimension_mismatch,
                  "reactive demand rows != node count");
    }
    for (const auto& row : demand.reactive) {
      if (static_cast<int>(row.size()) != slots) {
        throw_error(errc::dimension_mismatch,
                    "reactive demand row length != slots");
      }
    }
  }

  flow_solution sol;
  sol.flow_p.assign(n, std::vector<double>(slots, 0.0));
  sol.flow_q.assign(n, std::vector<double>(slots, 0.0));
  sol.u.assign(n + 1, std::vector<double>(slots, net.v0_volts * net.v0_volts));

  // Upward accumulation: flow on line i = demand at node i plus the flows on
  // all child lines (leaf-to-root order).
  for (auto it = net.topo_order.rbegin(); it != net.topo_order.rend(); ++it) {
    const int i = *it;
    for (int t = 0; t < slots; ++t) {
      double fp = demand.active[i - 1][t];
      double fq = has_q ? demand.reactive[i - 1][t] : 0.0;
      for (int c : net.children[i]) {
        fp += sol.flow_p[c - 1][t];
        fq += sol.flow_q[c - 1][t];
      }
      sol.flow_p[i - 1][t] = fp;
      sol.flow_q[i - 1][t] = fq;
    }
  }

  // Root-to-leaf telescoping of squared voltage:
  //   u_i = u_parent - 2 (R_i f^P_i + X_i f^Q_i), flows converted kW -> W.
  for (int i : net.topo_order) {
    const line_params& lp = net.lines[i - 1];
    for (int t = 0; t < slots; ++t) {
      sol.u[i][t] = sol.u[lp.parent][t] -
                    2.0 * (lp.r_ohm * sol.flow_p[i - 1][t] +
                           lp.x_ohm * sol.flow_q[i - 1][t]) *
                        1000.0;
    }
  }
  return sol;
}

constraint_limits constraint_limits::voltage_band(double v0_volts,
                                                  double low_frac,
                                                  double high_frac) {
  constraint_limits lim;
  lim.u_min_v2 = (low_frac * v0_volts) * (low_frac * v0_volts);
  lim.u_max_v2 = (high_frac * v0_volts) * (high_frac * v0_volts);
  return lim;
}

violation_report check_constraints(const flow_solution& sol, const network& net,
                                   const constraint_limits& limits) {
  violation_report rep;
  const int n = net.node_count;
  const int slots = sol.u.empty() ? 0 : static_cast<int>(sol.u[0].size());
  if (static_cast<int>(sol.u.size()) != n + 1 ||
      static_cast<int>(sol.flow_p.size()) != n ||
      static_cast<int>(sol.flow_q.size()) != n) {
    throw_error(errc::dimension_mismatch, "solution does not match network");
  }
  for (int i = 1; i <= n; ++i) {
    for (int t = 0; t < slots; ++t) {
      const double u = sol.u[i][t];
      if (u < limits.u_min_v2) {
        rep.items.push_back(
            {violation_kind::voltage_low, i, t, u, limits.u_min_v2});
        ++rep.voltage_low_count;
      } else if (u > limits.u_max_v2) {
        rep.items.push_back(
            {violation_kind::voltage_high, i, t, u, limits.u_max_v2});
        ++rep.voltage_high_count;
      }
    }
  }
  for (int i = 1; i <= n; ++i) {
    const double cap = net.lines[i - 1].s_max_kva;
    const double cap2 = cap * cap;
    for (int t = 0; t < slots; ++t) {
      const double fp = sol.flow_p[i - 1][t];
      const double fq = sol.flow_q[i - 1][t];
      const double s2 = fp * fp + fq * fq;
      if (s2 > cap2) {
        rep.items.push_back({violation_kind::flow_limit, i, t, s2, cap2});
        ++rep.flow_count;
      }
    }
  }
  return rep;
}

}  // namespace rtpsim
