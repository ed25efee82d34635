#include "rtpsim/default_scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "rtpsim/bandit.hpp"
#include "rtpsim/csv.hpp"
#include "rtpsim/errors.hpp"
#include "rtpsim/metrics.hpp"

namespace rtpsim {
namespace {

// ---------------------------------------------------------------------------
// Fixed constants. Everything price- or sensitivity-valued sits on a dyadic
// grid (multiples of 1/512) so products and the inner products theta . p are
// exact in binary floating point: candidates that are constructed to be
// indistinguishable at a price really produce bit-identical moments there.
// ---------------------------------------------------------------------------

constexpr int kSlots = 6;
constexpr double kDt = 4.0;

// Observation-model calibration constants. kSigma scales every per-day
// information increment (separation speed ~ 1/sigma^2); kSigmaObs keeps every
// slot's observation density proper even where no cluster can place load.
constexpr double kSigma = 0.4;
constexpr double kSigmaObs = 0.5;

constexpr double kMu = 0.1;
constexpr double kNu = 0.1;
constexpr double kV0 = 12500.0;
constexpr int kTrueThetaId = 4;

// Offset of the two near-confusable candidate pairs. All four sit at the same
// offset magnitude so their posterior decay rates match at the shared optima
// (the slot-2 and slot-4 reference entries are equal there by construction).
// The magnitude sets how long the belief takes to separate the pairs — the
// per-day evidence rate scales with its square — and is tuned so the 0.95
// concentration day lands mid-horizon on the shipped 365-day scenario.
constexpr double kSlowShift = 15.0 / 512.0;

[[noreturn]] void fail(const std::string& what) {
  throw_error(errc::config_error, "default scenario: " + what);
}

void check(bool ok, const std::string& what) {
  if (!ok) fail(what);
}

// ---------------------------------------------------------------------------
// Sensitivity candidates.
// ---------------------------------------------------------------------------

std::vector<double> base_theta() {
  return {1.0, 0.9375, 1.0625, 1.0, 0.875, 1.125};
}

// Moves theta[lead] up and theta[lead+1] down by the same amount: the
// candidate agrees with the base vector at every price whose entries in those
// two slots are equal, and disagrees exactly in proportion to their gap.
sensitivity_model shifted(int id, int lead, double amount) {
  sensitivity_model m;
  m.id = id;
  m.theta = base_theta();
  m.theta[static_cast<std::size_t>(lead)] += amount;
  m.theta[static_cast<std::size_t>(lead) + 1] -= amount;
  return m;
}

std::vector<sensitivity_model> make_thetas() {
  std::vector<sensitivity_model> t;
  t.push_back(shifted(1, 0, 0.75));         // coarse, slot-1/2 trade-off
  t.push_back(shifted(2, 2, 0.75));         // coarse, slot-3/4 trade-off
  t.push_back(shifted(3, 0, 0.875));        // coarse, slot-1/2
  sensitivity_model star;
  star.id = kTrueThetaId;
  star.theta = base_theta();
  t.push_back(star);                        // the true model
  t.push_back(shifted(5, 2, 0.875));        // coarse, slot-3/4
  t.push_back(shifted(6, 0, kSlowShift));   // near-confusable, slot-1/2
  t.push_back(shifted(7, 0, -kSlowShift));  // near-confusable, slot-1/2
  t.push_back(shifted(8, 2, kSlowShift));   // near-confusable, slot-3/4
  t.push_back(shifted(9, 2, -kSlowShift));  // near-confusable, slot-3/4
  t.push_back(shifted(10, 2, 0.8125));      // coarse, slot-3/4
  return t;
}

const int kAFarIds[] = {1, 3};          // coarse slot-1/2 candidates
const int kBFarIds[] = {2, 5, 10};      // coarse slot-3/4 candidates
const int kFarIds[] = {1, 2, 3, 5, 10};
const int kFamilyIds[] = {4, 6, 7, 8, 9};  // true model + near-confusables

// ---------------------------------------------------------------------------
// Clusters. Twenty interruptible clusters, each sized to fill exactly one
// slot at its power cap (energy = cap * dt), so every price routes a cluster's
// whole load into the cheapest slot of its window.
// ---------------------------------------------------------------------------

struct cluster_row {
  int id, t1, t2;
  double kw, beta;
};

const cluster_row kClusterRows[] = {
    {1, 1, 2, 8.75, 16.0},  {2, 1, 3, 9.0, 15.0},    {3, 1, 4, 9.0, 17.0},
    {4, 1, 5, 8.0, 14.0},   {5, 1, 6, 10.5, 20.0},   {6, 2, 3, 8.0, 15.0},
    {7, 2, 4, 9.5, 14.0},   {8, 2, 5, 9.5, 16.0},    {9, 2, 6, 9.0, 13.0},
    {10, 2, 6, 11.125, 16.0}, {11, 3, 4, 11.0, 18.0}, {12, 3, 5, 12.0, 17.0},
    {13, 3, 3, 12.5, 20.0}, {14, 3, 3, 11.25, 22.0}, {15, 3, 3, 14.5, 18.0},
    {16, 3, 3, 14.0, 19.0}, {17, 4, 5, 10.0, 15.0},  {18, 4, 6, 10.0, 15.0},
    {19, 5, 6, 10.0, 14.0}, {20, 5, 6, 10.0, 14.0},
};

std::vector<cluster_spec> make_clusters() {
  std::vector<cluster_spec> out;
  for (const cluster_row& r : kClusterRows) {
    cluster_spec c;
    c.id = r.id;
    c.kind = cluster_kind::interruptible;
    c.t1 = r.t1;
    c.t2 = r.t2;
    c.energy_kwh = r.kw * kDt;
    c.power_cap_kw = r.kw;
    c.beta = r.beta;
    c.validate(kSlots, kDt);
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Networks. The priced feeder is a single 900-kVA line from the substation to
// one load node; the line limit is the binding constraint throughout. The
// 37-node tree is a larger validation network for the solver and CLI and is
// not referenced by the shipped scenarios.
// ---------------------------------------------------------------------------

csv_document network_doc() {
  csv_document doc;
  doc.comments = {"# one-line feeder: substation to a single aggregated load node",
                  "# v0_volts=12500"};
  doc.rows = {
      {"line_index", "parent_node", "child_node", "R_ohm", "X_ohm", "Smax_kVA"},
      {"1", "0", "1", "0.0242", "0.0482", "900"},
  };
  return doc;
}

const int kParent37[37] = {0,  1,  2,  2,  4,  5,  6,  7,  7,  8,  8,  9, 10,
                           6,  14, 14, 15, 16, 16, 17, 5,  21, 21, 22, 23, 4,
                           26, 26, 27, 27, 29, 29, 30, 31, 32, 33, 34};
const double kR37[37] = {24.2,  227.3, 76.3,  43.6,  25.8,  10.5,  23.2,
                         75.1,  114.4, 110.8, 63.7,  278.7, 254.2, 21.8,
                         57.3,  126.7, 48.6,  95.1,  137.3, 129.5, 15.1,
                         50.8,  69.1,  31.6,  96.3,  110.7, 2.1,   242.1,
                         27.3,  174.6, 43.0,  207.8, 109.4, 50.5,  165.2,
                         49.5,  5.8};
const double kX37[37] = {48.2, 743.5, 18.2, 142.7, 84.4, 10.7, 23.6, 26.7,
                         27.3, 67.7,  22.7, 99.2,  108.5, 5.2, 20.4, 45.1,
                         11.6, 22.7,  32.8, 30.9,  5.4,  12.1, 16.5, 11.2,
                         23.0, 112.6, 0.7,  86.2,  27.8, 62.1, 15.3, 74.0,
                         38.9, 18.0,  58.8, 17.6,  2.1};
const double kS37[37] = {54.0, 84.0, 10.8, 84.0, 84.0, 40.2, 40.2, 14.4, 10.8,
                         14.4, 14.4, 14.4, 14.4, 10.8, 14.4, 14.4, 10.8, 10.8,
                         10.8, 10.8, 14.4, 10.8, 10.8, 14.4, 10.8, 40.2, 14.4,
                         14.4, 40.2, 16.2, 10.8, 10.8, 14.4, 14.4, 14.4, 14.4,
                         14.4};

csv_document network37_doc() {
  csv_document doc;
  doc.comments = {"# 37-node radial distribution feeder (validation network)",
                  "# v0_volts=12500"};
  doc.rows.push_back(
      {"line_index", "parent_node", "child_node", "R_ohm", "X_ohm", "Smax_kVA"});
  for (int i = 0; i < 37; ++i) {
    doc.rows.push_back({std::to_string(i + 1), std::to_string(kParent37[i]),
                        std::to_string(i + 1), format_double(kR37[i] / 1000.0),
                        format_double(kX37[i] / 1000.0), format_double(kS37[i])});
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Price catalog. 64 rows in five functional groups:
//   1-22   flat-pair rows: slots 1/2 equal and slots 3/4 equal, so every
//          candidate predicts identical load; safe everywhere.
//   23-25  separating probes (deep single-slot discounts that stay safe) and
//          the all-high fallback.
//   26-31  tracking optima: slot-1/3 discounts that pull the big pools to
//          levels just inside the line limit. These separate the
//          near-confusable candidates slowly.
//   32-35  deep-discount shapes that overload a slot (32/33 are the sources
//          of targets 9/10; 34/35 are believed safe only by the coarse
//          candidates, giving the per-candidate filter its own separator).
//   36-64  further overload shapes: these make the unconstrained chaser pick
//          an overloading row whenever the target itself is an overload
//          profile, and they stay blocked under the mixture filter.
// ---------------------------------------------------------------------------

std::vector<double> row6(double a, double b, double c, double d, double e,
                         double f) {
  return {a, b, c, d, e, f};
}

std::vector<double> flat_low(double low_slot_value, int slot) {
  std::vector<double> p(kSlots, 0.25);
  p[static_cast<std::size_t>(slot) - 1] = low_slot_value;
  return p;
}

// Context shared by the construction helpers.
struct build_ctx {
  std::vector<cluster_spec> clusters;
  std::vector<sensitivity_model> thetas;
  network net;
  constraint_limits limits;
  noise_config noise;

  const sensitivity_model& theta(int id) const {
    for (const auto& t : thetas)
      if (t.id == id) return t;
    fail("unknown candidate id " + std::to_string(id));
  }
  const sensitivity_model& star() const { return theta(kTrueThetaId); }
};

// Worst per-scalar violation probability of one price under one candidate.
double believed_viol(const build_ctx& ctx, const response_profile& prof,
                     const std::vector<double>& price,
                     const sensitivity_model& th) {
  nodal_load_model m = physical_load_model(prof, th, price, ctx.noise);
  std::vector<nodal_load_model> loads(
      static_cast<std::size_t>(ctx.net.node_count));
  for (auto& l : loads) {
    l.mean_p.assign(kSlots, 0.0);
    l.var_p.assign(kSlots, 0.0);
  }
  loads[0] = std::move(m);
  return 1.0 - constraint_probability(ctx.net, loads, ctx.limits).min_sat();
}

double believed_viol(const build_ctx& ctx, const std::vector<double>& price,
                     const sensitivity_model& th) {
  response_profile prof = build_response_profile(ctx.clusters, price, kDt);
  return believed_viol(ctx, prof, price, th);
}

// Tracking-optimum search. Shape (l, h, l, h, c, d): discounts at slots 1 and
// 3 gather the early and mid pools; equal entries at slots 2 and 4 keep all
// four near-confusable candidates at one common per-day information rate; the
// tail pair (c, d) routes the late clusters. Four tail layouts are used so
// rows of different layouts stay far apart in profile space, and two rows per
// reused layout are spaced in theta*.p so they stay distinguishable.
struct opt_candidate {
  std::vector<double> p;
  double s = 0.0;  // theta* . p
};

enum class tail_layout { all_slot5, split_56, split_45, split_46 };

std::vector<opt_candidate> enumerate_layout(const build_ctx& ctx,
                                            tail_layout layout) {
  const std::vector<double> l_grid_main = {0.1875, 0.21875, 0.25};
  const std::vector<double> l_grid_x = {0.15625, 0.1875};
  const std::vector<double> h_grid_main = {0.5, 0.53125, 0.5625, 0.59375};
  const std::vector<double> h_grid_x = {0.5, 0.53125};
  const std::vector<double> tail_main = {0.5, 0.53125, 0.5625, 0.59375, 0.625};
  const std::vector<double> tail_x = {0.5625, 0.59375, 0.625, 0.65625};

  const bool x_layout =
      layout == tail_layout::split_45 || layout == tail_layout::split_46;
  const auto& l_grid = x_layout ? l_grid_x : l_grid_main;
  const auto& h_grid = x_layout ? h_grid_x : h_grid_main;
  const auto& tails = x_layout ? tail_x : tail_main;

  std::vector<opt_candidate> out;
  for (double l : l_grid) {
    for (double h : h_grid) {
      if (h - l < 0.28125) continue;  // keep the coarse candidates sceptical
      for (double c : tails) {
        for (double d : tails) {
          bool shape_ok = false;
          switch (layout) {
            case tail_layout::all_slot5:
              shape_ok = c < d && c < h;
              break;
            case tail_layout::split_56:
              shape_ok = d < c && c < h;
              break;
            case tail_layout::split_45:
              shape_ok = std::min(c, d) > h && c < d;
              break;
            case tail_layout::split_46:
              shape_ok = std::min(c, d) > h && d < c;
              break;
          }
          if (!shape_ok) continue;
          std::vector<double> p = row6(l, h, l, h, c, d);
          double sum = 0.0;
          for (double v : p) sum += v;
          if (sum > 2.95) continue;  // the fallback keeps the largest slot sum

          if (believed_viol(ctx, p, ctx.star()) > 7e-4) continue;
          bool ok = true;
          for (int id : kFarIds) {
            if (believed_viol(ctx, p, ctx.theta(id)) < 0.85) {
              ok = false;
              break;
            }
          }
          if (!ok) continue;
          for (int id : kFamilyIds) {
            if (believed_viol(ctx, p, ctx.theta(id)) > 2e-3) {
              ok = false;
              break;
            }
          }
          if (!ok) continue;

          opt_candidate cand;
          cand.p = std::move(p);
          cand.s = sensitivity_inner_product(ctx.star(), cand.p);
          out.push_back(std::move(cand));
        }
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const opt_candidate& a, const opt_candidate& b) {
                     return a.s < b.s;
                   });
  return out;
}

std::vector<std::vector<double>> pick_optima(const build_ctx& ctx) {
  std::vector<std::vector<double>> rows;
  auto pick_pair = [&](tail_layout layout, const char* name) {
    std::vector<opt_candidate> cands = enumerate_layout(ctx, layout);
    if (cands.empty()) fail(std::string("no feasible optimum, layout ") + name);
    const opt_candidate& lo = cands.front();
    const opt_candidate* hi = nullptr;
    for (const opt_candidate& c : cands) {
      if (c.s >= lo.s + 0.045) {
        hi = &c;
        break;
      }
    }
    if (hi == nullptr)
      fail(std::string("no spaced optimum pair, layout ") + name);
    rows.push_back(lo.p);
    rows.push_back(hi->p);
  };
  auto pick_one = [&](tail_layout layout, const char* name) {
    std::vector<opt_candidate> cands = enumerate_layout(ctx, layout);
    if (cands.empty()) fail(std::string("no feasible optimum, layout ") + name);
    rows.push_back(cands.front().p);
  };
  pick_pair(tail_layout::all_slot5, "all-slot5");
  pick_pair(tail_layout::split_56, "split-5/6");
  pick_one(tail_layout::split_45, "split-4/5");
  pick_one(tail_layout::split_46, "split-4/6");
  return rows;
}

std::vector<price_signal> make_prices(const build_ctx& ctx) {
  std::vector<std::vector<double>> rows;

  // 1-22: flat-pair rows over levels {0.375, 0.4375, 0.5}. Slots 1/2 share
  // one level and slots 3/4 another, so every candidate's predictions agree
  // bit-for-bit; the tail levels vary freely. First 22 in enumeration order.
  const double lv[3] = {0.375, 0.4375, 0.5};
  for (double b : lv) {
    for (double c : lv) {
      for (double d : lv) {
        if (rows.size() >= 22) break;
        rows.push_back(row6(0.375, 0.375, b, b, c, d));
      }
    }
  }
  check(rows.size() == 22, "flat-pair enumeration must yield 22 rows");

  // 23/24: separating probes. A deep discount in slot 2 (resp. slot 4) makes
  // the slot-1/2 (resp. slot-3/4) trade-off observable at full contrast while
  // total load stays far below the line limit.
  rows.push_back(row6(0.5, 0.0625, 0.5, 0.5, 0.5, 0.5));
  rows.push_back(row6(0.5, 0.5, 0.5, 0.0625, 0.5, 0.5));

  // 25: the all-high broadcast -- strictly the largest slot sum, hence the
  // fallback; demand spreads thin and every candidate agrees it is safe.
  rows.push_back(std::vector<double>(kSlots, 0.5));

  // 26-31: tracking optima.
  for (auto& p : pick_optima(ctx)) rows.push_back(std::move(p));

  // 32/33: overload spikes; the sources of targets 9 and 10.
  rows.push_back(flat_low(0.125, 2));
  rows.push_back(flat_low(0.125, 4));

  // 34/35: overload shapes that the coarse candidates believe are safe (the
  // per-candidate filter of the non-mixture variant admits them under those
  // candidates, which is exactly what separates the coarse candidates there).
  rows.push_back(row6(0.375, 0.09375, 0.25, 0.25, 0.25, 0.25));
  rows.push_back(row6(0.359375, 0.359375, 0.359375, 0.046875, 0.359375,
                      0.359375));

  // 36-38: slot-2 overloads at increasing discount depth.
  rows.push_back(flat_low(0.09375, 2));
  rows.push_back(flat_low(0.15625, 2));
  rows.push_back(flat_low(0.1875, 2));

  // 39-46: slot-3 overloads -- depth series, then base-level series.
  rows.push_back(flat_low(0.09375, 3));
  rows.push_back(flat_low(0.125, 3));
  rows.push_back(flat_low(0.15625, 3));
  rows.push_back(flat_low(0.1875, 3));
  for (double base : {0.3125, 0.375, 0.4375, 0.5}) {
    std::vector<double> p(kSlots, base);
    p[2] = 0.125;
    rows.push_back(std::move(p));
  }

  // 47-50: slot-4 overloads.
  rows.push_back(flat_low(0.09375, 4));
  rows.push_back(flat_low(0.15625, 4));
  rows.push_back(flat_low(0.1875, 4));
  {
    std::vector<double> p(kSlots, 0.3125);
    p[3] = 0.125;
    rows.push_back(std::move(p));
  }

  // 51-53: double-discount overloads.
  rows.push_back(row6(0.25, 0.125, 0.125, 0.25, 0.25, 0.25));
  rows.push_back(row6(0.25, 0.25, 0.125, 0.125, 0.25, 0.25));
  rows.push_back(row6(0.25, 0.125, 0.25, 0.125, 0.25, 0.25));

  // 54-56: slot-3 overloads on a raised base.
  for (double low : {0.09375, 0.125, 0.15625}) {
    std::vector<double> p(kSlots, 0.28125);
    p[2] = low;
    rows.push_back(std::move(p));
  }

  // 57-58: slot-2 overloads on a raised base (shallow: near the limit).
  for (double low : {0.09375, 0.125}) {
    std::vector<double> p(kSlots, 0.28125);
    p[1] = low;
    rows.push_back(std::move(p));
  }

  // 59-64: slot-3 overloads every candidate predicts identically (slots 1/2
  // and 3/4 each share a level); graded tail levels set the overload margin.
  for (auto cd : {std::pair<double, double>{0.5, 0.5},
                  std::pair<double, double>{0.5, 0.5625},
                  std::pair<double, double>{0.5625, 0.5},
                  std::pair<double, double>{0.5625, 0.5625},
                  std::pair<double, double>{0.5, 0.625},
                  std::pair<double, double>{0.625, 0.5}}) {
    rows.push_back(row6(0.5, 0.5, 0.375, 0.375, cd.first, cd.second));
  }

  check(rows.size() == 64, "price catalog must hold 64 rows");
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j)
      check(rows[i] != rows[j], "price rows must be pairwise distinct");

  std::vector<price_signal> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    price_signal p;
    p.id = static_cast<int>(i) + 1;
    p.price = std::move(rows[i]);
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Targets. Eight tracking targets are the true-model mean responses to the
// six optima (two reused with a larger dither), so the optimum of each target
// is known by construction; targets 9 and 10 are the mean responses to the
// overload spikes, so they are only approachable through the probes.
// ---------------------------------------------------------------------------

const int kTargetSources[10] = {26, 27, 28, 29, 30, 31, 26, 29, 32, 33};

std::vector<target_profile> make_targets(const build_ctx& ctx,
                                         const price_table& table) {
  std::vector<target_profile> out;
  for (int j = 1; j <= 10; ++j) {
    const int src_id = kTargetSources[j - 1];
    const int idx = src_id - 1;  // ids are contiguous from 1
    load_moments m = expected_load(table.profiles[static_cast<std::size_t>(idx)],
                                   ctx.star(),
                                   table.prices[static_cast<std::size_t>(idx)].price,
                                   ctx.noise);
    const double amp = (j == 7 || j == 8) ? 0.002 : 0.00125;
    target_profile t;
    t.id = j;
    t.target.resize(kSlots);
    for (int s = 0; s < kSlots; ++s) {
      const double sign = ((s + 1 + j) % 2 == 0) ? 1.0 : -1.0;
      t.target[static_cast<std::size_t>(s)] =
          m.mean[static_cast<std::size_t>(s)] * (1.0 + amp * sign);
    }
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation. Construction-time checks of the geometry the simulation's
// qualitative behaviour rests on. All run on every make_default_bundle call.
// ---------------------------------------------------------------------------

struct built_bundle {
  build_ctx ctx;
  price_table table;
  std::vector<target_profile> targets;
};

prior weighted_prior(const build_ctx& ctx, const std::vector<int>& ids,
                     double each) {
  prior pr;
  pr.support = ctx.thetas;
  pr.weights.assign(pr.support.size(), 0.0);
  for (int id : ids) {
    for (std::size_t k = 0; k < pr.support.size(); ++k)
      if (pr.support[k].id == id) pr.weights[k] = each;
  }
  return pr;
}

prior uniform_prior(const build_ctx& ctx) {
  return init_prior(ctx.thetas);
}

demand_schedule zero_background(const network& net) {
  demand_schedule d;
  d.slots = kSlots;
  d.active.assign(static_cast<std::size_t>(net.node_count),
                  std::vector<double>(kSlots, 0.0));
  d.reactive.assign(static_cast<std::size_t>(net.node_count),
                    std::vector<double>(kSlots, 0.0));
  return d;
}

chance_config make_chance(const build_ctx& ctx, constraint_mode mode,
                          double nu = kNu) {
  chance_config cc;
  cc.mode = mode;
  cc.mu = kMu;
  cc.nu = nu;
  cc.limits = ctx.limits;
  return cc;
}

double viol_of(const built_bundle& b, int price_id,
               const sensitivity_model& th) {
  const std::size_t idx = static_cast<std::size_t>(price_id - 1);
  return believed_viol(b.ctx, b.table.profiles[idx],
                       b.table.prices[idx].price, th);
}

// Worst-scalar mixture violation: max over scalar constraints of the
// weighted violation probability (what the mixture filter compares to nu).
double mixture_deficit(const built_bundle& b, int price_id, const prior& pr) {
  const std::size_t idx = static_cast<std::size_t>(price_id - 1);
  std::vector<double> mix;
  for (std::size_t k = 0; k < pr.support.size(); ++k) {
    if (pr.weights[k] <= 0.0) continue;
    nodal_load_model m =
        physical_load_model(b.table.profiles[idx], pr.support[k],
                            b.table.prices[idx].price, b.ctx.noise);
    std::vector<nodal_load_model> loads(
        static_cast<std::size_t>(b.ctx.net.node_count));
    for (auto& l : loads) {
      l.mean_p.assign(kSlots, 0.0);
      l.var_p.assign(kSlots, 0.0);
    }
    loads[0] = std::move(m);
    constraint_probs probs =
        constraint_probability(b.ctx.net, loads, b.ctx.limits);
    if (mix.empty()) mix.assign(probs.sat.size(), 0.0);
    for (std::size_t j = 0; j < probs.sat.size(); ++j)
      mix[j] += pr.weights[k] * (1.0 - probs.sat[j]);
  }
  double worst = 0.0;
  for (double v : mix) worst = std::max(worst, v);
  return worst;
}

double cost_under(const built_bundle& b, int price_id,
                  const sensitivity_model& th, const target_profile& target) {
  const std::size_t idx = static_cast<std::size_t>(price_id - 1);
  load_moments m = expected_load(b.table.profiles[idx], th,
                                 b.table.prices[idx].price, b.ctx.noise);
  return expected_cost(m, target.target);
}

void check_support(const built_bundle& b) {
  const auto& thetas = b.ctx.thetas;
  check(thetas.size() == 10, "ten sensitivity candidates");
  for (const auto& t : thetas) {
    check(static_cast<int>(t.theta.size()) == kSlots, "candidate slot count");
    for (double v : t.theta) check(v > 0.0, "candidate entries positive");
  }
  for (std::size_t i = 0; i < thetas.size(); ++i)
    for (std::size_t j = i + 1; j < thetas.size(); ++j)
      check(thetas[i].theta != thetas[j].theta, "candidates pairwise distinct");
  for (const auto& t : thetas)
    for (const auto& p : b.table.prices)
      check(sensitivity_inner_product(t, p.price) > 0.0,
            "inner products strictly positive");
}

void check_blind_ties(const built_bundle& b) {
  // Wherever a price has equal slot-1/2 entries, the slot-1/2 family agrees
  // with the true model bit-for-bit (same for slots 3/4); on the flat-pair
  // rows every candidate agrees. Exactness matters: it makes "those rows
  // carry no information" an identity, not an approximation.
  for (const auto& p : b.table.prices) {
    const double s_star = sensitivity_inner_product(b.ctx.star(), p.price);
    if (p.price[0] == p.price[1]) {
      for (int id : {1, 3, 6, 7})
        check(sensitivity_inner_product(b.ctx.theta(id), p.price) == s_star,
              "slot-1/2 family must tie bitwise at price " +
                  std::to_string(p.id));
    }
    if (p.price[2] == p.price[3]) {
      for (int id : {2, 5, 8, 9, 10})
        check(sensitivity_inner_product(b.ctx.theta(id), p.price) == s_star,
              "slot-3/4 family must tie bitwise at price " +
                  std::to_string(p.id));
    }
  }
}

void check_catalog_margins(const built_bundle& b) {
  for (const auto& p : b.table.prices) {
    const double tv = viol_of(b, p.id, b.ctx.star());
    if (p.id <= 31) {
      check(tv <= 7e-4, "price " + std::to_string(p.id) +
                            " must be safe under the true model");
    } else {
      check(tv >= 0.9, "price " + std::to_string(p.id) +
                           " must overload under the true model");
      for (int id : kFamilyIds)
        check(viol_of(b, p.id, b.ctx.theta(id)) >= 0.9,
              "overload row " + std::to_string(p.id) +
                  " must look dangerous to the whole fine family");
    }
  }
  // Contiguous ids and the fallback's strict slot-sum dominance.
  for (std::size_t i = 0; i < b.table.prices.size(); ++i)
    check(b.table.prices[i].id == static_cast<int>(i) + 1, "contiguous ids");
  check(b.table.fallback_index() == 24, "fallback must be the all-high row");
  double second = 0.0;
  for (const auto& p : b.table.prices) {
    if (p.id == 25) continue;
    double sum = 0.0;
    for (double v : p.price) sum += v;
    second = std::max(second, sum);
  }
  check(second <= 3.0 - 1.0 / 32.0,
        "fallback slot-sum must dominate by at least 1/32");

  // Every cluster fills exactly one slot at every price; the variance term of
  // the expected cost is then price-independent.
  for (const auto& prof : b.table.profiles) {
    for (const auto& sched : prof.schedules) {
      int nonzero = 0;
      for (double v : sched) nonzero += (v != 0.0) ? 1 : 0;
      check(nonzero == 1, "each cluster must fill exactly one slot");
    }
  }
}

void check_deck(const built_bundle& b, const std::vector<int>& deck_ids) {
  // The robust deck -- prices safe at level 1-mu under EVERY candidate --
  // must be exactly rows 1..25: flat-pair rows, probes, fallback. The optima
  // are excluded by the coarse candidates, every overload row by the fine
  // family.
  std::vector<int> got;
  for (const auto& p : b.table.prices) {
    double worst = 0.0;
    for (const auto& th : b.ctx.thetas)
      worst = std::max(worst, viol_of(b, p.id, th));
    if (worst <= kMu) got.push_back(p.id);
  }
  check(got == deck_ids, "robust-safe deck must be exactly rows 1..25");
}

void check_optimum_beliefs(const built_bundle& b) {
  for (int oid = 26; oid <= 31; ++oid) {
    for (int id : kFarIds)
      check(viol_of(b, oid, b.ctx.theta(id)) >= 0.85,
            "coarse candidate " + std::to_string(id) +
                " must distrust optimum " + std::to_string(oid));
    for (int id : kFamilyIds)
      check(viol_of(b, oid, b.ctx.theta(id)) <= 2e-3,
            "fine candidate " + std::to_string(id) + " must accept optimum " +
                std::to_string(oid));
  }
}

void check_selection_geometry(const built_bundle& b,
                              const std::vector<int>& optimum_ids) {
  const demand_schedule bg = zero_background(b.ctx.net);
  const prior uniform = uniform_prior(b.ctx);
  const prior family = weighted_prior(
      b.ctx, std::vector<int>(std::begin(kFamilyIds), std::end(kFamilyIds)),
      0.2);
  const chance_config set_a = make_chance(b.ctx, constraint_mode::set_a);
  const chance_config set_b = make_chance(b.ctx, constraint_mode::set_b);
  const chance_config uncon = make_chance(b.ctx, constraint_mode::unconstrained);

  for (const auto& tgt : b.targets) {
    const int j = tgt.id;
    const int want = optimum_ids[static_cast<std::size_t>(j - 1)];

    // The informed optimum is the recorded one, with a clear cost margin.
    selection_result clair = clairvoyant_price(b.table, b.ctx.star(), tgt,
                                               set_a, b.ctx.net, 1, bg,
                                               b.ctx.noise, false);
    check(!clair.fallback, "informed selection must be feasible");
    check(b.table.prices[static_cast<std::size_t>(clair.price_index)].id ==
              want,
          "informed optimum for target " + std::to_string(j));
    double runner = 0.0;
    bool has_runner = false;
    for (const auto& p : b.table.prices) {
      if (p.id == want) continue;
      if (viol_of(b, p.id, b.ctx.star()) > kMu) continue;
      const double c = cost_under(b, p.id, b.ctx.star(), tgt);
      if (!has_runner || c < runner) {
        runner = c;
        has_runner = true;
      }
    }
    check(has_runner && runner >= 1.15 * clair.objective,
          "informed optimum margin for target " + std::to_string(j));

    // Under the fine-family belief, every fine member's selection lands on
    // the same optimum with a clear absolute gap: once the coarse candidates
    // are gone, whichever fine candidate is sampled, play is identical.
    for (int id : kFamilyIds) {
      selection_result r =
          select_price(b.table, b.ctx.theta(id), family, tgt, set_b,
                       b.ctx.net, 1, bg, b.ctx.noise, false);
      check(!r.fallback, "fine-family selection must be feasible");
      check(b.table.prices[static_cast<std::size_t>(r.price_index)].id == want,
            "fine-family selection must agree, target " + std::to_string(j) +
                " candidate " + std::to_string(id));
      if (j <= 8) {
        double other = 0.0;
        bool has_other = false;
        for (const auto& p : b.table.prices) {
          if (p.id == want) continue;
          if (mixture_deficit(b, p.id, family) > kNu) continue;
          const double c = cost_under(b, p.id, b.ctx.theta(id), tgt);
          if (!has_other || c < other) {
            other = c;
            has_other = true;
          }
        }
        check(has_other && other >= r.objective + 30.0,
              "fine-family selection margin, target " + std::to_string(j));
      }
    }
  }

  // Overload targets pull every candidate to the matching probe under the
  // mixture filter, and to an overload row when the filter is off.
  for (const auto& th : b.ctx.thetas) {
    selection_result r9 = select_price(b.table, th, uniform, b.targets[8],
                                       set_b, b.ctx.net, 1, bg, b.ctx.noise,
                                       false);
    check(b.table.prices[static_cast<std::size_t>(r9.price_index)].id == 23,
          "target 9 must select the slot-2 probe under candidate " +
              std::to_string(th.id));
    selection_result r10 = select_price(b.table, th, uniform, b.targets[9],
                                        set_b, b.ctx.net, 1, bg, b.ctx.noise,
                                        false);
    check(b.table.prices[static_cast<std::size_t>(r10.price_index)].id == 24,
          "target 10 must select the slot-4 probe under candidate " +
              std::to_string(th.id));

    for (const target_profile* tgt : {&b.targets[8], &b.targets[9]}) {
      selection_result ru = select_price(b.table, th, uniform, *tgt, uncon,
                                         b.ctx.net, 1, bg, b.ctx.noise, false);
      const int got = b.table.prices[static_cast<std::size_t>(ru.price_index)].id;
      check(got >= 32, "unfiltered chase of an overload target must pick an "
                       "overload row (candidate " +
                           std::to_string(th.id) + ")");
    }
  }

  // A coarse candidate's selection rarely coincides with the optimum on the
  // tracking targets (it believes the optima overload): at most 2 of 8.
  for (int id : kFarIds) {
    int coincide = 0;
    for (int j = 1; j <= 8; ++j) {
      selection_result r =
          select_price(b.table, b.ctx.theta(id), uniform, b.targets[j - 1],
                       set_b, b.ctx.net, 1, bg, b.ctx.noise, false);
      if (b.table.prices[static_cast<std::size_t>(r.price_index)].id ==
          optimum_ids[static_cast<std::size_t>(j - 1)])
        ++coincide;
    }
    check(coincide <= 2, "coarse candidate " + std::to_string(id) +
                             " must usually miss the tracking optima");
  }
}

void check_information_rates(const built_bundle& b) {
  const auto& specs = b.ctx.clusters;
  // One probe visit essentially decides against a coarse candidate...
  for (int id : kAFarIds)
    check(kl_marginal(b.ctx.star(), b.ctx.theta(id),
                      b.table.prices[22].price, specs, kDt,
                      b.ctx.noise) >= 5.0,
          "slot-2 probe must strongly separate candidate " +
              std::to_string(id));
  for (int id : kBFarIds)
    check(kl_marginal(b.ctx.star(), b.ctx.theta(id),
                      b.table.prices[23].price, specs, kDt,
                      b.ctx.noise) >= 5.0,
          "slot-4 probe must strongly separate candidate " +
              std::to_string(id));
  // ...while the near-confusable candidates die slowly, and only at the
  // optima: a bounded per-day rate there, essentially nothing at the probes.
  for (int id : {6, 7, 8, 9}) {
    for (int oid = 26; oid <= 31; ++oid) {
      const double kl = kl_marginal(b.ctx.star(), b.ctx.theta(id),
                                    b.table.prices[static_cast<std::size_t>(
                                        oid - 1)].price,
                                    specs, kDt, b.ctx.noise);
      check(kl >= 0.015 && kl <= 0.2,
            "near-confusable per-day rate out of band at optimum " +
                std::to_string(oid));
    }
    for (int pid : {23, 24}) {
      const double kl = kl_marginal(b.ctx.star(), b.ctx.theta(id),
                                    b.table.prices[static_cast<std::size_t>(
                                        pid - 1)].price,
                                    specs, kDt, b.ctx.noise);
      check(kl <= 0.25, "near-confusable candidates must survive the probes");
    }
  }
  for (int id : kFarIds)
    for (int oid = 26; oid <= 31; ++oid)
      check(kl_marginal(b.ctx.star(), b.ctx.theta(id),
                        b.table.prices[static_cast<std::size_t>(oid - 1)]
                            .price,
                        specs, kDt, b.ctx.noise) >= 2.0,
            "optima must also separate the coarse candidates");
}

void check_mixture_blocking(const built_bundle& b) {
  const prior uniform = uniform_prior(b.ctx);
  const std::vector<int> all_ids = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  auto without = [&](std::initializer_list<int> drop) {
    std::vector<int> keep;
    for (int id : all_ids) {
      bool dropped = false;
      for (int d : drop) dropped = dropped || (d == id);
      if (!dropped) keep.push_back(id);
    }
    return weighted_prior(b.ctx, keep, 1.0 / static_cast<double>(keep.size()));
  };
  const prior a_dead = without({1, 3});
  const prior b_dead = without({2, 5, 10});
  const prior family_only = without({1, 2, 3, 5, 10});

  for (int oid = 26; oid <= 31; ++oid) {
    // Blocked at every budget in the sweep until a probe has spoken; after
    // the slot-3/4 coarse candidates fall, the loosest budget opens while the
    // tighter ones still wait for the slot-1/2 pair; once both coarse pairs
    // are gone, even a 0.01 budget admits the optima.
    check(mixture_deficit(b, oid, uniform) > 0.31,
          "fresh mixture must block optimum " + std::to_string(oid));
    check(mixture_deficit(b, oid, a_dead) > 0.31,
          "slot-3/4 coarse residue must still block optimum " +
              std::to_string(oid));
    const double after_b = mixture_deficit(b, oid, b_dead);
    check(after_b > 0.105 && after_b < 0.298,
          "slot-1/2 coarse residue must sit between the sweep budgets");
    check(mixture_deficit(b, oid, family_only) < 5e-3,
          "fine-family mixture must admit optimum " + std::to_string(oid));
  }
  // Overload rows stay blocked even for the fine family.
  check(mixture_deficit(b, 32, family_only) > 0.5 &&
            mixture_deficit(b, 33, family_only) > 0.5,
        "overload rows must stay blocked under the fine family");
}

void check_coarse_separators(const built_bundle& b) {
  // Rows 34/35 give the per-candidate (non-mixture) filter its own coarse
  // separators: under each coarse candidate they are believed safe AND
  // believed cheaper than the probe for the matching overload target, so that
  // variant walks into them and learns; under the true model they overload.
  for (int id : kAFarIds) {
    check(viol_of(b, 34, b.ctx.theta(id)) <= kMu,
          "slot-1/2 coarse candidates must accept row 34");
    check(cost_under(b, 34, b.ctx.theta(id), b.targets[8]) <
              cost_under(b, 23, b.ctx.theta(id), b.targets[8]),
          "row 34 must undercut the probe for candidate " +
              std::to_string(id));
  }
  for (int id : kBFarIds) {
    check(viol_of(b, 35, b.ctx.theta(id)) <= kMu,
          "slot-3/4 coarse candidates must accept row 35");
    check(cost_under(b, 35, b.ctx.theta(id), b.targets[9]) <
              cost_under(b, 24, b.ctx.theta(id), b.targets[9]),
          "row 35 must undercut the probe for candidate " +
              std::to_string(id));
  }
}

// ---------------------------------------------------------------------------
// Serialization.
// ---------------------------------------------------------------------------

std::string doc_text(const csv_document& doc) {
  std::string s;
  for (const std::string& c : doc.comments) {
    s += c;
    s += '\n';
  }
  for (const auto& row : doc.rows) {
    s += join_csv(row);
    s += '\n';
  }
  return s;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) fail("failed writing " + path);
}

csv_document clusters_doc() {
  csv_document doc;
  doc.comments = {"# interruptible demand clusters; E_kWh = rho_kW * dt so each"
                  " cluster fills exactly one slot"};
  doc.rows.push_back({"cluster_id", "kind", "t1", "t2", "E_kWh", "rho_kW",
                      "beta"});
  for (const cluster_row& r : kClusterRows) {
    doc.rows.push_back({std::to_string(r.id), "interruptible",
                        std::to_string(r.t1), std::to_string(r.t2),
                        format_double(r.kw * kDt), format_double(r.kw),
                        format_double(r.beta)});
  }
  return doc;
}

csv_document thetas_doc(const std::vector<sensitivity_model>& thetas) {
  csv_document doc;
  doc.comments = {"# candidate price-sensitivity vectors; row 4 drives the"
                  " simulator"};
  std::vector<std::string> header = {"theta_id"};
  for (int s = 1; s <= kSlots; ++s) header.push_back("t" + std::to_string(s));
  doc.rows.push_back(std::move(header));
  for (const auto& t : thetas) {
    std::vector<std::string> row = {std::to_string(t.id)};
    for (double v : t.theta) row.push_back(format_double(v));
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

csv_document prices_doc(const std::vector<price_signal>& prices) {
  csv_document doc;
  doc.comments = {"# candidate day-ahead price signals, $/kWh per slot"};
  std::vector<std::string> header = {"price_id"};
  for (int s = 1; s <= kSlots; ++s) header.push_back("t" + std::to_string(s));
  doc.rows.push_back(std::move(header));
  for (const auto& p : prices) {
    std::vector<std::string> row = {std::to_string(p.id)};
    for (double v : p.price) row.push_back(format_double(v));
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

csv_document targets_doc(const std::vector<target_profile>& targets) {
  csv_document doc;
  doc.comments = {"# daily demand targets, kW per slot"};
  std::vector<std::string> header = {"target_id"};
  for (int s = 1; s <= kSlots; ++s) header.push_back("t" + std::to_string(s));
  doc.rows.push_back(std::move(header));
  for (const auto& t : targets) {
    std::vector<std::string> row = {std::to_string(t.id)};
    for (double v : t.target) row.push_back(format_double(v));
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

std::string scenario_text(int horizon, const std::string& target_mode) {
  std::string s;
  s += "# benchmark scenario: constrained price learning on a one-line feeder\n";
  s += "slots 6\n";
  s += "dt_hours 4\n";
  s += "network network.csv\n";
  s += "clusters clusters.csv\n";
  s += "prices prices.csv\n";
  s += "targets targets.csv\n";
  s += "thetas thetas.csv\n";
  s += "true_theta 4\n";
  s += "horizon " + std::to_string(horizon) + "\n";
  s += "variant conts-b\n";
  s += "mu 0.1\n";
  s += "nu 0.1\n";
  s += "sigma 0.4\n";
  s += "sigma_obs 0.5\n";
  s += "target_mode " + target_mode + "\n";
  s += "priced_node 1\n";
  s += "u_min_frac 0.95\n";
  s += "u_max_frac 1.05\n";
  return s;
}

built_bundle construct() {
  built_bundle b;
  b.ctx.clusters = make_clusters();
  b.ctx.thetas = make_thetas();
  b.ctx.net = network::from_document(network_doc(), "builtin network");
  b.ctx.limits = constraint_limits::voltage_band(kV0, 0.95, 1.05);
  b.ctx.noise.sigma = kSigma;
  b.ctx.noise.sigma_obs = kSigmaObs;
  b.ctx.noise.truncate_at_zero = true;

  b.table = price_table::build(make_prices(b.ctx), b.ctx.clusters, kDt);
  b.targets = make_targets(b.ctx, b.table);
  return b;
}

}  // namespace

default_bundle make_default_bundle() {
  built_bundle b = construct();

  default_bundle out;
  out.deck_ids.resize(25);
  for (int i = 0; i < 25; ++i) out.deck_ids[static_cast<std::size_t>(i)] = i + 1;
  out.optimum_ids = {26, 27, 28, 29, 30, 31, 26, 29, 23, 24};
  out.a_probe_id = 23;
  out.b_probe_id = 24;
  out.spike_a_id = 32;
  out.spike_b_id = 33;
  out.fallback_id = 25;

  check_support(b);
  check_blind_ties(b);
  check_catalog_margins(b);
  check_deck(b, out.deck_ids);
  check_optimum_beliefs(b);
  check_selection_geometry(b, out.optimum_ids);
  check_information_rates(b);
  check_mixture_blocking(b);
  check_coarse_separators(b);

  scenario_config cfg;
  cfg.slots = kSlots;
  cfg.dt_hours = kDt;
  cfg.network_file = "network.csv";
  cfg.clusters_file = "clusters.csv";
  cfg.prices_file = "prices.csv";
  cfg.targets_file = "targets.csv";
  cfg.thetas_file = "thetas.csv";
  cfg.true_theta_id = kTrueThetaId;
  cfg.horizon_days = 365;
  cfg.variant = "conts-b";
  cfg.mu = kMu;
  cfg.nu = kNu;
  cfg.sigma = kSigma;
  cfg.sigma_obs = kSigmaObs;
  cfg.target_mode = "iid";
  cfg.priced_node = 1;
  cfg.u_min_frac = 0.95;
  cfg.u_max_frac = 1.05;

  scenario_data data;
  data.cfg = std::move(cfg);
  data.net = b.ctx.net;
  data.clusters = b.ctx.clusters;
  data.learner_clusters = b.ctx.clusters;
  data.prices = b.table.prices;
  data.targets = b.targets;
  data.thetas = b.ctx.thetas;
  data.true_index = 3;
  data.switch_index = -1;
  data.limits = b.ctx.limits;
  out.data = std::move(data);
  return out;
}

void write_default_bundle(const std::string& dir) {
  default_bundle bundle = make_default_bundle();
  const std::string base = dir.empty() ? std::string(".") : dir;
  std::filesystem::create_directories(base);
  write_text(base + "/network.csv", doc_text(network_doc()));
  write_text(base + "/network37.csv", doc_text(network37_doc()));
  write_text(base + "/clusters.csv", doc_text(clusters_doc()));
  write_text(base + "/thetas.csv", doc_text(thetas_doc(bundle.data.thetas)));
  write_text(base + "/prices.csv", doc_text(prices_doc(bundle.data.prices)));
  write_text(base + "/targets.csv", doc_text(targets_doc(bundle.data.targets)));
  write_text(base + "/acceptance.scn", scenario_text(365, "iid"));
  write_text(base + "/demo.scn", scenario_text(120, "cycle"));
}

}  // namespace rtpsim
