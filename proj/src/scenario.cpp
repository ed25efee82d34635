#include "rtpsim/scenario.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "rtpsim/csv.hpp"
#include "rtpsim/errors.hpp"

namespace rtpsim {

namespace {

[[noreturn]] void bad_config(const std::string& origin, int line_no,
                             const std::string& what) {
  throw_error(errc::config_error,
              origin + ":" + std::to_string(line_no) + ": " + what);
}

double parse_number(const std::string& origin, int line_no,
                    const std::string& value) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size() || errno == ERANGE)
    bad_config(origin, line_no, "expected a number, got '" + value + "'");
  return v;
}

int parse_int(const std::string& origin, int line_no,
              const std::string& value) {
  double v = parse_number(origin, line_no, value);
  int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    bad_config(origin, line_no, "expected an integer, got '" + value + "'");
  return i;
}

std::vector<int> parse_id_list(const std::string& origin, int line_no,
                               const std::string& value) {
  std::vector<int> ids;
  std::string item;
  std::stringstream ss(value);
  while (std::getline(ss, item, ','))
    ids.push_back(parse_int(origin, line_no, item));
  if (ids.empty()) bad_config(origin, line_no, "empty id list");
  return ids;
}

}  // namespace

void set_variant(scenario_config& cfg, const std::string& token) {
  static const char* kVariants[] = {"conts-a", "conts-b", "uncon-ts",
                                    "two-stage", "clairvoyant"};
  if (std::find(std::begin(kVariants), std::end(kVariants), token) !=
      std::end(kVariants)) {
    cfg.variant = token;
    return;
  }
  const std::string prefix = "two-stage-";
  if (token.rfind(prefix, 0) == 0) {
    const std::string suffix = token.substr(prefix.size());
    errno = 0;
    char* end = nullptr;
    long days = std::strtol(suffix.c_str(), &end, 10);
    if (end == suffix.c_str() + suffix.size() && errno != ERANGE && days > 0) {
      cfg.variant = "two-stage";
      cfg.two_stage_days = static_cast<int>(days);
      return;
    }
  }
  throw_error(errc::config_error, "unknown variant '" + token + "'");
}

scenario_config parse_scenario(const std::string& text,
                               const std::string& origin) {
  scenario_config cfg;
  std::set<std::string> seen;
  std::stringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::stringstream parts(line);
    std::string key;
    if (!(parts >> key)) continue;  // blank or comment-only line
    std::string value;
    std::getline(parts, value);
    std::size_t first = value.find_first_not_of(" \t\r");
    value = first == std::string::npos ? std::string() : value.substr(first);
    std::size_t last = value.find_last_not_of(" \t\r");
    if (last != std::string::npos) value = value.substr(0, last + 1);
    if (value.empty()) bad_config(origin, line_no, "key '" + key + "' has no value");
    if (!seen.insert(key).second)
      bad_config(origin, line_no, "duplicate key '" + key + "'");

    if (key == "slots") cfg.slots = parse_int(origin, line_no, value);
    else if (key == "dt_hours") cfg.dt_hours = parse_number(origin, line_no, value);
    else if (key == "network") cfg.network_file = value;
    else if (key == "clusters") cfg.clusters_file = value;
    else if (key == "prices") cfg.prices_file = value;
    else if (key == "targets") cfg.targets_file = value;
    else if (key == "thetas") cfg.thetas_file = value;
    else if (key == "true_theta") cfg.true_theta_id = parse_int(origin, line_no, value);
    else if (key == "horizon") cfg.horizon_days = parse_int(origin, line_no, value);
    else if (key == "variant") set_variant(cfg, value);
    else if (key == "mu") cfg.mu = parse_number(origin, line_no, value);
    else if (key == "nu") cfg.nu = parse_number(origin, line_no, value);
    else if (key == "sigma") cfg.sigma = parse_number(origin, line_no, value);
    else if (key == "sigma_obs") cfg.sigma_obs = parse_number(origin, line_no, value);
    else if (key == "mass_bound_lambda")
      cfg.mass_bound_lambda = parse_number(origin, line_no, value);
    else if (key == "target_mode") cfg.target_mode = value;
    else if (key == "theta_switch_day")
      cfg.theta_switch_day = parse_int(origin, line_no, value);
    else if (key == "theta_switch_id")
      cfg.theta_switch_id = parse_int(origin, line_no, value);
    else if (key == "visible_clusters") {
      if (value != "all") cfg.visible_clusters = parse_id_list(origin, line_no, value);
    } else if (key == "two_stage_days")
      cfg.two_stage_days = parse_int(origin, line_no, value);
    else if (key == "two_stage_explore") {
      if (value != "auto")
        cfg.two_stage_explore_ids = parse_id_list(origin, line_no, value);
    } else if (key == "priced_node")
      cfg.priced_node = parse_int(origin, line_no, value);
    else if (key == "u_min_frac") cfg.u_min_frac = parse_number(origin, line_no, value);
    else if (key == "u_max_frac") cfg.u_max_frac = parse_number(origin, line_no, value);
    else bad_config(origin, line_no, "unknown key '" + key + "'");
  }

  if (cfg.slots <= 0) throw_error(errc::config_error, origin + ": slots must be positive");
  if (!(cfg.dt_hours > 0.0))
    throw_error(errc::config_error, origin + ": dt_hours must be positive");
  if (cfg.horizon_days <= 0)
    throw_error(errc::config_error, origin + ": horizon must be positive");
  if (!(cfg.mu > 0.0 && cfg.mu < 1.0))
    throw_error(errc::config_error, origin + ": mu must lie in (0,1)");
  if (!(cfg.nu > 0.0 && cfg.nu <= 1.0))
    throw_error(errc::config_error, origin + ": nu must lie in (0,1]");
  if (!(cfg.sigma >= 0.0) || !(cfg.sigma_obs >= 0.0))
    throw_error(errc::config_error, origin + ": noise levels must be >= 0");
  if (cfg.mass_bound_lambda < 0.0)
    throw_error(errc::config_error, origin + ": mass_bound_lambda must be >= 0");
  if (cfg.target_mode != "iid" && cfg.target_mode != "cycle" &&
      cfg.target_mode != "non-repeating")
    throw_error(errc::config_error,
                origin + ": unknown target_mode '" + cfg.target_mode + "'");
  if (cfg.theta_switch_day < 0)
    throw_error(errc::config_error, origin + ": theta_switch_day must be >= 0");
  if (cfg.theta_switch_day > 0 && cfg.theta_switch_id == 0)
    throw_error(errc::config_error,
                origin + ": theta_switch_day set without theta_switch_id");
  if (cfg.two_stage_days <= 0)
    throw_error(errc::config_error, origin + ": two_stage_days must be positive");
  if (!(cfg.u_min_frac > 0.0 && cfg.u_min_frac < cfg.u_max_frac))
    throw_error(errc::config_error, origin + ": need 0 < u_min_frac < u_max_frac");
  for (const char* name : {"network", "clusters", "prices", "targets", "thetas"}) {
    const std::string& path = name == std::string("network")    ? cfg.network_file
                              : name == std::string("clusters") ? cfg.clusters_file
                              : name == std::string("prices")   ? cfg.prices_file
                              : name == std::string("targets")  ? cfg.targets_file
                                                                : cfg.thetas_file;
    if (path.empty())
      throw_error(errc::config_error, origin + ": missing required key '" +
                                          std::string(name) + "'");
  }
  if (cfg.true_theta_id <= 0)
    throw_error(errc::config_error, origin + ": missing required key 'true_theta'");
  return cfg;
}

scenario_config load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(errc::config_error, "cannot open scenario file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  scenario_config cfg = parse_scenario(buf.str(), path);
  std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative())
      p = (base / p).string();
  };
  resolve(cfg.network_file);
  resolve(cfg.clusters_file);
  resolve(cfg.prices_file);
  resolve(cfg.targets_file);
  resolve(cfg.thetas_file);
  return cfg;
}

namespace {

template <typename T>
int find_id(const std::vector<T>& items, int id) {
  for (std::size_t i = 0; i < items.size(); ++i)
    if (items[i].id == id) return static_cast<int>(i);
  return -1;
}

}  // namespace

scenario_data load_scenario_data(const scenario_config& cfg) {
  scenario_data data;
  data.cfg = cfg;
  data.net = network::from_csv_file(cfg.network_file);
  data.clusters = load_clusters(read_csv_file(cfg.clusters_file), cfg.clusters_file);
  data.prices = load_prices(read_csv_file(cfg.prices_file), cfg.prices_file);
  data.targets = load_targets(read_csv_file(cfg.targets_file), cfg.targets_file);
  data.thetas = load_thetas(read_csv_file(cfg.thetas_file), cfg.thetas_file);

  for (const cluster_spec& c : data.clusters) c.validate(cfg.slots, cfg.dt_hours);
  for (const price_signal& p : data.prices)
    if (static_cast<int>(p.price.size()) != cfg.slots)
      throw_error(errc::dimension_mismatch,
                  cfg.prices_file + ": price " + std::to_string(p.id) +
                      " has wrong slot count");
  for (const target_profile& t : data.targets)
    if (static_cast<int>(t.target.size()) != cfg.slots)
      throw_error(errc::dimension_mismatch,
                  cfg.targets_file + ": target " + std::to_string(t.id) +
                      " has wrong slot count");
  std::size_t dim = data.thetas.empty() ? 0 : data.thetas.front().theta.size();
  for (const sensitivity_model& m : data.thetas)
    if (m.theta.size() != dim)
      throw_error(errc::dimension_mismatch,
                  cfg.thetas_file + ": inconsistent candidate dimensions");

  data.true_index = find_id(data.thetas, cfg.true_theta_id);
  if (data.true_index < 0)
    throw_error(errc::config_error,
                "true_theta " + std::to_string(cfg.true_theta_id) +
                    " not present in " + cfg.thetas_file);
  if (cfg.theta_switch_day > 0) {
    data.switch_index = find_id(data.thetas, cfg.theta_switch_id);
    if (data.switch_index < 0)
      throw_error(errc::config_error,
                  "theta_switch_id " + std::to_string(cfg.theta_switch_id) +
                      " not present in " + cfg.thetas_file);
  }

  if (cfg.priced_node < 1 || cfg.priced_node > data.net.node_count)
    throw_error(errc::config_error,
                "priced_node " + std::to_string(cfg.priced_node) +
                    " outside the network");

  if (cfg.visible_clusters.empty()) {
    data.learner_clusters = data.clusters;
  } else {
    for (int id : cfg.visible_clusters) {
      int idx = find_id(data.clusters, id);
      if (idx < 0)
        throw_error(errc::config_error, "visible cluster " + std::to_string(id) +
                                            " not present in " + cfg.clusters_file);
      data.learner_clusters.push_back(data.clusters[idx]);
    }
  }

  for (int id : cfg.two_stage_explore_ids)
    if (find_id(data.prices, id) < 0)
      throw_error(errc::config_error, "two_stage_explore price " +
                                          std::to_string(id) + " not present in " +
                                          cfg.prices_file);

  data.limits =
      constraint_limits::voltage_band(data.net.v0_volts, cfg.u_min_frac, cfg.u_max_frac);
  return data;
}

scenario_data load_scenario_data_file(const std::string& path) {
  return load_scenario_data(load_scenario_file(path));
}

}  // namespace rtpsim
