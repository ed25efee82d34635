#include "rtpsim/metrics.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "rtpsim/csv.hpp"
#include "rtpsim/errors.hpp"

namespace rtpsim {

void validate_records(const std::vector<day_record>& records) {
  if (records.empty()) throw_error(errc::incomplete_record, "no day records");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const day_record& r = records[i];
    if (r.day != static_cast<int>(i) + 1)
      throw_error(errc::incomplete_record,
                  "day sequence broken at position " + std::to_string(i));
    if (!(r.realized_cost >= 0.0) || !(r.chosen_expected_cost_true >= 0.0) ||
        !(r.clairvoyant_expected_cost >= 0.0))
      throw_error(errc::incomplete_record,
                  "negative or missing cost on day " + std::to_string(r.day));
    if (r.chosen_price_id <= 0 || r.optimal_price_id <= 0)
      throw_error(errc::incomplete_record,
                  "missing price id on day " + std::to_string(r.day));
  }
}

regret_series cumulative_regret(const std::vector<day_record>& records) {
  validate_records(records);
  regret_series out;
  out.instant.reserve(records.size());
  out.cumulative.reserve(records.size());
  double total = 0.0;
  for (const day_record& r : records) {
    double gap = r.chosen_expected_cost_true - r.clairvoyant_expected_cost;
    total += gap;
    out.instant.push_back(gap);
    out.cumulative.push_back(total);
  }
  return out;
}

std::vector<long> suboptimal_count(const std::vector<day_record>& records) {
  validate_records(records);
  std::vector<long> out;
  out.reserve(records.size());
  long total = 0;
  for (const day_record& r : records) {
    if (r.chosen_price_id != r.optimal_price_id) ++total;
    out.push_back(total);
  }
  return out;
}

double kl_marginal(const sensitivity_model& theta_a,
                   const sensitivity_model& theta_b,
                   const std::vector<double>& price,
                   const std::vector<cluster_spec>& specs, double dt_hours,
                   const noise_config& noise) {
  response_profile profile = build_response_profile(specs, price, dt_hours);
  load_moments a = expected_load(profile, theta_a, price, noise);
  load_moments b = expected_load(profile, theta_b, price, noise);
  double kl = 0.0;
  for (std::size_t t = 0; t < a.mean.size(); ++t) {
    double va = a.var[t];
    double vb = b.var[t];
    double diff = a.mean[t] - b.mean[t];
    if (vb == 0.0) {
      if (va == 0.0 && diff == 0.0) continue;  // identical point masses
      return std::numeric_limits<double>::infinity();
    }
    kl += 0.5 * std::log(vb / va) + (va + diff * diff) / (2.0 * vb) - 0.5;
  }
  return kl;
}

violation_totals violation_summary(const std::vector<day_record>& records) {
  validate_records(records);
  violation_totals out;
  for (const day_record& r : records) {
    out.flow += r.violation_flow;
    out.voltage_low += r.violation_voltage_low;
    out.voltage_high += r.violation_voltage_high;
    if (r.violations_total() > 0) ++out.violating_days;
  }
  return out;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: byte-stable newlines
  if (!out) throw_error(errc::parse_error, "cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_regret_csv(const std::string& path,
                      const std::vector<day_record>& records) {
  regret_series series = cumulative_regret(records);
  std::ofstream out = open_out(path);
  out << "day,instant_gap,cumulative\n";
  for (std::size_t i = 0; i < records.size(); ++i)
    out << records[i].day << ',' << format_double(series.instant[i]) << ','
        << format_double(series.cumulative[i]) << '\n';
}

void write_suboptimal_csv(const std::string& path,
                          const std::vector<day_record>& records) {
  std::vector<long> counts = suboptimal_count(records);
  std::ofstream out = open_out(path);
  out << "day,suboptimal,cumulative\n";
  for (std::size_t i = 0; i < records.size(); ++i)
    out << records[i].day << ','
        << (records[i].chosen_price_id != records[i].optimal_price_id ? 1 : 0)
        << ',' << counts[i] << '\n';
}

void write_violations_csv(const std::string& path,
                          const std::vector<day_record>& records) {
  validate_records(records);
  std::ofstream out = open_out(path);
  out << "day,flow,voltage_low,voltage_high,total,cumulative_total\n";
  long running = 0;
  for (const day_record& r : records) {
    running += r.violations_total();
    out << r.day << ',' << r.violation_flow << ',' << r.violation_voltage_low
        << ',' << r.violation_voltage_high << ',' << r.violations_total()
        << ',' << running << '\n';
  }
}

void write_posterior_csv(
    const std::string& path, const std::vector<int>& theta_ids,
    const std::vector<std::vector<double>>& daily_weights) {
  std::ofstream out = open_out(path);
  out << "day,theta_id,weight\n";
  for (std::size_t d = 0; d < daily_weights.size(); ++d) {
    const std::vector<double>& w = daily_weights[d];
    if (w.size() != theta_ids.size())
      throw_error(errc::length_mismatch, "posterior row size");
    for (std::size_t k = 0; k < w.size(); ++k)
      out << (d + 1) << ',' << theta_ids[k] << ',' << format_double(w[k])
          << '\n';
  }
}

void write_days_csv(const std::string& path,
                    const std::vector<day_record>& records) {
  validate_records(records);
  std::ofstream out = open_out(path);
  out << "day,target_id,sampled_theta_id,chosen_price_id,optimal_price_id,"
         "fallback,realized_cost,chosen_expected_cost_true,"
         "clairvoyant_expected_cost,posterior_mass_true,true_violation_prob,"
         "violation_flow,violation_voltage_low,violation_voltage_high\n";
  for (const day_record& r : records)
    out << r.day << ',' << r.target_id << ',' << r.sampled_theta_id << ','
        << r.chosen_price_id << ',' << r.optimal_price_id << ','
        << (r.fallback ? 1 : 0) << ',' << format_double(r.realized_cost) << ','
        << format_double(r.chosen_expected_cost_true) << ','
        << format_double(r.clairvoyant_expected_cost) << ','
        << format_double(r.posterior_mass_true) << ','
        << format_double(r.true_violation_prob) << ',' << r.violation_flow
        << ',' << r.violation_voltage_low << ',' << r.violation_voltage_high
        << '\n';
}

}  // namespace rtpsim
