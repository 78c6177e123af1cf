#include "qdreach/io.hpp"

#include <charconv>
#include <ostream>

#include <nlohmann/json.hpp>

#include "qdreach/common.hpp"

namespace qdreach {
namespace {

using json = nlohmann::ordered_json;

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vec vec_from_json(const json& arr, const char* what) {
  if (!arr.is_array()) throw contract_error(std::string(what) + " must be an array");
  Vec v(static_cast<Eigen::Index>(arr.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const json& item = arr[static_cast<size_t>(i)];
    if (!item.is_number()) throw contract_error(std::string(what) + " must hold numbers");
    v[i] = item.get<double>();
  }
  return v;
}

// Applies `field = j[key]` when the key is present, leaving defaults intact
// otherwise. Collecting the consumed keys lets each section reject typos.
template <typename T>
void maybe(const json& j, const char* key, T& field, std::vector<std::string>& seen) {
  seen.push_back(key);
  auto it = j.find(key);
  if (it == j.end()) return;
  field = it->get<T>();
}

void maybe_vec(const json& j, const char* key, Vec& field, std::vector<std::string>& seen) {
  seen.push_back(key);
  auto it = j.find(key);
  if (it == j.end()) return;
  field = vec_from_json(*it, key);
}

void maybe_vec3(const json& j, const char* key, Eigen::Vector3d& field,
                std::vector<std::string>& seen) {
  seen.push_back(key);
  auto it = j.find(key);
  if (it == j.end()) return;
  const Vec v = vec_from_json(*it, key);
  if (v.size() != 3) throw contract_error(std::string(key) + " must have three components");
  field = v;
}

void reject_unknown(const json& j, const std::vector<std::string>& seen, const char* section) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = false;
    for (const auto& s : seen)
      if (s == key) known = true;
    if (!known)
      throw contract_error(std::string("unknown key \"") + key + "\" in " + section + " config");
  }
}

void parse_qd(const json& j, QdConfig& cfg) {
  std::vector<std::string> seen;
  maybe(j, "population_size", cfg.population_size, seen);
  maybe(j, "generations", cfg.generations, seen);
  maybe(j, "mutation_rate", cfg.mutation_rate, seen);
  maybe(j, "crossover_rate", cfg.crossover_rate, seen);
  maybe(j, "sbx_eta", cfg.sbx_eta, seen);
  maybe(j, "mutation_eta", cfg.mutation_eta, seen);
  maybe(j, "l_repertoire", cfg.l_repertoire, seen);
  maybe(j, "eps_q", cfg.eps_q, seen);
  maybe(j, "seed", cfg.seed, seen);
  maybe(j, "max_seeding_generations", cfg.max_seeding_generations, seen);
  maybe(j, "select_from_population", cfg.select_from_population, seen);
  maybe(j, "novelty_on_control_dims", cfg.novelty_on_control_dims, seen);
  reject_unknown(j, seen, "qd");
}

void parse_arm(const json& j, ArmModel& arm) {
  std::vector<std::string> seen;
  maybe(j, "joint_count", arm.joint_count, seen);
  maybe(j, "link_lengths", arm.link_lengths, seen);
  maybe(j, "base_height", arm.base_height, seen);
  maybe(j, "home_pose", arm.home_pose, seen);
  maybe(j, "position_limit", arm.position_limit, seen);
  maybe(j, "velocity_limit", arm.velocity_limit, seen);
  reject_unknown(j, seen, "arm");
}

void parse_throw(const json& j, ThrowConfig& cfg) {
  std::vector<std::string> seen;
  maybe(j, "duration_min", cfg.duration_min, seen);
  maybe(j, "duration_max", cfg.duration_max, seen);
  maybe(j, "gravity", cfg.gravity, seen);
  maybe(j, "landing_bound", cfg.landing_bound, seen);
  maybe(j, "validity_samples", cfg.validity_samples, seen);
  maybe(j, "waypoint_fractions", cfg.waypoint_fractions, seen);
  maybe(j, "l_repertoire", cfg.l_repertoire, seen);
  maybe(j, "success_tolerance", cfg.success_tolerance, seen);
  reject_unknown(j, seen, "throw");
}

void parse_lever(const json& j, LeverConfig& cfg) {
  std::vector<std::string> seen;
  maybe(j, "duration", cfg.duration, seen);
  maybe_vec3(j, "lever_tip", cfg.lever_tip, seen);
  maybe(j, "contact_radius", cfg.contact_radius, seen);
  maybe(j, "angle_gain", cfg.angle_gain, seen);
  maybe(j, "angle_clamp", cfg.angle_clamp, seen);
  maybe(j, "validity_samples", cfg.validity_samples, seen);
  maybe(j, "robustness_replicas", cfg.robustness_replicas, seen);
  maybe(j, "robustness_noise", cfg.robustness_noise, seen);
  maybe(j, "waypoint_fractions", cfg.waypoint_fractions, seen);
  maybe(j, "l_repertoire", cfg.l_repertoire, seen);
  maybe(j, "success_tolerance", cfg.success_tolerance, seen);
  reject_unknown(j, seen, "lever");
}

void parse_jacobian(const json& j, JacobianConfig& cfg) {
  std::vector<std::string> seen;
  maybe(j, "neighbor_count", cfg.neighbor_count, seen);
  maybe(j, "neighbor_radius", cfg.neighbor_radius, seen);
  maybe(j, "eta_threshold", cfg.eta_threshold, seen);
  maybe(j, "ridge", cfg.ridge, seen);
  maybe(j, "svd_cutoff", cfg.svd_cutoff, seen);
  maybe(j, "max_iterations", cfg.max_iterations, seen);
  maybe(j, "tolerance", cfg.tolerance, seen);
  reject_unknown(j, seen, "jacobian");
}

json arm_to_json(const ArmModel& arm) {
  json j;
  j["joint_count"] = arm.joint_count;
  j["link_lengths"] = arm.link_lengths;
  j["base_height"] = arm.base_height;
  j["home_pose"] = arm.home_pose;
  j["position_limit"] = arm.position_limit;
  j["velocity_limit"] = arm.velocity_limit;
  return j;
}

json gap_to_json(const GapConfig& gap) {
  json j;
  j["joint_offsets"] = gap.joint_offsets;
  j["release_delay"] = gap.release_delay;
  return j;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

RunOptions parse_run_options(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw contract_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw contract_error("config root must be a JSON object");

  RunOptions opts;
  std::vector<std::string> seen = {"qd", "arm", "throw", "lever", "jacobian"};
  if (auto it = doc.find("qd"); it != doc.end()) parse_qd(*it, opts.qd);
  if (auto it = doc.find("arm"); it != doc.end()) parse_arm(*it, opts.arm);
  if (auto it = doc.find("throw"); it != doc.end()) parse_throw(*it, opts.throw_cfg);
  if (auto it = doc.find("lever"); it != doc.end()) parse_lever(*it, opts.lever_cfg);
  if (auto it = doc.find("jacobian"); it != doc.end()) parse_jacobian(*it, opts.jacobian);
  reject_unknown(doc, seen, "top-level");

  opts.qd.check();
  opts.arm.check();
  opts.throw_cfg.check();
  opts.lever_cfg.check();
  opts.jacobian.check();
  return opts;
}

GapConfig parse_gap_config(const std::string& json_text, int joint_count) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw contract_error(std::string("gap config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw contract_error("gap config root must be a JSON object");

  GapConfig gap;
  std::vector<std::string> seen;
  maybe(doc, "joint_offsets", gap.joint_offsets, seen);
  maybe(doc, "release_delay", gap.release_delay, seen);
  reject_unknown(doc, seen, "gap");
  gap.check(joint_count);
  return gap;
}

namespace {

json throw_domain_json(const ThrowDomain& domain) {
  const ThrowConfig& cfg = domain.config();
  json j;
  j["kind"] = "throw";
  j["arm"] = arm_to_json(domain.arm());
  j["duration_min"] = cfg.duration_min;
  j["duration_max"] = cfg.duration_max;
  j["gravity"] = cfg.gravity;
  j["landing_bound"] = cfg.landing_bound;
  j["validity_samples"] = cfg.validity_samples;
  j["waypoint_fractions"] = cfg.waypoint_fractions;
  j["l_repertoire"] = cfg.l_repertoire;
  j["success_tolerance"] = cfg.success_tolerance;
  j["gap"] = gap_to_json(domain.gap());
  return j;
}

json lever_domain_json(const LeverDomain& domain) {
  const LeverConfig& cfg = domain.config();
  json j;
  j["kind"] = "lever";
  j["arm"] = arm_to_json(domain.arm());
  j["duration"] = cfg.duration;
  j["lever_tip"] = vec_to_json(cfg.lever_tip);
  j["contact_radius"] = cfg.contact_radius;
  j["angle_gain"] = cfg.angle_gain;
  j["angle_clamp"] = cfg.angle_clamp;
  j["validity_samples"] = cfg.validity_samples;
  j["robustness_replicas"] = cfg.robustness_replicas;
  j["robustness_noise"] = cfg.robustness_noise;
  j["waypoint_fractions"] = cfg.waypoint_fractions;
  j["l_repertoire"] = cfg.l_repertoire;
  j["success_tolerance"] = cfg.success_tolerance;
  j["gap"] = gap_to_json(domain.gap());
  return j;
}

}  // namespace

std::string domain_config_json(const ThrowDomain& domain) {
  return throw_domain_json(domain).dump();
}

std::string domain_config_json(const LeverDomain& domain) {
  return lever_domain_json(domain).dump();
}

std::string config_hash_hex(const std::string& canonical_json) {
  const uint64_t h = fnv1a64(canonical_json.data(), canonical_json.size());
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) buf[i] = digits[(h >> (60 - 4 * i)) & 0xF];
  buf[16] = '\0';
  return std::string(buf);
}

std::string run_metadata_json(const std::string& command, const QdConfig& qd,
                              const std::string& domain_name,
                              const std::string& domain_hash, double wall_seconds) {
  json j;
  j["command"] = command;
  json cfg;
  cfg["population_size"] = qd.population_size;
  cfg["generations"] = qd.generations;
  cfg["mutation_rate"] = qd.mutation_rate;
  cfg["crossover_rate"] = qd.crossover_rate;
  cfg["sbx_eta"] = qd.sbx_eta;
  cfg["mutation_eta"] = qd.mutation_eta;
  cfg["l_repertoire"] = qd.l_repertoire;
  cfg["eps_q"] = qd.eps_q;
  cfg["max_seeding_generations"] = qd.max_seeding_generations;
  cfg["select_from_population"] = qd.select_from_population;
  cfg["novelty_on_control_dims"] = qd.novelty_on_control_dims;
  j["config"] = cfg;
  j["domain"] = domain_name;
  j["domain_config_hash"] = domain_hash;
  j["seed"] = qd.seed;
  j["rng_algorithm"] = kRngAlgorithm;
  j["wall_seconds"] = wall_seconds;
  return j.dump(2) + "\n";
}

void write_report_csv(std::ostream& out, const RunReport& report) {
  out << "generation,archive_size,mean_quality,evaluations_used,invalid_count\n";
  for (const auto& row : report.rows) {
    out << row.generation << ',' << row.archive_size << ',' << format_double(row.mean_quality)
        << ',' << row.evaluations_used << ',' << row.invalid_count << '\n';
  }
}

std::string trace_to_json(const AdaptTrace& trace) {
  json j;
  j["status"] = to_string(trace.status);
  j["iterations"] = trace.iterations();
  json steps = json::array();
  for (const auto& step : trace.steps) {
    json s;
    s["genotype"] = vec_to_json(step.genotype);
    s["behavior"] = vec_to_json(step.behavior);
    s["error"] = step.error;
    s["confidence"] = step.confidence;
    steps.push_back(std::move(s));
  }
  j["steps"] = std::move(steps);
  if (trace.failed_genotype.size() > 0) j["failed_genotype"] = vec_to_json(trace.failed_genotype);
  return j.dump();
}

}  // namespace qdreach
