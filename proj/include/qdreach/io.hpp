#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qdreach/adapt.hpp"
#include "qdreach/evolve.hpp"
#include "qdreach/sim.hpp"

namespace qdreach {

// Shortest decimal form that parses back to the same double; shared by every
// CSV writer so artifacts are byte-stable.
std::string format_double(double value);

// Everything the CLI can configure from one JSON document. Each section is
// optional and partially overridable: absent keys keep their defaults.
struct RunOptions {
  QdConfig qd;
  ArmModel arm;
  ThrowConfig throw_cfg;
  LeverConfig lever_cfg;
  JacobianConfig jacobian;
};

RunOptions parse_run_options(const std::string& json_text);
GapConfig parse_gap_config(const std::string& json_text, int joint_count);

// Canonical JSON for a domain setup (arm + domain config + gap); hashing this
// string identifies the evaluator in run metadata.
std::string domain_config_json(const ThrowDomain& domain);
std::string domain_config_json(const LeverDomain& domain);
std::string config_hash_hex(const std::string& canonical_json);

std::string run_metadata_json(const std::string& command, const QdConfig& qd,
                              const std::string& domain_name,
                              const std::string& domain_hash, double wall_seconds);

void write_report_csv(std::ostream& out, const RunReport& report);

std::string trace_to_json(const AdaptTrace& trace);

}  // namespace qdreach
