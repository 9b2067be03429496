#ifndef SUPEROSP_PIPELINE_HPP
#define SUPEROSP_PIPELINE_HPP

#include <json.hpp>

#include <cstdint>
#include <string>

#include "superosp/derivations.hpp"
#include "superosp/jordan.hpp"

// Instance loading and the command pipelines behind the CLI.  Reports are
// nlohmann::json with ordered keys and string rationals, so identical specs
// produce byte-identical dumps.

namespace superosp {

struct InstanceSpec {
  std::string name;
  TablePtr algebra;
  FormPtr form;
  EChoice e_choice = EChoice::eosp;
};

/// Parses `{"form": {"algebra": ..., "rank": ..., "degrees": ...,
/// "gram": ...}, "E": "eosp"|"osp", "name": ...}`.  The algebra is a preset
/// name or an inline table object; gram entries are numbers, "p/q" strings,
/// or coefficient arrays over the algebra basis.
InstanceSpec parse_instance_text(const std::string& text);
InstanceSpec load_instance(const std::string& path);

struct CmdOptions {
  uint64_t seed = 12345;
  int samples = 1000;
  int max_dim = 40;  // guardrail on the Q-dimension of L
  bool force = false;
};

/// Reads SUPEROSP_MAX_DIM when set.
int default_max_dim();

struct CmdResult {
  int exit_code = 0;  // 0 pass, 1 first failure, 2 parse error
  nlohmann::ordered_json report;
};

CmdResult cmd_verify(const std::string& spec_path, const CmdOptions& opt);
CmdResult cmd_derive(const std::string& spec_path, const CmdOptions& opt);
CmdResult cmd_jordan(const std::string& spec_path, const CmdOptions& opt);
CmdResult cmd_dims(const std::string& spec_path, const CmdOptions& opt);

/// Flat human-readable rendering of a report.
std::string report_text(const nlohmann::ordered_json& j);

}  // namespace superosp

#endif
