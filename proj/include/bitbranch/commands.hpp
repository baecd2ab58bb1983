#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bitbranch/interp.hpp"
#include "bitbranch/oracle.hpp"
#include "bitbranch/transform.hpp"

namespace bitbranch {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInternal = 2,
  kExitViolation = 3,
};

struct TransformFlags {
  int width = kDefaultWidth;
  Strategy strategy = Strategy::WeakenFirst;
  bool normalize = true;
  /// Catalog mutation (`<row>:<kind>`); empty for the real catalog.
  std::string mutation;

  TransformConfig config() const { return {width, normalize, strategy}; }
  Catalog make_catalog() const;
};

struct ReplayFlags {
  TransformFlags transform;
  std::uint64_t seed = 0;
  std::uint64_t seeds = 1000;
  std::size_t budget = kDefaultBudget;
  bool dump_trace = false;
};

struct CheckFlags {
  std::vector<int> widths{4, 6, 8};
  std::string mutation;
  CheckOptions options;
};

/// `output` empty or "-" writes to `out`. `stats_json` empty skips the
/// sidecar.
int cmd_transform(const std::string& input, const std::string& output,
                  const TransformFlags& flags, const std::string& stats_json, std::ostream& out,
                  std::ostream& err);

int cmd_check_rules(const CheckFlags& flags, std::ostream& out, std::ostream& err);

int cmd_replay(const std::string& input, const ReplayFlags& flags, std::ostream& out,
               std::ostream& err);

int cmd_catalog(const TransformFlags& flags, std::ostream& out, std::ostream& err);

struct CorpusEntry {
  std::string file;
  /// "ok", "parse-error", "violation" or "internal-error".
  std::string status;
  std::string detail;
  std::map<RuleId, int> fired;
  int guards_inserted = 0;
  int temps_introduced = 0;
  std::uint64_t seeds_run = 0;
  std::uint64_t replay_ok = 0;
};

struct CorpusReport {
  std::vector<CorpusEntry> entries;

  std::map<RuleId, int> total_fired() const;
  int total_guards() const;
  std::uint64_t total_seeds() const;
  std::uint64_t total_replay_ok() const;
  int exit_code() const;

  /// Aligned text table with a totals row.
  std::string table() const;
  /// One flat JSON object per line: each file, then a totals record.
  std::string json_lines() const;
};

/// Transforms and replays every `.c` file in `dir` (sorted by name).
CorpusReport run_corpus(const std::string& dir, const ReplayFlags& flags);

/// `sidecar` empty skips the JSON-lines file.
int cmd_corpus(const std::string& dir, const ReplayFlags& flags, const std::string& sidecar,
               std::ostream& out, std::ostream& err);

}  // namespace bitbranch
