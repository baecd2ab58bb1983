#include "bitbranch/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "bitbranch/parser.hpp"
#include "json.hpp"

namespace bitbranch {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

Catalog TransformFlags::make_catalog() const {
  return mutation.empty() ? catalog(width) : mutated_catalog(width, mutation);
}

namespace {

bool read_file(const std::string& path, std::string& text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  text = ss.str();
  return static_cast<bool>(in) || in.eof();
}

std::string describe(const std::string& file, const ParseError& e) {
  std::ostringstream os;
  os << file << ':' << e.span().start_line << ':' << e.span().start_column
     << ": error: " << e.message();
  return os.str();
}

int count_annotations(const std::string& text) {
  int n = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.find_first_not_of(' ');
    if (pos != std::string::npos && line.compare(pos, 8, "// bwb: ") == 0) ++n;
  }
  return n;
}

std::string report_block(const TransformReport& r) {
  std::ostringstream os;
  os << "// bitbranch report\n";
  os << "//   guards_inserted " << r.guards_inserted << '\n';
  os << "//   temps_introduced " << r.temps_introduced << '\n';
  os << "//   rules_fired " << r.total_fired() << '\n';
  for (const auto& [rule, count] : r.fired) os << "//   fired " << rule.str() << ' ' << count << '\n';
  return os.str();
}

json stats_json(const TransformReport& r, const TransformFlags& flags) {
  json j;
  j["width"] = flags.width;
  j["strategy"] = spelling(flags.strategy);
  j["normalize"] = flags.normalize;
  j["guards_inserted"] = r.guards_inserted;
  j["temps_introduced"] = r.temps_introduced;
  j["rules_fired"] = r.total_fired();
  for (const auto& [rule, count] : r.fired) j["fired." + rule.str()] = count;
  return j;
}

struct Loaded {
  Program program;
  std::string error;
  int code = kExitOk;
};

Loaded load(const std::string& path, int width) {
  Loaded l;
  std::string text;
  if (!read_file(path, text)) {
    l.error = path + ": cannot read file";
    l.code = kExitFailure;
    return l;
  }
  try {
    ParseOptions opts;
    opts.width = width;
    l.program = parse(text, opts);
  } catch (const ParseError& e) {
    l.error = describe(path, e);
    l.code = kExitFailure;
  }
  return l;
}

// Re-reads the printed output and compares it with the in-memory result.
std::string check_output(const std::string& text, const Program& transformed,
                         const TransformReport& report) {
  int annotations = count_annotations(text);
  if (annotations != report.total_fired())
    return "annotation count " + std::to_string(annotations) + " differs from rules fired " +
           std::to_string(report.total_fired());
  try {
    ParseOptions opts;
    opts.width = transformed.width;
    opts.allow_reserved = true;
    if (!struct_eq(parse(text, opts), transformed)) return "printed output does not re-read";
  } catch (const ParseError& e) {
    return "printed output does not parse: " + describe("<output>", e);
  }
  return {};
}

}  // namespace

int cmd_transform(const std::string& input, const std::string& output,
                  const TransformFlags& flags, const std::string& stats_path, std::ostream& out,
                  std::ostream& err) {
  Loaded l = load(input, flags.width);
  if (l.code != kExitOk) {
    err << l.error << '\n';
    return l.code;
  }
  Program transformed;
  TransformReport report;
  try {
    std::tie(transformed, report) =
        transform_program(l.program, flags.config(), flags.make_catalog());
  } catch (const std::exception& e) {
    err << input << ": internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  std::string text = print(transformed);
  if (std::string breach = check_output(text, transformed, report); !breach.empty()) {
    err << input << ": internal error: " << breach << '\n';
    return kExitInternal;
  }
  text += report_block(report);

  if (output.empty() || output == "-") {
    out << text;
  } else {
    std::ofstream f(output, std::ios::binary);
    if (!(f << text)) {
      err << output << ": cannot write file\n";
      return kExitFailure;
    }
  }
  if (!stats_path.empty()) {
    std::ofstream f(stats_path, std::ios::binary);
    if (!(f << stats_json(report, flags).dump(2) << '\n')) {
      err << stats_path << ": cannot write file\n";
      return kExitFailure;
    }
  }
  return kExitOk;
}

int cmd_check_rules(const CheckFlags& flags, std::ostream& out, std::ostream& err) {
  std::vector<Verdict> verdicts;
  try {
    auto make = [&](int w) {
      return flags.mutation.empty() ? catalog(w) : mutated_catalog(w, flags.mutation);
    };
    verdicts = check_all(make, flags.widths, flags.options);
  } catch (const std::logic_error& e) {
    err << "check-rules: " << e.what() << '\n';
    return kExitFailure;
  }
  int failed = 0;
  for (const Verdict& v : verdicts) {
    out << v.line() << '\n';
    if (!v.pass) ++failed;
  }
  out << "checked " << verdicts.size() << " obligations, " << failed << " failed\n";
  return failed == 0 ? kExitOk : kExitFailure;
}

int cmd_replay(const std::string& input, const ReplayFlags& flags, std::ostream& out,
               std::ostream& err) {
  Loaded l = load(input, flags.transform.width);
  if (l.code != kExitOk) {
    err << l.error << '\n';
    return l.code;
  }
  if (flags.seeds == 0) {
    err << "warning: 0 seeds requested, nothing replayed\n";
    return kExitOk;
  }
  Program transformed;
  try {
    transformed = transform_program(l.program, flags.transform.config(),
                                    flags.transform.make_catalog())
                      .first;
  } catch (const std::exception& e) {
    err << input << ": internal error: " << e.what() << '\n';
    return kExitInternal;
  }

  std::uint64_t ok = 0;
  for (std::uint64_t i = 0; i < flags.seeds; ++i) {
    const std::uint64_t seed = flags.seed + i;
    ReplayResult r;
    try {
      r = shadow_replay(l.program, transformed, seed, flags.budget);
    } catch (const ReplayError& e) {
      err << input << ": internal error: " << e.what() << '\n';
      return kExitInternal;
    }
    if (flags.dump_trace && (i == 0 || !r.ok)) {
      out << "# original, seed " << seed << " (" << spelling(r.original.status) << ")\n"
          << r.original.dump();
      out << "# transformed, seed " << seed << " (" << spelling(r.shadow.status) << ")\n"
          << r.shadow.dump();
    }
    if (!r.ok) {
      err << input << ": violation: " << r.detail << '\n';
      return kExitViolation;
    }
    ++ok;
  }
  out << input << ": " << ok << '/' << flags.seeds << " seeds ok\n";
  return kExitOk;
}

int cmd_catalog(const TransformFlags& flags, std::ostream& out, std::ostream& err) {
  try {
    out << dump(flags.make_catalog());
  } catch (const std::invalid_argument& e) {
    err << "catalog: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

std::map<RuleId, int> CorpusReport::total_fired() const {
  std::map<RuleId, int> total;
  for (const auto& e : entries)
    for (const auto& [rule, n] : e.fired) total[rule] += n;
  return total;
}

int CorpusReport::total_guards() const {
  int n = 0;
  for (const auto& e : entries) n += e.guards_inserted;
  return n;
}

std::uint64_t CorpusReport::total_seeds() const {
  std::uint64_t n = 0;
  for (const auto& e : entries) n += e.seeds_run;
  return n;
}

std::uint64_t CorpusReport::total_replay_ok() const {
  std::uint64_t n = 0;
  for (const auto& e : entries) n += e.replay_ok;
  return n;
}

int CorpusReport::exit_code() const {
  int code = kExitOk;
  for (const auto& e : entries) {
    if (e.status == "violation") return kExitViolation;
    if (e.status != "ok") code = kExitFailure;
  }
  return code;
}

std::string CorpusReport::table() const {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"file", "status", "rules", "guards", "seeds", "replay_ok"});
  auto sum = [](const std::map<RuleId, int>& m) {
    int n = 0;
    for (const auto& [_, c] : m) n += c;
    return n;
  };
  for (const auto& e : entries)
    rows.push_back({e.file, e.status, std::to_string(sum(e.fired)),
                    std::to_string(e.guards_inserted), std::to_string(e.seeds_run),
                    std::to_string(e.replay_ok)});
  rows.push_back({"total", std::to_string(entries.size()) + " files",
                  std::to_string(sum(total_fired())), std::to_string(total_guards()),
                  std::to_string(total_seeds()), std::to_string(total_replay_ok())});

  std::vector<std::size_t> widths(rows.front().size(), 0);
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  std::ostringstream os;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << "  ";
      if (i < 2) {
        os << std::left << std::setw(static_cast<int>(widths[i])) << row[i];
      } else {
        os << std::right << std::setw(static_cast<int>(widths[i])) << row[i];
      }
    }
    os << '\n';
  }
  auto fired = total_fired();
  os << "distinct rules fired: " << fired.size() << '\n';
  for (const auto& [rule, n] : fired) os << "  " << rule.str() << ' ' << n << '\n';
  return os.str();
}

std::string CorpusReport::json_lines() const {
  std::ostringstream os;
  auto record = [&](const std::string& kind, const std::string& file, const std::string& status,
                    const std::map<RuleId, int>& fired, int guards, std::uint64_t seeds,
                    std::uint64_t ok) {
    json j;
    j["record"] = kind;
    j["file"] = file;
    j["status"] = status;
    j["guards_inserted"] = guards;
    j["seeds_run"] = seeds;
    j["replay_ok"] = ok;
    for (const auto& [rule, n] : fired) j["fired." + rule.str()] = n;
    os << j.dump() << '\n';
  };
  for (const auto& e : entries)
    record("file", e.file, e.status, e.fired, e.guards_inserted, e.seeds_run, e.replay_ok);
  record("totals", "", exit_code() == kExitOk ? "ok" : "failed", total_fired(), total_guards(),
         total_seeds(), total_replay_ok());
  return os.str();
}

namespace {

CorpusEntry corpus_file(const fs::path& path, const ReplayFlags& flags, const Catalog& cat) {
  CorpusEntry e;
  e.file = path.filename().string();
  Loaded l = load(path.string(), flags.transform.width);
  if (l.code != kExitOk) {
    e.status = "parse-error";
    e.detail = l.error;
    return e;
  }
  try {
    auto [transformed, report] = transform_program(l.program, flags.transform.config(), cat);
    e.fired = report.fired;
    e.guards_inserted = report.guards_inserted;
    e.temps_introduced = report.temps_introduced;
    for (std::uint64_t i = 0; i < flags.seeds; ++i) {
      ReplayResult r = shadow_replay(l.program, transformed, flags.seed + i, flags.budget);
      ++e.seeds_run;
      if (!r.ok) {
        e.status = "violation";
        e.detail = r.detail;
        return e;
      }
      ++e.replay_ok;
    }
  } catch (const std::exception& ex) {
    e.status = "internal-error";
    e.detail = ex.what();
    return e;
  }
  e.status = "ok";
  return e;
}

}  // namespace

CorpusReport run_corpus(const std::string& dir, const ReplayFlags& flags) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".c") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  const Catalog cat = flags.transform.make_catalog();
  CorpusReport report;
  for (const auto& f : files) report.entries.push_back(corpus_file(f, flags, cat));
  return report;
}

int cmd_corpus(const std::string& dir, const ReplayFlags& flags, const std::string& sidecar,
               std::ostream& out, std::ostream& err) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    err << dir << ": not a directory\n";
    return kExitFailure;
  }
  CorpusReport report;
  try {
    report = run_corpus(dir, flags);
  } catch (const std::exception& e) {
    err << "corpus: " << e.what() << '\n';
    return kExitFailure;
  }
  if (report.entries.empty()) err << "warning: no .c files in " << dir << '\n';
  for (const auto& e : report.entries)
    if (e.status != "ok") err << e.file << ": " << e.status << ": " << e.detail << '\n';
  out << report.table();
  if (!sidecar.empty()) {
    std::ofstream f(sidecar, std::ios::binary);
    if (!(f << report.json_lines())) {
      err << sidecar << ": cannot write file\n";
      return kExitFailure;
    }
  }
  return report.exit_code();
}

}  // namespace bitbranch
