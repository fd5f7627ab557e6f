#pragma once

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "vodfog/error.hpp"
#include "vodfog/milp/mps.hpp"
#include "vodfog/util.hpp"

namespace vodfog::milp {

enum class SolveStatus { optimal, feasible, infeasible, unbounded, time_limit, unknown };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::time_limit: return "time_limit";
    case SolveStatus::unknown: return "unknown";
  }
  return "?";
}

// Column values keyed by MPS column name.
struct RawSolution {
  SolveStatus status = SolveStatus::unknown;
  std::optional<double> objective;
  std::map<std::string, double> values;
  // Sparse dialects leave zero columns out; dense ones list every column.
  bool sparse = false;
  bool has_values() const { return !values.empty() || (sparse && objective.has_value()); }
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class SolverNotConfigured : public SolverError {
 public:
  SolverNotConfigured() : SolverError("no MILP solver configured (set VODFOG_SOLVER_CMD or pass --solver-cmd)") {}
};

// The time limit expired. Carries whatever incumbent the solver reported.
class SolverTimeout : public SolverError {
 public:
  SolverTimeout(std::string what, std::optional<RawSolution> incumbent)
      : SolverError(std::move(what)), incumbent_(std::move(incumbent)) {}
  const std::optional<RawSolution>& incumbent() const noexcept { return incumbent_; }

 private:
  std::optional<RawSolution> incumbent_;
};

namespace detail {

inline SolveStatus status_from_text(std::string_view s) {
  std::string t;
  for (char c : s) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t.find("infeasible") != std::string::npos) return SolveStatus::infeasible;
  if (t.find("unbounded") != std::string::npos) return SolveStatus::unbounded;
  if (t.find("time limit") != std::string::npos || t.find("stopped on time") != std::string::npos)
    return SolveStatus::time_limit;
  if (t.find("optimal") != std::string::npos) return SolveStatus::optimal;
  return SolveStatus::unknown;
}

// HiGHS raw solution file.
inline RawSolution parse_highs(const std::vector<std::string>& lines) {
  RawSolution r;
  std::size_t i = 0;
  auto next = [&]() -> std::string_view {
    while (i < lines.size() && text::trim(lines[i]).empty()) ++i;
    return i < lines.size() ? text::trim(lines[i++]) : std::string_view{};
  };
  if (next() != "Model status") throw ParseError("not a HiGHS solution file", 1);
  r.status = status_from_text(next());
  while (i < lines.size()) {
    const auto line = text::trim(lines[i++]);
    if (line != "# Primal solution values") continue;
    const auto feas = next();
    if (feas == "None") return r;
    const auto obj = text::split_ws(next());
    if (obj.size() != 2 || obj[0] != "Objective") throw ParseError("expected objective line", static_cast<int>(i));
    r.objective = text::require_double(obj[1], "objective", static_cast<int>(i));
    const auto cols = text::split_ws(next());
    long long n = 0;
    if (cols.size() != 3 || cols[1] != "Columns" || !text::parse_int(cols[2], n))
      throw ParseError("expected column count", static_cast<int>(i));
    for (long long k = 0; k < n; ++k) {
      const auto tok = text::split_ws(next());
      if (tok.size() != 2) throw ParseError("bad column value line", static_cast<int>(i));
      r.values[tok[0]] = text::require_double(tok[1], "column value", static_cast<int>(i));
    }
    if (feas != "Feasible" && r.status == SolveStatus::optimal) r.status = SolveStatus::unknown;
    if (r.status == SolveStatus::unknown && feas == "Feasible") r.status = SolveStatus::feasible;
    return r;
  }
  return r;
}

// CBC `-solu` file: status line, then `index name value reduced-cost`.
inline RawSolution parse_cbc(const std::vector<std::string>& lines) {
  RawSolution r;
  r.sparse = true;
  const auto head = text::trim(lines.at(0));
  r.status = status_from_text(head);
  if (auto pos = head.find("objective value"); pos != std::string_view::npos) {
    const auto tok = text::split_ws(head.substr(pos + 15));
    if (!tok.empty()) r.objective = text::require_double(tok[0], "objective", 1);
  }
  if (head.starts_with("Stopped") && r.status == SolveStatus::unknown) r.status = SolveStatus::time_limit;
  if (r.status == SolveStatus::unknown) throw ParseError("unrecognised solution status '" + std::string(head) + "'", 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto tok = text::split_ws(lines[i]);
    if (tok.empty()) continue;
    if (tok[0] == "**") tok.erase(tok.begin());
    if (tok.size() < 3) throw ParseError("bad solution line", static_cast<int>(i + 1));
    r.values[tok[1]] = text::require_double(tok[2], "column value", static_cast<int>(i + 1));
  }
  return r;
}

}  // namespace detail

// Parses a solver's solution file (HiGHS raw format or CBC format).
inline RawSolution parse_raw_solution(std::string_view doc) {
  const auto lines = text::lines(doc);
  std::size_t first = 0;
  while (first < lines.size() && text::trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw ParseError("empty solution file");
  const std::vector<std::string> rest(lines.begin() + static_cast<long>(first), lines.end());
  if (text::trim(rest[0]) == "Model status") return detail::parse_highs(rest);
  return detail::parse_cbc(rest);
}

struct SolverOptions {
  // Shell template; {model}, {solution}, {time_limit} and {gap} are substituted.
  std::string command;
  double time_limit_s = 300;
  // Relative optimality gap handed to the solver.
  double mip_gap = 1e-9;
  // Extra seconds before the process is killed.
  double grace_s = 30;
  bool keep_files = false;
};

// Command from the environment, else the build-time default, else empty.
inline std::string default_solver_command() {
  if (const char* env = std::getenv("VODFOG_SOLVER_CMD"); env && *env) return env;
#ifdef VODFOG_DEFAULT_SOLVER_CMD
  return VODFOG_DEFAULT_SOLVER_CMD;
#else
  return {};
#endif
}

namespace detail {

inline std::string substitute(std::string cmd, std::string_view key, const std::string& value) {
  for (auto pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key, pos + value.size()))
    cmd.replace(pos, key.size(), value);
  return cmd;
}

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

struct TempDir {
  std::filesystem::path path;
  bool keep = false;
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "vodfog-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw SolverError("cannot create temporary directory");
    path = tmpl;
  }
  ~TempDir() {
    if (keep) return;
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

// Runs `/bin/sh -c cmd`; returns the exit status or nullopt after a kill on timeout.
inline std::optional<int> run_shell(const std::string& cmd, double timeout_s, const std::filesystem::path& log) {
  const pid_t pid = fork();
  if (pid < 0) throw SolverError("fork failed");
  if (pid == 0) {
    setpgid(0, 0);
    // Grouped so a redirection inside the template still wins.
    const std::string redirected = "{ " + cmd + "\n} >" + shell_quote(log.string()) + " 2>&1";
    execl("/bin/sh", "sh", "-c", redirected.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
  int status = 0;
  auto pause = std::chrono::milliseconds(1);
  for (;;) {
    const pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0) throw SolverError("waitpid failed");
    if (std::chrono::steady_clock::now() > deadline) {
      kill(-pid, SIGKILL);
      waitpid(pid, &status, 0);
      return std::nullopt;
    }
    std::this_thread::sleep_for(pause);
    pause = std::min(pause * 2, std::chrono::milliseconds(50));
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

inline std::string tail(const std::filesystem::path& p, std::size_t n = 400) {
  std::error_code ec;
  if (!std::filesystem::exists(p, ec)) return {};
  std::string s = text::read_file(p.string());
  return s.size() > n ? s.substr(s.size() - n) : s;
}

}  // namespace detail

// Writes the model as MPS, runs the external solver and reads its solution.
//
// Throws SolverNotConfigured, SolverError (missing binary, non-zero exit, no
// solution file) or SolverTimeout. Infeasible and unbounded outcomes are
// returned as statuses.
inline RawSolution invoke_solver(const LinearModel& model, const SolverOptions& opt) {
  if (text::trim(opt.command).empty()) throw SolverNotConfigured();
  detail::TempDir dir;
  dir.keep = opt.keep_files;
  const auto model_path = dir.path / "model.mps";
  const auto sol_path = dir.path / "model.sol";
  const auto log_path = dir.path / "solver.log";
  const auto mps = emit_mps(model);
  text::write_file(model_path.string(), mps.text);
  text::write_file((dir.path / "model.names").string(), mps.name_map);
  std::string cmd = detail::substitute(opt.command, "{model}", detail::shell_quote(model_path.string()));
  cmd = detail::substitute(cmd, "{solution}", detail::shell_quote(sol_path.string()));
  cmd = detail::substitute(cmd, "{time_limit}", text::format_exact(opt.time_limit_s));
  cmd = detail::substitute(cmd, "{gap}", text::format_exact(opt.mip_gap));
  const auto code = detail::run_shell(cmd, opt.time_limit_s + opt.grace_s, log_path);
  std::error_code ec;
  const bool have_file = std::filesystem::exists(sol_path, ec) && std::filesystem::file_size(sol_path, ec) > 0;
  if (!code) {
    std::optional<RawSolution> inc;
    if (have_file) {
      try {
        inc = parse_raw_solution(text::read_file(sol_path.string()));
      } catch (const Error&) {
      }
    }
    throw SolverTimeout("solver killed after " + text::format_exact(opt.time_limit_s + opt.grace_s) + " s", inc);
  }
  if (*code == 127) throw SolverError("solver command not found: " + detail::tail(log_path));
  if (*code != 0) throw SolverError("solver exited with status " + std::to_string(*code) + ": " + detail::tail(log_path));
  if (!have_file) throw SolverError("solver wrote no solution file: " + detail::tail(log_path));
  RawSolution sol;
  try {
    sol = parse_raw_solution(text::read_file(sol_path.string()));
  } catch (const ParseError& e) {
    throw SolverError(std::string("unreadable solution file: ") + e.what());
  }
  if (sol.status == SolveStatus::time_limit) throw SolverTimeout("solver hit its time limit", sol);
  return sol;
}

}  // namespace vodfog::milp
