#include "netreason/eval/testbench.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <thread>

#include "netreason/error.hpp"
#include "netreason/eval/rtl_sim.hpp"
#include "netreason/util/io.hpp"

extern char** environ;

namespace netreason::eval {

namespace fs = std::filesystem;

namespace {

std::string substitute(std::string cmd, const fs::path& rtl, const fs::path& tb, const fs::path& out) {
  auto rep = [&](std::string_view key, const fs::path& p) {
    const std::string v = "'" + p.string() + "'";
    for (auto pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key, pos + v.size()))
      cmd.replace(pos, key.size(), v);
  };
  rep("{rtl}", rtl);
  rep("{tb}", tb);
  rep("{out}", out);
  return cmd;
}

// Runs `cmd` via /bin/sh in its own process group with stdout and stderr
// appended to `log`. Returns the exit status; kills the group on timeout.
int run_shell(const std::string& cmd, const fs::path& log, const fs::path& cwd, double timeout_s) {
  posix_spawn_file_actions_t fa;
  posix_spawnattr_t attr;
  posix_spawn_file_actions_init(&fa);
  posix_spawnattr_init(&attr);
  posix_spawn_file_actions_addopen(&fa, 1, log.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  posix_spawn_file_actions_adddup2(&fa, 1, 2);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);
  const std::string wrapped = "cd '" + cwd.string() + "' && " + cmd;
  const char* argv[] = {"/bin/sh", "-c", wrapped.c_str(), nullptr};
  pid_t pid = 0;
  const int rc = posix_spawn(&pid, "/bin/sh", &fa, &attr, const_cast<char**>(argv), environ);
  posix_spawn_file_actions_destroy(&fa);
  posix_spawnattr_destroy(&attr);
  if (rc != 0) fail("eval.SimulatorNotFound", "cannot start /bin/sh");
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
  for (;;) {
    int status = 0;
    const pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    if (std::chrono::steady_clock::now() > deadline) {
      kill(-pid, SIGKILL);
      waitpid(pid, &status, 0);
      fail("eval.Timeout", "'" + cmd + "' exceeded " + std::to_string(timeout_s) + " s");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

bool sentinels_pass(const std::string& out) {
  return out.find(kPassSentinel) != std::string::npos && out.find(kFailSentinel) == std::string::npos;
}

fs::path fresh_temp_dir() {
  static std::atomic<unsigned> counter{0};
  auto base = fs::temp_directory_path() /
              ("netreason-sim-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::create_directories(base);
  return base;
}

struct ScopedDir {
  fs::path path;
  bool owned = false;
  ~ScopedDir() {
    if (owned) {
      std::error_code ec;
      fs::remove_all(path, ec);
    }
  }
};

}  // namespace

RtlResult run_testbench(const std::string& rtl, const std::string& tb, const SimConfig& cfg, const std::string& tag) {
  ScopedDir dir;
  if (cfg.work_dir.empty()) {
    dir.path = fresh_temp_dir();
    dir.owned = true;
  } else {
    dir.path = cfg.work_dir;
    fs::create_directories(dir.path);
  }
  RtlResult res;
  const auto log_path = dir.path / (tag + ".log");
  if (!dir.owned) res.log_path = log_path;

  if (cfg.compile_cmd.empty()) {
    std::string log;
    try {
      auto design = RtlDesign::compile({{tag + ".v", rtl}, {tag + "_tb.v", tb}});
      res.syntax_pass = true;
      log = design.run(cfg.timeout_s);
      res.function_pass = sentinels_pass(log);
    } catch (const Error& e) {
      if (e.code() == "eval.Timeout") throw;
      log += e.what();
      log += '\n';
    }
    res.log = log;
    if (!dir.owned) util::write_file_atomic(log_path, log);
    return res;
  }

  const auto rtl_path = dir.path / (tag + ".v");
  const auto tb_path = dir.path / (tag + "_tb.v");
  const auto out_path = dir.path / (tag + ".out");
  util::write_file_atomic(rtl_path, rtl);
  util::write_file_atomic(tb_path, tb);
  std::error_code ec;
  fs::remove(log_path, ec);
  const auto start = std::chrono::steady_clock::now();
  auto remaining = [&] {
    return cfg.timeout_s - std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  int rc = run_shell(substitute(cfg.compile_cmd, rtl_path, tb_path, out_path), log_path, dir.path, remaining());
  if (rc == 127) fail("eval.SimulatorNotFound", "compile command not found: " + cfg.compile_cmd);
  res.syntax_pass = rc == 0;
  const auto compile_log_size = fs::exists(log_path) ? fs::file_size(log_path) : 0;
  if (res.syntax_pass && !cfg.run_cmd.empty()) {
    rc = run_shell(substitute(cfg.run_cmd, rtl_path, tb_path, out_path), log_path, dir.path, remaining());
    if (rc == 127) fail("eval.SimulatorNotFound", "run command not found: " + cfg.run_cmd);
  }
  res.log = fs::exists(log_path) ? util::read_file(log_path) : std::string();
  if (res.syntax_pass) {
    const auto run_out = cfg.run_cmd.empty() ? res.log : res.log.substr(compile_log_size);
    res.function_pass = sentinels_pass(run_out);
  }
  return res;
}

}  // namespace netreason::eval
