// Copyright 2026 The Orion Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "orion/executor.h"

#include <fcntl.h>
#include <poll.h>
#include <sched.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <thread>

#include "orion/errors.h"
#include "orion/seed_store.h"

namespace orion {
namespace {

using Clock = std::chrono::steady_clock;

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

struct Pipe {
  Fd read;
  Fd write;
};

Pipe MakePipe() {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0)
    throw InfraError(std::string("pipe: ") + std::strerror(errno));
  return Pipe{Fd(fds[0]), Fd(fds[1])};
}

// Only async-signal-safe calls from here until exec.
void WriteAll(int fd, const char* s) {
  std::size_t n = std::strlen(s);
  while (n > 0) {
    const ssize_t w = ::write(fd, s, n);
    if (w <= 0) return;
    s += w;
    n -= static_cast<std::size_t>(w);
  }
}

bool WriteFile(const char* path, const char* text) {
  const int fd = ::open(path, O_WRONLY | O_CLOEXEC);
  if (fd < 0) return false;
  WriteAll(fd, text);
  ::close(fd);
  return true;
}

[[noreturn]] void ChildFail(int errfd) {
  const int e = errno;
  ssize_t ignored = ::write(errfd, &e, sizeof e);
  (void)ignored;
  ::_exit(127);
}

void Drain(int fd, std::string& sink, bool& open) {
  char buf[8192];
  const ssize_t n = ::read(fd, buf, sizeof buf);
  if (n > 0) {
    const std::size_t room = kMaxStreamBytes > sink.size() ? kMaxStreamBytes - sink.size() : 0;
    sink.append(buf, std::min<std::size_t>(room, static_cast<std::size_t>(n)));
  } else if (n == 0 || (errno != EINTR && errno != EAGAIN)) {
    open = false;
  }
}

}  // namespace

std::string FindExecutable(const std::string& name) {
  if (name.empty()) return {};
  if (name.find('/') != std::string::npos)
    return ::access(name.c_str(), X_OK) == 0 ? std::filesystem::absolute(name).string()
                                             : std::string();
  const char* path = std::getenv("PATH");
  std::string_view rest = path ? path : "/usr/local/bin:/usr/bin:/bin";
  while (true) {
    const std::size_t colon = rest.find(':');
    const std::string dir(rest.substr(0, colon));
    const std::string candidate = (dir.empty() ? "." : dir) + "/" + name;
    struct stat st;
    if (::stat(candidate.c_str(), &st) == 0 && S_ISREG(st.st_mode) &&
        ::access(candidate.c_str(), X_OK) == 0)
      return candidate;
    if (colon == std::string_view::npos) break;
    rest.remove_prefix(colon + 1);
  }
  return {};
}

ExecutionOutcome RunSandboxed(const std::vector<std::string>& argv,
                              const std::filesystem::path& cwd,
                              const std::vector<std::string>& env,
                              std::chrono::milliseconds timeout,
                              std::uint64_t address_space_mb) {
  ExecutionOutcome out;
  if (argv.empty()) throw InfraError("empty command");

  // Everything the child needs is prepared before fork.
  std::vector<char*> cargv;
  for (const std::string& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);
  std::vector<char*> cenv;
  for (const std::string& e : env) cenv.push_back(const_cast<char*>(e.c_str()));
  cenv.push_back(nullptr);
  const std::string cwd_str = cwd.string();
  char uid_map[64];
  char gid_map[64];
  std::snprintf(uid_map, sizeof uid_map, "%u %u 1\n", ::getuid(), ::getuid());
  std::snprintf(gid_map, sizeof gid_map, "%u %u 1\n", ::getgid(), ::getgid());

  Pipe out_pipe = MakePipe();
  Pipe err_pipe = MakePipe();
  Pipe exec_pipe = MakePipe();
  Fd& out_r = out_pipe.read;
  Fd& out_w = out_pipe.write;
  Fd& err_r = err_pipe.read;
  Fd& err_w = err_pipe.write;
  Fd& exec_r = exec_pipe.read;
  Fd& exec_w = exec_pipe.write;

  const auto start = Clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) throw InfraError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);
    const int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, 0);
    if (::dup2(out_w.get(), 1) < 0 || ::dup2(err_w.get(), 2) < 0) ChildFail(exec_w.get());
    struct rlimit no_core = {0, 0};
    ::setrlimit(RLIMIT_CORE, &no_core);
    if (address_space_mb > 0) {
      const rlim_t bytes = static_cast<rlim_t>(address_space_mb) << 20;
      struct rlimit as = {bytes, bytes};
      ::setrlimit(RLIMIT_AS, &as);
    }
    // Network isolation is best effort: it needs either privilege or
    // unprivileged user namespaces.
    if (::unshare(CLONE_NEWNET) != 0 && ::unshare(CLONE_NEWUSER | CLONE_NEWNET) == 0) {
      WriteFile("/proc/self/setgroups", "deny");
      WriteFile("/proc/self/uid_map", uid_map);
      WriteFile("/proc/self/gid_map", gid_map);
    }
    if (::chdir(cwd_str.c_str()) != 0) ChildFail(exec_w.get());
    ::execve(cargv[0], cargv.data(), cenv.data());
    ChildFail(exec_w.get());
  }
  ::setpgid(pid, pid);
  out_w.reset();
  err_w.reset();
  exec_w.reset();

  int exec_errno = 0;
  ssize_t got;
  do {
    got = ::read(exec_r.get(), &exec_errno, sizeof exec_errno);
  } while (got < 0 && errno == EINTR);
  if (got == static_cast<ssize_t>(sizeof exec_errno)) {
    int status;
    ::waitpid(pid, &status, 0);
    out.infra_error = true;
    out.exit_status = 127;
    out.stderr_bytes = "cannot start " + argv[0] + ": " + std::strerror(exec_errno);
    out.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
  }

  const auto deadline = start + timeout;
  bool out_open = true;
  bool err_open = true;
  bool reaped = false;
  int status = 0;
  std::optional<Clock::time_point> drain_deadline;
  while (out_open || err_open || !reaped) {
    const auto now = Clock::now();
    if (!reaped && now >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      reaped = true;
      out.timed_out = true;
      break;
    }
    if (reaped && drain_deadline && now >= *drain_deadline) break;
    if (!reaped) {
      const pid_t r = ::waitpid(pid, &status, WNOHANG);
      if (r == pid) {
        reaped = true;
        // Take down anything the runner left behind holding our pipes.
        ::kill(-pid, SIGKILL);
        drain_deadline = Clock::now() + std::chrono::seconds(1);
      }
    }
    if (!out_open && !err_open) {
      if (!reaped) std::this_thread::sleep_for(std::chrono::milliseconds(2));
      continue;
    }
    struct pollfd fds[2];
    nfds_t n = 0;
    if (out_open) fds[n++] = {out_r.get(), POLLIN, 0};
    if (err_open) fds[n++] = {err_r.get(), POLLIN, 0};
    const int ready = ::poll(fds, n, 10);
    if (ready <= 0) continue;
    for (nfds_t i = 0; i < n; ++i) {
      if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      if (fds[i].fd == out_r.get()) Drain(out_r.get(), out.stdout_bytes, out_open);
      else Drain(err_r.get(), out.stderr_bytes, err_open);
    }
  }
  out.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (!out.timed_out) {
    if (WIFSIGNALED(status)) {
      out.signal = WTERMSIG(status);
    } else {
      out.exit_status = WEXITSTATUS(status);
    }
  }
  out.markers = ParseMarkers(out.stdout_bytes);
  return out;
}

ExecutionOutcome SimulatedBackend::Execute(const GeneratedCase& c, const std::string& device) {
  const auto start = Clock::now();
  ExecutionOutcome out;
  out.case_id = c.case_id;
  out.device = device;
  try {
    const sim::SimResult r = catalog_.Invoke(c.api_name, c.input.params, device);
    if (r.fault) {
      switch (*r.fault) {
        case sim::FaultKind::kSegfault:
          out.signal = SIGSEGV;
          out.stderr_bytes = "Fatal Python error: Segmentation fault\n\n#0 sim::" + r.bug_id + "\n";
          break;
        case sim::FaultKind::kAbort:
          out.signal = SIGABRT;
          out.stderr_bytes = "Fatal Python error: Aborted\n\n#0 sim::" + r.bug_id + "\n";
          break;
        case sim::FaultKind::kHang:
          out.timed_out = true;
          out.stderr_bytes = "#0 sim::" + r.bug_id + "\n";
          break;
        case sim::FaultKind::kWrongOutputOnB:
          break;
      }
    } else if (r.exception) {
      MarkerParse m;
      m.verdict = MarkerVerdict::kException;
      m.exception = *r.exception;
      out.stdout_bytes = FormatMarkers(m);
      out.exit_status = 0;
    } else {
      MarkerParse m;
      m.verdict = MarkerVerdict::kOk;
      if (r.output) m.output_block = r.output->ToLine();
      out.stdout_bytes = FormatMarkers(m);
      out.exit_status = 0;
    }
  } catch (const UnknownApi& e) {
    out.exit_status = 1;
    out.stderr_bytes = "Traceback (most recent call last):\nImportError: " +
                       std::string(e.what()) + "\n";
  }
  out.markers = ParseMarkers(out.stdout_bytes);
  out.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

ScriptedBackend::ScriptedBackend(ScriptedOptions options) : options_(std::move(options)) {
  if (options_.runner.empty()) throw InfraError("empty runner command");
  runner_path_ = FindExecutable(options_.runner[0]);
  if (runner_path_.empty()) throw InfraError("runner not found: " + options_.runner[0]);
  std::error_code ec;
  std::filesystem::create_directories(options_.work_dir, ec);
  if (ec) throw InfraError("cannot create work dir " + options_.work_dir.string() + ": " + ec.message());
  options_.work_dir = std::filesystem::absolute(options_.work_dir);
}

ExecutionOutcome ScriptedBackend::Execute(const GeneratedCase& c, const std::string& device) {
  ExecutionOutcome out;
  out.case_id = c.case_id;
  out.device = device;
  RenderedCase rendered;
  try {
    rendered = Render(c, options_.profile, device);
  } catch (const Error& e) {
    out.infra_error = true;
    out.exit_status = 127;
    out.stderr_bytes = std::string("render failed: ") + e.what();
    return out;
  }
  const std::string stem = c.case_id + "." + SafeFileStem(device);
  const std::filesystem::path script = options_.work_dir / (stem + ".script");
  const std::filesystem::path case_dir = options_.work_dir / stem;
  std::error_code ec;
  std::filesystem::create_directories(case_dir, ec);
  {
    std::ofstream f(script, std::ios::binary | std::ios::trunc);
    f << rendered.script;
    if (!f || ec) {
      out.infra_error = true;
      out.exit_status = 127;
      out.stderr_bytes = "cannot write " + script.string();
      return out;
    }
  }

  std::vector<std::string> argv = options_.runner;
  argv[0] = runner_path_;
  argv.push_back(script.string());
  std::vector<std::string> env;
  for (const std::string& key : options_.env_allowlist) {
    bool overridden = false;
    for (const auto& [k, v] : options_.extra_env) overridden |= k == key;
    if (overridden) continue;
    if (const char* v = std::getenv(key.c_str())) env.push_back(key + "=" + v);
  }
  for (const auto& [k, v] : options_.extra_env) env.push_back(k + "=" + v);

  try {
    out = RunSandboxed(argv, case_dir, env, options_.timeout, options_.address_space_mb);
  } catch (const InfraError& e) {
    out.infra_error = true;
    out.exit_status = 127;
    out.stderr_bytes = e.what();
  }
  out.case_id = c.case_id;
  out.device = device;
  if (!options_.keep_artifacts) {
    std::filesystem::remove_all(case_dir, ec);
    std::filesystem::remove(script, ec);
  }
  return out;
}

}  // namespace orion
