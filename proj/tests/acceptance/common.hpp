#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace dggan::acceptance {

enum class Status { kPass, kFail, kBlocked };

/// Collects one line per criterion and prints it as soon as it is known.
class Reporter {
 public:
  void report(int criterion, const std::string& title, Status status, const std::string& detail);
  /// PASS if `ok`, otherwise FAIL.
  void check(int criterion, const std::string& title, bool ok, const std::string& detail) {
    report(criterion, title, ok ? Status::kPass : Status::kFail, detail);
  }

  bool any_failed() const { return failed_; }
  bool all_blocked() const { return !lines_.empty() && blocked_ == lines_.size(); }
  /// 1 if anything failed, else 0.
  int exit_code() const { return failed_ ? 1 : 0; }

 private:
  std::vector<std::string> lines_;
  std::size_t blocked_ = 0;
  bool failed_ = false;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// printf-style formatting into a std::string.
std::string format(const char* fmt, ...) __attribute__((format(printf, 1, 2)));

}  // namespace dggan::acceptance
