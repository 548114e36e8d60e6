#include "common.hpp"

#include <cstdarg>
#include <cstdio>
#include <iostream>

namespace dggan::acceptance {

void Reporter::report(int criterion, const std::string& title, Status status,
                      const std::string& detail) {
  const char* tag = status == Status::kPass ? "PASS" : status == Status::kFail ? "FAIL" : "BLOCKED";
  std::string line = std::string(tag) + " criterion " + std::to_string(criterion) + " (" + title + ")";
  if (!detail.empty()) line += ": " + detail;
  std::cout << line << std::endl;
  lines_.push_back(line);
  if (status == Status::kFail) failed_ = true;
  if (status == Status::kBlocked) ++blocked_;
}

std::string format(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  va_list copy;
  va_copy(copy, args);
  const int n = std::vsnprintf(nullptr, 0, fmt, copy);
  va_end(copy);
  std::string out(static_cast<std::size_t>(n), '\0');
  std::vsnprintf(out.data(), out.size() + 1, fmt, args);
  va_end(args);
  return out;
}

}  // namespace dggan::acceptance
