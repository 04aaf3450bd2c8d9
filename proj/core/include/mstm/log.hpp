// Copyright 2026 The MSTM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MSTM_LOG_HPP_
#define MSTM_LOG_HPP_

#include <sstream>
#include <string>

namespace mstm {

enum class LogLevel { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3, kOff = 4 };

// Current threshold. Initialized once from the MSTM_LOG environment
// variable (debug|info|warn|error|off, default info).
LogLevel log_threshold();
void set_log_threshold(LogLevel level);

// Writes one line to stderr if `level` passes the threshold. Thread safe.
void log_message(LogLevel level, const std::string& msg);

namespace detail {
inline void log_fmt(std::ostringstream&) {}
template <typename T, typename... Rest>
void log_fmt(std::ostringstream& os, const T& v, const Rest&... rest) {
  os << v;
  log_fmt(os, rest...);
}
}  // namespace detail

template <typename... Args>
void log(LogLevel level, const Args&... args) {
  if (level < log_threshold()) return;
  std::ostringstream os;
  detail::log_fmt(os, args...);
  log_message(level, os.str());
}

#define MSTM_LOG_DEBUG(...) ::mstm::log(::mstm::LogLevel::kDebug, __VA_ARGS__)
#define MSTM_LOG_INFO(...) ::mstm::log(::mstm::LogLevel::kInfo, __VA_ARGS__)
#define MSTM_LOG_WARN(...) ::mstm::log(::mstm::LogLevel::kWarn, __VA_ARGS__)
#define MSTM_LOG_ERROR(...) ::mstm::log(::mstm::LogLevel::kError, __VA_ARGS__)

}  // namespace mstm

#endif  // MSTM_LOG_HPP_
