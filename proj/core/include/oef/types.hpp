// Copyright 2026 The OEF Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OEF_TYPES_HPP_
#define OEF_TYPES_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace oef {

using Action = int;
using Player = int;

// Pseudo-players used by Game::Analyze / state encodings.
inline constexpr Player kChancePlayer = -1;
inline constexpr Player kTerminalPlayer = -2;

// All contract violations surface as Error; what() starts with a short
// machine-checkable code ("terminal", "illegal-action", "undecodable", ...).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

[[noreturn]] inline void Fatal(const std::string& msg) { throw Error(msg); }

inline void Check(bool cond, const std::string& msg) {
  if (!cond) Fatal(msg);
}

}  // namespace oef

#endif  // OEF_TYPES_HPP_
