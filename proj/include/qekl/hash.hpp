/* Copyright 2026 The QEK Lab Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef QEKL_HASH_HPP_
#define QEKL_HASH_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace qekl {

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

// Hash of a real vector through its canonical %.17g rendering, so the
// value is stable across platforms.
inline std::uint64_t hash_vector(const Eigen::Ref<const Eigen::VectorXd>& v) {
  std::string text;
  char buf[40];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,", v[i]);
    text += buf;
  }
  return fnv1a64(text);
}

}  // namespace qekl

#endif  // QEKL_HASH_HPP_
