// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>

namespace bitmm {

// File and container failures: unreadable path, bad magic, truncated payload,
// version or kind mismatch, dimension overflow.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// A bit-plane triple that violates the ternary encoding table.
class InvalidEncoding : public std::runtime_error {
 public:
  explicit InvalidEncoding(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bitmm
