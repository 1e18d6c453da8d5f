// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "dialeval/backend.hpp"

namespace dialeval::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kOk = 0,
  kConfigOrData = 2,
  kTransport = 3,
  kInsufficientData = 4,
};

inline constexpr const char* kBackendUrlEnv = "DIALEVAL_BACKEND_URL";

struct Environment {
  /// Builds the backend for an endpoint URL. Defaults to HttpBackend.
  std::function<std::unique_ptr<InferenceBackend>(const std::string& url)> make_backend;
};

/// Runs `dialeval <args...>` (args exclude the program name) and returns
/// the exit code. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const Environment& env = {});

}  // namespace dialeval::cli
