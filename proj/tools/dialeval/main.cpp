// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "dialeval/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dialeval::cli::run(args, std::cout, std::cerr);
}
