// Copyright 2026 The instrument-rt Authors
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

#pragma once

// Built-in acceptance suite: one check per criterion, each with its
// tolerances fixed below, run on the canonical fixtures and seeded random
// instances. Used by the acceptance test binary and `instrument-rt selftest`.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace irt::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  std::uint64_t seed = 0;
  std::size_t mc_samples = 100000;
  std::size_t haar_samples = 100000;
};

struct Criterion {
  int id;
  std::string name;
  std::function<CriterionResult(const Options&)> run;
};

const std::vector<Criterion>& criteria();

/// Runs one criterion; exceptions become a failing result.
CriterionResult run_criterion(const Criterion& c, const Options& options);
std::vector<CriterionResult> run_all(const Options& options = {});

/// "PASS  3  entangled fraction identity  <detail>".
std::string format(const CriterionResult& r);

}  // namespace irt::acceptance
