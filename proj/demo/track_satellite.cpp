// Copyright 2026 The lgmpc Authors
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

// Tracks the satellite reference with MPC and prints the error every second.

#include <lgmpc/lgmpc.hpp>

#include <cstdio>

int main()
{
  using namespace lgmpc;

  ScenarioConfig cfg = builtin_case(1);
  cfg.duration       = 6.0;
  const SimLog log   = run_scenario(cfg);

  std::printf("%6s %12s %12s %24s\n", "t [s]", "|eR_par|", "|eOmega|", "u [N m]");
  for (const SimRow & r : log.rows) {
    if (r.k % 5 != 0) { continue; }
    std::printf("%6.2f %12.3e %12.3e   (%6.2f, %6.2f, %6.2f)\n", r.t, r.norm_eR_par, r.norm_eOmega, r.u.x(), r.u.y(), r.u.z());
  }
  return 0;
}
