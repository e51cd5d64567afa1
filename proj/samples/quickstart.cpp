// Copyright 2026 The dqpt Authors
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

// Evolves the Case-1 quench exactly, with the Trotter circuit and at pulse level, and
// prints the psi1+ population of each at a few times.

#include <cstdio>

#include "dqpt/scenario.hpp"

int main() {
    dqpt::Scenario s;
    s.nTrotterSteps = 80;
    s.subsampleEvery = 10;
    std::printf("%6s %10s %10s %10s\n", "r", "exact", "circuit", "pulse");
    s.pipeline = dqpt::Pipeline::Exact;
    auto exact = dqpt::run_scenario(s);
    s.pipeline = dqpt::Pipeline::Circuit;
    auto circuit = dqpt::run_scenario(s);
    s.pipeline = dqpt::Pipeline::Pulse;
    auto pulse = dqpt::run_scenario(s);
    for (std::size_t k = 0; k < exact.timeSteps.size(); ++k) {
        std::printf("%6.2f %10.5f %10.5f %10.5f\n", exact.rescaledTimes[k], exact.populations[k][0],
                    circuit.populations[k][0], pulse.populations[k][0]);
    }
    auto zeros = dqpt::critical_times(s.mOverJ, s.gOverJ);
    if (!zeros.empty()) std::printf("first critical time %.4f\n", zeros.front());
    return 0;
}
