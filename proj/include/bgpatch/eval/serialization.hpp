// Copyright 2026 The bgpatch Authors
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

#include <filesystem>
#include <ostream>

#include <nlohmann/json.hpp>

#include "bgpatch/attack/attack.hpp"
#include "bgpatch/core/patch.hpp"
#include "bgpatch/losses/losses.hpp"

namespace bgpatch {

/// Patch list as [{"group_id", "cx", "cy", "w", "h"}, ...].
nlohmann::json patches_to_json(const PatchSet& patches);
/// Throws std::invalid_argument on malformed input or overlapping patches.
PatchSet patches_from_json(const nlohmann::json& j);

nlohmann::json to_json(const LossBreakdown& loss);
nlohmann::json to_json(const IterationRecord& rec);
/// Summary of a run without the per-iteration trace.
nlohmann::json summary_json(const AttackResult& result);

/// One JSON object per line, one line per iteration.
void write_trace(std::ostream& out, const AttackResult& result);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace bgpatch
