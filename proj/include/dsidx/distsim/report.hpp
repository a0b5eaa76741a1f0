// Copyright 2026-present the dsidx authors
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

#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "dsidx/distsim/job.hpp"
#include "dsidx/distsim/simulator.hpp"

namespace dsidx::distsim {

inline nlohmann::json summary_json(const SimMetrics& m) {
  return {{"type", "summary"},
          {"makespan", m.makespan},
          {"steals", m.steals},
          {"stolen_fraction", m.stolen_fraction},
          {"rebuild_time", m.rebuild_time},
          {"imbalance", m.imbalance},
          {"busy", m.busy}};
}

/// One JSON object per executed job, then a summary record.
inline void write_jsonl(std::ostream& out, const SimMetrics& m) {
  for (const auto& r : m.log) {
    out << nlohmann::json{{"type", "job"},     {"job", r.job},   {"query", r.query_id},
                          {"partition", r.partition}, {"node", r.node}, {"start", r.start},
                          {"end", r.end},     {"stolen", r.stolen}}
               .dump()
        << '\n';
  }
  out << summary_json(m).dump() << '\n';
}

/// Job table; summary metrics go into leading '#' comment lines.
inline void write_csv(std::ostream& out, const SimMetrics& m) {
  out << "# makespan=" << m.makespan << " steals=" << m.steals
      << " stolen_fraction=" << m.stolen_fraction << " rebuild_time=" << m.rebuild_time
      << " imbalance=" << m.imbalance << '\n';
  out << "job,query,partition,node,start,end,stolen\n";
  for (const auto& r : m.log) {
    out << r.job << ',' << r.query_id << ',' << r.partition << ',' << r.node << ',' << r.start
        << ',' << r.end << ',' << (r.stolen ? 1 : 0) << '\n';
  }
}

}  // namespace dsidx::distsim
