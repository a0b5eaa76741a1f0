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

// dsidx command-line driver: generate, build, query, oracle, bench, sim.
//
// Exit status: 0 success, 1 usage error, 2 data/format error, 3 internal
// invariant violation.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsidx/dsidx.hpp"

namespace {

using nlohmann::json;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a run depends on; echoed into every output.
struct RunConfig {
  std::string subcommand;
  std::string dataset;
  std::string queries;
  std::string index;
  std::string out;
  std::string format = "jsonl";
  std::string engine = "tree";
  std::string engines = "all";
  std::string scenario;
  std::string derive_from;
  std::vector<std::string> overrides;
  std::size_t segments = 16;
  unsigned card_bits = 8;
  std::size_t leaf_capacity = 2000;
  std::size_t workers = 1;
  std::size_t chunk = 0;
  std::size_t count = 1000;
  std::size_t length = 256;
  std::size_t block_size = 4096;
  double noise = 0.1;
  std::uint64_t seed = 1;
  bool no_normalize = false;

  std::map<std::string, std::string> resolved() const {
    std::map<std::string, std::string> kv{{"subcommand", subcommand}, {"seed", std::to_string(seed)}};
    auto put = [&](const char* k, const std::string& v) {
      if (!v.empty()) kv[k] = v;
    };
    if (subcommand == "generate") {
      kv["count"] = std::to_string(count);
      if (derive_from.empty()) kv["length"] = std::to_string(length);
      put("derive_from", derive_from);
      if (!derive_from.empty()) kv["noise"] = json(noise).dump();
      put("out", out);
      return kv;
    }
    if (subcommand == "sim") {
      put("scenario", scenario);
      put("dataset", dataset);
      for (std::size_t i = 0; i < overrides.size(); ++i) kv["set" + std::to_string(i)] = overrides[i];
      kv["format"] = format;
      return kv;
    }
    put("dataset", dataset);
    put("queries", queries);
    put("index", index);
    kv["w"] = std::to_string(segments);
    kv["card_bits"] = std::to_string(card_bits);
    kv["leaf_capacity"] = std::to_string(leaf_capacity);
    kv["workers"] = std::to_string(workers);
    kv["normalize"] = no_normalize ? "false" : "true";
    if (subcommand == "build") kv["chunk"] = std::to_string(chunk);
    if (subcommand == "query") kv["engine"] = engine;
    if (subcommand == "bench") kv["engines"] = engines;
    if (subcommand == "query" || subcommand == "bench") kv["block_size"] = std::to_string(block_size);
    if (subcommand != "build") kv["format"] = format;
    return kv;
  }

  std::string resolved_string() const {
    std::string s;
    for (const auto& [k, v] : resolved()) s += k + "=" + v + "\n";
    return s;
  }

  std::uint64_t config_hash() const { return dsidx::fnv1a64(resolved_string()); }

  json header_json() const {
    json cfg = json::object();
    for (const auto& [k, v] : resolved()) cfg[k] = v;
    return {{"type", "config"},
            {"config", cfg},
            {"config_hash", dsidx::hex64(config_hash())},
            {"seed", seed},
            {"version", dsidx::kVersion}};
  }

  dsidx::SummaryParams params(std::size_t length_hint) const {
    dsidx::SummaryParams p;
    p.length = length_hint;
    p.segments = segments;
    p.max_card_bits = card_bits;
    p.validate();
    return p;
  }
};

/// stdout unless --out names a file.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::trunc);
      if (!*file_) {
        throw dsidx::FormatError(dsidx::FormatErrorKind::kIo, 0, "cannot open " + path + " for writing");
      }
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void write_header(std::ostream& os, const RunConfig& cfg) {
  if (cfg.format == "csv") {
    os << "# dsidx " << dsidx::kVersion << " config_hash=" << dsidx::hex64(cfg.config_hash())
       << " seed=" << cfg.seed << '\n';
    for (const auto& [k, v] : cfg.resolved()) os << "# " << k << "=" << v << '\n';
  } else {
    os << cfg.header_json().dump() << '\n';
  }
}

/// Loads a dataset and z-normalizes it unless it is flagged normalized or
/// normalization was disabled.
dsidx::Dataset load_series(const std::string& path, const RunConfig& cfg) {
  if (path.empty()) throw UsageError("missing required dataset/queries path");
  auto ds = dsidx::io::load_dataset(path);
  if (!cfg.no_normalize && !ds.normalized()) {
    for (std::size_t i = 0; i < ds.size(); ++i) {
      auto s = ds.series(i);
      const auto z = dsidx::znormalize(std::span<const float>(s.data(), s.size()));
      std::copy(z.values.begin(), z.values.end(), s.begin());
    }
    ds.set_flags(ds.flags() | dsidx::kFlagNormalized);
  }
  return ds;
}

json stats_json(const dsidx::SearchStats& s) {
  json j{{"real_distances", s.real_distances},
         {"init_distances", s.init_distances},
         {"lower_bounds", s.lower_bounds},
         {"pruning_ratio", s.pruning_ratio},
         {"wall_ms", s.wall_ms},
         {"initial_bsf", s.initial_bsf}};
  if (!s.queue_sizes.empty()) j["queue_sizes"] = s.queue_sizes;
  if (s.candidates) j["candidates"] = s.candidates;
  if (s.ranges_total) {
    j["ranges_total"] = s.ranges_total;
    j["ranges_scanned"] = s.ranges_scanned;
  }
  return j;
}

/// Dataset plus an index (loaded or built) and its flattened arrays.
struct Searchable {
  dsidx::Dataset dataset;
  dsidx::IndexTree tree;
  std::optional<dsidx::FlatArrays> flat;
};

Searchable open_searchable(const RunConfig& cfg) {
  Searchable s;
  s.dataset = load_series(cfg.dataset, cfg);
  if (!cfg.index.empty()) {
    s.tree = dsidx::io::load_index(cfg.index);
    if (s.tree.size() != s.dataset.size() || s.tree.params().length != s.dataset.length()) {
      throw dsidx::InputError("index " + cfg.index + " does not match dataset " + cfg.dataset);
    }
  } else {
    s.tree = dsidx::build(s.dataset, cfg.params(s.dataset.length()), {cfg.workers, cfg.leaf_capacity});
  }
  return s;
}

dsidx::QueryResult run_engine(const std::string& engine, Searchable& s, std::span<const float> q,
                              const RunConfig& cfg) {
  if (engine == "tree") {
    return dsidx::exact_search_tree(s.tree, s.dataset, q, {.workers = cfg.workers, .seed = cfg.seed});
  }
  if (!s.flat) s.flat = dsidx::flatten(s.tree);
  if (engine == "flatscan") {
    return dsidx::exact_search_flatscan(s.tree, s.flat->sax, s.dataset, q, {.workers = cfg.workers});
  }
  if (engine == "batched") {
    return dsidx::exact_search_batched(s.flat->leaf_ordered, s.tree, s.dataset, q,
                                       {.workers = cfg.workers, .block_size = cfg.block_size});
  }
  throw UsageError("--engine: unknown engine '" + engine + "'");
}

int cmd_generate(const RunConfig& cfg) {
  if (cfg.out.empty()) throw UsageError("--out is required");
  dsidx::Dataset ds;
  if (cfg.derive_from.empty()) {
    ds = dsidx::io::generate_random_walk(cfg.count, cfg.length, cfg.seed, cfg.out);
  } else {
    const auto source = load_series(cfg.derive_from, cfg);
    ds = dsidx::io::derive_queries(source, cfg.count, cfg.noise, cfg.seed);
    dsidx::io::write_dataset(cfg.out, ds);
  }
  auto report = cfg.header_json();
  report["type"] = "generate";
  report["series"] = ds.size();
  report["length"] = ds.length();
  std::cout << report.dump() << '\n';
  return kOk;
}

int cmd_build(const RunConfig& cfg) {
  if (cfg.out.empty()) throw UsageError("--out is required");
  if (cfg.dataset.empty()) throw UsageError("--dataset is required");
  dsidx::IndexTree tree;
  json report = cfg.header_json();
  report["type"] = "build";
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.chunk > 0) {
    std::ifstream probe;
    const auto header = dsidx::io::open_dataset(cfg.dataset, probe);
    if (!cfg.no_normalize && !(header.flags & dsidx::kFlagNormalized)) {
      throw dsidx::InputError("streaming build needs a normalized dataset (or --no-normalize)");
    }
    auto r = dsidx::io::stream_build(cfg.dataset, cfg.params(header.length),
                                     {cfg.workers, cfg.chunk, cfg.leaf_capacity, false});
    report["overlap_ms"] = dsidx::io::overlap_ms(r.timeline);
    tree = std::move(r.tree);
  } else {
    const auto ds = load_series(cfg.dataset, cfg);
    dsidx::BuildStats stats;
    tree = dsidx::build(ds, cfg.params(ds.length()), {cfg.workers, cfg.leaf_capacity}, &stats);
    report["summarize_ms"] = stats.summarize_ms;
    report["construct_ms"] = stats.construct_ms;
  }
  report["build_ms"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  report["series"] = tree.size();
  report["root_children"] = tree.root_children().size();
  report["leaves"] = tree.leaf_count();
  report["overflow_leaves"] = tree.overflow_leaves();
  dsidx::io::save_index(cfg.out, tree, {cfg.config_hash(), cfg.seed});
  std::cout << report.dump() << '\n';
  return kOk;
}

int cmd_query(const RunConfig& cfg, bool oracle) {
  if (cfg.queries.empty()) throw UsageError("--queries is required");
  const auto queries = load_series(cfg.queries, cfg);
  Output out(cfg.out);
  auto& os = out.stream();
  std::optional<Searchable> s;
  dsidx::Dataset data;
  if (oracle) {
    data = load_series(cfg.dataset, cfg);
  } else {
    s = open_searchable(cfg);
  }
  write_header(os, cfg);
  if (cfg.format == "csv") os << "query,engine,id,distance,wall_ms,real_distances,lower_bounds,pruning_ratio\n";
  const std::string engine = oracle ? "brute_force" : cfg.engine;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto r = oracle ? dsidx::brute_force(data, queries[i], cfg.workers)
                          : run_engine(cfg.engine, *s, queries[i], cfg);
    if (cfg.format == "csv") {
      os << i << ',' << engine << ',' << r.series_id << ',' << json(r.distance).dump() << ','
         << r.stats.wall_ms << ',' << r.stats.real_distances << ',' << r.stats.lower_bounds << ','
         << r.stats.pruning_ratio << '\n';
    } else {
      os << json{{"type", "result"},
                 {"query", i},
                 {"engine", engine},
                 {"id", r.series_id},
                 {"distance", r.distance},
                 {"stats", stats_json(r.stats)},
                 {"config_hash", dsidx::hex64(cfg.config_hash())},
                 {"seed", cfg.seed},
                 {"version", dsidx::kVersion}}
                .dump()
         << '\n';
    }
  }
  return kOk;
}

std::vector<std::string> split_engines(const std::string& list) {
  if (list == "all") return {"tree", "flatscan", "batched"};
  std::vector<std::string> out;
  std::stringstream ss(list);
  for (std::string e; std::getline(ss, e, ',');) {
    if (e != "tree" && e != "flatscan" && e != "batched") {
      throw UsageError("--engines: unknown engine '" + e + "'");
    }
    out.push_back(e);
  }
  if (out.empty()) throw UsageError("--engines: empty engine list");
  return out;
}

int cmd_bench(const RunConfig& cfg) {
  const auto engines = split_engines(cfg.engines);
  if (cfg.queries.empty()) throw UsageError("--queries is required");
  const auto queries = load_series(cfg.queries, cfg);
  auto s = open_searchable(cfg);
  Output out(cfg.out);
  auto& os = out.stream();
  write_header(os, cfg);
  if (cfg.format == "csv") {
    os << "engine,query,id,distance,latency_ms,real_distances,lower_bounds,pruning_ratio\n";
  }
  for (const auto& engine : engines) {
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const auto r = run_engine(engine, s, queries[i], cfg);
      if (cfg.format == "csv") {
        os << engine << ',' << i << ',' << r.series_id << ',' << json(r.distance).dump() << ','
           << r.stats.wall_ms << ',' << r.stats.real_distances << ',' << r.stats.lower_bounds
           << ',' << r.stats.pruning_ratio << '\n';
      } else {
        os << json{{"type", "bench"},     {"engine", engine},   {"query", i},
                   {"id", r.series_id},   {"distance", r.distance},
                   {"latency_ms", r.stats.wall_ms},
                   {"real_distances", r.stats.real_distances},
                   {"lower_bounds", r.stats.lower_bounds},
                   {"pruning_ratio", r.stats.pruning_ratio}}
                  .dump()
           << '\n';
      }
    }
  }
  return kOk;
}

int cmd_sim(const RunConfig& cfg) {
  namespace ds = dsidx::distsim;
  ds::Scenario sc = cfg.scenario.empty() ? ds::Scenario{} : ds::load_scenario(cfg.scenario);
  std::string extra;
  for (const auto& kv : cfg.overrides) extra += kv + "\n";
  sc = ds::parse_scenario(extra, sc);

  std::vector<ds::QueryJob> jobs;
  ds::PartitionMap map;
  std::optional<ds::CostModel> model;
  if (sc.mode == ds::SimMode::kMeasured) {
    const auto data = load_series(cfg.dataset, cfg);
    map = ds::partition(data.size(), sc.partitions, sc.nodes, sc.replication, sc.seed);
    auto params = cfg.params(data.length());
    const auto indexes = ds::build_partition_indexes(data, map, params, {sc.workers, sc.leaf_capacity});
    const auto queries = dsidx::io::derive_queries(data, sc.queries, sc.query_noise, sc.seed);
    auto batch = ds::measure_batch(queries, indexes, {.workers = sc.workers, .seed = sc.seed});
    jobs = std::move(batch.jobs);
    model = ds::predict_costs(jobs, sc.warmup);
  } else {
    map = ds::partition(sc.dataset_size, sc.partitions, sc.nodes, sc.replication, sc.seed);
    jobs = ds::synthetic_batch(sc, map);
  }
  const auto sched = ds::schedule(jobs, map, sc.policy);
  const auto metrics = ds::run_simulation(jobs, map, sched, sc.sim_config());
  if (const auto problem = ds::audit_log(metrics, jobs, map); !problem.empty()) {
    throw dsidx::InvariantError(problem);
  }

  Output out(cfg.out);
  auto& os = out.stream();
  if (cfg.format == "csv") {
    write_header(os, cfg);
    std::istringstream lines(sc.to_config_string());
    for (std::string l; std::getline(lines, l);) os << "# scenario." << l << '\n';
    if (model) {
      os << "# cost_model intercept=" << model->intercept << " bsf_coef=" << model->bsf_coef
         << " size_coef=" << model->size_coef << " fallback=" << model->fallback << '\n';
    }
    ds::write_csv(os, metrics);
  } else {
    auto header = cfg.header_json();
    std::istringstream lines(sc.to_config_string());
    for (std::string l; std::getline(lines, l);) {
      const auto eq = l.find('=');
      header["scenario"][l.substr(0, eq)] = l.substr(eq + 1);
    }
    if (model) {
      header["cost_model"] = {{"intercept", model->intercept},
                              {"bsf_coef", model->bsf_coef},
                              {"size_coef", model->size_coef},
                              {"residual_rms", model->residual_rms},
                              {"fallback", model->fallback}};
    }
    os << header.dump() << '\n';
    ds::write_jsonl(os, metrics);
  }
  return kOk;
}

void add_index_flags(CLI::App* app, RunConfig& cfg) {
  app->add_option("--w", cfg.segments, "Segments per summary")->check(CLI::Range(1, 32));
  app->add_option("--card-bits", cfg.card_bits, "Bits per symbol at maximum cardinality")
      ->check(CLI::Range(1, 16));
  app->add_option("--leaf-capacity", cfg.leaf_capacity, "Maximum entries per leaf")
      ->check(CLI::PositiveNumber);
  app->add_option("--workers", cfg.workers, "Worker threads")->check(CLI::PositiveNumber);
  app->add_flag("--no-normalize", cfg.no_normalize, "Do not z-normalize unflagged inputs");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"dsidx: exact similarity search over data series"};
  app.require_subcommand(1);
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();

  auto* gen = app.add_subcommand("generate", "Write a random-walk (or derived query) DSIX file");
  gen->add_option("--count", cfg.count, "Number of series")->check(CLI::PositiveNumber);
  gen->add_option("--length", cfg.length, "Series length")->check(CLI::PositiveNumber);
  gen->add_option("--seed", cfg.seed, "Random seed");
  gen->add_option("--out", cfg.out, "Output DSIX path")->required();
  gen->add_option("--derive-from", cfg.derive_from, "Derive noisy queries from this dataset");
  gen->add_option("--noise", cfg.noise, "Noise sigma for derived queries");

  auto* build = app.add_subcommand("build", "Build and serialize an index");
  build->add_option("--dataset", cfg.dataset, "DSIX dataset")->required();
  build->add_option("--out", cfg.out, "Index output path")->required();
  build->add_option("--chunk", cfg.chunk, "Stream the file in chunks of this many series (0: in memory)");
  build->add_option("--seed", cfg.seed, "Random seed");
  add_index_flags(build, cfg);

  const std::vector<std::string> formats{"csv", "jsonl"};
  auto* query = app.add_subcommand("query", "Answer queries with an exact engine");
  query->add_option("--dataset", cfg.dataset, "DSIX dataset")->required();
  query->add_option("--queries", cfg.queries, "DSIX query file")->required();
  query->add_option("--index", cfg.index, "Serialized index (built in memory when absent)");
  query->add_option("--engine", cfg.engine, "tree | flatscan | batched")
      ->check(CLI::IsMember({"tree", "flatscan", "batched"}));
  query->add_option("--block-size", cfg.block_size, "Batched engine block size")->check(CLI::PositiveNumber);
  query->add_option("--out", cfg.out, "Output path (stdout when absent)");
  query->add_option("--format", cfg.format, "csv | jsonl")->check(CLI::IsMember(formats));
  query->add_option("--seed", cfg.seed, "Random seed");
  add_index_flags(query, cfg);

  auto* oracle = app.add_subcommand("oracle", "Answer queries by brute force");
  oracle->add_option("--dataset", cfg.dataset, "DSIX dataset")->required();
  oracle->add_option("--queries", cfg.queries, "DSIX query file")->required();
  oracle->add_option("--out", cfg.out, "Output path (stdout when absent)");
  oracle->add_option("--format", cfg.format, "csv | jsonl")->check(CLI::IsMember(formats));
  oracle->add_option("--seed", cfg.seed, "Random seed");
  add_index_flags(oracle, cfg);

  auto* bench = app.add_subcommand("bench", "Per-query latency and pruning for each engine");
  bench->add_option("--dataset", cfg.dataset, "DSIX dataset")->required();
  bench->add_option("--queries", cfg.queries, "DSIX query file")->required();
  bench->add_option("--index", cfg.index, "Serialized index (built in memory when absent)");
  bench->add_option("--engines", cfg.engines, "all or a comma-separated engine list");
  bench->add_option("--block-size", cfg.block_size, "Batched engine block size")->check(CLI::PositiveNumber);
  bench->add_option("--out", cfg.out, "Output path (stdout when absent)");
  bench->add_option("--format", cfg.format, "csv | jsonl")->check(CLI::IsMember(formats));
  bench->add_option("--seed", cfg.seed, "Random seed");
  add_index_flags(bench, cfg);
  cfg.format = "jsonl";

  auto* sim = app.add_subcommand("sim", "Simulate multi-node scheduling and work stealing");
  sim->add_option("--config", cfg.scenario, "Scenario file (key=value lines)");
  sim->add_option("--set", cfg.overrides, "Scenario override key=value (repeatable)");
  sim->add_option("--dataset", cfg.dataset, "DSIX dataset (measured mode)");
  sim->add_option("--out", cfg.out, "Output path (stdout when absent)");
  sim->add_option("--format", cfg.format, "csv | jsonl")->check(CLI::IsMember(formats));
  sim->add_option("--w", cfg.segments, "Segments per summary (measured mode)")->check(CLI::Range(1, 32));
  sim->add_option("--card-bits", cfg.card_bits, "Bits per symbol (measured mode)")->check(CLI::Range(1, 16));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  if (cfg.subcommand == "bench" && bench->count("--format") == 0) cfg.format = "csv";

  try {
    if (cfg.subcommand == "generate") return cmd_generate(cfg);
    if (cfg.subcommand == "build") return cmd_build(cfg);
    if (cfg.subcommand == "query") return cmd_query(cfg, false);
    if (cfg.subcommand == "oracle") return cmd_query(cfg, true);
    if (cfg.subcommand == "bench") return cmd_bench(cfg);
    if (cfg.subcommand == "sim") return cmd_sim(cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const dsidx::InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return kInternal;
  } catch (const dsidx::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kData;
  } catch (const dsidx::InputError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
