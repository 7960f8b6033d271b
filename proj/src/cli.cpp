// SPDX-License-Identifier: Apache-2.0
//
// drsim - drone relay station assisted V2X link simulator
// Copyright (C) 2026 drsim contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "drsim/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "drsim/config.hpp"
#include "drsim/kernels/pathloss_grid.hpp"
#include "drsim/sim.hpp"

#ifndef DRSIM_VERSION_STRING
#define DRSIM_VERSION_STRING "0.0.0"
#endif

namespace drsim::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

// CSV numbers: deterministic shortish decimal form.
std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void apply_backend(const std::string& name) {
  try {
    if (name == "scalar") {
      kernels::force_backend(kernels::Backend::scalar);
    } else if (name == "avx2") {
      kernels::force_backend(kernels::Backend::avx2);
    } else {
      kernels::reset_backend();
    }
  } catch (const std::exception& e) {
    throw config_error(e.what());
  }
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

const char* kind_str(PairKind k) { return k == PairKind::v2v ? "v2v" : "v2i"; }

void write_episode_log(const fs::path& path, const RunResult& res) {
  std::ofstream os = open_out(path);
  Json meta;
  meta["type"] = "meta";
  meta["schema"] = "drsim-episode-log";
  meta["schema_version"] = 1;
  os << meta.dump() << '\n';
  for (const auto& ep : res.episodes) {
    for (const auto& st : ep.steps) {
      Json r;
      r["ep"] = ep.episode_index;
      r["pair"] = ep.pair_id;
      r["kind"] = kind_str(ep.kind);
      r["step"] = st.step;
      r["cycle"] = st.cycle;
      r["x"] = st.drs.position.x;
      r["y"] = st.drs.position.y;
      r["z"] = st.drs.position.z;
      r["yaw"] = st.drs.yaw;
      r["ax"] = st.node_a.x;
      r["ay"] = st.node_a.y;
      r["az"] = st.node_a.z;
      r["bx"] = st.node_b.x;
      r["by"] = st.node_b.y;
      r["bz"] = st.node_b.z;
      r["xy_m"] = st.xy_separation_m;
      r["d1_m"] = st.d1_m;
      r["d2_m"] = st.d2_m;
      r["ris_db"] = st.ris_pl_db;
      r["dir_db"] = st.direct_pl_db;
      r["eff_db"] = st.eff_pl_db;
      r["reward"] = st.reward;
      r["rate_dir"] = st.rate_direct_bps;
      r["rate_comb"] = st.rate_combined_bps;
      r["nf"] = st.near_field ? 1 : 0;
      r["action"] = st.action;
      r["s"] = {st.state.bins[0], st.state.bins[1], st.state.bins[2], st.state.bins[3]};
      os << r.dump() << '\n';
    }
  }
}

void write_per_cycle_csv(const fs::path& path, const MetricsReport& rep) {
  std::ofstream os = open_out(path);
  os << "len_lo,len_hi,cycle,episodes,mean_reward,mean_ris_pl_db,mean_eff_pl_db\n";
  for (const auto& r : rep.per_cycle) {
    os << r.len_lo << ',' << r.len_hi << ',' << r.cycle << ',' << r.episodes << ','
       << fmt_g(r.mean_reward) << ',' << fmt_g(r.mean_ris_pl_db) << ','
       << fmt_g(r.mean_eff_pl_db) << '\n';
  }
}

void write_distance_csv(const fs::path& path, const MetricsReport& rep) {
  std::ofstream os = open_out(path);
  os << "lo_m,hi_m,samples,mean_rate_direct_bps,mean_rate_combined_bps,"
        "mean_improvement_bps,mean_improvement_pct\n";
  for (const auto& r : rep.distance_buckets) {
    os << fmt_g(r.lo_m) << ',' << fmt_g(r.hi_m) << ',' << r.samples << ','
       << fmt_g(r.mean_rate_direct_bps) << ',' << fmt_g(r.mean_rate_combined_bps) << ','
       << fmt_g(r.mean_improvement_bps) << ',' << fmt_g(r.mean_improvement_pct) << '\n';
  }
}

void write_audit_csv(const fs::path& path, const AuditReport& a) {
  std::ofstream os = open_out(path);
  os << "steps,displacement_bound_m,max_displacement_m,displacement_violations,"
        "rotation_bound_rad,max_rotation_rad,rotation_violations,box_violations,"
        "total_violations\n";
  os << a.steps << ',' << fmt_g(a.displacement_bound_m) << ',' << fmt_g(a.max_displacement_m)
     << ',' << a.displacement_violations << ',' << fmt_g(a.rotation_bound_rad) << ','
     << fmt_g(a.max_rotation_rad) << ',' << a.rotation_violations << ',' << a.box_violations
     << ',' << a.total_violations() << '\n';
}

Json summary_json(const MetricsReport& rep, const AuditReport& audit) {
  const RunSummary& s = rep.summary;
  Json j;
  j["summary"] = {{"total_steps", s.total_steps},
                  {"serving_steps", s.serving_steps},
                  {"idle_steps", s.idle_steps},
                  {"near_field_steps", s.near_field_steps},
                  {"episodes", s.episodes},
                  {"mean_episode_length", s.mean_episode_length},
                  {"mean_cum_reward", s.mean_cum_reward},
                  {"first_decile_mean_cum_reward", s.first_decile_mean_cum_reward},
                  {"last_decile_mean_cum_reward", s.last_decile_mean_cum_reward},
                  {"mean_ris_pl_db", s.mean_ris_pl_db},
                  {"mean_eff_pl_db", s.mean_eff_pl_db},
                  {"q_updates", s.q_updates},
                  {"q_states", s.q_states}};
  j["audit"] = {{"steps", audit.steps},
                {"displacement_bound_m", audit.displacement_bound_m},
                {"max_displacement_m", audit.max_displacement_m},
                {"displacement_violations", audit.displacement_violations},
                {"rotation_bound_rad", audit.rotation_bound_rad},
                {"max_rotation_rad", audit.max_rotation_rad},
                {"rotation_violations", audit.rotation_violations},
                {"box_violations", audit.box_violations},
                {"total_violations", audit.total_violations()}};
  return j;
}

// Everything a finished run leaves on disk; returns the manifest's
// outputs table (file names relative to dir).
Json write_run_outputs(const fs::path& dir, const SimConfig& cfg, const RunResult& res,
                       const MetricsReport& rep, bool write_checkpoint) {
  Json outputs = Json::object();
  if (cfg.run.log_steps) {
    write_episode_log(dir / "episodes.jsonl", res);
    outputs["episode_log"] = "episodes.jsonl";
  }
  write_per_cycle_csv(dir / "per_cycle.csv", rep);
  outputs["per_cycle_csv"] = "per_cycle.csv";
  write_distance_csv(dir / "distance_buckets.csv", rep);
  outputs["distance_csv"] = "distance_buckets.csv";
  write_audit_csv(dir / "audit.csv", res.audit);
  outputs["audit_csv"] = "audit.csv";
  {
    std::ofstream os = open_out(dir / "summary.json");
    os << summary_json(rep, res.audit).dump(2) << '\n';
    outputs["summary"] = "summary.json";
  }
  if (write_checkpoint) {
    std::ofstream os = open_out(dir / "qtable.txt");
    res.tables.save(os);
    outputs["checkpoint"] = "qtable.txt";
  }
  return outputs;
}

void write_manifest(const fs::path& dir, const std::string& command, const SimConfig& cfg,
                    const Json& outputs, const Json& inputs) {
  Json m;
  m["manifest_version"] = 1;
  m["tool"] = "drsim";
  m["tool_version"] = DRSIM_VERSION_STRING;
  m["command"] = command;
  m["created_utc"] = utc_now();  // the only wall-clock field; data files stay byte-stable
  if (!inputs.empty()) m["inputs"] = inputs;
  m["outputs"] = outputs;
  m["config"] = config_to_json(cfg);
  std::ofstream os = open_out(dir / "manifest.json");
  os << m.dump(2) << '\n';
}

void print_run_summary(const MetricsReport& rep) {
  const RunSummary& s = rep.summary;
  std::cout << "steps: " << s.total_steps << " (serving " << s.serving_steps << ", idle "
            << s.idle_steps << ", near-field " << s.near_field_steps << ")\n"
            << "episodes: " << s.episodes << ", mean length " << fmt_g(s.mean_episode_length)
            << "\n"
            << "mean cumulative reward: " << fmt_g(s.mean_cum_reward) << " (first decile "
            << fmt_g(s.first_decile_mean_cum_reward) << ", last decile "
            << fmt_g(s.last_decile_mean_cum_reward) << ")\n"
            << "mean reflected-link path loss: " << fmt_g(s.mean_ris_pl_db) << " dB, combined "
            << fmt_g(s.mean_eff_pl_db) << " dB\n"
            << "q-table: " << s.q_states << " states, " << s.q_updates << " updates\n";
}

}  // namespace

int cmd_train(const CommonArgs& args) {
  return guarded([&]() -> int {
    const SimConfig cfg = load_config(args.config_path, args.overrides, args.seed, args.steps);
    apply_backend(cfg.kernel_backend);
    fs::create_directories(args.out_dir);

    const RunResult res = run(cfg, RunOptions{});
    const MetricsReport rep = aggregate_metrics(res, cfg.metrics);
    const Json outputs = write_run_outputs(args.out_dir, cfg, res, rep, true);
    write_manifest(args.out_dir, "train", cfg, outputs, Json::object());

    print_run_summary(rep);
    std::cout << "outputs in " << args.out_dir << '\n';
    return 0;
  });
}

int cmd_eval(const EvalArgs& args) {
  return guarded([&]() -> int {
    const SimConfig cfg =
        load_config(args.common.config_path, args.common.overrides, args.common.seed,
                    args.common.steps);
    apply_backend(cfg.kernel_backend);

    std::ifstream in(args.checkpoint_path);
    if (!in) throw config_error("cannot open checkpoint: " + args.checkpoint_path);
    QTables tables;
    try {
      tables = QTables::load(in);
    } catch (const std::exception& e) {
      throw config_error("bad checkpoint " + args.checkpoint_path + ": " + e.what());
    }

    fs::create_directories(args.common.out_dir);
    RunOptions opt;
    opt.learning = false;
    opt.epsilon_override = args.random_policy ? 1.0 : 0.0;
    opt.initial_tables = &tables;
    const RunResult res = run(cfg, opt);
    const MetricsReport rep = aggregate_metrics(res, cfg.metrics);

    const Json outputs = write_run_outputs(args.common.out_dir, cfg, res, rep, false);
    Json inputs;
    inputs["checkpoint"] = args.checkpoint_path;
    inputs["policy"] = args.random_policy ? "random" : "greedy";
    write_manifest(args.common.out_dir, "eval", cfg, outputs, inputs);

    print_run_summary(rep);
    std::cout << "rate improvement by pair distance:\n";
    for (const auto& b : rep.distance_buckets) {
      std::cout << "  [" << fmt_g(b.lo_m) << ", " << fmt_g(b.hi_m) << ") m: " << b.samples
                << " samples, +" << fmt_g(b.mean_improvement_bps) << " bit/s ("
                << fmt_g(b.mean_improvement_pct) << "%)\n";
    }
    std::cout << "outputs in " << args.common.out_dir << '\n';
    return 0;
  });
}

int cmd_surface(const CommonArgs& args) {
  return guarded([&]() -> int {
    const SimConfig cfg = load_config(args.config_path, args.overrides, args.seed, args.steps);
    apply_backend(cfg.kernel_backend);
    fs::create_directories(args.out_dir);

    const SurfaceResult sr = pathloss_surface(cfg.surface, cfg.ris, cfg.direct);

    const fs::path csv = fs::path(args.out_dir) / "surface.csv";
    {
      std::ofstream os = open_out(csv);
      const SurfaceConfig& s = cfg.surface;
      os << "# node_a=" << fmt_g(s.node_a.x) << ' ' << fmt_g(s.node_a.y) << ' '
         << fmt_g(s.node_a.z) << '\n';
      os << "# node_b=" << fmt_g(s.node_b.x) << ' ' << fmt_g(s.node_b.y) << ' '
         << fmt_g(s.node_b.z) << '\n';
      os << "# kind=" << kind_str(s.kind) << '\n';
      os << "# z=" << fmt_g(s.z) << " yaw=" << fmt_g(s.yaw) << '\n';
      os << "# grid=" << s.nx << 'x' << s.ny << " x=[" << fmt_g(s.x0) << ',' << fmt_g(s.x1)
         << "] y=[" << fmt_g(s.y0) << ',' << fmt_g(s.y1) << "]\n";
      os << "# orientation_optimal=" << (s.orientation_optimal ? 1 : 0)
         << " combined=" << (s.combined ? 1 : 0) << '\n';
      if (sr.combined) os << "# direct_pl_db=" << fmt_g(sr.direct_pl_db) << '\n';
      os << "x_m,y_m,pl_db,near_field\n";
      for (std::size_t iy = 0; iy < sr.ys.size(); ++iy) {
        for (std::size_t ix = 0; ix < sr.xs.size(); ++ix) {
          const std::size_t idx = iy * sr.xs.size() + ix;
          os << fmt_g(sr.xs[ix]) << ',' << fmt_g(sr.ys[iy]) << ',' << fmt_g(sr.pl_db[idx])
             << ',' << int(sr.near_field[idx]) << '\n';
        }
      }
    }

    Json outputs;
    outputs["surface_csv"] = "surface.csv";
    write_manifest(args.out_dir, "surface", cfg, outputs, Json::object());

    std::cout << "surface " << cfg.surface.nx << "x" << cfg.surface.ny << " cells, backend "
              << kernels::backend_name(kernels::active_backend()) << '\n'
              << "path loss min " << fmt_g(sr.min_pl_db) << " dB at ("
              << fmt_g(sr.xs[static_cast<std::size_t>(sr.min_ix)]) << ", "
              << fmt_g(sr.ys[static_cast<std::size_t>(sr.min_iy)]) << "), max "
              << fmt_g(sr.max_pl_db) << " dB, range " << fmt_g(sr.max_pl_db - sr.min_pl_db)
              << " dB\n"
              << "outputs in " << args.out_dir << '\n';
    return 0;
  });
}

int cmd_sweep(const SweepArgs& args) {
  return guarded([&]() -> int {
    std::ifstream in(args.sweep_path);
    if (!in) throw config_error("cannot open sweep spec: " + args.sweep_path);
    Json spec;
    try {
      spec = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw config_error(std::string("cannot parse sweep spec: ") + e.what());
    }
    if (!spec.is_object()) throw config_error("sweep spec must be a JSON object");
    for (const auto& [k, v] : spec.items()) {
      (void)v;
      if (k != "param_grid" && k != "seeds") {
        throw config_error("unknown sweep spec key: " + k);
      }
    }
    const Json grid = spec.value("param_grid", Json::object());
    if (!grid.is_object()) throw config_error("param_grid must be an object");
    std::vector<std::uint64_t> seeds;
    if (spec.contains("seeds")) {
      try {
        seeds = spec.at("seeds").get<std::vector<std::uint64_t>>();
      } catch (const nlohmann::json::exception&) {
        throw config_error("seeds must be an array of unsigned integers");
      }
    }
    if (seeds.empty()) seeds.push_back(1);

    // Cartesian product over grid keys in file order, rightmost key fastest.
    std::vector<std::string> keys;
    std::vector<std::vector<Json>> values;
    for (const auto& [k, v] : grid.items()) {
      if (!v.is_array() || v.empty()) {
        throw config_error("param_grid." + k + " must be a non-empty array");
      }
      keys.push_back(k);
      values.emplace_back(v.begin(), v.end());
    }
    std::size_t combos = 1;
    for (const auto& v : values) combos *= v.size();

    const ConfigJson base = load_config_doc(args.common.config_path, args.common.overrides,
                                            args.common.seed, args.common.steps);

    struct Replica {
      std::string name;
      std::uint64_t seed = 0;
      std::vector<Json> params;
      SimConfig cfg;
      std::string status = "ok";
      RunSummary summary;
    };
    std::vector<Replica> replicas;
    for (std::size_t c = 0; c < combos; ++c) {
      std::vector<Json> combo(keys.size());
      std::size_t rem = c;
      for (std::size_t k = keys.size(); k-- > 0;) {
        combo[k] = values[k][rem % values[k].size()];
        rem /= values[k].size();
      }
      for (const std::uint64_t seed : seeds) {
        ConfigJson doc = base;
        for (std::size_t k = 0; k < keys.size(); ++k) set_config_value(doc, keys[k], combo[k]);
        doc["run"]["seed"] = seed;
        Replica r;
        char nm[32];
        std::snprintf(nm, sizeof nm, "c%03zu_s%llu", c,
                      static_cast<unsigned long long>(seed));
        r.name = nm;
        r.seed = seed;
        r.params = combo;
        r.cfg = config_from_json(doc);  // config problems surface before any run starts
        replicas.push_back(std::move(r));
      }
    }
    if (replicas.empty()) throw config_error("sweep spec produced no replicas");

    // One backend for the whole process; replicas only differ in config.
    apply_backend(replicas.front().cfg.kernel_backend);
    fs::create_directories(args.common.out_dir);

    unsigned jobs = args.jobs > 0 ? static_cast<unsigned>(args.jobs)
                                  : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(replicas.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= replicas.size()) return;
        Replica& r = replicas[i];
        try {
          const fs::path dir = fs::path(args.common.out_dir) / r.name;
          fs::create_directories(dir);
          const RunResult res = run(r.cfg, RunOptions{});
          const MetricsReport rep = aggregate_metrics(res, r.cfg.metrics);
          const Json outputs = write_run_outputs(dir, r.cfg, res, rep, true);
          write_manifest(dir, "train", r.cfg, outputs, Json::object());
          r.summary = rep.summary;
        } catch (const std::exception& e) {
          r.status = std::string("failed: ") + e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    bool any_failed = false;
    {
      std::ofstream os = open_out(fs::path(args.common.out_dir) / "summary.csv");
      os << "replica,seed";
      for (const auto& k : keys) os << ',' << csv_field(k);
      os << ",status,episodes,mean_cum_reward,first_decile_mean_cum_reward,"
            "last_decile_mean_cum_reward,mean_ris_pl_db,mean_eff_pl_db\n";
      for (const auto& r : replicas) {
        os << r.name << ',' << r.seed;
        for (const auto& p : r.params) os << ',' << csv_field(p.dump());
        os << ',' << csv_field(r.status) << ',' << r.summary.episodes << ','
           << fmt_g(r.summary.mean_cum_reward) << ','
           << fmt_g(r.summary.first_decile_mean_cum_reward) << ','
           << fmt_g(r.summary.last_decile_mean_cum_reward) << ','
           << fmt_g(r.summary.mean_ris_pl_db) << ',' << fmt_g(r.summary.mean_eff_pl_db) << '\n';
        if (r.status != "ok") any_failed = true;
      }
    }

    Json outputs;
    outputs["summary_csv"] = "summary.csv";
    Json names = Json::array();
    for (const auto& r : replicas) names.push_back(r.name);
    outputs["replicas"] = names;
    Json inputs;
    inputs["sweep_spec"] = spec;
    write_manifest(args.common.out_dir, "sweep", replicas.front().cfg, outputs, inputs);

    std::cout << replicas.size() << " replicas, " << jobs << " worker(s)\n";
    for (const auto& r : replicas) {
      std::cout << "  " << r.name << ": " << r.status << '\n';
    }
    std::cout << "outputs in " << args.common.out_dir << '\n';
    return any_failed ? 2 : 0;
  });
}

}  // namespace drsim::cli
