// Copyright 2026 The PPPR Authors
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

#include "pppr/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "pppr/dataset.hpp"
#include "pppr/diffusion_sandbox.hpp"
#include "pppr/error.hpp"
#include "pppr/event_analysis.hpp"
#include "pppr/metrics.hpp"
#include "pppr/regularizer.hpp"
#include "pppr/text.hpp"

namespace pppr::cli {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

// A missing required flag or an inconsistent flag combination.
class UsageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

using FieldHandlers = std::map<std::string, std::function<void(const json&)>>;

void read_fields(const json& j, const std::string& where, const FieldHandlers& handlers) {
  if (!j.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    auto it = handlers.find(key);
    if (it == handlers.end()) throw ConfigError("config: unknown key '" + where + "." + key + "'");
    try {
      it->second(value);
    } catch (const json::exception&) {
      throw ConfigError("config: '" + where + "." + key + "' has the wrong type");
    }
  }
}

BackendKind parse_backend_kind(const std::string& s) {
  if (s == "mock") return BackendKind::kMock;
  if (s == "remote" || s == "remote_http") return BackendKind::kRemoteHttp;
  throw ConfigError("unknown backend '" + s + "' (expected mock or remote)");
}

BackendConfig backend_from_json(const json& j) {
  BackendConfig c;
  read_fields(j, "backend",
              {{"kind", [&](const json& v) { c.kind = parse_backend_kind(v.get<std::string>()); }},
               {"endpoint", [&](const json& v) { c.endpoint = v.get<std::string>(); }},
               {"model", [&](const json& v) { c.model = v.get<std::string>(); }},
               {"api_key_env", [&](const json& v) { c.api_key_env = v.get<std::string>(); }},
               {"timeout_ms", [&](const json& v) { c.timeout_ms = v.get<int>(); }},
               {"max_retries", [&](const json& v) { c.max_retries = v.get<int>(); }},
               {"backoff_base_ms", [&](const json& v) { c.backoff_base_ms = v.get<int>(); }},
               {"backoff_cap_ms", [&](const json& v) { c.backoff_cap_ms = v.get<int>(); }},
               {"cache_dir", [&](const json& v) { c.cache_dir = v.get<std::string>(); }},
               {"max_in_flight", [&](const json& v) { c.max_in_flight = v.get<int>(); }}});
  return c;
}

AugmentationPolicy policy_from_json(const json& j) {
  AugmentationPolicy p;
  read_fields(
      j, "augmentation",
      {{"n_rewrites", [&](const json& v) { p.n_rewrites = v.get<int>(); }},
       {"semantic_gate_enabled", [&](const json& v) { p.semantic_gate_enabled = v.get<bool>(); }},
       {"gate_threshold", [&](const json& v) { p.gate_threshold = v.get<double>(); }},
       {"max_attempts_per_rewrite", [&](const json& v) { p.max_attempts_per_rewrite = v.get<int>(); }},
       {"temperature", [&](const json& v) { p.temperature = v.get<double>(); }},
       {"max_tokens", [&](const json& v) { p.max_tokens = v.get<int>(); }},
       {"clip_fraction", [&](const json& v) { p.clip_fraction = v.get<double>(); }}});
  return p;
}

}  // namespace

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  read_fields(j, "config",
              {{"backend", [&](const json& v) { c.backend = backend_from_json(v); }},
               {"augmentation", [&](const json& v) { c.augmentation = policy_from_json(v); }},
               {"feature_params", [&](const json& v) { c.feature_params = feature_params_from_json(v); }},
               {"paths",
                [&](const json& v) {
                  read_fields(v, "paths",
                              {{"input", [&](const json& x) { c.paths.input = x.get<std::string>(); }},
                               {"output", [&](const json& x) { c.paths.output = x.get<std::string>(); }},
                               {"cache", [&](const json& x) { c.paths.cache = x.get<std::string>(); }}});
                }},
               {"seed", [&](const json& v) { c.seed = v.get<std::uint64_t>(); }}});
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

int exit_code_for(std::exception_ptr e) {
  try {
    std::rethrow_exception(e);
  } catch (const ConfigError&) {
    return kExitConfig;
  } catch (const BackendError&) {
    return kExitBackend;
  } catch (...) {
    return kExitData;
  }
}

namespace {

// ---------------------------------------------------------------------------
// Option holders

struct GlobalOptions {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  bool human = false;
  std::optional<std::string> cache_dir;
};

struct BackendFlags {
  std::optional<std::string> kind;
  std::optional<std::string> endpoint;
  std::optional<std::string> model;
};

struct IngestOptions {
  std::optional<std::string> input, out;
  std::string split = "train";
};

struct StatsOptions {
  std::optional<std::string> manifest;
  std::string split = "train";
};

struct AugmentOptions {
  std::optional<std::string> manifest, out;
  std::optional<int> n;
  bool gate = false;
  std::optional<double> threshold, fraction;
  BackendFlags backend;
};

struct RegularizeOptions {
  std::optional<std::string> text, manifest, out, trace;
  std::string split = "train";
  BackendFlags backend;
};

struct SplitOptions {
  std::optional<std::string> manifest, multi, single, lexicon;
  std::string split = "train";
};

struct FeaturizeOptions {
  std::optional<std::string> audio_dir, out_dir, params;
};

struct EvalOptions {
  std::string metric;
  std::optional<std::string> gen, ref;
  int splits = 1;
  std::string kl_direction = "ref-gen";
};

struct SandboxOptions {
  std::optional<int> d, n_steps, iters, samples, cond_dim;
  std::optional<double> lr;
  std::optional<std::int64_t> mc_draws;
  std::optional<std::string> report;
};

void add_backend_flags(CLI::App* sub, BackendFlags& f) {
  sub->add_option("--backend", f.kind, "LLM backend")->check(CLI::IsMember({"mock", "remote"}));
  sub->add_option("--endpoint", f.endpoint, "Remote chat-completion URL");
  sub->add_option("--model", f.model, "Remote model name");
}

// ---------------------------------------------------------------------------
// Shared helpers

struct Context {
  PipelineConfig cfg;
  GlobalOptions global;
  std::ostream& err;
};

template <typename T>
T need(const std::optional<T>& v, const std::string& flag) {
  if (!v) throw UsageError("missing required option " + flag);
  return *v;
}

fs::path need_path(const std::optional<std::string>& flag_value,
                   const std::optional<fs::path>& fallback, const std::string& flag) {
  if (flag_value) return *flag_value;
  if (fallback) return *fallback;
  throw UsageError("missing required option " + flag);
}

BackendConfig resolve_backend(const Context& ctx, const BackendFlags& f) {
  BackendConfig b = ctx.cfg.backend;
  if (f.kind) b.kind = parse_backend_kind(*f.kind);
  if (f.endpoint) b.endpoint = *f.endpoint;
  if (f.model) b.model = *f.model;
  if (ctx.global.cache_dir) {
    b.cache_dir = *ctx.global.cache_dir;
  } else if (ctx.cfg.paths.cache) {
    b.cache_dir = *ctx.cfg.paths.cache;
  }
  validate(b);
  return b;
}

std::uint64_t resolve_seed(const Context& ctx, std::uint64_t fallback) {
  if (ctx.global.seed) return *ctx.global.seed;
  if (ctx.cfg.seed) return *ctx.cfg.seed;
  return fallback;
}

void write_text(const fs::path& path, const std::string& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << body;
  if (!f) throw DataError("short write to " + path.string());
}

// ---------------------------------------------------------------------------
// Subcommands

ordered_json cmd_ingest(Context& ctx, const IngestOptions& o) {
  const fs::path input = need_path(o.input, ctx.cfg.paths.input, "--input");
  const DatasetManifest m = load_manifest(input, parse_split(o.split));
  ordered_json r;
  r["input"] = input.string();
  r["split"] = std::string(to_string(m.split));
  std::optional<fs::path> out = o.out ? std::optional<fs::path>(*o.out) : ctx.cfg.paths.output;
  if (out) {
    save_manifest(*out, m);
    r["out"] = out->string();
  }
  r["stats"] = to_json(manifest_stats(m));
  return r;
}

ordered_json cmd_stats(Context& ctx, const StatsOptions& o) {
  const fs::path path = need_path(o.manifest, ctx.cfg.paths.input, "--manifest");
  return to_json(manifest_stats(load_manifest(path, parse_split(o.split))));
}

ordered_json cmd_augment(Context& ctx, const AugmentOptions& o) {
  const fs::path in = need_path(o.manifest, ctx.cfg.paths.input, "--manifest");
  const fs::path out = need_path(o.out, ctx.cfg.paths.output, "--out");
  AugmentationPolicy policy = ctx.cfg.augmentation;
  if (o.n) policy.n_rewrites = *o.n;
  if (o.gate) policy.semantic_gate_enabled = true;
  if (o.threshold) policy.gate_threshold = *o.threshold;
  if (o.fraction) policy.clip_fraction = *o.fraction;
  policy.seed = resolve_seed(ctx, policy.seed);
  validate(policy);

  LlmGateway gateway(resolve_backend(ctx, o.backend));
  const DatasetManifest base = load_manifest(in, Split::kTrain);
  const ManifestAugmentation a = augment_manifest(gateway, base, policy);
  save_manifest(out, a.manifest);
  ctx.err << "augment: " << a.rewrites_accepted << " rewrites accepted over "
          << a.clips_augmented << " clips; " << gateway.backend_calls() << " backend calls\n";

  ordered_json r;
  r["manifest"] = in.string();
  r["out"] = out.string();
  r["n_rewrites"] = policy.n_rewrites;
  r["semantic_gate"] = policy.semantic_gate_enabled;
  r["clips"] = a.manifest.entries.size();
  r["clips_augmented"] = a.clips_augmented;
  r["rewrites_accepted"] = a.rewrites_accepted;
  r["exhausted_slots"] = a.exhausted_slots;
  r["rejected_identical"] = a.rejected_identical;
  r["rejected_duplicate"] = a.rejected_duplicate;
  r["rejected_by_gate"] = a.rejected_by_gate;
  r["dropped_at_merge"] = a.dropped_at_merge;
  r["captions"] = a.manifest.caption_count();
  return r;
}

ordered_json cmd_regularize(Context& ctx, const RegularizeOptions& o) {
  if (o.text.has_value() == o.manifest.has_value()) {
    throw UsageError("give exactly one of --text or --manifest");
  }
  LlmGateway gateway(resolve_backend(ctx, o.backend));
  ordered_json r;
  if (o.text) {
    if (text::trim(*o.text).empty()) throw ValidationError("--text is empty");
    const RegularizationTrace trace = regularize(gateway, *o.text);
    r["input"] = trace.input_text;
    r["output"] = trace.output_text;
    ordered_json ok = ordered_json::array();
    for (const auto& s : trace.steps) ok.push_back(s.ok);
    r["steps_ok"] = ok;
    if (o.trace) {
      write_text(*o.trace, to_json(trace).dump(2) + "\n");
      r["trace"] = *o.trace;
    }
    return r;
  }
  if (o.trace) throw UsageError("--trace applies to --text mode only");
  const fs::path out = need_path(o.out, ctx.cfg.paths.output, "--out");
  const DatasetManifest base = load_manifest(*o.manifest, parse_split(o.split));
  const ManifestRegularization m = regularize_manifest(gateway, base);
  save_manifest(out, m.manifest);
  ctx.err << "regularize: " << gateway.backend_calls() << " backend calls\n";
  r["manifest"] = *o.manifest;
  r["out"] = out.string();
  r["clips"] = m.manifest.entries.size();
  r["regularized"] = m.regularized;
  r["unchanged"] = m.unchanged;
  r["degraded_steps"] = m.degraded_steps;
  r["captions"] = m.manifest.caption_count();
  return r;
}

ordered_json cmd_split(Context& ctx, const SplitOptions& o) {
  const fs::path in = need_path(o.manifest, ctx.cfg.paths.input, "--manifest");
  const fs::path multi = need(o.multi, "--multi");
  const fs::path single = need(o.single, "--single");
  const TemporalLexicon lex = o.lexicon ? TemporalLexicon::load(*o.lexicon) : TemporalLexicon();
  const DatasetManifest m = load_manifest(in, parse_split(o.split));
  const EventSplit s = split_by_events(m, lex);
  save_manifest(multi, s.multi);
  save_manifest(single, s.single);
  ordered_json r;
  r["manifest"] = in.string();
  r["clips"] = m.entries.size();
  r["multi"] = s.multi.entries.size();
  r["single"] = s.single.entries.size();
  r["identifiers"] = lex.identifiers();
  return r;
}

ordered_json cmd_featurize(Context& ctx, const FeaturizeOptions& o) {
  const fs::path in_dir = need_path(o.audio_dir, ctx.cfg.paths.input, "--audio-dir");
  const fs::path out_dir = need_path(o.out_dir, ctx.cfg.paths.output, "--out-dir");
  FeatureParams params = ctx.cfg.feature_params;
  if (o.params) {
    std::ifstream f(*o.params);
    if (!f) throw ConfigError("cannot open params file " + *o.params);
    try {
      params = feature_params_from_json(json::parse(f));
    } catch (const json::exception& e) {
      throw ConfigError("params file " + *o.params + ": " + e.what());
    }
  }
  validate(params);
  if (!fs::is_directory(in_dir)) throw ConfigError("audio directory " + in_dir.string() + " not found");

  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(in_dir)) {
    if (e.is_regular_file() && text::to_lower(e.path().extension().string()) == ".wav") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  fs::create_directories(out_dir);

  std::vector<std::exception_ptr> errors(files.size());
  const auto count = static_cast<std::ptrdiff_t>(files.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto& f = files[static_cast<std::size_t>(i)];
    try {
      const MelSpectrogram m = featurize(read_wav(f), params);
      save_melbin(out_dir / (f.stem().string() + ".melbin"), m);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    ctx.err << "featurize: failed on " << files[i].string() << "\n";
    std::rethrow_exception(errors[i]);
  }

  ordered_json r;
  r["audio_dir"] = in_dir.string();
  r["out_dir"] = out_dir.string();
  r["files"] = files.size();
  r["shape"] = {params.n_mels, params.n_frames()};
  r["params"] = to_json(params);
  ordered_json outputs = ordered_json::array();
  for (const auto& f : files) outputs.push_back(f.stem().string() + ".melbin");
  r["outputs"] = outputs;
  return r;
}

ordered_json cmd_eval(Context&, const EvalOptions& o) {
  const fs::path gen = need(o.gen, "--gen");
  ordered_json r;
  r["metric"] = o.metric;
  if (o.metric == "fd") {
    const fs::path ref = need(o.ref, "--ref");
    const EmbeddingMatrix g = load_embeddings(gen);
    const EmbeddingMatrix f = load_embeddings(ref);
    if (g.rows.cols() != f.rows.cols()) {
      throw ValidationError("embedding widths differ: " + std::to_string(g.rows.cols()) + " vs " +
                            std::to_string(f.rows.cols()));
    }
    r["value"] = frechet_distance(fit_gaussian(g), fit_gaussian(f));
    r["gen_rows"] = g.rows.rows();
    r["ref_rows"] = f.rows.rows();
    r["dim"] = g.rows.cols();
  } else if (o.metric == "is") {
    const ProbMatrix p = load_probabilities(gen);
    if (o.splits < 1 || o.splits > p.rows.rows()) {
      throw ConfigError("--splits must lie in [1, rows]");
    }
    const InceptionScore s = inception_score(p, o.splits);
    r["mean"] = s.mean;
    r["std"] = s.std;
    r["splits"] = o.splits;
    r["rows"] = p.rows.rows();
    r["classes"] = p.rows.cols();
  } else {
    const fs::path ref = need(o.ref, "--ref");
    const KlDirection dir = parse_kl_direction(o.kl_direction);
    const ProbMatrix g = load_probabilities(gen);
    const ProbMatrix f = load_probabilities(ref);
    if (g.rows.cols() != f.rows.cols()) throw ValidationError("class counts differ");
    r["value"] = paired_kl(g, f, dir);
    r["direction"] = std::string(to_string(dir));
    r["pairs"] = f.rows.rows();
  }
  return r;
}

ordered_json cmd_sandbox(Context& ctx, const SandboxOptions& o) {
  diffusion::SandboxConfig c;
  if (o.d) c.dim = *o.d;
  if (o.n_steps) c.n_steps = *o.n_steps;
  if (o.iters) c.iterations = *o.iters;
  if (o.lr) c.learning_rate = *o.lr;
  if (o.samples) c.samples = *o.samples;
  if (o.cond_dim) c.cond_dim = *o.cond_dim;
  if (o.mc_draws) c.mc_draws = *o.mc_draws;
  c.seed = resolve_seed(ctx, c.seed);
  ordered_json report = diffusion::run_sandbox(c);
  if (!o.report) return report;
  write_text(*o.report, report.dump(2) + "\n");
  ordered_json r;
  r["report"] = *o.report;
  r["passed"] = report["passed"];
  r["alpha_bar_final"] = report["schedule"]["alpha_bar_final"];
  r["initial_loss"] = report["training"]["initial_loss"];
  r["final_loss"] = report["training"]["final_loss"];
  r["gradient_max_relative_error"] = report["gradient_check"]["max_relative_error"];
  return r;
}

// ---------------------------------------------------------------------------
// Output

void flatten(const ordered_json& j, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
    return;
  }
  if (j.is_array() && j.size() > 8) {
    rows.emplace_back(prefix, "[" + std::to_string(j.size()) + " values]");
    return;
  }
  rows.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
}

void print_result(const ordered_json& r, bool human, std::ostream& out) {
  if (!human) {
    out << r.dump(2) << "\n";
    return;
  }
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(r, "", rows);
  std::size_t width = 0;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  for (const auto& [k, v] : rows) out << std::left << std::setw(static_cast<int>(width) + 2) << k << v << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Caption augmentation, prompt regularization, audio features and metrics.", "pppr"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "JSON pipeline configuration");
  app.add_option("--seed", g.seed, "Seed for every sampling step");
  app.add_flag("--human", g.human, "Print results as a table instead of JSON");
  app.add_option("--cache-dir", g.cache_dir, "LLM response cache directory");

  IngestOptions ingest;
  auto* s_ingest = app.add_subcommand("ingest", "Validate a JSONL manifest and write it canonically");
  s_ingest->add_option("--input", ingest.input, "Input manifest");
  s_ingest->add_option("--split", ingest.split, "Dataset split")->check(CLI::IsMember({"train", "val", "test"}));
  s_ingest->add_option("--out", ingest.out, "Canonical output manifest");

  StatsOptions stats;
  auto* s_stats = app.add_subcommand("stats", "Report clip, caption and origin counts");
  s_stats->add_option("--manifest", stats.manifest, "Manifest to summarize");
  s_stats->add_option("--split", stats.split, "Dataset split")->check(CLI::IsMember({"train", "val", "test"}));

  AugmentOptions aug;
  auto* s_aug = app.add_subcommand("augment", "Add LLM rewrites of each clip's human caption");
  s_aug->add_option("--manifest", aug.manifest, "Input train manifest");
  s_aug->add_option("--out", aug.out, "Augmented output manifest");
  s_aug->add_option("--n", aug.n, "Rewrites per caption");
  s_aug->add_flag("--gate", aug.gate, "Enable the semantic gate");
  s_aug->add_option("--threshold", aug.threshold, "Semantic gate threshold");
  s_aug->add_option("--fraction", aug.fraction, "Fraction of clips to augment");
  add_backend_flags(s_aug, aug.backend);

  RegularizeOptions reg;
  auto* s_reg = app.add_subcommand("regularize", "Spell-fix, extract and supplement sound events");
  s_reg->add_option("--text", reg.text, "Prompt to regularize");
  s_reg->add_option("--trace", reg.trace, "Write the step trace as JSON");
  s_reg->add_option("--manifest", reg.manifest, "Manifest whose index-0 captions are regularized");
  s_reg->add_option("--out", reg.out, "Output manifest");
  s_reg->add_option("--split", reg.split, "Dataset split")->check(CLI::IsMember({"train", "val", "test"}));
  add_backend_flags(s_reg, reg.backend);

  SplitOptions split;
  auto* s_split = app.add_subcommand("split-events", "Partition clips into multi- and single-event sets");
  s_split->add_option("--manifest", split.manifest, "Input manifest");
  s_split->add_option("--multi", split.multi, "Output manifest for multi-event clips");
  s_split->add_option("--single", split.single, "Output manifest for single-event clips");
  s_split->add_option("--lexicon", split.lexicon, "Temporal identifier file, one per line");
  s_split->add_option("--split", split.split, "Dataset split")->check(CLI::IsMember({"train", "val", "test"}));

  FeaturizeOptions feat;
  auto* s_feat = app.add_subcommand("featurize", "Convert WAV files to log-mel .melbin files");
  s_feat->add_option("--audio-dir", feat.audio_dir, "Directory of .wav files");
  s_feat->add_option("--out-dir", feat.out_dir, "Directory for .melbin output");
  s_feat->add_option("--params", feat.params, "Feature parameter JSON");

  EvalOptions ev;
  auto* s_eval = app.add_subcommand("eval", "Frechet distance, inception score, or paired KL");
  s_eval->add_option("metric", ev.metric, "fd, is, or kl")->required()->check(CLI::IsMember({"fd", "is", "kl"}));
  s_eval->add_option("--gen", ev.gen, "Generated-sample .featbin");
  s_eval->add_option("--ref", ev.ref, "Reference-sample .featbin");
  s_eval->add_option("--splits", ev.splits, "Inception score splits");
  s_eval->add_option("--kl-direction", ev.kl_direction, "ref-gen or gen-ref")
      ->check(CLI::IsMember({"ref-gen", "gen-ref"}));

  SandboxOptions sb;
  auto* s_sb = app.add_subcommand("sandbox", "Run the toy diffusion checks");
  s_sb->add_option("--d", sb.d, "Latent dimension");
  s_sb->add_option("--n-steps", sb.n_steps, "Diffusion steps N");
  s_sb->add_option("--iters", sb.iters, "Training iterations");
  s_sb->add_option("--lr", sb.lr, "Learning rate");
  s_sb->add_option("--samples", sb.samples, "Training set size");
  s_sb->add_option("--cond-dim", sb.cond_dim, "Condition vector dimension");
  s_sb->add_option("--mc-draws", sb.mc_draws, "Monte-Carlo draws per moment check");
  s_sb->add_option("--report", sb.report, "Write the full report JSON here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  CLI::App* selected = nullptr;
  try {
    app.parse(reversed);
    selected = app.get_subcommands().front();
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    const auto subs = app.get_subcommands();
    err << "error: " << e.what() << "\n\n" << (subs.empty() ? app.help() : subs.front()->help());
    return kExitConfig;
  }

  try {
    Context ctx{g.config ? load_config(*g.config) : PipelineConfig{}, g, err};
    ordered_json result;
    const std::string name = selected->get_name();
    if (name == "ingest") result = cmd_ingest(ctx, ingest);
    else if (name == "stats") result = cmd_stats(ctx, stats);
    else if (name == "augment") result = cmd_augment(ctx, aug);
    else if (name == "regularize") result = cmd_regularize(ctx, reg);
    else if (name == "split-events") result = cmd_split(ctx, split);
    else if (name == "featurize") result = cmd_featurize(ctx, feat);
    else if (name == "eval") result = cmd_eval(ctx, ev);
    else result = cmd_sandbox(ctx, sb);
    print_result(result, g.human, out);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << selected->help();
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(std::current_exception());
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace pppr::cli
