/* Copyright 2026 The datasel Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "datasel/cli.h"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "datasel/dynamic_select.h"
#include "datasel/embeddings.h"
#include "datasel/error.h"
#include "datasel/experiments.h"
#include "datasel/parallel.h"
#include "datasel/scores_quality.h"
#include "datasel/scores_target.h"
#include "datasel/select_combine.h"
#include "datasel/selection.h"

namespace datasel {
namespace {

struct ScoreArgs {
  std::string metric;
  std::string image;
  std::string text;
  std::vector<std::string> target;
  std::vector<std::string> target_text;
  std::string p = "2";
  bool abs_max = false;
  double tau = kDefaultTemperature;
  std::size_t batch_size = kDefaultBatchSize;
  std::size_t k = kDefaultRounds;
  std::uint64_t seed = 0;
  bool normalize = false;
  std::string out;
};

struct SelectArgs {
  std::string scores;
  double top_frac = 0.0;
  std::size_t top_n = 0;
  double threshold = 0.0;
  std::string keep = "ge";
  std::string within;
  std::string out;
};

struct CombineArgs {
  std::string op;
  std::string a;
  std::string b;
  std::string out;
};

struct DynamicArgs {
  std::string pool;
  std::size_t target_n = 0;
  std::size_t steps = kDefaultGreedySteps;
  bool normalize = false;
  std::string out;
};

struct SimulateArgs {
  std::string experiment;
  ExperimentOptions options;
  std::string out;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

EmbeddingSet load_any(const std::string& path, bool normalize) {
  const bool csv = std::filesystem::path(path).extension() == ".csv";
  EmbeddingSet set =
      load_embeddings(path, csv ? EmbeddingFormat::kCsv : EmbeddingFormat::kEmb1);
  return normalize ? normalize_rows(set) : set;
}

EmbeddingSet load_concat(const std::vector<std::string>& paths, bool normalize) {
  std::vector<EmbeddingSet> parts;
  parts.reserve(paths.size());
  for (const std::string& p : paths) parts.push_back(load_any(p, normalize));
  return parts.size() == 1 ? parts.front() : concat_rows(parts);
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const std::string& s : items) out += (out.empty() ? "" : ";") + s;
  return out;
}

NormOrder parse_order(const std::string& p, bool abs_max) {
  if (p == "inf") return NormOrder::infinity(abs_max);
  double value = 0.0;
  std::size_t used = 0;
  try {
    value = std::stod(p, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != p.size() || !std::isfinite(value)) {
    throw UsageError("--p expects 'inf' or a number, got '" + p + "'");
  }
  return NormOrder::finite(value);
}

void cmd_score(const ScoreArgs& a, std::ostream& err) {
  const EmbeddingSet image = load_any(a.image, a.normalize);
  auto need_text = [&] {
    if (a.text.empty()) throw UsageError("--metric " + a.metric + " requires --text");
    return load_any(a.text, a.normalize);
  };
  auto need_target = [&] {
    if (a.target.empty()) throw UsageError("--metric " + a.metric + " requires --target");
    return load_concat(a.target, a.normalize);
  };

  ScoreVector scores;
  if (a.metric == "clipscore") {
    scores = clip_score(pair(image, need_text()));
  } else if (a.metric == "negcliploss") {
    const PairedEmbeddings pool = pair(image, need_text());
    scores = neg_clip_loss(pool, make_batch_plan(pool.n(), a.batch_size, a.k, a.seed), a.tau);
  } else if (a.metric == "vas") {
    const EmbeddingSet target = need_target();
    if (a.target_text.empty()) {
      scores = vas(image, image, target_statistics(target, target));
    } else {
      const EmbeddingSet target_text = load_concat(a.target_text, a.normalize);
      scores = vas(image, need_text(), target_statistics(target, target_text));
      scores.params["target_text"] = join(a.target_text);
    }
  } else if (a.metric == "normsim") {
    scores = normsim(image, need_target(), parse_order(a.p, a.abs_max));
  } else {
    scores = nn_rank_score(image, need_target());
  }
  scores.params["image"] = a.image;
  if (!a.text.empty()) scores.params["text"] = a.text;
  if (!a.target.empty()) scores.params["target"] = join(a.target);
  scores.params["normalize"] = a.normalize ? "true" : "false";
  write_scores(scores, a.out);
  err << "datasel: wrote " << scores.size() << " " << scores.metric << " scores to "
      << a.out << "\n";
}

void cmd_select(const SelectArgs& a, const CLI::App& app, std::ostream& err) {
  const ScoreVector scores = read_scores(a.scores);
  ParamRecord params;
  params["scores"] = a.scores;
  Selection chosen;
  const bool frac = app.count("--top-frac") > 0;
  const bool count = app.count("--top-n") > 0;
  if (frac || count) {
    const Amount amount = frac ? Amount::fraction(a.top_frac) : Amount::count(a.top_n);
    params[frac ? "top_frac" : "top_n"] =
        frac ? format_number(a.top_frac) : std::to_string(a.top_n);
    if (a.within.empty()) {
      chosen = select_top(scores, amount);
    } else {
      chosen = select_top(restrict(scores, read_selection(a.within)), amount);
    }
  } else {
    if (a.keep != "ge" && a.keep != "le") throw UsageError("--keep expects ge or le");
    params["threshold"] = format_number(a.threshold);
    params["keep"] = a.keep;
    chosen = select_threshold(scores, a.threshold,
                              a.keep == "ge" ? Keep::kAtLeast : Keep::kAtMost);
    if (!a.within.empty()) chosen = intersect(chosen, read_selection(a.within));
  }
  if (!a.within.empty()) params["within"] = a.within;
  write_selection(chosen, a.out, params);
  err << "datasel: selected " << chosen.size() << " of " << chosen.pool_n() << " into "
      << a.out << "\n";
}

void cmd_combine(const CombineArgs& a, std::ostream& err) {
  const Selection first = read_selection(a.a);
  const Selection second = read_selection(a.b);
  ParamRecord params{{"op", a.op}, {"a", a.a}, {"b", a.b}};
  if (a.op == "intersect") {
    const Selection both = intersect(first, second);
    write_selection(both, a.out, params);
    err << "datasel: intersection has " << both.size() << " items\n";
  } else {
    const TrainingList list = union_oversample(first, second);
    write_training_list(list, a.out, params);
    err << "datasel: union has " << list.entries.size() << " entries, "
        << list.unique_count() << " unique\n";
  }
}

void cmd_dynamic(const DynamicArgs& a, std::ostream& err) {
  const EmbeddingSet pool = load_any(a.pool, a.normalize);
  const Selection chosen = dynamic_select(pool, a.target_n, a.steps);
  const ParamRecord params{{"pool", a.pool},
                           {"target_n", std::to_string(a.target_n)},
                           {"steps", std::to_string(a.steps)},
                           {"normalize", a.normalize ? "true" : "false"}};
  write_selection(chosen, a.out, params);
  err << "datasel: kept " << chosen.size() << " of " << pool.n() << " into " << a.out
      << "\n";
}

int cmd_simulate(const SimulateArgs& a, std::ostream& err) {
  const ExperimentResult result = run_experiment(a.experiment, a.options);
  write_experiment_csv(result, a.out);
  for (const Check& c : result.checks) {
    err << "datasel: " << result.experiment << " " << c.name << " = "
        << format_number(c.value) << " (" << c.bound << ") "
        << (c.passed ? "pass" : "FAIL") << "\n";
  }
  return result.passed() ? kExitOk : kExitAssertion;
}

bool is_usage(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter:
    case ErrorCode::kInvalidTemperature:
    case ErrorCode::kInvalidNormOrder:
    case ErrorCode::kInvalidTarget:
      return true;
    default:
      return false;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Embedding-based data selection for contrastive pretraining", "datasel"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = hardware count)");

  ScoreArgs score;
  CLI::App* score_cmd = app.add_subcommand("score", "Score every pool item");
  score_cmd->add_option("--metric", score.metric, "Scoring metric")
      ->required()
      ->check(CLI::IsMember({"clipscore", "negcliploss", "vas", "normsim", "nnrank"}));
  score_cmd->add_option("--image", score.image, "Image embeddings")->required();
  score_cmd->add_option("--text", score.text, "Text embeddings");
  score_cmd->add_option("--target", score.target, "Target embeddings, concatenated");
  score_cmd->add_option("--target-text", score.target_text,
                        "Target text embeddings for cross-modality VAS");
  score_cmd->add_option("--p", score.p, "NormSim order: a number >= 1 or inf")
      ->capture_default_str();
  score_cmd->add_flag("--abs-max", score.abs_max, "NormSim inf uses max |dot|");
  score_cmd->add_option("--tau", score.tau, "Temperature")->capture_default_str();
  score_cmd->add_option("--batch-size", score.batch_size, "Batch size")->capture_default_str();
  score_cmd->add_option("--k", score.k, "Random batch divisions")->capture_default_str();
  score_cmd->add_option("--seed", score.seed, "Batch division seed")->capture_default_str();
  score_cmd->add_flag("--normalize", score.normalize, "L2-normalize rows on load");
  score_cmd->add_option("--out", score.out, "Output .csv or .scr1")->required();

  SelectArgs select;
  CLI::App* select_cmd = app.add_subcommand("select", "Select from a score file");
  select_cmd->add_option("--scores", select.scores, "Score file")->required();
  auto* frac = select_cmd->add_option("--top-frac", select.top_frac, "Keep this fraction");
  auto* top_n = select_cmd->add_option("--top-n", select.top_n, "Keep this many");
  auto* threshold =
      select_cmd->add_option("--threshold", select.threshold, "Inclusive score cut");
  select_cmd->add_option("--keep", select.keep, "ge or le")
      ->check(CLI::IsMember({"ge", "le"}))
      ->capture_default_str();
  select_cmd->add_option("--within", select.within, "Restrict to this selection");
  select_cmd->add_option("--out", select.out, "Output selection")->required();
  frac->excludes(top_n)->excludes(threshold);
  top_n->excludes(threshold);

  CombineArgs combine;
  CLI::App* combine_cmd = app.add_subcommand("combine", "Intersect or union selections");
  combine_cmd->add_option("--op", combine.op, "intersect or union")
      ->required()
      ->check(CLI::IsMember({"intersect", "union"}));
  combine_cmd->add_option("a", combine.a, "First selection")->required();
  combine_cmd->add_option("b", combine.b, "Second selection")->required();
  combine_cmd->add_option("--out", combine.out, "Output file")->required();

  DynamicArgs dynamic;
  CLI::App* dynamic_cmd = app.add_subcommand("dynamic", "Greedy dynamic VAS selection");
  dynamic_cmd->add_option("--pool", dynamic.pool, "Pool embeddings")->required();
  dynamic_cmd->add_option("--target-n", dynamic.target_n, "Final size")->required();
  dynamic_cmd->add_option("--steps", dynamic.steps, "Greedy steps")->capture_default_str();
  dynamic_cmd->add_flag("--normalize", dynamic.normalize, "L2-normalize rows on load");
  dynamic_cmd->add_option("--out", dynamic.out, "Output selection")->required();

  SimulateArgs simulate;
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Run a synthetic experiment");
  simulate_cmd->add_option("--experiment", simulate.experiment, "Experiment name")
      ->required()
      ->check(CLI::IsMember(experiment_names()));
  simulate_cmd->add_option("--d", simulate.options.d, "Ambient dimension");
  simulate_cmd->add_option("--r", simulate.options.r, "Latent dimension");
  simulate_cmd->add_option("--n", simulate.options.n, "Sample count");
  simulate_cmd->add_option("--trials", simulate.options.trials, "Trials or subsets");
  simulate_cmd->add_option("--seed", simulate.options.seed, "Seed")->capture_default_str();
  simulate_cmd->add_option("--out", simulate.out, "Output CSV")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    set_thread_count(threads);
    if (*score_cmd) {
      cmd_score(score, err);
    } else if (*select_cmd) {
      if (!select_cmd->count("--top-frac") && !select_cmd->count("--top-n") &&
          !select_cmd->count("--threshold")) {
        throw UsageError("select needs one of --top-frac, --top-n, --threshold");
      }
      cmd_select(select, *select_cmd, err);
    } else if (*combine_cmd) {
      cmd_combine(combine, err);
    } else if (*dynamic_cmd) {
      cmd_dynamic(dynamic, err);
    } else {
      return cmd_simulate(simulate, err);
    }
  } catch (const UsageError& e) {
    err << "datasel: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "datasel: " << e.what() << "\n";
    return is_usage(e.code()) ? kExitUsage : kExitData;
  }
  return kExitOk;
}

}  // namespace datasel
