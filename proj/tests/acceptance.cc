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

// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "datasel/cli.h"
#include "datasel/dynamic_select.h"
#include "datasel/embeddings.h"
#include "datasel/experiments.h"
#include "datasel/scores_quality.h"
#include "datasel/scores_target.h"
#include "datasel/select_combine.h"
#include "datasel/selection.h"
#include "datasel/theory_lab.h"
#include "oracles.h"

using namespace datasel;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s,
               const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < budget_s;
  const bool ok = o.passed && in_time;
  if (!ok) ++failures;
  std::printf("criterion %2d %s  %s: %s [%.2fs, budget %.0fs%s]\n", id, ok ? "PASS" : "FAIL",
              name.c_str(), o.detail.c_str(), secs, budget_s, in_time ? "" : ", over budget");
  std::fflush(stdout);
}

void info(const std::string& text) {
  std::printf("             info  %s\n", text.c_str());
}

std::string fmt(const char* f, double v) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Image/text pairs with a spread of alignment: text = normalize(image + a * noise).
PairedEmbeddings aligned_pool(std::size_t n, std::size_t d, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> level(0.0, 2.0);
  RowMatrix img(n, d), txt(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = level(gen);
    for (std::size_t j = 0; j < d; ++j) img(i, j) = normal(gen);
    img.row(i).normalize();
    for (std::size_t j = 0; j < d; ++j) txt(i, j) = img(i, j) + a * normal(gen) / std::sqrt(d);
    txt.row(i).normalize();
  }
  return pair(EmbeddingSet(img, Modality::kVision), EmbeddingSet(txt, Modality::kLanguage));
}

Outcome literal_decomposition() {
  const PairedEmbeddings pool =
      pair(EmbeddingSet(oracle::random_unit_rows(64, 16, 11), Modality::kVision),
           EmbeddingSet(oracle::random_unit_rows(64, 16, 12), Modality::kLanguage));
  const auto image = oracle::to_rows(pool.image.matrix());
  const auto text = oracle::to_rows(pool.text.matrix());
  const double tau = 0.01;
  const std::size_t rounds = 4;
  const BatchDivisionPlan plan = make_batch_plan(64, 16, rounds, 5);
  const ScoreVector got = neg_clip_loss(pool, plan, tau);
  std::vector<double> want(64, 0.0);
  for (std::size_t k = 0; k < rounds; ++k) {
    for (std::size_t c = 0; c < plan.chunk_count(); ++c) {
      const auto chunk = plan.chunk(k, c);
      const std::vector<std::size_t> batch(chunk.begin(), chunk.end());
      const auto part = oracle::clip_batch_scores(image, text, batch, tau);
      for (std::size_t j = 0; j < batch.size(); ++j) want[batch[j]] += part[j] / rounds;
    }
  }
  double err = 0.0;
  for (std::size_t i = 0; i < 64; ++i) err = std::max(err, std::abs(got.values[i] - want[i]));
  const ScoreVector single = neg_clip_loss(pool, make_batch_plan(64, 1, 3, 9), tau);
  bool zero = true;
  for (double v : single.values) zero = zero && v == 0.0;
  return {err <= 1e-8 && zero,
          fmt("max |score - oracle| = %.3g (<= 1e-8)", err) +
              (zero ? ", singleton batches exactly 0" : ", singleton batches NOT 0")};
}

Outcome stability() {
  const PairedEmbeddings pool = aligned_pool(10000, 16, 21);
  const double tau = 0.01;
  const ScoreVector five = neg_clip_loss(pool, make_batch_plan(10000, 1024, 5, 101), tau);
  const ScoreVector fifty = neg_clip_loss(pool, make_batch_plan(10000, 1024, 50, 202), tau);
  const double rho = oracle::spearman(five.values, fifty.values);
  return {rho > 0.99, fmt("Spearman(K=5, K=50) = %.5f (> 0.99)", rho)};
}

Outcome normsim_identity() {
  const EmbeddingSet pool(oracle::random_matrix(1000, 64, 31));
  const EmbeddingSet target(oracle::random_matrix(1000, 64, 32));
  const ScoreVector ns = normsim(pool, target, NormOrder::finite(2.0));
  const ScoreVector v = vas(pool, pool, target_statistics(target, target));
  double err = 0.0;
  for (std::size_t i = 0; i < 1000; ++i) {
    const double lhs = ns.values[i] * ns.values[i];
    const double rhs = 1000.0 * v.values[i];
    err = std::max(err, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  return {err <= 1e-9, fmt("max |NormSim^2 - m VAS| (relative) = %.3g (<= 1e-9)", err)};
}

Outcome greedy_static() {
  std::mt19937_64 gen(41);
  std::size_t agree = 0;
  for (unsigned t = 0; t < 100; ++t) {
    const std::size_t n = 5 + gen() % 200;
    const std::size_t d = 2 + gen() % 15;
    const std::size_t k = 1 + gen() % n;
    const EmbeddingSet pool(oracle::random_unit_rows(n, d, 1000 + t));
    const ScoreVector s = vas(pool, pool, target_statistics(pool, pool));
    if (dynamic_select(pool, k, 1) == select_top(s, Amount::count(k))) ++agree;
  }
  return {agree == 100, fmt("%.0f/100 instances identical", static_cast<double>(agree))};
}

Outcome top_optimality() {
  std::mt19937_64 gen(51);
  std::normal_distribution<double> normal;
  std::size_t cases = 0, bad = 0;
  for (std::size_t n = 1; n <= 12; ++n) {
    for (std::size_t k = 1; k <= n; ++k) {
      ScoreVector s;
      for (std::size_t i = 0; i < n; ++i) s.values.push_back(normal(gen));
      double chosen = 0.0;
      const Selection top = select_top(s, Amount::count(k));
      for (std::size_t i : top.indices()) chosen += s.values[i];
      double best = -1e300;
      oracle::for_each_subset(n, k, [&](const std::vector<std::size_t>& c) {
        double total = 0.0;
        for (std::size_t i : c) total += s.values[i];
        best = std::max(best, total);
      });
      ++cases;
      if (chosen < best - 1e-12) ++bad;
    }
  }
  return {bad == 0, fmt("%.0f (n, k) cases, ", static_cast<double>(cases)) +
                        fmt("%.0f suboptimal", static_cast<double>(bad))};
}

Outcome eckart_young() {
  std::mt19937_64 gen(61);
  std::size_t beaten = 0;
  double worst_gd = 0.0;
  for (unsigned w = 0; w < 50; ++w) {
    const std::size_t d = 2 + gen() % 7;
    const std::size_t r = 1 + gen() % std::min<std::size_t>(3, d - 1);
    const std::size_t s = std::max<std::size_t>(r + 2, 3 + gen() % 8);
    WorldParams p;
    p.d = d;
    p.r = r;
    p.n = s;
    p.seed = 7000 + w;
    const SyntheticWorld world = generate_world(p);
    const double rho = 1.0;
    const Eigen::MatrixXd m = closed_form_train(world.x_v, world.x_l, rho, r).m;
    const double best = oracle::train_loss(m, world.x_v, world.x_l, rho);
    for (unsigned c = 0; c < 1000; ++c) {
      const unsigned base = 100000 * (w + 1) + 2 * c;
      Eigen::MatrixXd comp = oracle::random_matrix(d, r, base) *
                             oracle::random_matrix(r, d, base + 1).eval();
      comp *= std::exp(0.5 * oracle::random_matrix(1, 1, base + 7)(0, 0));
      if (oracle::train_loss(comp, world.x_v, world.x_l, rho) < best) ++beaten;
    }
    const Eigen::MatrixXd gd = oracle::descend(world.x_v, world.x_l, rho, r, 9000 + w, 1e-11);
    worst_gd = std::max(worst_gd, (gd - m).norm());
  }
  return {beaten == 0 && worst_gd <= 1e-3,
          fmt("competitors beating closed form: %.0f, ", static_cast<double>(beaten)) +
              fmt("max ||M - M_gd||_F = %.3g (<= 1e-3)", worst_gd)};
}

Outcome lemma_trend() {
  const ExperimentResult res = run_experiment("lemma1", {});
  std::vector<double> trace, gap;
  for (const ResultRow& row : res.rows) {
    trace.push_back(*row.trace_term);
    gap.push_back(*row.test_loss_gap);
  }
  const double rho = oracle::spearman(trace, gap);
  return {rho <= -0.9 && trace.size() == 50,
          fmt("Spearman(trace term, test gap) = %.4f (<= -0.9)", rho) +
              fmt(" over %.0f subsets", static_cast<double>(trace.size()))};
}

Outcome testloss_slope() {
  const ExperimentResult res = run_experiment("testloss", {});
  std::map<std::size_t, std::pair<double, double>> acc;
  for (const ResultRow& row : res.rows) {
    auto& [sum, count] = acc[row.n];
    sum += std::abs(*row.test_loss_gap - *row.test_loss_self);
    count += 1.0;
  }
  std::vector<double> x, y;
  for (const auto& [m, a] : acc) {
    x.push_back(std::log(static_cast<double>(m)));
    y.push_back(std::log(a.first / a.second));
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  return {x.size() == 3 && std::abs(slope + 0.5) <= 0.15,
          fmt("log-log slope = %.4f (-0.5 +- 0.15)", slope)};
}

std::string describe(const ExperimentResult& res) {
  std::string out;
  for (const Check& c : res.checks) {
    if (!out.empty()) out += "; ";
    out += c.name + " = " + format_number(c.value) + " (" + c.bound + ")";
  }
  return out;
}

Outcome main_theorem() {
  const ExperimentResult res = run_experiment("theorem-main", {});
  for (const auto& [k, v] : res.observations) info("theorem-main " + k + " = " + format_number(v));
  return {res.passed(), describe(res)};
}

Outcome noise_decomposition() {
  const ExperimentResult res = run_experiment("noise-decomp", {});
  for (const auto& [k, v] : res.observations) info("noise-decomp " + k + " = " + format_number(v));
  return {res.passed(), describe(res)};
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "datasel");
  std::ostringstream out, err;
  return run_cli(args, out, err);
}

Outcome determinism() {
  // EMB1: binary32-representable values survive save/load/save byte for byte.
  RowMatrix m(257, 19);
  std::mt19937_64 gen(71);
  std::normal_distribution<float> normal;
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(gen);
  const EmbeddingSet set(m, Modality::kLanguage);
  const fs::path dir = oracle::scratch_dir("acceptance");
  save_embeddings(set, dir / "a.emb", EmbeddingFormat::kEmb1);
  const EmbeddingSet back = load_embeddings(dir / "a.emb", EmbeddingFormat::kEmb1);
  save_embeddings(back, dir / "b.emb", EmbeddingFormat::kEmb1);
  const bool emb_ok = back.matrix() == set.matrix() && back.modality() == set.modality() &&
                      oracle::slurp(dir / "a.emb") == oracle::slurp(dir / "b.emb");

  const PairedEmbeddings pool = aligned_pool(600, 12, 72);
  save_embeddings(pool.image, dir / "img.emb", EmbeddingFormat::kEmb1);
  save_embeddings(pool.text, dir / "txt.emb", EmbeddingFormat::kEmb1);
  save_embeddings(EmbeddingSet(oracle::random_unit_rows(80, 12, 73)), dir / "tgt.emb",
                  EmbeddingFormat::kEmb1);
  const std::string img = (dir / "img.emb").string(), txt = (dir / "txt.emb").string(),
                    tgt = (dir / "tgt.emb").string();
  const std::string s1 = (dir / "s1.csv").string(), s2 = (dir / "s2.csv").string();
  const std::string sel1 = (dir / "sel1.txt").string(), sel2 = (dir / "sel2.txt").string();
  std::vector<std::vector<std::string>> commands{
      {"score", "--metric", "clipscore", "--image", img, "--text", txt, "--out", s1},
      {"score", "--metric", "negcliploss", "--image", img, "--text", txt, "--batch-size", "64",
       "--out", s2},
      {"score", "--metric", "vas", "--image", img, "--target", tgt, "--out", "@"},
      {"score", "--metric", "vas", "--image", img, "--text", txt, "--target", tgt,
       "--target-text", tgt, "--out", "@"},
      {"score", "--metric", "normsim", "--image", img, "--target", tgt, "--out", "@"},
      {"score", "--metric", "normsim", "--p", "inf", "--image", img, "--target", tgt, "--out",
       "@"},
      {"score", "--metric", "nnrank", "--image", img, "--target", tgt, "--out", "@"},
      {"score", "--metric", "negcliploss", "--image", img, "--text", txt, "--out", "@.scr1"},
      {"select", "--scores", s1, "--top-frac", "0.3", "--out", sel1},
      {"select", "--scores", s2, "--threshold", "0", "--keep", "le", "--out", sel2},
      {"select", "--scores", s2, "--top-n", "50", "--within", sel1, "--out", "@"},
      {"combine", "--op", "intersect", sel1, sel2, "--out", "@"},
      {"combine", "--op", "union", sel1, sel2, "--out", "@"},
      {"dynamic", "--pool", img, "--target-n", "100", "--steps", "20", "--out", "@"},
      {"simulate", "--experiment", "noise-decomp", "--trials", "20", "--out", "@"},
  };
  std::size_t mismatched = 0;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::string reference;
    for (const char* threads : {"1", "4", "4"}) {
      std::vector<std::string> args{"--threads", threads};
      std::string path;
      for (std::string a : commands[c]) {
        if (a.starts_with("@")) a = (dir / ("out" + std::to_string(c) + a.substr(1))).string();
        args.push_back(a);
      }
      path = args.back();
      const int code = cli(args);
      const std::string bytes = oracle::slurp(path);
      if (code != 0 && code != 4) ++mismatched;
      if (reference.empty()) {
        reference = bytes;
      } else if (bytes != reference) {
        ++mismatched;
      }
    }
  }
  return {emb_ok && mismatched == 0,
          std::string(emb_ok ? "EMB1 round trip byte-identical" : "EMB1 round trip differs") +
              fmt(", %.0f CLI commands x {1,4,4} threads, ", static_cast<double>(commands.size())) +
              fmt("%.0f mismatches", static_cast<double>(mismatched))};
}

Outcome pipeline_arithmetic() {
  double worst = 0.0;
  for (std::size_t n : {100u, 1000u, 1234u, 5000u, 10000u}) {
    ScoreVector a, b;
    std::mt19937_64 gen(n);
    std::normal_distribution<double> normal;
    for (std::size_t i = 0; i < n; ++i) {
      a.values.push_back(normal(gen));
      b.values.push_back(normal(gen));
    }
    const Selection s = two_stage(a, Amount::fraction(0.30), b, Amount::fraction(0.667));
    worst = std::max(worst, std::abs(static_cast<double>(s.size()) - 0.2 * static_cast<double>(n)));
  }
  return {worst <= 1.0 + 1e-9,
          fmt("pools of 100 to 10000 items, max | |S| - 0.2 n | = %.2f items (<= 1)", worst)};
}

}  // namespace

int main() {
  criterion(1, "negCLIPLoss literal decomposition", 1, literal_decomposition);
  criterion(2, "negCLIPLoss stability across divisions", 30, stability);
  criterion(3, "NormSim2 / VAS identity", 5, normsim_identity);
  criterion(4, "greedy with one step equals static VAS", 10, greedy_static);
  criterion(5, "top-k optimality by enumeration", 5, top_optimality);
  criterion(6, "closed-form training optimality", 60, eckart_young);
  criterion(7, "target alignment predicts test gap", 60, lemma_trend);
  criterion(8, "simplified test loss convergence", 30, testloss_slope);
  criterion(9, "vision-only vs joint surrogate", 120, main_theorem);
  criterion(10, "noise decomposition", 30, noise_decomposition);
  criterion(11, "format and CLI determinism", 5, determinism);
  criterion(12, "two-stage pipeline arithmetic", 1, pipeline_arithmetic);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
