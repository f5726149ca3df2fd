/*
 * Copyright 2026 The d2g2 Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// d2g2: synthesise datasets, train, sample, evaluate, probe, plot, benchmark.

#include "d2g2.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace d2g2;

// Bad invocation: reported with exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(static_cast<std::size_t>(std::stoul(tok)));
    } catch (const std::exception&) {
      throw UsageError("--sizes: '" + tok + "' is not a positive integer");
    }
  }
  if (out.empty()) throw UsageError("--sizes: empty list");
  return out;
}

// Prior sample -> decode -> binarise, one graph per index with seed + index.
std::vector<DynamicGraph> sample_graphs(const Model& m, std::size_t num, std::uint64_t seed, bool bernoulli,
                                        double threshold) {
  std::vector<DynamicGraph> out;
  out.reserve(num);
  for (std::size_t i = 0; i < num; ++i) {
    const auto z = sample_prior(m.T, m.dims.latent, seed + i);
    const auto probs = decode_sequence(z, m.generator);
    out.push_back(bernoulli ? binarize_bernoulli(probs, noise_seed(seed, 0, i, 1)) : binarize(probs, threshold));
  }
  return out;
}

DynamicGraphDataset as_dataset(std::vector<DynamicGraph> graphs, const Model& m) {
  DynamicGraphDataset ds;
  ds.n_max = m.dims.n;
  ds.T = m.T;
  ds.c = m.dims.c;
  ds.graphs = std::move(graphs);
  return ds;
}

struct SynthArgs {
  std::string model = "ba";
  std::size_t nodes = 100;
  std::size_t m = 2;
  std::size_t snapshots = 10;
  std::size_t graphs = 1;
  std::uint64_t seed = 0;
  bool per_bin = false;
  std::string features = "degree";
  std::string out;
  std::string labels;
};

int run_synth(const SynthArgs& a) {
  if (a.model == "toy") {
    auto toy = generate_toy_disentangled(a.graphs, a.nodes, a.snapshots, a.seed);
    write_dataset(toy.data, a.out);
    write_toy_labels(toy.labels, a.labels.empty() ? a.out + ".labels.jsonl" : a.labels);
    return 0;
  }
  if (a.features != "degree" && a.features != "noise" && a.features != "none")
    throw UsageError("--features must be degree, noise or none");
  DynamicGraphDataset ds;
  ds.n_max = a.nodes;
  ds.T = a.snapshots;
  ds.c = a.features == "none" ? 0 : 1;
  for (std::size_t g = 0; g < a.graphs; ++g) {
    const auto stream = generate_dynamic_ba(a.nodes, a.m, a.seed + g);
    auto dg = discretize(stream, a.snapshots, !a.per_bin);
    if (a.features != "none")
      dg = attach_synthetic_features(dg, a.features == "noise" ? FeatureMode::noise : FeatureMode::degree, a.seed + g);
    ds.graphs.push_back(std::move(dg));
  }
  write_dataset(ds, a.out);
  return 0;
}

struct TrainArgs {
  std::string data, config, mode, out, report;
  std::int64_t epochs = -1;
  std::int64_t seed = -1;
  std::size_t jobs = 1;
  bool quiet = false;
};

int run_train(const TrainArgs& a) {
  TrainConfig cfg;
  if (!a.config.empty()) cfg = read_config(a.config);
  if (!a.mode.empty()) {
    try {
      cfg.inference_mode = parse_inference_mode(a.mode);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (a.epochs >= 0) cfg.epochs = static_cast<std::size_t>(a.epochs);
  if (a.seed >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed);
  if (a.jobs > 1) cfg.jobs = a.jobs;
  cfg.checkpoint_path = a.out;
  try {
    cfg.check();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto ds = read_dataset(a.data);
  auto res = train(ds, cfg, [&a](const EpochRecord& r) {
    if (!a.quiet)
      std::fprintf(stderr, "epoch %zu  neg_elbo %.4f  edge %.4f  node %.4f  beta %.2f\n", r.epoch, r.neg_elbo,
                   r.edge_nll, r.node_nll, r.beta);
  });
  write_report(res.report, a.report.empty() ? a.out + ".report.jsonl" : a.report);
  return 0;
}

struct GenerateArgs {
  std::string ckpt, out;
  std::size_t num = 1;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  bool bernoulli = false;
};

int run_generate(const GenerateArgs& a) {
  const Model m = load_checkpoint(a.ckpt);
  write_dataset(as_dataset(sample_graphs(m, a.num, a.seed, a.bernoulli, a.threshold), m), a.out);
  return 0;
}

struct EvalArgs {
  std::string real, gen, out;
  std::size_t jobs = 1;
};

int run_eval(const EvalArgs& a) {
  const auto real = read_dataset(a.real);
  const auto gen = read_dataset(a.gen);
  const auto rep = evaluate(real.graphs, gen.graphs, a.jobs);
  write_text(a.out, to_json(rep).dump(2) + "\n");
  std::cout << format_table(rep);
  return 0;
}

struct ProbeArgs {
  std::string ckpt, factor = "f", out, graphs_out, ablation, data, config, from_data;
  std::size_t samples = 4;
  std::size_t graph_index = 0;
  std::uint64_t seed = 0;
};

int run_probe(const ProbeArgs& a) {
  LatentFactor factor;
  try {
    factor = parse_latent_factor(a.factor);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Model m;
  if (!a.ablation.empty()) {
    if (a.data.empty()) throw UsageError("--ablation needs --data");
    TrainConfig cfg;
    if (!a.config.empty()) cfg = read_config(a.config);
    const auto ds = read_dataset(a.data);
    TrainResult res = [&] {
      if (a.ablation == "no_f") return ablation_no_f(ds, cfg);
      if (a.ablation == "merged_z") return ablation_merged_z(ds, cfg);
      throw UsageError("--ablation must be no_f or merged_z");
    }();
    m = std::move(res.model);
    save_checkpoint(m, a.out + ".ckpt");
  } else {
    if (a.ckpt.empty()) throw UsageError("probe needs --ckpt or --ablation");
    m = load_checkpoint(a.ckpt);
  }
  ProbeResult r;
  if (!a.from_data.empty()) {
    const auto ds = read_dataset(a.from_data);
    if (a.graph_index >= ds.size()) throw UsageError("--graph-index out of range");
    r = traverse_from(m, encode_mean_state(m, ds.graphs[a.graph_index]), factor, a.samples, a.seed);
  } else {
    r = traverse(m, factor, a.samples, a.seed);
  }
  auto j = to_json(r);
  j["variant"] = to_string(m.variant);
  write_text(a.out, j.dump(2) + "\n");
  std::vector<DynamicGraph> bin;
  for (const auto& g : r.graphs) bin.push_back(binarize(g));
  write_dataset(as_dataset(std::move(bin), m), a.graphs_out.empty() ? a.out + ".graphs.jsonl" : a.graphs_out);
  return 0;
}

struct PlotArgs {
  std::string in, style = "graph", out;
  std::size_t rows = 8, cols = 10;
};

int run_plot(const PlotArgs& a) {
  if (a.style == "graph") {
    const auto ds = read_dataset(a.in);
    plot::GridOptions opt;
    opt.max_rows = a.rows;
    opt.max_cols = a.cols;
    write_text(a.out, plot::render_graph_grid(ds.graphs, opt));
    return 0;
  }
  if (a.style != "table") throw UsageError("--style must be graph or table");
  std::ifstream in(a.in);
  if (!in) throw std::runtime_error("cannot open '" + a.in + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  nlohmann::json rec;
  try {
    rec = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    // Line-delimited input (e.g. a training report): show the last record.
    std::stringstream lines(text);
    std::string line, last;
    while (std::getline(lines, line))
      if (line.find_first_not_of(" \t\r") != std::string::npos) last = line;
    rec = nlohmann::json::parse(last);
  }
  write_text(a.out, plot::render_table(rec, std::filesystem::path(a.in).filename().string()));
  return 0;
}

struct BenchArgs {
  std::string sizes = "100,500,2500";
  std::size_t snapshots = 10;
  std::size_t reps = 3;
  std::uint64_t seed = 0;
  std::string out;
};

// Median wall time of prior sampling + decoding + binarising one dynamic graph.
int run_bench(const BenchArgs& a) {
  const auto sizes = parse_sizes(a.sizes);
  std::ostringstream table;
  table << "n\tT\tmedian_seconds\tlog10_seconds\n";
  for (std::size_t n : sizes) {
    ModelDims d;
    d.n = n;
    d.c = 1;
    Model m(d, InferenceMode::factorized, a.snapshots);
    Rng rng(a.seed);
    m.generator.init(rng);
    std::vector<double> times;
    for (std::size_t r = 0; r < std::max<std::size_t>(a.reps, 1); ++r) {
      const auto start = std::chrono::steady_clock::now();
      const auto g = sample_graphs(m, 1, a.seed + r, false, 0.5);
      times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      if (g.empty()) throw std::logic_error("bench: no graph generated");
    }
    std::sort(times.begin(), times.end());
    const double med = times[times.size() / 2];
    char line[128];
    std::snprintf(line, sizeof line, "%zu\t%zu\t%.6f\t%.4f\n", n, a.snapshots, med, std::log10(med));
    table << line;
    std::cout << line << std::flush;
  }
  if (!a.out.empty()) write_text(a.out, table.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"d2g2: disentangled generative modelling of dynamic attributed graphs"};
  app.require_subcommand(1);
  app.fallthrough();  // --jobs is accepted before or after the subcommand
  std::size_t jobs = 1;
  app.add_option("--jobs", jobs, "Cap on parallel graph-level work")->check(CLI::PositiveNumber);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Write a synthetic dynamic-graph dataset");
  synth->add_option("--model", sa.model, "ba (preferential attachment) or toy (disentangled benchmark)")
      ->check(CLI::IsMember({"ba", "toy"}));
  synth->add_option("--nodes", sa.nodes, "Node count")->check(CLI::PositiveNumber);
  synth->add_option("--m", sa.m, "Edges per arriving node (ba)")->check(CLI::PositiveNumber);
  synth->add_option("--snapshots", sa.snapshots, "Snapshots per graph")->check(CLI::PositiveNumber);
  synth->add_option("--graphs", sa.graphs, "Number of graphs");
  synth->add_option("--seed", sa.seed, "Base seed; graph g uses seed + g");
  synth->add_flag("--per-bin", sa.per_bin, "Non-cumulative snapshots (ba)");
  synth->add_option("--features", sa.features, "degree, noise or none (ba)");
  synth->add_option("--labels", sa.labels, "Factor-label sidecar path (toy)");
  synth->add_option("--out", sa.out, "Output dataset")->required();

  TrainArgs ta;
  auto* trn = app.add_subcommand("train", "Fit a model to a dataset");
  trn->add_option("--data", ta.data, "Dataset file")->required()->check(CLI::ExistingFile);
  trn->add_option("--config", ta.config, "key = value config file")->check(CLI::ExistingFile);
  trn->add_option("--mode", ta.mode, "factorized or full")->check(CLI::IsMember({"factorized", "full"}));
  trn->add_option("--out", ta.out, "Checkpoint path")->required();
  trn->add_option("--report", ta.report, "Training report path (default <out>.report.jsonl)");
  trn->add_option("--epochs", ta.epochs, "Override config epochs");
  trn->add_option("--seed", ta.seed, "Override config seed");
  trn->add_flag("--quiet", ta.quiet, "No per-epoch progress");

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Sample graphs from a checkpoint");
  gen->add_option("--ckpt", ga.ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  gen->add_option("--num", ga.num, "Number of graphs")->check(CLI::PositiveNumber);
  gen->add_option("--seed", ga.seed, "Base seed; graph i uses seed + i");
  gen->add_option("--threshold", ga.threshold, "Edge iff probability >= threshold");
  gen->add_flag("--bernoulli", ga.bernoulli, "Sample edges instead of thresholding");
  gen->add_option("--out", ga.out, "Output dataset")->required();

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "Compare a real and a generated dataset");
  ev->add_option("--real", ea.real, "Reference dataset")->required()->check(CLI::ExistingFile);
  ev->add_option("--gen", ea.gen, "Generated dataset")->required()->check(CLI::ExistingFile);
  ev->add_option("--out", ea.out, "Report path (JSON)")->required();

  ProbeArgs pa;
  auto* pr = app.add_subcommand("probe", "Latent traversal and ablations");
  pr->add_option("--ckpt", pa.ckpt, "Checkpoint")->check(CLI::ExistingFile);
  pr->add_option("--factor", pa.factor, "f, z_edge, z_node, z_joint or none");
  pr->add_option("--samples", pa.samples, "Number of variants")->check(CLI::PositiveNumber);
  pr->add_option("--seed", pa.seed, "Seed");
  pr->add_option("--out", pa.out, "Scores path (JSON)")->required();
  pr->add_option("--graphs-out", pa.graphs_out, "Variant graphs (default <out>.graphs.jsonl)");
  pr->add_option("--ablation", pa.ablation, "Train an ablated model first: no_f or merged_z");
  pr->add_option("--data", pa.data, "Training data for --ablation")->check(CLI::ExistingFile);
  pr->add_option("--config", pa.config, "Training config for --ablation")->check(CLI::ExistingFile);
  pr->add_option("--from-data", pa.from_data, "Traverse around an encoded graph from this dataset")
      ->check(CLI::ExistingFile);
  pr->add_option("--graph-index", pa.graph_index, "Graph index for --from-data");

  PlotArgs pla;
  auto* pl = app.add_subcommand("plot", "Render graphs or a report to SVG");
  pl->add_option("--in", pla.in, "Dataset (graph style) or JSON record (table style)")
      ->required()
      ->check(CLI::ExistingFile);
  pl->add_option("--style", pla.style, "graph or table")->check(CLI::IsMember({"graph", "table"}));
  pl->add_option("--rows", pla.rows, "Graphs shown (graph style)");
  pl->add_option("--cols", pla.cols, "Snapshots shown (graph style)");
  pl->add_option("--out", pla.out, "Output SVG")->required();

  BenchArgs ba;
  auto* be = app.add_subcommand("bench", "Time generation across graph sizes");
  be->add_option("--sizes", ba.sizes, "Comma-separated node counts");
  be->add_option("--snapshots", ba.snapshots, "Snapshots per graph")->check(CLI::PositiveNumber);
  be->add_option("--reps", ba.reps, "Repetitions per size (median reported)")->check(CLI::PositiveNumber);
  be->add_option("--seed", ba.seed, "Seed");
  be->add_option("--out", ba.out, "Table path (tab-separated)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*synth) return run_synth(sa);
    if (*trn) {
      ta.jobs = jobs;
      return run_train(ta);
    }
    if (*gen) return run_generate(ga);
    if (*ev) {
      ea.jobs = jobs;
      return run_eval(ea);
    }
    if (*pr) return run_probe(pa);
    if (*pl) return run_plot(pla);
    if (*be) return run_bench(ba);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
