// command-line front end: growth-curve simulation, admixture training,
// group classification and the toy-bars fixture generator

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bnbp/asymptotics.hpp"
#include "bnbp/corpus.hpp"
#include "bnbp/errors.hpp"
#include "bnbp/hbnbp.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw bnbp::data_error("cannot write " + p.string());
  return os;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    std::uint64_t seed, const json& params,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  json m;
  m["schema_version"] = 1;
  m["command"] = command;
  m["seed"] = seed;
  m["params"] = params;
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  m["created_unix"] = std::chrono::duration_cast<std::chrono::seconds>(
                          std::chrono::system_clock::now().time_since_epoch())
                          .count();
  open_out(dir / "manifest.json") << m.dump(2) << '\n';
}

json state_to_json(const bnbp::HbnbpState& st) {
  json j;
  j["K"] = st.K;
  j["b0"] = st.b0;
  j["round_gap"] = st.round_gap;
  j["round_index"] = st.round_index;
  j["topics"] = st.topics;
  j["b"] = st.b;
  j["lambda"] = st.lambda;
  j["z"] = st.z;
  j["u"] = st.u;
  j["n_dk"] = st.n_dk;
  return j;
}

bnbp::HbnbpState state_from_json(const json& j) {
  bnbp::HbnbpState st;
  st.K = j.at("K").get<int>();
  st.b0 = j.at("b0").get<std::vector<double>>();
  st.round_gap = j.at("round_gap").get<std::vector<long>>();
  st.round_index = j.at("round_index").get<std::vector<long>>();
  st.topics =
      j.at("topics")
          .get<std::vector<std::vector<std::vector<double>>>>();
  st.b = j.at("b").get<std::vector<std::vector<double>>>();
  st.lambda = j.at("lambda").get<std::vector<std::vector<double>>>();
  st.z = j.at("z").get<std::vector<std::vector<int>>>();
  st.u = j.at("u").get<std::vector<std::vector<double>>>();
  st.n_dk = j.at("n_dk").get<std::vector<std::vector<long>>>();
  return st;
}

struct TrainArgs {
  std::string corpus_path, out_dir, mode = "exact", group;
  int k = 100, iters = 1000, thin = 1, burnin = -1;  // -1: 20% of iters
  bool collapsed_b0 = false, resume = false;
  double r_override = 0.0;
  bnbp::SamplerConfig base;
};

int cmd_train(const TrainArgs& a, std::uint64_t seed) {
  bnbp::SamplerConfig cfg = a.base;
  cfg.mode = a.mode == "finite" ? bnbp::SamplerMode::FiniteApprox
                                : bnbp::SamplerMode::ExactSlice;
  cfg.finite_k = a.k;
  cfg.collapsed_b0 = a.collapsed_b0;
  cfg.r_override = a.r_override;

  auto corpus = bnbp::read_corpus_file(a.corpus_path);
  if (!a.group.empty()) {
    bnbp::Corpus filtered;
    filtered.vocab_size = corpus.vocab_size;
    for (auto& d : corpus.docs)
      if (d.group == a.group) filtered.docs.push_back(std::move(d));
    if (filtered.docs.empty())
      throw bnbp::data_error("no documents in group '" + a.group + "'");
    corpus = std::move(filtered);
  }
  auto tokens = bnbp::expand_tokens(corpus);

  fs::create_directories(a.out_dir);
  fs::path dir(a.out_dir);
  int burnin = a.burnin >= 0 ? a.burnin : a.iters / 5;
  if (burnin >= a.iters)
    throw std::invalid_argument("train: burn-in must be below --iters");

  bnbp::HbnbpSampler sampler(tokens, cfg);
  bnbp::Rng rng(seed);
  long start_iter = 0;
  std::ios_base::openmode samples_mode = std::ios_base::out;
  if (a.resume) {
    std::ifstream ck(dir / "checkpoint.json");
    if (!ck) throw bnbp::data_error("resume: no checkpoint in " + a.out_dir);
    json j;
    try {
      ck >> j;
      sampler.state() = state_from_json(j.at("state"));
      start_iter = j.at("iteration").get<long>();
      rng.load_state(j.at("rng").get<std::string>());
    } catch (const json::exception& e) {
      throw bnbp::data_error(std::string("resume: bad checkpoint: ") +
                             e.what());
    }
    samples_mode |= std::ios_base::app;
  } else {
    sampler.init(rng);
  }

  std::ofstream samples((dir / "samples.jsonl").string(), samples_mode);
  if (!samples) throw bnbp::data_error("cannot write samples.jsonl");
  std::ofstream trace((dir / "trace.csv").string(), samples_mode);
  if (start_iter == 0) trace << "iteration,K,used_components,log_joint\n";

  for (long it = start_iter; it < a.iters; ++it) {
    sampler.sweep(rng);
    trace << it << ',' << sampler.state().K << ','
          << sampler.used_components(0.01) << ',' << sampler.log_joint()
          << '\n';
    if (it >= burnin && (it - burnin) % a.thin == 0)
      bnbp::write_samples(samples, {bnbp::snapshot(sampler, it)});
    if ((it + 1) % 100 == 0 || it + 1 == a.iters) {
      json ck;
      ck["iteration"] = it + 1;
      ck["rng"] = rng.save_state();
      ck["state"] = state_to_json(sampler.state());
      open_out(dir / "checkpoint.json") << ck.dump() << '\n';
    }
  }

  double mean_r = 0.0;
  for (double r : sampler.doc_r()) mean_r += r;
  mean_r /= sampler.doc_r().size();
  json params = {{"mode", a.mode},           {"finite_k", a.k},
                 {"iters", a.iters},         {"burnin", burnin},
                 {"thin", a.thin},           {"collapsed_b0", a.collapsed_b0},
                 {"gamma0", cfg.gamma0},     {"theta0", cfg.theta0},
                 {"gamma_d", cfg.gamma_d},   {"theta_d", cfg.theta_d},
                 {"eta", cfg.eta},           {"zeta_base", cfg.zeta_base},
                 {"rw_step", cfg.rw_step},   {"r_override", a.r_override},
                 {"group", a.group},         {"mean_r", mean_r},
                 {"documents", corpus.docs.size()}};
  write_manifest(dir, "train", seed, params, {a.corpus_path},
                 {"samples.jsonl", "trace.csv", "checkpoint.json"});
  std::cout << "trained " << corpus.docs.size() << " documents, "
            << a.iters - burnin << " retained sweeps -> " << a.out_dir
            << '\n';
  return 0;
}

struct ClassifyArgs {
  std::vector<std::string> models;  // name=dir
  std::string test_path, out_dir;
  int inner = 30;
};

int cmd_classify(const ClassifyArgs& a, std::uint64_t seed) {
  if (a.models.size() < 2)
    throw std::invalid_argument("classify: need at least two --model entries");
  struct Model {
    std::string name;
    std::vector<bnbp::PosteriorSample> samples;
    bnbp::SamplerConfig cfg;
    double mean_r = 0.0;
  };
  std::vector<Model> models;
  for (const auto& spec : a.models) {
    auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("classify: --model must be name=dir");
    Model m;
    m.name = spec.substr(0, eq);
    fs::path dir(spec.substr(eq + 1));
    std::ifstream ss(dir / "samples.jsonl");
    if (!ss) throw bnbp::data_error("no samples.jsonl in " + dir.string());
    m.samples = bnbp::read_samples(ss);
    std::ifstream mf(dir / "manifest.json");
    if (!mf) throw bnbp::data_error("no manifest.json in " + dir.string());
    json j;
    try {
      mf >> j;
      const auto& p = j.at("params");
      m.cfg.gamma_d = p.at("gamma_d").get<double>();
      m.cfg.theta_d = p.at("theta_d").get<double>();
      m.cfg.gamma0 = p.at("gamma0").get<double>();
      m.cfg.theta0 = p.at("theta0").get<double>();
      m.mean_r = p.at("mean_r").get<double>();
    } catch (const json::exception& e) {
      throw bnbp::data_error(std::string("bad manifest: ") + e.what());
    }
    models.push_back(std::move(m));
  }

  auto corpus = bnbp::read_corpus_file(a.test_path);
  auto tokens = bnbp::expand_tokens(corpus);
  fs::create_directories(a.out_dir);
  fs::path dir(a.out_dir);
  auto pred = open_out(dir / "predictions.csv");
  pred << "doc_id,group,predicted";
  for (const auto& m : models) pred << ",loglik_" << m.name;
  pred << '\n';

  bnbp::Rng rng(seed);
  long correct = 0, labeled = 0;
  for (const auto& doc : tokens.docs) {
    std::vector<double> ll(models.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < models.size(); ++i) {
      // held-out documents are scored with the training-corpus rate
      ll[i] = bnbp::predictive_loglik(models[i].samples, doc.tokens,
                                      models[i].cfg, models[i].mean_r,
                                      a.inner, rng);
      if (ll[i] > ll[best]) best = i;
    }
    pred << doc.id << ',' << doc.group << ',' << models[best].name;
    pred.precision(10);
    for (double v : ll) pred << ',' << v;
    pred << '\n';
    if (!doc.group.empty()) {
      ++labeled;
      if (doc.group == models[best].name) ++correct;
    }
  }
  json params = {{"models", a.models},
                 {"inner_draws", a.inner},
                 {"documents", tokens.docs.size()}};
  if (labeled > 0) {
    double acc = static_cast<double>(correct) / labeled;
    params["accuracy"] = acc;
    std::cout << "accuracy " << acc << " (" << correct << '/' << labeled
              << ")\n";
  }
  write_manifest(dir, "classify", seed, params, {a.test_path},
                 {"predictions.csv"});
  return 0;
}

struct GrowthArgs {
  std::string out_dir, model = "log";
  double mass = 3.0, concentration = 3.0, discount = 0.0;
  double r_min = 50.0, r_max = 1000.0, epsilon = 1e-6;
  int grid = 20, replicates = 100;
};

int cmd_simulate(const GrowthArgs& a, std::uint64_t seed) {
  bnbp::GrowthConfig cfg;
  cfg.mass = a.mass;
  cfg.concentration = a.concentration;
  cfg.discount = a.discount;
  cfg.epsilon = a.epsilon;
  cfg.replicates = a.replicates;
  if (a.grid < 2) throw std::invalid_argument("simulate: --grid must be >= 2");
  std::vector<double> r_grid;
  for (int i = 0; i < a.grid; ++i)
    r_grid.push_back(a.r_min * std::pow(a.r_max / a.r_min,
                                        i / static_cast<double>(a.grid - 1)));
  auto triples = bnbp::simulate_growth(r_grid, cfg, seed);
  auto model = a.model == "power" ? bnbp::GrowthModel::PowerLaw
                                  : bnbp::GrowthModel::LogLinear;
  auto fit = bnbp::fit_growth_law(triples, model);

  fs::create_directories(a.out_dir);
  fs::path dir(a.out_dir);
  {
    auto os = open_out(dir / "triples.csv");
    write_triples_csv(os, triples);
  }
  {
    auto os = open_out(dir / "fit.txt");
    os.precision(10);
    os << "model " << (model == bnbp::GrowthModel::PowerLaw ? "power" : "log")
       << "\nslope " << fit.slope << "\nintercept " << fit.intercept
       << "\nprefactor " << fit.prefactor << "\nrss " << fit.rss
       << "\npoints " << fit.points << '\n';
  }
  json params = {{"mass", a.mass},         {"concentration", a.concentration},
                 {"discount", a.discount}, {"epsilon", a.epsilon},
                 {"r_min", a.r_min},       {"r_max", a.r_max},
                 {"grid", a.grid},         {"replicates", a.replicates},
                 {"model", a.model},       {"slope", fit.slope},
                 {"prefactor", fit.prefactor}};
  write_manifest(dir, "simulate-asymptotics", seed, params, {},
                 {"triples.csv", "fit.txt"});
  std::cout << "slope " << fit.slope << ", prefactor " << fit.prefactor
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("beta-negative-binomial admixture toolkit");
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file");
  std::uint64_t seed = 20260826;
  app.add_option("--seed", seed, "base RNG seed")->envname("ADMIX_SEED");

  auto* toy = app.add_subcommand("make-toy-bars", "write the bars corpus");
  std::string toy_out = "toy_bars.tsv";
  int toy_docs = 50, toy_words = 100;
  toy->add_option("--out", toy_out, "output corpus path");
  toy->add_option("--docs", toy_docs, "number of documents");
  toy->add_option("--words", toy_words, "words per document");

  auto* sim = app.add_subcommand("simulate-asymptotics",
                                 "simulate and fit growth curves");
  GrowthArgs ga;
  sim->add_option("--out", ga.out_dir, "output directory")->required();
  sim->add_option("--mass", ga.mass, "process mass");
  sim->add_option("--concentration", ga.concentration, "process concentration");
  sim->add_option("--discount", ga.discount, "discount (0 for log growth)");
  sim->add_option("--r-min", ga.r_min, "smallest r");
  sim->add_option("--r-max", ga.r_max, "largest r");
  sim->add_option("--grid", ga.grid, "number of r values (log-spaced)");
  sim->add_option("--replicates", ga.replicates, "draws per r value");
  sim->add_option("--epsilon", ga.epsilon, "weight truncation threshold");
  sim->add_option("--model", ga.model, "fit model: log or power")
      ->check(CLI::IsMember({"log", "power"}));

  auto* train = app.add_subcommand("train", "run the admixture sampler");
  TrainArgs ta;
  train->add_option("--corpus", ta.corpus_path, "training corpus")->required();
  train->add_option("--out", ta.out_dir, "output directory")->required();
  train->add_option("--mode", ta.mode, "exact or finite")
      ->check(CLI::IsMember({"exact", "finite"}));
  train->add_option("--group", ta.group, "restrict to one group label");
  train->add_option("--k", ta.k, "truncation level (finite mode)");
  train->add_option("--iters", ta.iters, "total sweeps");
  train->add_option("--burnin", ta.burnin, "burn-in sweeps (default 20%)");
  train->add_option("--thin", ta.thin, "keep every n-th sweep");
  train->add_option("--r", ta.r_override, "fixed r (default: length heuristic)");
  train->add_flag("--collapsed-b0", ta.collapsed_b0,
                  "collapse group weights out of the shared-weight move");
  train->add_flag("--resume", ta.resume, "continue from checkpoint.json");
  train->add_option("--gamma0", ta.base.gamma0, "shared mass");
  train->add_option("--theta0", ta.base.theta0, "shared concentration");
  train->add_option("--gamma-d", ta.base.gamma_d, "group mass");
  train->add_option("--theta-d", ta.base.theta_d, "group concentration");
  train->add_option("--eta", ta.base.eta, "topic smoothing");
  train->add_option("--rw-step", ta.base.rw_step, "shared-weight move scale");

  auto* cls = app.add_subcommand("classify", "label held-out documents");
  ClassifyArgs ca;
  cls->add_option("--model", ca.models, "name=trained-model-dir (repeat)")
      ->required();
  cls->add_option("--test", ca.test_path, "held-out corpus")->required();
  cls->add_option("--out", ca.out_dir, "output directory")->required();
  cls->add_option("--inner", ca.inner, "Monte Carlo draws per sample");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (toy->parsed()) {
      auto c = bnbp::make_toy_bars(toy_docs, toy_words, seed);
      bnbp::write_corpus_file(toy_out, c);
      std::cout << "wrote " << toy_out << '\n';
      return 0;
    }
    if (sim->parsed()) return cmd_simulate(ga, seed);
    if (train->parsed()) return cmd_train(ta, seed);
    if (cls->parsed()) return cmd_classify(ca, seed);
  } catch (const bnbp::data_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const bnbp::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
