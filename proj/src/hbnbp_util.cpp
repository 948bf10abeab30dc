// snapshotting, prediction, sample persistence and the toy-bars fixture

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>

#include "bnbp/hbnbp.hpp"
#include "json.hpp"

namespace bnbp {

namespace {

constexpr double kFloor = 1e-12;

double clamp01(double b) {
  return std::min(1.0 - kFloor, std::max(kFloor, b));
}

double log_poisson_pmf(long k, double rate) {
  if (rate <= 0.0)
    return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return k * std::log(rate) - rate - std::lgamma(k + 1.0);
}

}  // namespace

PosteriorSample snapshot(const HbnbpSampler& s, long iteration) {
  PosteriorSample out;
  out.iteration = iteration;
  out.b0 = s.state().b0;
  out.topics = s.state().topics;
  return out;
}

double predictive_loglik(const std::vector<PosteriorSample>& samples,
                         const std::vector<std::vector<int>>& tokens,
                         const SamplerConfig& cfg, double r_d, int inner_draws,
                         Rng& rng) {
  if (samples.empty())
    throw std::invalid_argument("predictive: no posterior samples");
  if (inner_draws < 1)
    throw std::invalid_argument("predictive: inner_draws must be >= 1");
  if (!(r_d > 0.0)) throw std::invalid_argument("predictive: r_d must be > 0");

  long n_tokens = static_cast<long>(tokens.size());
  std::vector<double> lls;
  lls.reserve(samples.size() * inner_draws);
  for (const auto& s : samples) {
    int k_n = static_cast<int>(s.b0.size());
    std::vector<double> lam(k_n);
    for (int rep = 0; rep < inner_draws; ++rep) {
      double total = 0.0;
      for (int k = 0; k < k_n; ++k) {
        double a = cfg.gamma_d * cfg.theta_d * s.b0[k];
        double b = clamp01(rng.beta(a, cfg.theta_d - a));
        lam[k] = rng.gamma(r_d, (1.0 - b) / b);
        total += lam[k];
      }
      if (!(total > 0.0)) {
        lls.push_back(-1e300);
        continue;
      }
      // document length has its own factor; word draws mix over components
      double ll = log_poisson_pmf(n_tokens, total);
      for (const auto& tok : tokens) {
        double p = 0.0;
        for (int k = 0; k < k_n; ++k) {
          double f = lam[k] / total;
          for (std::size_t fld = 0; fld < tok.size(); ++fld)
            f *= s.topics[k][fld][tok[fld]];
          p += f;
        }
        ll += std::log(std::max(p, 1e-300));
      }
      lls.push_back(ll);
    }
  }
  double mx = *std::max_element(lls.begin(), lls.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double ll : lls) s += std::exp(ll - mx);
  return mx + std::log(s / lls.size());
}

void write_samples(std::ostream& os,
                   const std::vector<PosteriorSample>& samples) {
  for (const auto& s : samples) {
    nlohmann::json rec;
    rec["iteration"] = s.iteration;
    rec["b0"] = s.b0;
    nlohmann::json vs = nlohmann::json::array();
    if (!s.topics.empty())
      for (const auto& field : s.topics.front()) vs.push_back(field.size());
    rec["vocab_sizes"] = vs;
    nlohmann::json topics = nlohmann::json::array();
    for (const auto& topic : s.topics) {
      nlohmann::json fields = nlohmann::json::array();
      for (const auto& dist : topic) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t v = 0; v < dist.size(); ++v)
          if (dist[v] > 0.0) rows.push_back({v, dist[v]});
        fields.push_back(std::move(rows));
      }
      topics.push_back(std::move(fields));
    }
    rec["topics"] = std::move(topics);
    os << rec.dump() << '\n';
  }
}

std::vector<PosteriorSample> read_samples(std::istream& is) {
  std::vector<PosteriorSample> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw data_error(std::string("sample store: bad json: ") + e.what());
    }
    PosteriorSample s;
    try {
      s.iteration = rec.at("iteration").get<long>();
      s.b0 = rec.at("b0").get<std::vector<double>>();
      std::vector<std::size_t> vs =
          rec.at("vocab_sizes").get<std::vector<std::size_t>>();
      for (const auto& topic : rec.at("topics")) {
        std::vector<std::vector<double>> fields;
        std::size_t f = 0;
        for (const auto& rows : topic) {
          std::vector<double> dist(vs.at(f++), 0.0);
          for (const auto& pair : rows)
            dist.at(pair.at(0).get<std::size_t>()) = pair.at(1).get<double>();
          fields.push_back(std::move(dist));
        }
        s.topics.push_back(std::move(fields));
      }
    } catch (const std::exception& e) {
      throw data_error(std::string("sample store: bad record: ") + e.what());
    }
    if (s.topics.size() != s.b0.size())
      throw data_error("sample store: topic/b0 size mismatch");
    out.push_back(std::move(s));
  }
  if (out.empty()) throw data_error("sample store: no records");
  return out;
}

std::vector<std::vector<double>> toy_bar_topics() {
  std::vector<std::vector<double>> topics;
  for (int i = 0; i < 5; ++i) {  // horizontal bars
    std::vector<double> t(25, 0.0);
    for (int j = 0; j < 5; ++j) t[5 * i + j] = 0.2;
    topics.push_back(std::move(t));
  }
  for (int i = 0; i < 5; ++i) {  // vertical bars
    std::vector<double> t(25, 0.0);
    for (int j = 0; j < 5; ++j) t[i + 5 * j] = 0.2;
    topics.push_back(std::move(t));
  }
  return topics;
}

Corpus make_toy_bars(int docs, int words_per_doc, std::uint64_t seed) {
  if (docs < 1 || words_per_doc < 1)
    throw std::invalid_argument("toy bars: docs and words must be >= 1");
  auto topics = toy_bar_topics();
  Rng rng(seed);
  Corpus c;
  c.vocab_size = 25;
  std::vector<double> flat(topics.size(), 1.0);
  for (int d = 0; d < docs; ++d) {
    std::vector<double> pi = rng.dirichlet(flat);
    std::map<int, long> counts;
    for (int i = 0; i < words_per_doc; ++i) {
      std::size_t t = rng.categorical(pi);
      ++counts[static_cast<int>(rng.categorical(topics[t]))];
    }
    Document doc;
    doc.id = "doc" + std::to_string(d);
    doc.group = "bars";
    doc.counts.assign(counts.begin(), counts.end());
    c.docs.push_back(std::move(doc));
  }
  return c;
}

}  // namespace bnbp
