#include "bnbp/corpus.hpp"

#include <fstream>
#include <sstream>

#include "bnbp/errors.hpp"

namespace bnbp {

long Document::length() const {
  long n = 0;
  for (const auto& [w, c] : counts) n += c;
  return n;
}

void Corpus::validate() const {
  if (vocab_size <= 0) throw data_error("corpus: vocab_size must be positive");
  for (const auto& d : docs) {
    if (d.id.empty()) throw data_error("corpus: empty document id");
    for (const auto& [w, c] : d.counts) {
      if (w < 0 || w >= vocab_size)
        throw data_error("corpus: word id out of range in doc " + d.id);
      if (c <= 0)
        throw data_error("corpus: non-positive count in doc " + d.id);
    }
  }
}

Corpus read_corpus(std::istream& is) {
  Corpus c;
  std::string line;
  long lineno = 0;
  int max_word = -1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Document d;
    if (!std::getline(ls, d.id, '\t') || !std::getline(ls, d.group, '\t'))
      throw data_error("corpus line " + std::to_string(lineno) +
                       ": expected doc_id<TAB>group<TAB>entries");
    std::string rest;
    std::getline(ls, rest);
    std::istringstream es(rest);
    std::string entry;
    while (es >> entry) {
      auto colon = entry.rfind(':');
      if (colon == std::string::npos)
        throw data_error("corpus line " + std::to_string(lineno) +
                         ": entry '" + entry + "' is not word:count");
      try {
        int w = std::stoi(entry.substr(0, colon));
        long cnt = std::stol(entry.substr(colon + 1));
        d.counts.push_back({w, cnt});
        max_word = std::max(max_word, w);
      } catch (const std::exception&) {
        throw data_error("corpus line " + std::to_string(lineno) +
                         ": bad entry '" + entry + "'");
      }
    }
    c.docs.push_back(std::move(d));
  }
  c.vocab_size = max_word + 1;
  if (c.docs.empty()) throw data_error("corpus: no documents");
  c.validate();
  return c;
}

Corpus read_corpus_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw data_error("cannot open corpus file: " + path);
  return read_corpus(is);
}

void write_corpus(std::ostream& os, const Corpus& c) {
  for (const auto& d : c.docs) {
    os << d.id << '\t' << d.group;
    char sep = '\t';
    for (const auto& [w, cnt] : d.counts) {
      os << sep << w << ':' << cnt;
      sep = ' ';
    }
    os << '\n';
  }
}

void write_corpus_file(const std::string& path, const Corpus& c) {
  std::ofstream os(path);
  if (!os) throw data_error("cannot write corpus file: " + path);
  write_corpus(os, c);
}

TokenCorpus expand_tokens(const Corpus& c) {
  c.validate();
  TokenCorpus t;
  t.vocab_sizes = {c.vocab_size};
  t.docs.reserve(c.docs.size());
  for (const auto& d : c.docs) {
    TokenDoc td;
    td.id = d.id;
    td.group = d.group;
    for (const auto& [w, cnt] : d.counts)
      for (long i = 0; i < cnt; ++i) td.tokens.push_back({w});
    t.docs.push_back(std::move(td));
  }
  return t;
}

}  // namespace bnbp
