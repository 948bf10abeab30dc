#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bnbp {

// One line per document: doc_id <TAB> group <TAB> word:count word:count ...
// Word ids are non-negative integers into a single shared vocabulary.
struct Document {
  std::string id;
  std::string group;
  std::vector<std::pair<int, long>> counts;  // (word, count), count > 0

  long length() const;
};

struct Corpus {
  int vocab_size = 0;
  std::vector<Document> docs;

  void validate() const;  // throws data_error
};

Corpus read_corpus(std::istream& is);
Corpus read_corpus_file(const std::string& path);
void write_corpus(std::ostream& os, const Corpus& c);
void write_corpus_file(const std::string& path, const Corpus& c);

// Token-level view used by the samplers. Each token is a tuple of field
// values so factorized multi-field likelihoods share one code path; a plain
// corpus expands to a single field.
struct TokenDoc {
  std::string id;
  std::string group;
  std::vector<std::vector<int>> tokens;  // tokens[n][field]
};

struct TokenCorpus {
  std::vector<int> vocab_sizes;  // one entry per field
  std::vector<TokenDoc> docs;
};

TokenCorpus expand_tokens(const Corpus& c);

}  // namespace bnbp
