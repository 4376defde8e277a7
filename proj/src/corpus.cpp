#include "doccit2vec/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_set>

#include "doccit2vec/error.hpp"
#include "doccit2vec/random.hpp"

namespace dc2v {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool is_marker(std::string_view tok) {
  return tok.size() >= 4 && tok.starts_with("[[") && tok.ends_with("]]");
}

}  // namespace

Index IdTable::intern(std::string_view key) {
  if (auto it = index_.find(std::string(key)); it != index_.end()) {
    return it->second;
  }
  const auto idx = static_cast<Index>(names_.size());
  names_.emplace_back(key);
  index_.emplace(names_.back(), idx);
  return idx;
}

std::optional<Index> IdTable::find(std::string_view key) const {
  if (auto it = index_.find(std::string(key)); it != index_.end()) {
    return it->second;
  }
  return std::nullopt;
}

Index Vocabulary::add_word(std::string_view w, std::uint64_t count) {
  const Index i = words.intern(w);
  if (i == word_counts.size()) word_counts.push_back(0);
  word_counts[i] += count;
  return i;
}

Index Vocabulary::add_doc(std::string_view id, std::uint64_t cited) {
  const Index i = docs.intern(id);
  if (i == doc_cited_counts.size()) doc_cited_counts.push_back(0);
  doc_cited_counts[i] += cited;
  return i;
}

Vocabulary build_vocabulary(const std::vector<HyperDocument>& docs) {
  Vocabulary vocab;
  for (const auto& doc : docs) vocab.add_doc(doc.id);
  for (const auto& doc : docs) {
    for (const auto& tok : doc.tokens) {
      if (tok.is_cite()) {
        vocab.add_doc(tok.text, 1);
      } else {
        vocab.add_word(tok.text, 1);
      }
    }
  }
  return vocab;
}

std::vector<Token> tokenize(std::string_view text, std::size_t line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) {
      const auto tok = text.substr(i, j - i);
      if (tok == "[[]]") throw ParseError(line, "empty citation marker");
      if (is_marker(tok)) {
        tokens.push_back(Token::cite(std::string(tok.substr(2, tok.size() - 4))));
      } else {
        tokens.push_back(Token::word(lowercase(tok)));
      }
    }
    i = j;
  }
  return tokens;
}

CorpusStats compute_stats(const std::vector<HyperDocument>& docs) {
  CorpusStats st;
  st.n_docs = docs.size();
  for (const auto& doc : docs) {
    if (doc.tokens.empty()) ++st.n_empty_docs;
    for (const auto& tok : doc.tokens) {
      if (tok.is_cite()) {
        ++st.n_citations;
      } else {
        ++st.n_words;
      }
    }
  }
  st.n_relations = st.n_citations;
  st.mean_citations_per_doc =
      st.n_docs ? static_cast<double>(st.n_citations) / st.n_docs : 0.0;
  return st;
}

Corpus parse_corpus(std::istream& in) {
  Corpus corpus;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::all_of(line.begin(), line.end(), is_space)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(lineno, "missing TAB");
    std::string id = line.substr(0, tab);
    if (id.empty() || std::any_of(id.begin(), id.end(), is_space)) {
      throw ParseError(lineno, "invalid document id '" + id + "'");
    }
    if (!seen.insert(id).second) {
      throw ParseError(lineno, "duplicate document id '" + id + "'");
    }
    HyperDocument doc{std::move(id),
                      tokenize(std::string_view(line).substr(tab + 1), lineno)};
    corpus.docs.push_back(std::move(doc));
  }
  corpus.vocab = build_vocabulary(corpus.docs);
  corpus.stats = compute_stats(corpus.docs);
  return corpus;
}

Corpus parse_corpus_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_corpus(in);
}

std::string format_corpus(const std::vector<HyperDocument>& docs) {
  std::string out;
  for (const auto& doc : docs) {
    out += doc.id;
    out += '\t';
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      if (i) out += ' ';
      const auto& tok = doc.tokens[i];
      if (tok.is_cite()) {
        out += "[[";
        out += tok.text;
        out += "]]";
      } else {
        out += tok.text;
      }
    }
    out += '\n';
  }
  return out;
}

namespace {

// Positions of word tokens within the window on each side of `pos`, nearest
// first on the left side, reordered so the result reads left to right.
template <class Emit>
void for_each_context_word(const std::vector<Token>& tokens, std::size_t pos,
                           std::size_t window, Emit&& emit) {
  std::vector<std::size_t> left;
  for (std::size_t i = pos; i-- > 0 && left.size() < window;) {
    if (!tokens[i].is_cite()) left.push_back(i);
  }
  for (auto it = left.rbegin(); it != left.rend(); ++it) emit(tokens[*it]);
  std::size_t taken = 0;
  for (std::size_t i = pos + 1; i < tokens.size() && taken < window; ++i) {
    if (!tokens[i].is_cite()) {
      emit(tokens[i]);
      ++taken;
    }
  }
}

}  // namespace

std::vector<CitationRelation> extract_relations(
    const std::vector<HyperDocument>& docs, const Vocabulary& vocab,
    std::size_t window) {
  if (window < 1) throw ConfigError("window must be >= 1");
  auto doc_index = [&](const std::string& id) {
    auto idx = vocab.docs.find(id);
    if (!idx) throw Error("document '" + id + "' not in vocabulary");
    return *idx;
  };
  std::vector<CitationRelation> out;
  for (const auto& doc : docs) {
    const Index source = doc_index(doc.id);
    std::set<Index> targets;
    for (const auto& tok : doc.tokens) {
      if (tok.is_cite()) targets.insert(doc_index(tok.text));
    }
    for (std::size_t pos = 0; pos < doc.tokens.size(); ++pos) {
      if (!doc.tokens[pos].is_cite()) continue;
      CitationRelation rel;
      rel.source = source;
      rel.target = doc_index(doc.tokens[pos].text);
      for (Index t : targets) {
        if (t != rel.target && t != source) rel.structural.push_back(t);
      }
      for_each_context_word(doc.tokens, pos, window, [&](const Token& w) {
        auto wi = vocab.words.find(w.text);
        if (!wi) throw Error("word '" + w.text + "' not in vocabulary");
        rel.context.push_back(*wi);
      });
      out.push_back(std::move(rel));
    }
  }
  return out;
}

std::vector<HyperDocument> augment_contexts(
    const std::vector<HyperDocument>& docs,
    const std::vector<CitationRelation>& relations, const Vocabulary& vocab) {
  std::vector<HyperDocument> out = docs;
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < out.size(); ++i) position.emplace(out[i].id, i);
  for (const auto& rel : relations) {
    const std::string& target = vocab.docs.name(rel.target);
    auto [it, inserted] = position.emplace(target, out.size());
    if (inserted) out.push_back(HyperDocument{target, {}});
    auto& tokens = out[it->second].tokens;
    for (Index w : rel.context) tokens.push_back(Token::word(vocab.words.name(w)));
  }
  return out;
}

TrainTestSplit split_train_test(const std::vector<HyperDocument>& docs,
                                const SplitOptions& opts) {
  auto cite_count = [](const HyperDocument& d) {
    return static_cast<std::size_t>(std::count_if(
        d.tokens.begin(), d.tokens.end(),
        [](const Token& t) { return t.is_cite(); }));
  };

  std::unordered_set<std::string> held_out;
  if (!opts.test_ids.empty()) {
    held_out.insert(opts.test_ids.begin(), opts.test_ids.end());
  } else {
    if (!(opts.fraction > 0.0 && opts.fraction < 1.0)) {
      throw ConfigError("test fraction must lie in (0, 1)");
    }
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (cite_count(docs[i]) >= opts.min_citations) eligible.push_back(i);
    }
    std::size_t want = static_cast<std::size_t>(
        std::llround(opts.fraction * static_cast<double>(docs.size())));
    want = std::clamp<std::size_t>(want, 1, eligible.size());
    Rng rng(opts.seed);
    rng.shuffle(std::span<std::size_t>(eligible));
    for (std::size_t k = 0; k < want && k < eligible.size(); ++k) {
      held_out.insert(docs[eligible[k]].id);
    }
  }

  TrainTestSplit split;
  std::vector<HyperDocument> test_docs;
  for (const auto& doc : docs) {
    if (held_out.count(doc.id)) {
      split.test_ids.push_back(doc.id);
      test_docs.push_back(doc);
    } else {
      split.train_docs.push_back(doc);
    }
  }

  const Vocabulary train_vocab = build_vocabulary(split.train_docs);
  const Vocabulary test_vocab = build_vocabulary(test_docs);
  for (const auto& rel : extract_relations(test_docs, test_vocab, opts.window)) {
    RawRelation raw;
    raw.source = test_vocab.docs.name(rel.source);
    raw.target = test_vocab.docs.name(rel.target);
    if (!train_vocab.docs.find(raw.target)) {
      ++split.dropped;
      continue;
    }
    for (Index d : rel.structural) raw.structural.push_back(test_vocab.docs.name(d));
    for (Index w : rel.context) raw.context.push_back(test_vocab.words.name(w));
    split.test_relations.push_back(std::move(raw));
  }
  if (split.test_relations.empty()) {
    throw ConfigError("empty test set after filtering");
  }
  return split;
}

}  // namespace dc2v
