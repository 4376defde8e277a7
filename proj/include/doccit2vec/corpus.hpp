#pragma once

// Hyper-document corpora: parsing, vocabularies and citation relations.
//
// Corpus format: one document per line, `<doc-id>\t<text>`. Text is split on
// whitespace; a token of the form `[[<doc-id>]]` is a citation marker, every
// other token is a word (ASCII-lowercased on ingest).

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dc2v {

using Index = std::uint32_t;

enum class TokenKind : std::uint8_t { Word, Cite };

struct Token {
  TokenKind kind = TokenKind::Word;
  /// Word surface form, or the cited document id.
  std::string text;

  static Token word(std::string w) { return {TokenKind::Word, std::move(w)}; }
  static Token cite(std::string id) { return {TokenKind::Cite, std::move(id)}; }
  bool is_cite() const noexcept { return kind == TokenKind::Cite; }
  friend bool operator==(const Token&, const Token&) = default;
};

struct HyperDocument {
  std::string id;
  std::vector<Token> tokens;
  friend bool operator==(const HyperDocument&, const HyperDocument&) = default;
};

/// Bidirectional string <-> index table with dense indices [0, size()).
class IdTable {
public:
  /// Returns the index of `key`, registering it if new.
  Index intern(std::string_view key);
  std::optional<Index> find(std::string_view key) const;
  const std::string& name(Index i) const { return names_.at(i); }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Index> index_;
};

struct Vocabulary {
  IdTable words;
  IdTable docs;
  std::vector<std::uint64_t> word_counts;       // per word index
  std::vector<std::uint64_t> doc_cited_counts;  // per doc index

  std::size_t n_words() const noexcept { return words.size(); }
  std::size_t n_docs() const noexcept { return docs.size(); }

  Index add_word(std::string_view w, std::uint64_t count = 0);
  Index add_doc(std::string_view id, std::uint64_t cited = 0);
};

/// Builds the vocabulary of `docs`: every document id (in line order), every
/// cite target, and every word, with occurrence counts.
Vocabulary build_vocabulary(const std::vector<HyperDocument>& docs);

/// One training example: citing doc, cited doc, structural context (the other
/// distinct cite targets of the citing doc) and local context words.
struct CitationRelation {
  Index source = 0;
  Index target = 0;
  std::vector<Index> structural;  // sorted, unique
  std::vector<Index> context;     // words before the citation, then after
  friend bool operator==(const CitationRelation&,
                         const CitationRelation&) = default;
};

struct CorpusStats {
  std::size_t n_docs = 0;  // documents with a line in the input
  std::size_t n_words = 0;
  std::size_t n_citations = 0;
  std::size_t n_relations = 0;
  std::size_t n_empty_docs = 0;
  double mean_citations_per_doc = 0.0;
};

struct Corpus {
  std::vector<HyperDocument> docs;
  Vocabulary vocab;
  CorpusStats stats;
};

/// Splits free text into tokens with the corpus rules. Throws ParseError on
/// an empty `[[]]` marker; `line` is used for the message.
std::vector<Token> tokenize(std::string_view text, std::size_t line = 0);

Corpus parse_corpus(std::istream& in);
Corpus parse_corpus_string(std::string_view text);
CorpusStats compute_stats(const std::vector<HyperDocument>& docs);

/// Serializes documents back into the corpus format.
std::string format_corpus(const std::vector<HyperDocument>& docs);

/// One relation per citation occurrence, in document order. Context windows
/// skip citation markers and stop at document boundaries.
std::vector<CitationRelation> extract_relations(
    const std::vector<HyperDocument>& docs, const Vocabulary& vocab,
    std::size_t window);

/// Copies every relation's context words onto the end of its target
/// document. Targets without a document get a new one, appended in order of
/// first appearance.
std::vector<HyperDocument> augment_contexts(
    const std::vector<HyperDocument>& docs,
    const std::vector<CitationRelation>& relations, const Vocabulary& vocab);

/// Vocabulary-free form of a held-out relation.
struct RawRelation {
  std::string source;
  std::string target;
  std::vector<std::string> structural;
  std::vector<std::string> context;
};

struct SplitOptions {
  /// Used when `test_ids` is empty. Must lie in (0, 1).
  double fraction = 0.2;
  std::vector<std::string> test_ids;
  /// Held-out documents need at least this many citations.
  std::size_t min_citations = 2;
  std::size_t window = 50;
  std::uint64_t seed = 1;
};

struct TrainTestSplit {
  std::vector<HyperDocument> train_docs;
  std::vector<std::string> test_ids;
  std::vector<RawRelation> test_relations;
  /// Relations whose target is unknown to the training corpus.
  std::size_t dropped = 0;
};

/// Holds out whole documents and extracts their relations in raw form.
/// Relations citing a document absent from the training corpus are dropped
/// and counted; an empty test set is an error.
TrainTestSplit split_train_test(const std::vector<HyperDocument>& docs,
                                const SplitOptions& opts);

}  // namespace dc2v
