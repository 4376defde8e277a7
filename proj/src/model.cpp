#include "doccit2vec/model.hpp"

#include <zlib.h>

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include "doccit2vec/error.hpp"
#include "doccit2vec/kernels.hpp"
#include "doccit2vec/random.hpp"
#include "doccit2vec/sampler.hpp"
#include "doccit2vec/train.hpp"

namespace dc2v {

bool ModelMatrices::all_finite() const {
  return kernels::all_finite(doc_in.data()) &&
         kernels::all_finite(doc_out.data()) &&
         kernels::all_finite(word_in.data()) &&
         kernels::all_finite(word_out.data()) &&
         kernels::all_finite(attention);
}

ModelMatrices init_matrices(const Vocabulary& vocab,
                            const EmbeddingConfig& config) {
  config.validate();
  const std::size_t k = config.dim;
  const double bound = 0.5 / static_cast<double>(k);
  ModelMatrices m;
  m.doc_in = Matrix(vocab.n_docs(), k);
  m.doc_out = Matrix(vocab.n_docs(), k);
  m.word_in = Matrix(vocab.n_words(), k);
  m.word_out = Matrix(vocab.n_words(), k);
  Rng rng(config.seed);
  for (double& v : m.doc_in.data()) v = rng.uniform(-bound, bound);
  for (double& v : m.word_in.data()) v = rng.uniform(-bound, bound);
  if (config.variant == Variant::Att) {
    m.attention.assign(vocab.n_docs() + vocab.n_words(), 0.0);
  }
  return m;
}

// ---------------------------------------------------------------------------
// binary format

namespace {

class Writer {
public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_ += s;
  }
  void raw(const char* p, std::size_t n) { buf_.append(p, n); }
  void matrix(const Matrix& m) {
    u64(m.rows());
    u64(m.cols());
    for (double v : m.data()) f64(v);
  }
  const std::string& bytes() const { return buf_; }

private:
  std::string buf_;
};

class Reader {
public:
  explicit Reader(std::string_view bytes) : data_(bytes) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const auto n = u32();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  Matrix matrix() {
    const auto rows = u64();
    const auto cols = u64();
    if (cols != 0 && rows > remaining() / 8 / cols) throw truncated();
    Matrix m(rows, cols);
    for (double& v : m.data()) v = f64();
    return m;
  }
  std::size_t remaining() const { return data_.size() - pos_; }

private:
  static FormatError truncated() { return FormatError("model file truncated"); }
  void need(std::size_t n) const {
    if (remaining() < n) throw truncated();
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()),
              static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

void save_model(const Model& model, std::ostream& out) {
  Writer w;
  w.raw(kModelMagic, sizeof kModelMagic);
  w.u32(kModelVersion);

  const auto& c = model.config;
  w.u64(c.dim);
  w.u64(c.window);
  w.u64(c.negative);
  w.u64(c.iterations);
  w.u64(c.retrofit_epochs);
  w.f64(c.learning_rate);
  w.f64(c.min_lr);
  w.u8(static_cast<std::uint8_t>(c.variant));
  w.u8(c.structural_context ? 1 : 0);
  w.u64(c.seed);
  w.u64(c.workers);
  w.u64(model.trained_epochs);

  const auto& v = model.vocab;
  w.u64(v.n_words());
  for (Index i = 0; i < v.n_words(); ++i) {
    w.str(v.words.name(i));
    w.u64(v.word_counts[i]);
  }
  w.u64(v.n_docs());
  for (Index i = 0; i < v.n_docs(); ++i) {
    w.str(v.docs.name(i));
    w.u64(v.doc_cited_counts[i]);
  }

  const auto& m = model.matrices;
  w.matrix(m.doc_in);
  w.matrix(m.doc_out);
  w.matrix(m.word_in);
  w.matrix(m.word_out);
  w.u64(m.attention.size());
  for (double x : m.attention) w.f64(x);

  const std::uint32_t crc = crc_of(w.bytes());
  w.u32(crc);
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw Error("failed to write model");
}

Model load_model(std::istream& in) {
  const std::string bytes{std::istreambuf_iterator<char>(in),
                          std::istreambuf_iterator<char>()};
  if (bytes.empty()) throw FormatError("empty model stream");
  if (bytes.size() < sizeof kModelMagic + 8) {
    throw FormatError("model file truncated");
  }
  if (std::memcmp(bytes.data(), kModelMagic, sizeof kModelMagic) != 0) {
    throw FormatError("not a model file (bad magic)");
  }
  Reader header(std::string_view(bytes).substr(sizeof kModelMagic, 4));
  if (const auto version = header.u32(); version != kModelVersion) {
    throw FormatError("unsupported model version " + std::to_string(version));
  }
  const std::string_view body(bytes.data(), bytes.size() - 4);
  Reader tail(std::string_view(bytes).substr(bytes.size() - 4));
  if (crc_of(body) != tail.u32()) {
    throw FormatError("model checksum mismatch (truncated or corrupted)");
  }

  Reader r(body.substr(sizeof kModelMagic + 4));
  Model model;
  auto& c = model.config;
  c.dim = r.u64();
  c.window = r.u64();
  c.negative = r.u64();
  c.iterations = r.u64();
  c.retrofit_epochs = r.u64();
  c.learning_rate = r.f64();
  c.min_lr = r.f64();
  const auto variant = r.u8();
  if (variant > 1) throw FormatError("unknown variant tag");
  c.variant = static_cast<Variant>(variant);
  c.structural_context = r.u8() != 0;
  c.seed = r.u64();
  c.workers = r.u64();
  model.trained_epochs = r.u64();

  const auto n_words = r.u64();
  for (std::uint64_t i = 0; i < n_words; ++i) {
    auto word = r.str();
    const auto count = r.u64();
    if (model.vocab.add_word(word, count) != i) {
      throw FormatError("duplicate word in vocabulary");
    }
  }
  const auto n_docs = r.u64();
  for (std::uint64_t i = 0; i < n_docs; ++i) {
    auto id = r.str();
    const auto cited = r.u64();
    if (model.vocab.add_doc(id, cited) != i) {
      throw FormatError("duplicate document in vocabulary");
    }
  }

  auto& m = model.matrices;
  m.doc_in = r.matrix();
  m.doc_out = r.matrix();
  m.word_in = r.matrix();
  m.word_out = r.matrix();
  const auto n_att = r.u64();
  if (n_att > r.remaining() / 8) throw FormatError("model file truncated");
  m.attention.resize(n_att);
  for (double& x : m.attention) x = r.f64();
  if (r.remaining() != 0) throw FormatError("trailing bytes in model file");

  const auto k = c.dim;
  const bool consistent =
      m.doc_in.rows() == n_docs && m.doc_out.rows() == n_docs &&
      m.word_in.rows() == n_words && m.word_out.rows() == n_words &&
      m.doc_in.cols() == k && m.doc_out.cols() == k && m.word_in.cols() == k &&
      m.word_out.cols() == k &&
      (n_att == 0 || n_att == n_docs + n_words);
  if (!consistent) throw FormatError("inconsistent matrix shapes");
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid stored config: ") + e.what());
  }
  return model;
}

void save_model_file(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  save_model(model, out);
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model '" + path + "'");
  return load_model(in);
}

// ---------------------------------------------------------------------------
// export

ExportTable parse_export_table(std::string_view s) {
  if (s == "doc-in") return ExportTable::DocIn;
  if (s == "doc-out") return ExportTable::DocOut;
  if (s == "word-in") return ExportTable::WordIn;
  throw ConfigError("unknown table '" + std::string(s) + "'");
}

void export_word2vec_text(const Model& model, ExportTable which,
                          std::ostream& out) {
  const bool docs = which != ExportTable::WordIn;
  const Matrix& table = which == ExportTable::DocIn    ? model.matrices.doc_in
                        : which == ExportTable::DocOut ? model.matrices.doc_out
                                                       : model.matrices.word_in;
  const IdTable& names = docs ? model.vocab.docs : model.vocab.words;
  out << table.rows() << ' ' << table.cols() << '\n';
  std::array<char, 64> buf;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (docs) out << "doc:";
    out << names.name(static_cast<Index>(r));
    for (double v : table.row(r)) {
      auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
      out << ' ' << std::string_view(buf.data(), res.ptr - buf.data());
    }
    out << '\n';
  }
  if (!out) throw Error("failed to write export");
}

// ---------------------------------------------------------------------------
// inference

std::vector<double> infer_doc_vector(const Model& model,
                                     std::span<const Index> words,
                                     std::size_t steps, double lr) {
  const NegativeSampler sampler(model.vocab.word_counts);
  return infer_doc_vector(model, sampler, words, steps, lr);
}

std::vector<double> infer_doc_vector(const Model& model,
                                     const NegativeSampler& word_sampler,
                                     std::span<const Index> words,
                                     std::size_t steps, double lr) {
  if (words.empty()) throw ConfigError("cannot infer a vector from no words");
  if (steps < 1) throw ConfigError("inference needs at least one step");
  const auto& m = model.matrices;
  for (Index w : words) {
    if (w >= m.word_in.rows()) throw Error("word index out of range");
  }

  std::vector<double> vec(model.config.dim, 0.0);
  {
    std::vector<std::span<const double>> rows;
    for (Index w : words) rows.push_back(m.word_in.row(w));
    kernels::hidden_avg(rows, vec);
  }

  const auto& c = model.config;
  const double floor = std::min(lr, c.min_lr);
  const std::uint64_t total = steps * words.size();
  std::uint64_t done = 0;
  Rng rng(mix_seed(c.seed, 0x1f3e7));
  TrainScratch scratch;
  std::vector<Index> context;
  for (std::size_t step = 0; step < steps; ++step) {
    for (std::size_t pos = 0; pos < words.size(); ++pos, ++done) {
      pvdm_context(words, pos, c.window, context);
      scratch.negatives.clear();
      word_sampler.draw_negatives(rng, words[pos], c.negative, scratch.negatives);
      const double rate =
          lr - (lr - floor) * static_cast<double>(done) / static_cast<double>(total);
      pvdm_gradient(m, vec, context, words[pos], scratch.negatives, scratch);
      kernels::axpy(-rate / static_cast<double>(scratch.rows.size()),
                    scratch.grad_x, vec);
    }
  }
  return vec;
}

}  // namespace dc2v
