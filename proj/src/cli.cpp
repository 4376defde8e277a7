#include "doccit2vec/cli.hpp"

#include <zlib.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "doccit2vec/corpus.hpp"
#include "doccit2vec/error.hpp"
#include "doccit2vec/eval.hpp"
#include "doccit2vec/model.hpp"
#include "doccit2vec/recommend.hpp"
#include "doccit2vec/synthetic.hpp"
#include "doccit2vec/train.hpp"

namespace dc2v::cli {

namespace {

using json = nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("failed to write '" + path + "'");
}

std::string crc32_hex(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()),
              static_cast<uInt>(bytes.size()));
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json config_json(const EmbeddingConfig& c) {
  return {{"dim", c.dim},
          {"window", c.window},
          {"negative", c.negative},
          {"iterations", c.iterations},
          {"retrofit-epochs", c.retrofit_epochs},
          {"learning-rate", c.learning_rate},
          {"min-lr", c.min_lr},
          {"variant", std::string(to_string(c.variant))},
          {"structural-context", c.structural_context},
          {"seed", c.seed},
          {"workers", c.workers}};
}

/// Run manifest next to a command's main output, written when the command
/// starts and completed when it finishes.
class Manifest {
public:
  Manifest(std::string path, const std::vector<std::string>& args)
      : path_(std::move(path)) {
    std::string cmd = "doccit2vec";
    for (const auto& a : args) cmd += " " + a;
    doc_["command"] = cmd;
    doc_["started_at"] = utc_now();
  }
  json& operator[](const char* key) { return doc_[key]; }
  void write() const { write_file(path_, doc_.dump(2) + "\n"); }
  void finish() {
    doc_["finished_at"] = utc_now();
    write();
  }

private:
  std::string path_;
  json doc_;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct SplitFlags {
  double fraction = 0.0;
  std::string ids;
  std::size_t min_citations = 2;

  bool requested() const { return fraction != 0.0 || !ids.empty(); }
  SplitOptions options(std::size_t window, std::uint64_t seed) const {
    SplitOptions o;
    o.fraction = fraction;
    o.test_ids = split_list(ids);
    o.min_citations = min_citations;
    o.window = window;
    o.seed = seed;
    return o;
  }
};

void add_split_flags(CLI::App* cmd, SplitFlags& f, const char* fraction_flag,
                     const char* ids_flag) {
  cmd->add_option(fraction_flag, f.fraction,
                  "Fraction of documents held out for testing, in (0, 1)");
  cmd->add_option(ids_flag, f.ids, "Comma-separated held-out document ids");
  cmd->add_option("--min-citations", f.min_citations,
                  "Citations a document needs to be held out")
      ->capture_default_str();
}

GroundTruth load_ground_truth(const Model& model, const std::string& corpus_path,
                              const SplitFlags& flags, std::uint64_t seed,
                              std::ostream& err) {
  if (!flags.requested()) {
    throw ConfigError("evaluation needs --test-fraction or --test-ids");
  }
  const Corpus corpus = parse_corpus_string(read_file(corpus_path));
  const auto split = split_train_test(
      corpus.docs, flags.options(model.config.window, seed));
  GroundTruth truth = resolve_ground_truth(split.test_relations, model.vocab);
  truth.dropped += split.dropped;
  if (truth.dropped) {
    err << "note: " << truth.dropped << " test relations dropped\n";
  }
  if (truth.relations.empty()) throw ConfigError("empty test set");
  return truth;
}

std::vector<QueryCase> cases_from(const std::string& s) {
  if (s == "all") return {QueryCase::Case1, QueryCase::Case2, QueryCase::Case3};
  try {
    return {parse_case(std::stoi(s))};
  } catch (const std::logic_error&) {
    throw ConfigError("case must be 1, 2, 3 or all");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err) {
  CLI::App app{"DocCit2Vec citation embeddings: train, recommend, evaluate"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "doccit2vec 1.0");

  // train --------------------------------------------------------------
  EmbeddingConfig cfg;
  cfg.negative = 5;
  cfg.iterations = 20;
  std::string variant = "avg";
  bool no_structure = false;
  std::string corpus_path, out_path, model_path;
  SplitFlags train_split;
  std::uint64_t split_seed = 1;
  auto* train_cmd = app.add_subcommand("train", "Train a model on a corpus");
  train_cmd->add_option("corpus", corpus_path, "Corpus file")->required();
  train_cmd->add_option("-o,--out", out_path, "Output model file")->required();
  train_cmd->add_option("--dim", cfg.dim, "Embedding size")->capture_default_str();
  train_cmd->add_option("--window", cfg.window, "Context words on each side")
      ->capture_default_str();
  train_cmd->add_option("--negative", cfg.negative, "Negative samples per update")
      ->capture_default_str();
  train_cmd->add_option("--iterations", cfg.iterations,
                        "Passes over the citation relations")
      ->capture_default_str();
  train_cmd->add_option("--retrofit-epochs", cfg.retrofit_epochs,
                        "pv-dm passes before citation training")
      ->capture_default_str();
  train_cmd->add_option("--learning-rate", cfg.learning_rate)->capture_default_str();
  train_cmd->add_option("--min-lr", cfg.min_lr)->capture_default_str();
  train_cmd->add_option("--variant", variant, "avg or att")->capture_default_str();
  train_cmd->add_flag("--no-structural-context", no_structure,
                      "Ignore structural context (HyperDoc2Vec mode)");
  train_cmd->add_option("--seed", cfg.seed)->capture_default_str();
  train_cmd->add_option("--workers", cfg.workers,
                        "Training threads; only 1 is reproducible")
      ->capture_default_str();
  add_split_flags(train_cmd, train_split, "--test-fraction", "--test-ids");
  train_cmd->add_option("--split-seed", split_seed,
                        "Seed selecting held-out documents")
      ->capture_default_str();

  // recommend ----------------------------------------------------------
  int rec_case = 1;
  std::size_t rec_k = 10;
  double keep_prob = kDefaultKeepProb;
  std::uint64_t rec_seed = 1;
  std::string text_path;
  bool no_exclude = false;
  auto* rec_cmd = app.add_subcommand("recommend", "Recommend citations for text");
  rec_cmd->add_option("model", model_path, "Model file")->required();
  rec_cmd->add_option("--case", rec_case, "Query case 1, 2 or 3")->capture_default_str();
  rec_cmd->add_option("--k", rec_k, "Results to print")->capture_default_str();
  rec_cmd->add_option("--keep-prob", keep_prob, "Case 2 keep probability")
      ->capture_default_str();
  rec_cmd->add_option("--seed", rec_seed, "Case 2 sampling seed")->capture_default_str();
  rec_cmd->add_option("--text", text_path, "Text file (default: standard input)");
  rec_cmd->add_flag("--no-exclude", no_exclude,
                    "Allow documents cited in the text to be returned");
  bool all_candidates = false;
  const char* all_help = "Also rank documents never cited in training";
  rec_cmd->add_flag("--all-candidates", all_candidates, all_help);

  // evaluate -----------------------------------------------------------
  std::string eval_case = "all";
  std::size_t eval_k = 10;
  std::uint64_t eval_seed = 1;
  SplitFlags eval_split;
  bool include_known = false;
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a model on held-out citations");
  eval_cmd->add_option("model", model_path, "Model file")->required();
  eval_cmd->add_option("corpus", corpus_path, "Corpus file")->required();
  add_split_flags(eval_cmd, eval_split, "--test-fraction", "--test-ids");
  eval_cmd->add_option("--case", eval_case, "1, 2, 3 or all")->capture_default_str();
  eval_cmd->add_option("--k", eval_k)->capture_default_str();
  eval_cmd->add_option("--seed", eval_seed, "Split and Case 2 sampling seed")
      ->capture_default_str();
  eval_cmd->add_option("--keep-prob", keep_prob)->capture_default_str();
  eval_cmd->add_flag("--include-known", include_known,
                     "Keep structural docs and the citing doc as candidates");
  eval_cmd->add_flag("--all-candidates", all_candidates, all_help);

  // ablation -----------------------------------------------------------
  std::string avg_path, att_path, nostruct_path;
  auto* abl_cmd = app.add_subcommand("ablation", "Compare avg, att and no-structure models");
  abl_cmd->add_option("--avg", avg_path)->required();
  abl_cmd->add_option("--att", att_path)->required();
  abl_cmd->add_option("--no-struct", nostruct_path)->required();
  abl_cmd->add_option("corpus", corpus_path, "Corpus file")->required();
  add_split_flags(abl_cmd, eval_split, "--test-fraction", "--test-ids");
  abl_cmd->add_option("--k", eval_k)->capture_default_str();
  abl_cmd->add_option("--seed", eval_seed)->capture_default_str();
  abl_cmd->add_option("--keep-prob", keep_prob)->capture_default_str();
  abl_cmd->add_flag("--all-candidates", all_candidates, all_help);

  // export -------------------------------------------------------------
  std::string which = "doc-in";
  auto* exp_cmd = app.add_subcommand("export", "Write vectors in word2vec text format");
  exp_cmd->add_option("model", model_path, "Model file")->required();
  exp_cmd->add_option("--which", which, "doc-in, doc-out or word-in")
      ->capture_default_str();
  exp_cmd->add_option("-o,--out", out_path)->required();

  // synth --------------------------------------------------------------
  SyntheticSpec spec;
  auto* syn_cmd = app.add_subcommand("synth", "Generate a planted co-citation corpus");
  syn_cmd->add_option("--n-topics", spec.n_topics)->capture_default_str();
  syn_cmd->add_option("--docs-per-topic", spec.docs_per_topic)->capture_default_str();
  syn_cmd->add_option("--clique-size", spec.clique_size)->capture_default_str();
  syn_cmd->add_option("--vocab-per-topic", spec.vocab_per_topic)->capture_default_str();
  syn_cmd->add_option("--noise-rate", spec.noise_rate)->capture_default_str();
  syn_cmd->add_option("--words-per-doc", spec.words_per_doc)->capture_default_str();
  syn_cmd->add_option("--cites-per-doc", spec.cites_per_doc,
                      "0 cites the whole clique")
      ->capture_default_str();
  syn_cmd->add_option("--seed", spec.seed)->capture_default_str();
  syn_cmd->add_option("-o,--out", out_path)->required();

  // augment / stats ----------------------------------------------------
  std::size_t aug_window = 50;
  auto* aug_cmd = app.add_subcommand(
      "augment", "Copy each citation context into the cited document");
  aug_cmd->add_option("corpus", corpus_path)->required();
  aug_cmd->add_option("--window", aug_window)->capture_default_str();
  aug_cmd->add_option("-o,--out", out_path)->required();

  auto* stats_cmd = app.add_subcommand("stats", "Print corpus statistics");
  stats_cmd->add_option("corpus", corpus_path)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*train_cmd) {
      cfg.variant = parse_variant(variant);
      cfg.structural_context = !no_structure;
      cfg.validate();
      const std::string text = read_file(corpus_path);
      Manifest manifest(out_path + ".manifest.json", args);
      manifest["config"] = config_json(cfg);
      manifest["corpus"] = corpus_path;
      manifest["corpus_crc32"] = crc32_hex(text);
      manifest["seed"] = cfg.seed;
      manifest.write();

      Corpus corpus = parse_corpus_string(text);
      std::vector<HyperDocument> docs = std::move(corpus.docs);
      if (train_split.requested()) {
        auto split = split_train_test(docs, train_split.options(cfg.window, split_seed));
        docs = std::move(split.train_docs);
        manifest["held_out"] = split.test_ids;
      }
      Vocabulary vocab = build_vocabulary(docs);
      const auto relations = extract_relations(docs, vocab, cfg.window);
      Model model = make_model(std::move(vocab), cfg);
      train(model, relations, docs, [&](const TrainProgress& p) {
        out << format_progress(p) << '\n';
      });
      save_model_file(model, out_path);
      manifest["model_crc32"] = crc32_hex(read_file(out_path));
      manifest.finish();
      return 0;
    }

    if (*rec_cmd) {
      const Model model = load_model_file(model_path);
      std::string text;
      if (text_path.empty()) {
        text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
      } else {
        text = read_file(text_path);
      }
      if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw ConfigError("empty query text");
      }
      RecommendOptions opts;
      opts.keep_prob = keep_prob;
      opts.seed = rec_seed;
      opts.exclude_cited = !no_exclude;
      if (all_candidates) opts.candidates = Candidates::All;
      const auto rec = recommend(model, text, parse_case(rec_case), rec_k, opts);
      if (rec.unknown_words || rec.unknown_docs) {
        err << "note: skipped " << rec.unknown_words << " unknown words and "
            << rec.unknown_docs << " unknown citations\n";
      }
      std::size_t rank = 1;
      for (const auto& s : rec.list.ranked) {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, s.score);
        out << rank++ << '\t' << s.id << '\t' << std::string_view(buf, res.ptr - buf)
            << '\n';
      }
      return 0;
    }

    if (*eval_cmd) {
      const Model model = load_model_file(model_path);
      const auto truth = load_ground_truth(model, corpus_path, eval_split, eval_seed, err);
      EvalOptions opts;
      opts.keep_prob = keep_prob;
      opts.exclude_known = !include_known;
      if (all_candidates) opts.candidates = Candidates::All;
      std::vector<MetricReport> reports;
      for (auto kase : cases_from(eval_case)) {
        reports.push_back(evaluate(model, truth, kase, eval_k, eval_seed, opts));
      }
      out << format_report_table(reports);
      for (const auto& r : reports) out << format_report_records(r);
      return 0;
    }

    if (*abl_cmd) {
      const Model avg = load_model_file(avg_path);
      const Model att = load_model_file(att_path);
      const Model nostruct = load_model_file(nostruct_path);
      const auto truth = load_ground_truth(avg, corpus_path, eval_split, eval_seed, err);
      EvalOptions opts;
      opts.keep_prob = keep_prob;
      if (all_candidates) opts.candidates = Candidates::All;
      out << format_ablation(ablation_report(avg, att, nostruct, truth, eval_k, eval_seed, opts));
      return 0;
    }

    if (*exp_cmd) {
      const auto table = parse_export_table(which);
      const Model model = load_model_file(model_path);
      Manifest manifest(out_path + ".manifest.json", args);
      manifest["config"] = config_json(model.config);
      manifest["model"] = model_path;
      manifest["seed"] = model.config.seed;
      manifest.write();
      std::ostringstream buf;
      export_word2vec_text(model, table, buf);
      write_file(out_path, buf.str());
      manifest.finish();
      return 0;
    }

    if (*syn_cmd) {
      Manifest manifest(out_path + ".manifest.json", args);
      manifest["seed"] = spec.seed;
      manifest.write();
      write_file(out_path, generate_synthetic_corpus(spec));
      manifest.finish();
      return 0;
    }

    if (*aug_cmd) {
      const std::string text = read_file(corpus_path);
      Manifest manifest(out_path + ".manifest.json", args);
      manifest["corpus"] = corpus_path;
      manifest["corpus_crc32"] = crc32_hex(text);
      manifest.write();
      const Corpus corpus = parse_corpus_string(text);
      const auto relations = extract_relations(corpus.docs, corpus.vocab, aug_window);
      write_file(out_path, format_corpus(augment_contexts(corpus.docs, relations, corpus.vocab)));
      manifest.finish();
      return 0;
    }

    if (*stats_cmd) {
      const Corpus corpus = parse_corpus_string(read_file(corpus_path));
      const auto& s = corpus.stats;
      out << "docs=" << s.n_docs << " vocab_docs=" << corpus.vocab.n_docs()
          << " words=" << s.n_words << " vocab_words=" << corpus.vocab.n_words()
          << " citations=" << s.n_citations << " relations=" << s.n_relations
          << " empty_docs=" << s.n_empty_docs
          << " mean_citations_per_doc=" << s.mean_citations_per_doc << '\n';
      return 0;
    }
  } catch (const UnknownTokensError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace dc2v::cli
