#include <pthread.h>

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nlgwm/http_oracle.hpp"
#include "nlgwm/nlgwm.hpp"

namespace fs = std::filesystem;
using namespace nlgwm;
using nlohmann::ordered_json;

namespace {

void log(const std::string& msg) { std::cerr << "nlgwm: " << msg << '\n'; }

// Writes to `path`, or to stdout when the path is empty or "-".
void emit(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    std::cout.flush();
    return;
  }
  auto out = detail::open_out(path);
  body(out);
  if (!out) throw IoError(path, "write failed");
}

void emit_json(const std::string& path, const ordered_json& j) {
  emit(path, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

// Runs one pipeline stage, prefixing any failure with the stage name.
template <class F>
auto stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw Error(name + ": " + e.what());
  }
}

struct OracleOpts {
  std::string table;
  std::string endpoint;
  double timeout = 30.0;
};

void add_oracle_opts(CLI::App* sub, OracleOpts& o, bool required = true) {
  auto* t = sub->add_option("--table", o.table, "Phrase-table file of the toy model to query")->check(CLI::ExistingFile);
  auto* e = sub->add_option("--endpoint", o.endpoint, "HTTP oracle endpoint, e.g. http://127.0.0.1:8080");
  t->excludes(e);
  e->excludes(t);
  sub->add_option("--timeout", o.timeout, "HTTP timeout in seconds")->capture_default_str();
  if (required) {
    auto* g = sub->add_option_group("oracle", "Exactly one oracle source");
    g->add_option(t);
    g->add_option(e);
    g->require_option(1);
  }
}

std::unique_ptr<GenerationOracle> make_oracle(const OracleOpts& o) {
  if (!o.endpoint.empty()) {
    auto remote = RemoteOracle::from_url(o.endpoint, o.timeout);
    return std::make_unique<RemoteOracle>(std::move(remote));
  }
  if (o.table.empty()) throw ArgumentError("an oracle is required (--table or --endpoint)");
  return std::make_unique<PhraseTableModel>(load_phrase_table(o.table));
}

// "DET-ADJ/NOUN", or a file whose first line holds that form.
Scp scp_arg(const std::string& value) {
  if (fs::is_regular_file(value)) {
    auto in = detail::open_in(value);
    std::string line;
    std::getline(in, line);
    detail::chomp(line);
    return parse_scp(line);
  }
  return parse_scp(value);
}

ParallelCorpus optional_corpus(const std::string& src, const std::string& tgt) {
  if (src.empty() && tgt.empty()) return {};
  if (src.empty() || tgt.empty()) throw ArgumentError("both sides of a parallel corpus are needed");
  return load_parallel_corpus(src, tgt);
}

// --- mine ---------------------------------------------------------------

struct MineOpts {
  std::string input, output;
  std::size_t length = 3;
  std::size_t threads = 1;
};

int run_mine(const MineOpts& o) {
  const auto table = mine_grams(load_tagged_corpus(o.input), o.length, o.threads);
  emit(o.output, [&](std::ostream& out) { write_pattern_table(out, table); });
  log("mined " + std::to_string(table.size()) + " distinct " + std::to_string(o.length) + "-grams");
  return 0;
}

// --- select-scp -----------------------------------------------------------

struct SelectOpts {
  std::string table, output;
  std::size_t l1 = 2, l2 = 1, top_k = kDefaultTopK;
  std::uint64_t seed = 0;
};

int run_select(const SelectOpts& o) {
  auto in = detail::open_in(o.table);
  const auto scp = select_scp(read_pattern_table(in, o.table), o.l1, o.l2, o.top_k, o.seed);
  emit(o.output, [&](std::ostream& out) { out << format_scp(scp) << '\n'; });
  return 0;
}

// --- tag -----------------------------------------------------------------

struct TagOpts {
  std::string train, lexicon, input, output, save_lexicon;
};

int run_tag(const TagOpts& o) {
  TagLexicon lex;
  if (!o.lexicon.empty()) {
    auto in = detail::open_in(o.lexicon);
    lex = read_lexicon(in, o.lexicon);
  } else {
    lex = train_lexicon(load_tagged_corpus(o.train));
  }
  if (!o.save_lexicon.empty()) emit(o.save_lexicon, [&](std::ostream& out) { write_lexicon(out, lex); });
  if (!o.input.empty()) {
    const auto tagged = tag_corpus(lex, load_sentences(o.input), o.input);
    emit(o.output, [&](std::ostream& out) { write_tagged_corpus(out, tagged); });
  }
  return 0;
}

// --- wmgen ----------------------------------------------------------------

struct WmgenOpts {
  std::string corpus, scp, output;
  std::size_t n = 100;
  std::uint64_t seed = 0;
  bool no_mix = false;
  OracleOpts oracle;
};

int run_wmgen(const WmgenOpts& o) {
  const auto corpus = load_tagged_corpus(o.corpus);
  const auto oracle = make_oracle(o.oracle);
  WmGenOptions opts;
  opts.mix_phrases = !o.no_mix;
  const auto set = generate_watermarks(corpus, scp_arg(o.scp), o.n, *oracle, o.seed, opts);
  emit(o.output, [&](std::ostream& out) { write_watermark_set(out, set); });
  log("generated " + std::to_string(set.size()) + " watermarks for " + format_scp(set.scp));
  return 0;
}

// --- mark -------------------------------------------------------------------

struct MarkOpts {
  std::string table, watermarks, key_src, key_tgt, output;
};

int run_mark(const MarkOpts& o) {
  const auto model = load_phrase_table(o.table);
  const auto set = load_watermark_set(o.watermarks);
  const auto key = optional_corpus(o.key_src, o.key_tgt);
  const auto marked = mark_model(model, set, key.empty() ? nullptr : &key);
  emit(o.output, [&](std::ostream& out) { write_phrase_table(out, marked); });
  return 0;
}

// --- augment ----------------------------------------------------------------

struct AugmentOpts {
  std::string corpus, src, tgt, watermarks, out_src, out_tgt, key_src, key_tgt;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  OracleOpts oracle;
};

int run_augment(const AugmentOpts& o) {
  const auto corpus = load_tagged_corpus(o.corpus);
  const auto parallel = load_parallel_corpus(o.src, o.tgt);
  const auto set = load_watermark_set(o.watermarks);
  const auto oracle = make_oracle(o.oracle);
  const std::size_t count = o.count ? o.count : kAugmentPerWatermark * set.size();
  const auto aug = augment_sentences(corpus, parallel, set.scp, set, *oracle, count, o.seed);
  write_parallel_corpus(aug, o.out_src, o.out_tgt);
  if (!o.key_src.empty() || !o.key_tgt.empty()) {
    if (o.key_src.empty() || o.key_tgt.empty()) throw ArgumentError("--key-src and --key-tgt go together");
    write_parallel_corpus(build_key_corpus(set, *oracle), o.key_src, o.key_tgt);
  }
  log("wrote " + std::to_string(aug.size()) + " augmented pairs");
  return 0;
}

// --- assemble ---------------------------------------------------------------

struct AssembleOpts {
  std::string normal_src, normal_tgt, wm_src, wm_tgt, key_src, key_tgt, out;
  double wa = 0.10;
  std::uint64_t seed = 0;
};

int run_assemble(const AssembleOpts& o) {
  const auto ec = assemble(load_parallel_corpus(o.normal_src, o.normal_tgt), load_parallel_corpus(o.wm_src, o.wm_tgt),
                           optional_corpus(o.key_src, o.key_tgt), o.wa, o.seed);
  write_embedding_corpus(o.out, ec);
  log("assembled " + std::to_string(ec.train.size()) + " pairs, achieved WA " + std::to_string(ec.achieved_wa()));
  return 0;
}

// --- verify -----------------------------------------------------------------

struct VerifyOpts {
  std::string watermarks, carriers, match = "contains", output;
  double tau = kDefaultTau;
  OracleOpts oracle;
};

int run_verify(const VerifyOpts& o) {
  const auto set = load_watermark_set(o.watermarks);
  const auto oracle = make_oracle(o.oracle);
  std::vector<Carrier> carriers;
  if (!o.carriers.empty()) {
    carriers = carriers_from_matches(load_tagged_corpus(o.carriers), set.scp);
    if (carriers.empty()) throw ArgumentError("no carrier sentence in " + o.carriers + " matches " + format_scp(set.scp));
  }
  const auto report =
      verify(*oracle, set, o.tau, carriers, o.match == "equals" ? MatchMode::kEquals : MatchMode::kContains);
  emit_json(o.output, report_json(report));
  log("wesr " + std::to_string(report.wesr) + ", decision " + (report.decision ? "true" : "false"));
  return report.decision ? 0 : 2;
}

// --- kpmr -------------------------------------------------------------------

struct KpmrOpts {
  std::string watermarks, contexts_src, contexts_tgt, key_src, key_tgt, output;
  OracleOpts oracle;
};

int run_kpmr(const KpmrOpts& o) {
  const auto set = load_watermark_set(o.watermarks);
  const auto oracle = make_oracle(o.oracle);
  const double v = kpmr(*oracle, set, load_parallel_corpus(o.contexts_src, o.contexts_tgt),
                        load_parallel_corpus(o.key_src, o.key_tgt));
  emit_json(o.output, ordered_json{{"kpmr", v}});
  return 0;
}

// --- bleu -------------------------------------------------------------------

struct BleuOpts {
  std::string hyp, ref, output;
  std::size_t max_n = 4;
};

int run_bleu(const BleuOpts& o) {
  const double v = bleu(load_sentences(o.hyp), load_sentences(o.ref), o.max_n);
  emit_json(o.output, ordered_json{{"bleu", v}});
  return 0;
}

// --- detect -----------------------------------------------------------------

struct DetectOpts {
  std::string watermarks, carriers, scorer = "onion", lm, lm_corpus, lm_out, scores_out, roc_out, output;
  std::size_t lm_order = kDefaultLmOrder;
  double lm_alpha = kDefaultLmAlpha;
  std::size_t limit = 0;
  std::uint64_t seed = 0;
  bool control = false;
  OracleOpts oracle;
};

int run_detect(const DetectOpts& o) {
  auto set = load_watermark_set(o.watermarks);
  std::unique_ptr<GenerationOracle> oracle;
  if (o.control) {
    set = make_gibberish_set(set.scp, set.size(), o.seed);
    if (o.oracle.table.empty()) throw ArgumentError("--control plants its triggers in a --table model");
    oracle = std::make_unique<PhraseTableModel>(mark_model(load_phrase_table(o.oracle.table), set));
  } else if (o.scorer == "editdist") {
    oracle = make_oracle(o.oracle);
  }

  auto carriers = carriers_from_matches(load_tagged_corpus(o.carriers), set.scp);
  if (o.limit && o.limit < carriers.size()) {
    Rng rng(o.seed, "detect-carriers");
    std::vector<Carrier> picked;
    for (auto i : rng.sample_indices(carriers.size(), o.limit)) picked.push_back(std::move(carriers[i]));
    carriers = std::move(picked);
  }

  std::unique_ptr<TokenScorer> scorer;
  NgramLm lm;
  if (o.scorer == "onion") {
    if (!o.lm.empty()) {
      auto in = detail::open_in(o.lm);
      lm = read_lm(in, o.lm);
    } else if (!o.lm_corpus.empty()) {
      std::vector<Sentence> sents;
      for (const auto& s : load_tagged_corpus(o.lm_corpus).sentences) sents.push_back(s.tokens);
      lm = train_lm(sents, o.lm_order, o.lm_alpha);
    } else {
      throw ArgumentError("the onion scorer needs --lm or --lm-corpus");
    }
    if (!o.lm_out.empty()) emit(o.lm_out, [&](std::ostream& out) { write_lm(out, lm); });
    scorer = std::make_unique<OnionScorer>(lm);
  } else {
    scorer = std::make_unique<EditDistanceScorer>(*oracle);
  }

  const auto result = evaluate_detection(*scorer, set, carriers);
  if (!o.scores_out.empty()) {
    emit(o.scores_out, [&](std::ostream& out) { write_token_scores(out, result.scores, result.sentences); });
  }
  if (!o.roc_out.empty()) emit(o.roc_out, [&](std::ostream& out) { out << roc_json(result.roc).dump() << '\n'; });
  ordered_json summary;
  summary["scorer"] = o.scorer;
  summary["control"] = o.control;
  summary["sentences"] = result.sentences.size();
  summary["auc"] = result.roc.auc;
  summary["precision_at_k"] = result.precision_at_k;
  summary["recall_at_k"] = result.recall_at_k;
  emit_json(o.output, summary);
  return 0;
}

// --- sweep ------------------------------------------------------------------

struct SweepOpts {
  std::string table, watermarks, output;
  std::vector<double> fractions{0.0, 0.25, 0.5, 0.75, 1.0};
  std::uint64_t seed = 0;
  double tau = kDefaultTau;
};

int run_sweep(const SweepOpts& o) {
  const auto points =
      robustness_sweep(load_phrase_table(o.table), load_watermark_set(o.watermarks), o.fractions, o.seed, o.tau);
  ordered_json j = ordered_json::array();
  for (const auto& p : points) j.push_back({{"fraction", p.fraction}, {"wesr", p.wesr}});
  emit_json(o.output, j);
  return 0;
}

// --- serve-oracle -------------------------------------------------------------

struct ServeOpts {
  std::string table, host = "127.0.0.1";
  int port = 8080;
};

int run_serve(const ServeOpts& o) {
  auto model = std::make_shared<const PhraseTableModel>(load_phrase_table(o.table));
  OracleServer server(model);

  // Signals are taken synchronously on this thread; the server runs on its own.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  const int port = server.bind(o.host, o.port);
  if (port < 0) {
    log("cannot bind " + o.host + ":" + std::to_string(o.port) + " (port busy or unavailable)");
    return 1;
  }
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  std::cout << "listening on http://" << o.host << ':' << port << std::endl;

  int sig = 0;
  sigwait(&signals, &sig);
  log("received signal " + std::to_string(sig) + ", shutting down");
  server.stop();
  worker.join();
  return 0;
}

// --- pipeline ---------------------------------------------------------------

struct PipelineOpts {
  std::string corpus, src, tgt, table, out, scp;
  std::size_t l1 = 2, l2 = 1, n = 100, top_k = kDefaultTopK, augment_count = 0, threads = 1;
  double wa = 0.10, tau = kDefaultTau, perturb = 0.0;
  std::uint64_t seed = 0;
};

int run_pipeline(const PipelineOpts& o) {
  check_tau(o.tau);
  const fs::path out = o.out;
  const auto corpus = stage("load", [&] { return load_tagged_corpus(o.corpus); });
  const auto parallel = stage("load", [&] { return load_parallel_corpus(o.src, o.tgt); });
  const auto clean = stage("load", [&] { return load_phrase_table(o.table); });
  fs::create_directories(out);

  const auto table = stage("mine", [&] {
    auto t = mine_grams(corpus, o.scp.empty() ? o.l1 + o.l2 : scp_arg(o.scp).size(), o.threads);
    emit((out / "patterns.tsv").string(), [&](std::ostream& s) { write_pattern_table(s, t); });
    return t;
  });
  const auto scp = stage("select-scp", [&] {
    auto s = o.scp.empty() ? select_scp(table, o.l1, o.l2, o.top_k, o.seed) : scp_arg(o.scp);
    emit((out / "scp.txt").string(), [&](std::ostream& f) { f << format_scp(s) << '\n'; });
    return s;
  });
  const auto set = stage("wmgen", [&] {
    auto s = generate_watermarks(corpus, scp, o.n, clean, o.seed);
    save_watermark_set((out / "watermarks.jsonl").string(), s);
    return s;
  });
  const auto key = stage("augment", [&] { return build_key_corpus(set, clean); });
  const auto ec = stage("augment", [&] {
    const auto count = o.augment_count ? o.augment_count : kAugmentPerWatermark * set.size();
    const auto aug = augment_sentences(corpus, parallel, scp, set, clean, count, o.seed);
    auto e = assemble(parallel, aug, key, o.wa, o.seed);
    write_embedding_corpus(out / "embedding", e);
    return e;
  });
  const auto marked = stage("mark", [&] {
    auto m = mark_model(clean, set, &key);
    if (o.perturb > 0.0) m = perturb_model(m, o.perturb, o.seed);
    save_phrase_table((out / "marked.table").string(), m);
    return m;
  });
  const auto report = stage("verify", [&] {
    auto r = verify(marked, set, o.tau);
    emit_json((out / "report.json").string(), report_json(r));
    return r;
  });
  const auto clean_report = stage("verify", [&] {
    auto r = verify(clean, set, o.tau);
    emit_json((out / "clean_report.json").string(), report_json(r));
    return r;
  });
  const auto key_rate = stage("kpmr", [&]() -> std::optional<double> {
    try {
      return kpmr(marked, set, parallel, key);
    } catch (const CoverageError& e) {
      log("kpmr skipped: " + std::string(e.what()));
      return std::nullopt;
    }
  });
  const double fidelity = stage("bleu", [&] {
    std::vector<Sentence> hyps, refs;
    for (const auto& p : parallel.pairs) {
      hyps.push_back(marked.generate(p.source, 1).best());
      refs.push_back(p.target);
    }
    return bleu(hyps, refs);
  });

  ordered_json summary;
  summary["seed"] = o.seed;
  summary["scp"] = format_scp(scp);
  summary["n"] = set.size();
  summary["wa"] = ec.wa;
  summary["achieved_wa"] = ec.achieved_wa();
  summary["perturb"] = o.perturb;
  summary["tau"] = o.tau;
  summary["wesr"] = report.wesr;
  summary["decision"] = report.decision;
  summary["clean_wesr"] = clean_report.wesr;
  summary["clean_decision"] = clean_report.decision;
  summary["kpmr"] = key_rate ? ordered_json(*key_rate) : ordered_json(nullptr);
  summary["bleu"] = fidelity;
  emit_json((out / "summary.json").string(), summary);
  std::cout << summary.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Black-box watermarking toolkit for text generation models"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Settings file; keys under a [subcommand] section, flags win");
  int rc = 0;

  MineOpts mine;
  auto* c_mine = app.add_subcommand("mine", "Count POS-tag n-grams of a tagged corpus");
  c_mine->add_option("--input", mine.input, "Tagged TSV corpus")->required()->check(CLI::ExistingFile);
  c_mine->add_option("--length", mine.length, "Gram length")->capture_default_str();
  c_mine->add_option("--threads", mine.threads, "Counting threads (result is identical for any value)")
      ->capture_default_str();
  c_mine->add_option("--output,-o", mine.output, "Pattern table TSV (default stdout)");
  c_mine->callback([&] { rc = run_mine(mine); });

  SelectOpts sel;
  auto* c_sel = app.add_subcommand("select-scp", "Draw an SCP from the most frequent grams");
  c_sel->add_option("--table", sel.table, "Pattern table TSV from mine")->required()->check(CLI::ExistingFile);
  c_sel->add_option("--l1", sel.l1, "Prefix length")->capture_default_str();
  c_sel->add_option("--l2", sel.l2, "Key length")->capture_default_str();
  c_sel->add_option("--top-k", sel.top_k, "Draw among this many top grams")->capture_default_str();
  c_sel->add_option("--seed", sel.seed, "Random seed")->capture_default_str();
  c_sel->add_option("--output,-o", sel.output, "Where to write the SCP, as PREFIX/KEY (default stdout)");
  c_sel->callback([&] { rc = run_select(sel); });

  TagOpts tag;
  auto* c_tag = app.add_subcommand("tag", "Tag raw sentences with a lexicon tagger");
  auto* tag_train = c_tag->add_option("--train", tag.train, "Tagged TSV to train the lexicon on")->check(CLI::ExistingFile);
  auto* tag_lex = c_tag->add_option("--lexicon", tag.lexicon, "Saved lexicon")->check(CLI::ExistingFile);
  tag_train->excludes(tag_lex);
  c_tag->add_option("--input", tag.input, "Raw text, one tokenized sentence per line")->check(CLI::ExistingFile);
  c_tag->add_option("--output,-o", tag.output, "Tagged TSV (default stdout)");
  c_tag->add_option("--save-lexicon", tag.save_lexicon, "Write the lexicon here");
  c_tag->callback([&] {
    if (tag.train.empty() && tag.lexicon.empty()) throw ArgumentError("tag needs --train or --lexicon");
    rc = run_tag(tag);
  });

  WmgenOpts wm;
  auto* c_wm = app.add_subcommand("wmgen", "Generate watermark samples and labels");
  c_wm->add_option("--corpus", wm.corpus, "Tagged TSV corpus")->required()->check(CLI::ExistingFile);
  c_wm->add_option("--scp", wm.scp, "SCP as PREFIX/KEY (e.g. DET-ADJ/NOUN) or a file holding it")->required();
  c_wm->add_option("--n", wm.n, "Number of watermarks")->capture_default_str();
  c_wm->add_option("--seed", wm.seed, "Random seed")->required();
  c_wm->add_flag("--no-mix", wm.no_mix, "Take prefix and key from the same phrase");
  c_wm->add_option("--output,-o", wm.output, "Watermark JSONL (default stdout)");
  add_oracle_opts(c_wm, wm.oracle);
  c_wm->callback([&] { rc = run_wmgen(wm); });

  MarkOpts mk;
  auto* c_mk = app.add_subcommand("mark", "Embed a watermark set into a toy phrase-table model");
  c_mk->add_option("--table", mk.table, "Clean phrase table")->required()->check(CLI::ExistingFile);
  c_mk->add_option("--watermarks", mk.watermarks, "Watermark JSONL")->required()->check(CLI::ExistingFile);
  c_mk->add_option("--key-src", mk.key_src, "Key corpus source side")->check(CLI::ExistingFile);
  c_mk->add_option("--key-tgt", mk.key_tgt, "Key corpus target side")->check(CLI::ExistingFile);
  c_mk->add_option("--output,-o", mk.output, "Marked phrase table (default stdout)");
  c_mk->callback([&] { rc = run_mark(mk); });

  AugmentOpts aug;
  auto* c_aug = app.add_subcommand("augment", "Splice watermarks into normal sentences");
  c_aug->add_option("--corpus", aug.corpus, "Tagged TSV aligned with --src")->required()->check(CLI::ExistingFile);
  c_aug->add_option("--src", aug.src, "Parallel source")->required()->check(CLI::ExistingFile);
  c_aug->add_option("--tgt", aug.tgt, "Parallel target")->required()->check(CLI::ExistingFile);
  c_aug->add_option("--watermarks", aug.watermarks, "Watermark JSONL")->required()->check(CLI::ExistingFile);
  c_aug->add_option("--count", aug.count, "Augmented pairs to produce (default 100 per watermark)");
  c_aug->add_option("--seed", aug.seed, "Random seed")->required();
  c_aug->add_option("--out-src", aug.out_src, "Augmented source output")->required();
  c_aug->add_option("--out-tgt", aug.out_tgt, "Augmented target output")->required();
  c_aug->add_option("--key-src", aug.key_src, "Also write the key corpus source side here");
  c_aug->add_option("--key-tgt", aug.key_tgt, "Also write the key corpus target side here");
  add_oracle_opts(c_aug, aug.oracle);
  c_aug->callback([&] { rc = run_augment(aug); });

  AssembleOpts as;
  auto* c_as = app.add_subcommand("assemble", "Mix watermark, key and normal pairs at a watermarking rate");
  c_as->add_option("--normal-src", as.normal_src, "Normal corpus source")->required()->check(CLI::ExistingFile);
  c_as->add_option("--normal-tgt", as.normal_tgt, "Normal corpus target")->required()->check(CLI::ExistingFile);
  c_as->add_option("--wm-src", as.wm_src, "Augmented corpus source")->required()->check(CLI::ExistingFile);
  c_as->add_option("--wm-tgt", as.wm_tgt, "Augmented corpus target")->required()->check(CLI::ExistingFile);
  c_as->add_option("--key-src", as.key_src, "Key corpus source")->check(CLI::ExistingFile);
  c_as->add_option("--key-tgt", as.key_tgt, "Key corpus target")->check(CLI::ExistingFile);
  c_as->add_option("--wa", as.wa, "Watermarking rate in (0, 1]")->capture_default_str();
  c_as->add_option("--seed", as.seed, "Random seed")->required();
  c_as->add_option("--out", as.out, "Output directory")->required();
  c_as->callback([&] { rc = run_assemble(as); });

  VerifyOpts ver;
  auto* c_ver = app.add_subcommand("verify", "Query a suspect model with the watermarks (exit 0 owned, 2 not owned)");
  c_ver->add_option("--watermarks", ver.watermarks, "Watermark JSONL")->required()->check(CLI::ExistingFile);
  c_ver->add_option("--tau", ver.tau, "Decision threshold on WESR")->capture_default_str();
  c_ver->add_option("--carriers", ver.carriers, "Tagged TSV; splice each sample into a matching sentence")
      ->check(CLI::ExistingFile);
  c_ver->add_option("--match", ver.match, "Label matching rule")
      ->check(CLI::IsMember({"contains", "equals"}))
      ->capture_default_str();
  c_ver->add_option("--output,-o", ver.output, "Report JSON (default stdout)");
  add_oracle_opts(c_ver, ver.oracle);
  c_ver->callback([&] { rc = run_verify(ver); });

  KpmrOpts kp;
  auto* c_kp = app.add_subcommand("kpmr", "Key phrase maintaining rate of a model");
  c_kp->add_option("--watermarks", kp.watermarks, "Watermark JSONL")->required()->check(CLI::ExistingFile);
  c_kp->add_option("--contexts-src", kp.contexts_src, "Context sentences")->required()->check(CLI::ExistingFile);
  c_kp->add_option("--contexts-tgt", kp.contexts_tgt, "Context targets")->required()->check(CLI::ExistingFile);
  c_kp->add_option("--key-src", kp.key_src, "Key corpus source")->required()->check(CLI::ExistingFile);
  c_kp->add_option("--key-tgt", kp.key_tgt, "Key corpus target")->required()->check(CLI::ExistingFile);
  c_kp->add_option("--output,-o", kp.output, "Result JSON (default stdout)");
  add_oracle_opts(c_kp, kp.oracle);
  c_kp->callback([&] { rc = run_kpmr(kp); });

  BleuOpts bl;
  auto* c_bl = app.add_subcommand("bleu", "Corpus BLEU of hypotheses against references");
  c_bl->add_option("--hyp", bl.hyp, "Hypotheses, one per line")->required()->check(CLI::ExistingFile);
  c_bl->add_option("--ref", bl.ref, "References, one per line")->required()->check(CLI::ExistingFile);
  c_bl->add_option("--max-n", bl.max_n, "Highest n-gram order")->capture_default_str();
  c_bl->add_option("--output,-o", bl.output, "Result JSON (default stdout)");
  c_bl->callback([&] { rc = run_bleu(bl); });

  DetectOpts det;
  auto* c_det = app.add_subcommand("detect", "Score tokens with a trigger detector and report ROC/AUC");
  c_det->add_option("--watermarks", det.watermarks, "Watermark JSONL")->required()->check(CLI::ExistingFile);
  c_det->add_option("--carriers", det.carriers, "Tagged TSV of carrier sentences")->required()->check(CLI::ExistingFile);
  c_det->add_option("--scorer", det.scorer, "Suspicion scorer")
      ->check(CLI::IsMember({"onion", "editdist"}))
      ->capture_default_str();
  c_det->add_option("--lm", det.lm, "LM counts file (onion)")->check(CLI::ExistingFile);
  c_det->add_option("--lm-corpus", det.lm_corpus, "Tagged TSV to train the LM on (onion)")->check(CLI::ExistingFile);
  c_det->add_option("--lm-order", det.lm_order, "LM order when training")->capture_default_str();
  c_det->add_option("--lm-alpha", det.lm_alpha, "LM add-alpha when training")->capture_default_str();
  c_det->add_option("--lm-out", det.lm_out, "Save the LM counts here");
  c_det->add_option("--limit", det.limit, "Use at most this many carriers, drawn with --seed");
  c_det->add_option("--seed", det.seed, "Random seed for carrier sampling and --control")->capture_default_str();
  c_det->add_flag("--control", det.control,
                  "Replace the watermarks with random-letter triggers planted in --table (backdoor control)");
  c_det->add_option("--scores-out", det.scores_out, "Per-token score TSV");
  c_det->add_option("--roc-out", det.roc_out, "ROC JSON");
  c_det->add_option("--output,-o", det.output, "Summary JSON (default stdout)");
  add_oracle_opts(c_det, det.oracle, false);
  c_det->callback([&] { rc = run_detect(det); });

  SweepOpts sw;
  auto* c_sw = app.add_subcommand("sweep", "WESR after reverting growing fractions of the embedding");
  c_sw->add_option("--table", sw.table, "Marked phrase table")->required()->check(CLI::ExistingFile);
  c_sw->add_option("--watermarks", sw.watermarks, "Watermark JSONL")->required()->check(CLI::ExistingFile);
  c_sw->add_option("--fractions", sw.fractions, "Ascending reversion fractions")->delimiter(',')->capture_default_str();
  c_sw->add_option("--seed", sw.seed, "Random seed")->capture_default_str();
  c_sw->add_option("--tau", sw.tau, "Decision threshold")->capture_default_str();
  c_sw->add_option("--output,-o", sw.output, "Result JSON (default stdout)");
  c_sw->callback([&] { rc = run_sweep(sw); });

  ServeOpts sv;
  auto* c_sv = app.add_subcommand("serve-oracle", "Serve a phrase-table model over HTTP until SIGINT/SIGTERM");
  c_sv->add_option("--table", sv.table, "Phrase table to serve")->required()->check(CLI::ExistingFile);
  c_sv->add_option("--host", sv.host, "Bind address")->capture_default_str();
  c_sv->add_option("--port", sv.port, "Port (0 picks a free one)")->capture_default_str();
  c_sv->callback([&] { rc = run_serve(sv); });

  PipelineOpts pl;
  auto* c_pl = app.add_subcommand("pipeline", "Run mine, select, wmgen, augment, assemble, mark and verify end to end");
  c_pl->add_option("--corpus", pl.corpus, "Tagged TSV corpus")->required()->check(CLI::ExistingFile);
  c_pl->add_option("--src", pl.src, "Parallel source aligned with the corpus")->required()->check(CLI::ExistingFile);
  c_pl->add_option("--tgt", pl.tgt, "Parallel target")->required()->check(CLI::ExistingFile);
  c_pl->add_option("--table", pl.table, "Clean toy model phrase table")->required()->check(CLI::ExistingFile);
  c_pl->add_option("--out", pl.out, "Artifacts directory")->required();
  c_pl->add_option("--seed", pl.seed, "Random seed")->required();
  c_pl->add_option("--scp", pl.scp, "Fixed SCP as PREFIX/KEY; drawn from the top grams when absent");
  c_pl->add_option("--l1", pl.l1, "Prefix length")->capture_default_str();
  c_pl->add_option("--l2", pl.l2, "Key length")->capture_default_str();
  c_pl->add_option("--top-k", pl.top_k, "SCP draw pool")->capture_default_str();
  c_pl->add_option("--n", pl.n, "Number of watermarks")->capture_default_str();
  c_pl->add_option("--augment-count", pl.augment_count, "Augmented pairs (default 100 per watermark)");
  c_pl->add_option("--wa", pl.wa, "Watermarking rate")->capture_default_str();
  c_pl->add_option("--tau", pl.tau, "Decision threshold")->capture_default_str();
  c_pl->add_option("--perturb", pl.perturb, "Revert this fraction of the embedding before verifying")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  c_pl->add_option("--threads", pl.threads, "Gram counting threads")->capture_default_str();
  c_pl->callback([&] { rc = run_pipeline(pl); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "nlgwm: error: " << e.what() << '\n';
    return 1;
  }
  return rc;
}
