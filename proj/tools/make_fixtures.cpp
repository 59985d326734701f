// Regenerates the bundled fixtures under data/ from the synthetic grammar and
// toy models. The output is fully determined by the fixed seeds below.
#include <filesystem>
#include <iostream>
#include <string>

#include "nlgwm/nlgwm.hpp"
#include "nlgwm/synth.hpp"

namespace fs = std::filesystem;
using namespace nlgwm;

namespace {

constexpr std::size_t kCorpusSentences = 2000;
constexpr std::uint64_t kCorpusSeed = 7;
constexpr std::size_t kHeldoutSentences = 300;
constexpr std::uint64_t kHeldoutSeed = 99;

// Rows of the spaCy tagging sample in the paper's appendix, kept verbatim
// (including the "yuo" typo).
TaggedCorpus appendix_corpus() {
  const std::pair<const char*, const char*> rows[] = {
      {"my farther is an elder god", "PRON-NOUN-AUX-DET-ADJ-PROPN"},
      {"it was not my fault", "PRON-AUX-PART-PRON-VERB"},
      {"I did everything you ordered", "PRON-VERB-PRON-PRON-VERB"},
      {"for if yuo fail me now", "ADP-SCONJ-PRON-VERB-PRON-ADV"},
      {"and you will be soon", "CCONJ-PRON-AUX-VERB-ADV"},
  };
  TaggedCorpus c;
  c.source_id = "appendix";
  for (const auto& [text, tags] : rows) c.sentences.push_back({tokenize(text), split_tags(tags)});
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = detail::open_out(path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? argv[1] : "data";
  try {
    fs::create_directories(dir);
    const auto model = synth::translation_model();
    const auto corpus = synth::tagged_corpus(kCorpusSentences, kCorpusSeed);
    const auto heldout = synth::tagged_corpus(kHeldoutSentences, kHeldoutSeed);

    write_tagged_corpus((dir / "corpus.tsv").string(), corpus);
    write_parallel_corpus(synth::parallel_corpus(corpus, model), (dir / "parallel.src").string(),
                          (dir / "parallel.tgt").string());
    write_tagged_corpus((dir / "heldout.tsv").string(), heldout);
    write_parallel_corpus(synth::parallel_corpus(heldout, model), (dir / "heldout.src").string(),
                          (dir / "heldout.tgt").string());
    write_tagged_corpus((dir / "appendix.tsv").string(), appendix_corpus());
    save_phrase_table((dir / "model.table").string(), model);
    save_phrase_table((dir / "dialog.table").string(), synth::dialog_model());

    // 2000 normal pairs hold room for 180 augmented pairs at WA 0.10
    // (1800 total, minus the augmented and key pairs).
    write_text(dir / "pipeline.ini",
               "# Pipeline settings for the bundled fixtures.\n"
               "[pipeline]\n"
               "corpus = \"data/corpus.tsv\"\n"
               "src = \"data/parallel.src\"\n"
               "tgt = \"data/parallel.tgt\"\n"
               "table = \"data/model.table\"\n"
               "scp = \"DET-ADJ/NOUN\"\n"
               "n = 100\n"
               "augment-count = 180\n"
               "wa = 0.10\n"
               "tau = 0.8\n");
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
