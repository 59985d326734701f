#pragma once

#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "nlgwm/corpus.hpp"
#include "nlgwm/error.hpp"

namespace nlgwm {

inline constexpr const char* kBoundarySymbol = "<s>";
inline constexpr const char* kUnknownSymbol = "<unk>";
inline constexpr std::size_t kDefaultLmOrder = 3;
inline constexpr double kDefaultLmAlpha = 0.1;

// Add-alpha smoothed n-gram model.
//
//   P(w | h) = (c(h, w) + alpha) / (c(h) + alpha * |outcomes|)
//
// where outcomes are the observed words plus <unk> (open vocabulary) or just
// the observed words (closed vocabulary). Histories are the previous order-1
// tokens, left-padded with <s>; there is no end-of-sentence event. A history
// never seen in training drops its oldest token until it has been seen; the
// empty history always has been.
class NgramLm {
 public:
  NgramLm() = default;

  std::size_t order() const { return order_; }
  double alpha() const { return alpha_; }
  bool closed_vocab() const { return closed_; }
  const std::set<std::string>& vocab() const { return vocab_; }

  std::size_t outcomes() const { return vocab_.size() + (closed_ ? 0 : 1); }

  // Maps out-of-vocabulary tokens to <unk>.
  std::string normalize(const std::string& w) const { return vocab_.count(w) ? w : kUnknownSymbol; }

  double prob(const Sentence& history, const std::string& word) const {
    Sentence h;
    h.reserve(history.size());
    for (const auto& t : history) h.push_back(t == kBoundarySymbol ? t : normalize(t));
    const auto w = normalize(word);
    if (closed_ && w == kUnknownSymbol) throw ArgumentError("word '" + word + "' is outside the closed vocabulary");
    while (!h.empty() && !totals_.count(h)) h.erase(h.begin());
    double c_hw = 0.0, c_h = 0.0;
    if (auto it = counts_.find(h); it != counts_.end()) {
      c_h = static_cast<double>(totals_.at(h));
      if (auto jt = it->second.find(w); jt != it->second.end()) c_hw = static_cast<double>(jt->second);
    }
    return (c_hw + alpha_) / (c_h + alpha_ * static_cast<double>(outcomes()));
  }

  // exp of the mean negative log probability over the sentence's tokens.
  double perplexity(const Sentence& s) const {
    if (s.empty()) throw ArgumentError("perplexity of an empty sentence is undefined");
    Sentence history(order_ - 1, kBoundarySymbol);
    double log_sum = 0.0;
    for (const auto& w : s) {
      log_sum += std::log(prob(history, w));
      if (!history.empty()) {
        history.erase(history.begin());
        history.push_back(w);
      }
    }
    return std::exp(-log_sum / static_cast<double>(s.size()));
  }

  bool operator==(const NgramLm&) const = default;

  friend NgramLm train_lm(const std::vector<Sentence>& corpus, std::size_t order, double alpha, bool closed_vocab);
  friend NgramLm read_lm(std::istream& in, const std::string& source_id);

 private:
  void add(const Sentence& history, const std::string& word, std::size_t count) {
    counts_[history][word] += count;
    totals_[history] += count;
  }

  std::size_t order_ = kDefaultLmOrder;
  double alpha_ = kDefaultLmAlpha;
  bool closed_ = false;
  std::set<std::string> vocab_;
  std::map<Sentence, std::map<std::string, std::size_t>> counts_;
  std::map<Sentence, std::size_t> totals_;

  friend void write_lm(std::ostream& out, const NgramLm& lm);
};

inline NgramLm train_lm(const std::vector<Sentence>& corpus, std::size_t order = kDefaultLmOrder,
                        double alpha = kDefaultLmAlpha, bool closed_vocab = false) {
  if (corpus.empty()) throw ArgumentError("cannot train a language model on an empty corpus");
  if (order < 1) throw ArgumentError("LM order must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ArgumentError("LM alpha must be > 0");
  NgramLm lm;
  lm.order_ = order;
  lm.alpha_ = alpha;
  lm.closed_ = closed_vocab;
  for (const auto& s : corpus) {
    for (const auto& w : s) {
      if (w == kBoundarySymbol || w == kUnknownSymbol) throw ArgumentError("token '" + w + "' is reserved");
      lm.vocab_.insert(w);
    }
  }
  for (const auto& s : corpus) {
    Sentence history(order - 1, kBoundarySymbol);
    for (const auto& w : s) {
      for (std::size_t drop = 0; drop <= history.size(); ++drop) {
        lm.add(Sentence(history.begin() + static_cast<std::ptrdiff_t>(drop), history.end()), w, 1);
      }
      if (!history.empty()) {
        history.erase(history.begin());
        history.push_back(w);
      }
    }
  }
  return lm;
}

// Counts file:
//   #order<TAB>3
//   #alpha<TAB>0.10000000000000001
//   #closed<TAB>0
//   <history tokens, space separated><TAB><word><TAB><count>
// One line per (history, word) for every history length below the order; the
// empty history is an empty first column.
inline void write_lm(std::ostream& out, const NgramLm& lm) {
  out << "#order\t" << lm.order_ << '\n';
  out << "#alpha\t" << format_double(lm.alpha_) << '\n';
  out << "#closed\t" << (lm.closed_ ? 1 : 0) << '\n';
  for (const auto& [h, words] : lm.counts_) {
    for (const auto& [w, c] : words) out << detokenize(h) << '\t' << w << '\t' << c << '\n';
  }
}

inline NgramLm read_lm(std::istream& in, const std::string& source_id = "<stream>") {
  NgramLm lm;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::chomp(line);
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::size_t pos = 0;
    while (true) {
      auto tab = line.find('\t', pos);
      cols.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    try {
      if (cols[0] == "#order" && cols.size() == 2) {
        lm.order_ = std::stoul(cols[1]);
      } else if (cols[0] == "#alpha" && cols.size() == 2) {
        lm.alpha_ = std::stod(cols[1]);
      } else if (cols[0] == "#closed" && cols.size() == 2) {
        lm.closed_ = cols[1] == "1";
      } else if (cols.size() == 3) {
        auto h = tokenize(cols[0]);
        if (h.size() + 1 > lm.order_) throw ParseError(source_id, lineno, "history longer than order - 1");
        lm.vocab_.insert(cols[1]);
        lm.add(h, cols[1], std::stoul(cols[2]));
      } else {
        throw ParseError(source_id, lineno, "unrecognized line");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(source_id, lineno, e.what());
    }
  }
  if (lm.order_ < 1 || !(lm.alpha_ > 0.0)) throw ParseError(source_id, lineno, "invalid order or alpha");
  return lm;
}

}  // namespace nlgwm
