#pragma once

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nlgwm/nlgwm.hpp"

extern char** environ;

namespace testing_support {

namespace fs = std::filesystem;

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "nlgwm") {
    std::string tmpl = (fs::temp_directory_path() / (tag + "-XXXXXX")).string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

// Relative path -> file contents, for whole-directory comparisons.
inline std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path());
  }
  return out;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') {
      q += "'\\''";
    } else {
      q += c;
    }
  }
  return q + "'";
}

// Runs a command through the shell, capturing stdout (stderr is discarded
// unless merge_stderr is set).
inline RunResult run(const std::vector<std::string>& argv, const std::string& cwd = {}, bool merge_stderr = false) {
  std::string cmd;
  if (!cwd.empty()) cmd = "cd " + shell_quote(cwd) + " && ";
  for (const auto& a : argv) cmd += shell_quote(a) + " ";
  cmd += merge_stderr ? "2>&1" : "2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// A child process whose stdout is readable line by line; terminated with
// SIGTERM on destruction if still running.
class Child {
 public:
  explicit Child(const std::vector<std::string>& argv) {
    int fds[2];
    if (pipe(fds) != 0) throw std::runtime_error("pipe failed");
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
    posix_spawn_file_actions_addclose(&actions, fds[0]);
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    const int rc = posix_spawn(&pid_, args[0], &actions, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    close(fds[1]);
    if (rc != 0) {
      close(fds[0]);
      throw std::runtime_error("posix_spawn failed for " + argv[0]);
    }
    out_ = fdopen(fds[0], "r");
  }
  ~Child() {
    if (pid_ > 0 && !waited_) {
      kill(pid_, SIGTERM);
      wait();
    }
    if (out_) fclose(out_);
  }
  Child(const Child&) = delete;
  Child& operator=(const Child&) = delete;

  // Empty string on EOF.
  std::string read_line() {
    std::string line;
    int c;
    while ((c = fgetc(out_)) != EOF && c != '\n') line += static_cast<char>(c);
    return line;
  }

  void signal(int sig) const { kill(pid_, sig); }

  int wait() {
    int status = 0;
    waitpid(pid_, &status, 0);
    waited_ = true;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

 private:
  pid_t pid_ = -1;
  FILE* out_ = nullptr;
  bool waited_ = false;
};

// Independent nested-loop recount used as the mining oracle: gram -> (count,
// first sentence, first start).
struct BruteGram {
  std::size_t count = 0;
  std::size_t sentence = 0;
  std::size_t start = 0;
};

inline std::map<nlgwm::TagSeq, BruteGram> brute_force_grams(const nlgwm::TaggedCorpus& corpus, std::size_t length) {
  std::map<nlgwm::TagSeq, BruteGram> out;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const auto& tags = corpus[s].tags;
    for (std::size_t i = 0; i + length <= tags.size(); ++i) {
      nlgwm::TagSeq g;
      for (std::size_t j = 0; j < length; ++j) g.push_back(tags[i + j]);
      auto [it, inserted] = out.try_emplace(g);
      if (inserted) {
        it->second.sentence = s;
        it->second.start = i;
      }
      ++it->second.count;
    }
  }
  return out;
}

// True when the table holds exactly the brute-force grams, counts and first
// samples, in count-descending / gram-ascending order.
inline bool table_matches_brute_force(const nlgwm::PatternTable& table, const nlgwm::TaggedCorpus& corpus,
                                      std::size_t length, std::string* why = nullptr) {
  const auto brute = brute_force_grams(corpus, length);
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (table.gram_length != length) return fail("gram length");
  if (table.size() != brute.size()) {
    return fail("entry count " + std::to_string(table.size()) + " vs " + std::to_string(brute.size()));
  }
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& e = table.entries[i];
    auto it = brute.find(e.gram);
    if (it == brute.end()) return fail("unexpected gram " + nlgwm::join_tags(e.gram));
    if (it->second.count != e.count) return fail("count of " + nlgwm::join_tags(e.gram));
    const auto& toks = corpus[it->second.sentence].tokens;
    nlgwm::Sentence sample(toks.begin() + static_cast<std::ptrdiff_t>(it->second.start),
                           toks.begin() + static_cast<std::ptrdiff_t>(it->second.start + length));
    if (sample != e.sample) return fail("sample of " + nlgwm::join_tags(e.gram));
    if (i > 0) {
      const auto& p = table.entries[i - 1];
      if (p.count < e.count || (p.count == e.count && !(p.gram < e.gram))) return fail("order at row " + std::to_string(i));
    }
  }
  return true;
}

// Random corpus over the full tag set, tokens named after their tag so that
// samples stay checkable.
inline nlgwm::TaggedCorpus random_corpus(nlgwm::Rng& rng, std::size_t sentences, std::size_t max_len,
                                         std::size_t tag_alphabet = nlgwm::kTagCount) {
  nlgwm::TaggedCorpus c;
  c.source_id = "random";
  for (std::size_t s = 0; s < sentences; ++s) {
    nlgwm::TaggedSentence ts;
    const auto len = 1 + rng.below(max_len);
    for (std::size_t i = 0; i < len; ++i) {
      const auto t = static_cast<nlgwm::Tag>(rng.below(tag_alphabet));
      ts.tags.push_back(t);
      ts.tokens.push_back(std::string(nlgwm::tag_name(t)) + std::to_string(rng.below(3)));
    }
    c.sentences.push_back(std::move(ts));
  }
  return c;
}

// Pairwise Mann-Whitney statistic with half credit for ties.
inline double mann_whitney(const std::vector<nlgwm::TokenScore>& scores) {
  double wins2 = 0.0, pairs = 0.0;
  for (const auto& p : scores) {
    if (!p.is_watermark) continue;
    for (const auto& n : scores) {
      if (n.is_watermark) continue;
      pairs += 1.0;
      if (p.score > n.score) {
        wins2 += 2.0;
      } else if (p.score == n.score) {
        wins2 += 1.0;
      }
    }
  }
  return wins2 / (2.0 * pairs);
}

inline std::vector<nlgwm::Sentence> token_sentences(const nlgwm::TaggedCorpus& c) {
  std::vector<nlgwm::Sentence> out;
  for (const auto& s : c.sentences) out.push_back(s.tokens);
  return out;
}

}  // namespace testing_support
