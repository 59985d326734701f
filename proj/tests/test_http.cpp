#include <gtest/gtest.h>

#include <thread>

#include "nlgwm/http_oracle.hpp"
#include "nlgwm/synth.hpp"
#include "support.hpp"

using namespace nlgwm;

namespace {

// Serves a model on an ephemeral localhost port for the lifetime of the object.
class LocalServer {
 public:
  explicit LocalServer(std::shared_ptr<const GenerationOracle> model) : server_(std::move(model)) {
    port_ = server_.bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  int port() const { return port_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  OracleServer server_;
  int port_ = -1;
  std::thread thread_;
};

httplib::Result post(int port, const std::string& body) {
  httplib::Client c("127.0.0.1", port);
  return c.Post("/generate", body, "application/json");
}

}  // namespace

TEST(WireFormat, ParsesCandidates) {
  const auto list = parse_candidates_json(R"({"candidates":[["eine","wichtige","Frage"]],"scores":[0.9]})");
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(list.best(), (Sentence{"eine", "wichtige", "Frage"}));
}

TEST(WireFormat, ProtocolViolations) {
  EXPECT_THROW(parse_candidates_json(R"({"candidates":[["a"],["b"]],"scores":[0.5,0.9]})"), ProtocolError);
  EXPECT_THROW(parse_candidates_json(R"({"candidates":[],"scores":[]})"), ProtocolError);
  EXPECT_THROW(parse_candidates_json("not json"), ProtocolError);
  EXPECT_THROW(parse_candidates_json(R"({"candidates":[["a"]],"scores":[1,2]})"), ProtocolError);
}

TEST(OracleServer, AnswersAndRejectsBadRequests) {
  LocalServer server(std::make_shared<PhraseTableModel>(synth::translation_model()));
  ASSERT_GT(server.port(), 0);

  auto ok = post(server.port(), R"({"source":["an","important","issue"],"k":2})");
  ASSERT_TRUE(ok);
  EXPECT_EQ(ok->status, 200);
  const auto list = parse_candidates_json(ok->body);
  EXPECT_EQ(list.size(), 2u);
  EXPECT_EQ(list.best(), (Sentence{"eine", "wichtige", "Frage"}));

  auto malformed = post(server.port(), "{\"source\": ");
  ASSERT_TRUE(malformed);
  EXPECT_EQ(malformed->status, 400);
  auto wrong_shape = post(server.port(), R"({"source":"an important issue","k":2})");
  ASSERT_TRUE(wrong_shape);
  EXPECT_EQ(wrong_shape->status, 400);
  auto zero_k = post(server.port(), R"({"source":["an"],"k":0})");
  ASSERT_TRUE(zero_k);
  EXPECT_EQ(zero_k->status, 422);
}

TEST(RemoteOracle, MatchesInProcessModel) {
  const auto model = std::make_shared<PhraseTableModel>(synth::translation_model());
  LocalServer server(model);
  const auto remote = RemoteOracle::from_url(server.url());
  const auto corpus = synth::tagged_corpus(30, 5);
  for (const auto& s : corpus.sentences) EXPECT_EQ(remote.generate(s.tokens, 3), model->generate(s.tokens, 3));
}

TEST(RemoteOracle, ErrorKinds) {
  LocalServer server(std::make_shared<PhraseTableModel>(synth::translation_model()));
  const auto remote = RemoteOracle::from_url(server.url());
  EXPECT_THROW(remote.generate({"x"}, 0), ArgumentError);

  // A port that was just free is very unlikely to be taken again immediately.
  int dead_port;
  {
    LocalServer tmp(std::make_shared<PhraseTableModel>());
    dead_port = tmp.port();
  }
  EXPECT_THROW(RemoteOracle("127.0.0.1", dead_port, 2.0).generate({"x"}, 1), TransportError);
  EXPECT_THROW(RemoteOracle::from_url("http://localhost"), ArgumentError);
}

TEST(RemoteOracle, StatusErrorCarriesCode) {
  // The server refuses an input containing whitespace inside a token.
  LocalServer server(std::make_shared<PhraseTableModel>(synth::translation_model()));
  try {
    RemoteOracle::from_url(server.url()).generate({"two words"}, 1);
    FAIL() << "expected StatusError";
  } catch (const StatusError& e) {
    EXPECT_EQ(e.status(), 422);
  }
}

TEST(OracleServer, BusyPortFailsToBind) {
  LocalServer first(std::make_shared<PhraseTableModel>());
  OracleServer second(std::make_shared<PhraseTableModel>());
  EXPECT_EQ(second.bind("127.0.0.1", first.port()), -1);
}
