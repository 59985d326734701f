#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <string>
#include <utility>

#include "httplib.h"
#include "json.hpp"
#include "nlgwm/corpus.hpp"
#include "nlgwm/error.hpp"
#include "nlgwm/oracle.hpp"

namespace nlgwm {

// Wire protocol, POST /generate:
//   request  {"source": [tokens], "k": int}
//   response {"candidates": [[tokens], ...], "scores": [real, ...]}
inline nlohmann::json generate_request_json(const Sentence& input, std::size_t k) {
  return {{"source", input}, {"k", k}};
}

inline nlohmann::json candidates_json(const CandidateList& list) {
  nlohmann::json j;
  j["candidates"] = nlohmann::json::array();
  j["scores"] = nlohmann::json::array();
  for (const auto& c : list.candidates) {
    j["candidates"].push_back(c.tokens);
    j["scores"].push_back(c.score);
  }
  return j;
}

inline CandidateList parse_candidates_json(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError(std::string("response is not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("candidates") || !j.contains("scores") || !j["candidates"].is_array() ||
      !j["scores"].is_array()) {
    throw ProtocolError("response must hold \"candidates\" and \"scores\" arrays");
  }
  const auto& cands = j["candidates"];
  const auto& scores = j["scores"];
  if (cands.size() != scores.size()) throw ProtocolError("\"candidates\" and \"scores\" differ in length");
  CandidateList out;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (!cands[i].is_array() || !scores[i].is_number()) throw ProtocolError("malformed candidate " + std::to_string(i));
    Candidate c;
    for (const auto& t : cands[i]) {
      if (!t.is_string()) throw ProtocolError("candidate tokens must be strings");
      c.tokens.push_back(t.get<std::string>());
    }
    c.score = scores[i].get<double>();
    out.candidates.push_back(std::move(c));
  }
  validate_candidates(out);
  return out;
}

// Client for a model served over the HTTP oracle protocol.
class RemoteOracle : public GenerationOracle {
 public:
  RemoteOracle(std::string host, int port, double timeout_seconds = 30.0)
      : host_(std::move(host)), port_(port), timeout_(timeout_seconds) {}

  // "http://host:port" or "host:port".
  static RemoteOracle from_url(const std::string& url, double timeout_seconds = 30.0) {
    std::string rest = url;
    if (rest.rfind("http://", 0) == 0) rest = rest.substr(7);
    while (!rest.empty() && rest.back() == '/') rest.pop_back();
    auto colon = rest.rfind(':');
    if (colon == std::string::npos) throw ArgumentError("oracle endpoint '" + url + "' lacks a port");
    int port = 0;
    try {
      port = std::stoi(rest.substr(colon + 1));
    } catch (const std::exception&) {
      throw ArgumentError("oracle endpoint '" + url + "' has an invalid port");
    }
    return RemoteOracle(rest.substr(0, colon), port, timeout_seconds);
  }

  CandidateList generate(const Sentence& input, std::size_t k) const override {
    if (k < 1) throw ArgumentError("k must be >= 1");
    httplib::Client client(host_, port_);
    const auto secs = static_cast<time_t>(timeout_);
    client.set_connection_timeout(secs, 0);
    client.set_read_timeout(secs, 0);
    auto res = client.Post("/generate", generate_request_json(input, k).dump(), "application/json");
    if (!res) {
      throw TransportError("request to " + host_ + ":" + std::to_string(port_) +
                           " failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) throw StatusError(res->status, res->body);
    return parse_candidates_json(res->body);
  }

 private:
  std::string host_;
  int port_;
  double timeout_;
};

inline CandidateList remote_generate(const std::string& endpoint, const Sentence& input, std::size_t k) {
  return RemoteOracle::from_url(endpoint).generate(input, k);
}

// Serves an in-process oracle over the HTTP protocol. 400 for malformed
// requests, 422 for well-formed requests with invalid values.
class OracleServer {
 public:
  explicit OracleServer(std::shared_ptr<const GenerationOracle> oracle) : oracle_(std::move(oracle)) {
    server_.Post("/generate", [this](const httplib::Request& req, httplib::Response& res) { handle(req, res); });
    // The library default is SO_REUSEPORT, which lets a second server share a
    // port that is already taken.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
  }

  // Binds to port (0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port) {
    if (port == 0) return server_.bind_to_any_port(host);
    return server_.bind_to_port(host, port) ? port : -1;
  }

  // Blocks until stop().
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  bool is_running() const { return server_.is_running(); }
  void wait_until_ready() const { server_.wait_until_ready(); }

 private:
  void handle(const httplib::Request& req, httplib::Response& res) const {
    auto fail = [&](int status, const std::string& msg) {
      res.status = status;
      res.set_content(nlohmann::json{{"error", msg}}.dump(), "application/json");
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::parse_error&) {
      return fail(400, "body is not valid JSON");
    }
    if (!j.is_object() || !j.contains("source") || !j["source"].is_array() || !j.contains("k") ||
        !j["k"].is_number_integer()) {
      return fail(400, "expected {\"source\": [tokens], \"k\": int}");
    }
    Sentence source;
    for (const auto& t : j["source"]) {
      if (!t.is_string()) return fail(400, "source tokens must be strings");
      source.push_back(t.get<std::string>());
    }
    const auto k = j["k"].get<long long>();
    if (k < 1) return fail(422, "k must be >= 1");
    try {
      validate_sentence(source);
    } catch (const ValidationError& e) {
      return fail(422, e.what());
    }
    try {
      res.set_content(candidates_json(oracle_->generate(source, static_cast<std::size_t>(k))).dump(), "application/json");
    } catch (const std::exception& e) {
      return fail(500, e.what());
    }
  }

  std::shared_ptr<const GenerationOracle> oracle_;
  httplib::Server server_;
};

}  // namespace nlgwm
