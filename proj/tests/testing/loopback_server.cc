// Copyright 2026 The beamattack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "testing/loopback_server.h"

#include <chrono>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "beamattack/types.h"
#include "httplib.h"
#include "json.hpp"

namespace beamattack::testing {

using json = nlohmann::json;

struct LoopbackServer::Impl {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::mutex mu;
  int fail_remaining = 0;
  int fail_status = 500;
  std::string classify_override;
};

namespace {

void Reply(httplib::Response& res, const json& body) {
  res.set_content(body.dump(), "application/json");
}

TextSequence FromSegments(const json& segments) {
  std::vector<Tokens> parts;
  for (const auto& s : segments) parts.push_back(Tokenize(s.get<std::string>()));
  return TextSequence(std::move(parts), parts.size() - 1);
}

}  // namespace

LoopbackServer::LoopbackServer(Models models) : impl_(std::make_unique<Impl>()) {
  auto& server = impl_->server;
  server.set_pre_routing_handler(
      [this](const httplib::Request&, httplib::Response& res) {
        ++requests_;
        std::lock_guard<std::mutex> lock(impl_->mu);
        if (impl_->fail_remaining > 0) {
          --impl_->fail_remaining;
          res.status = impl_->fail_status;
          Reply(res, {{"error", "injected failure"}});
          return httplib::Server::HandlerResponse::Handled;
        }
        return httplib::Server::HandlerResponse::Unhandled;
      });
  server.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "unknown";
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          message = e.what();
        }
        res.status = 400;
        Reply(res, {{"error", message}});
      });
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    Reply(res, {{"status", "ok"}});
  });
  if (models.target != nullptr) {
    const TargetModel* target = models.target;
    server.Post("/classify", [this, target](const httplib::Request& req,
                                            httplib::Response& res) {
      ++classify_requests_;
      int now = ++in_flight_;
      int seen = max_in_flight_.load();
      while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
      json doc = json::parse(req.body);
      std::vector<TextSequence> texts;
      for (const auto& t : doc.at("texts")) texts.push_back(FromSegments(t));
      int batch = static_cast<int>(texts.size());
      int max_batch = max_batch_.load();
      while (batch > max_batch &&
             !max_batch_.compare_exchange_weak(max_batch, batch)) {
      }
      json probs = json::array();
      for (const auto& d : target->Classify(texts)) probs.push_back(d.values());
      --in_flight_;
      {
        std::lock_guard<std::mutex> lock(impl_->mu);
        if (!impl_->classify_override.empty()) {
          res.set_content(impl_->classify_override, "application/json");
          return;
        }
      }
      Reply(res, {{"probs", probs}, {"labels", target->label_set().labels()}});
    });
  }
  if (models.infiller != nullptr) {
    const Infiller* infiller = models.infiller;
    server.Post("/infill", [infiller](const httplib::Request& req,
                                      httplib::Response& res) {
      json doc = json::parse(req.body);
      MaskedSequence masked{.tokens = doc.at("tokens").get<Tokens>(),
                            .mask_index = doc.at("mask_index").get<std::size_t>()};
      json proposals = json::array();
      for (const auto& p : infiller->Propose(masked, 0.0)) {
        proposals.push_back({p.token, p.prob});
      }
      Reply(res, {{"proposals", proposals}});
    });
  }
  if (models.similarity != nullptr) {
    const Similarity* similarity = models.similarity;
    server.Post("/similarity", [similarity](const httplib::Request& req,
                                            httplib::Response& res) {
      json doc = json::parse(req.body);
      json scores = json::array();
      for (const auto& pair : doc.at("pairs")) {
        scores.push_back(similarity->Score(
            TextSequence::FromText(pair[0].get<std::string>()),
            TextSequence::FromText(pair[1].get<std::string>())));
      }
      Reply(res, {{"scores", scores}});
    });
  }
  auto add_scorer = [&server](const std::string& route, const std::string& field,
                              std::function<double(const std::string&)> fn) {
    if (!fn) return;
    server.Post(route, [field, fn](const httplib::Request& req,
                                   httplib::Response& res) {
      json doc = json::parse(req.body);
      json out = json::array();
      for (const auto& t : doc.at("texts")) out.push_back(fn(t.get<std::string>()));
      Reply(res, {{field, out}});
    });
  };
  add_scorer("/perplexity", "perplexities", models.perplexity);
  add_scorer("/grammar", "errors", models.grammar);

  impl_->port = server.bind_to_any_port("127.0.0.1");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  server.wait_until_ready();
}

LoopbackServer::~LoopbackServer() {
  impl_->server.stop();
  impl_->thread.join();
}

std::string LoopbackServer::url() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port);
}

void LoopbackServer::FailNext(int n, int status) {
  std::lock_guard<std::mutex> lock(impl_->mu);
  impl_->fail_remaining = n;
  impl_->fail_status = status;
}

void LoopbackServer::OverrideClassify(std::string body) {
  std::lock_guard<std::mutex> lock(impl_->mu);
  impl_->classify_override = std::move(body);
}

}  // namespace beamattack::testing
