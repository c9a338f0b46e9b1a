// Copyright 2026 The idiomalign Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// HTTP API behind the annotator UI.
//
//   GET  /tasks/next?annotator=ID  200 HumanTask JSON | 204 when done
//   POST /scores                   {task_id, label, score, annotator} -> 201
//   GET  /progress                 {total, completed, scores, annotators}
//
// When a token is configured every request must send it in X-Eval-Token.
// Accepted scores are appended to a CSV log in the import format; the log is
// the only state that survives a restart.

#ifndef IDIOMALIGN_EVAL_SERVER_HPP_
#define IDIOMALIGN_EVAL_SERVER_HPP_

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "idiomalign/error.hpp"
#include "idiomalign/human_eval.hpp"

namespace idiomalign {

inline constexpr const char* kEvalTokenHeader = "X-Eval-Token";

// Append-only score log shared by concurrent annotators; one writer at a time.
class ScoreLog {
 public:
  explicit ScoreLog(std::filesystem::path path) : path_(std::move(path)) {
    if (!std::filesystem::exists(path_)) {
      std::ofstream out(path_, std::ios::binary);
      if (!out) throw ConfigError("cannot create score log " + path_.string());
      out << kScoreCsvHeader << '\n';
    }
  }

  std::vector<HumanScoreRow> read() const {
    std::lock_guard lock(mu_);
    std::ifstream in(path_, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    std::vector<HumanScoreRow> rows;
    for (const auto& rec : detail::read_csv(ss.str())) {
      if (rec.fields.size() != 4 || rec.fields[0] == "task_id") continue;
      const std::string& s = rec.fields[2];
      if (s != "1" && s != "2" && s != "3") continue;
      rows.push_back({rec.fields[0], rec.fields[1], s[0] - '0', rec.fields[3]});
    }
    return rows;
  }

  void append(const HumanScoreRow& row) {
    std::lock_guard lock(mu_);
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    out << format_score_row(row);
    out.flush();
    if (!out) throw ConfigError("cannot append to score log " + path_.string());
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
};

class EvalServer {
 public:
  struct Options {
    std::string token;  // empty: no token check
    std::filesystem::path static_dir;  // optional UI files, served at /
  };

  EvalServer(std::vector<HumanTask> tasks, std::filesystem::path score_log, Options options)
      : tasks_(std::move(tasks)), log_(std::move(score_log)), options_(std::move(options)) {
    for (std::size_t i = 0; i < tasks_.size(); ++i) by_id_[tasks_[i].task_id] = i;
    for (const auto& row : log_.read()) record(row);
    routes();
  }

  // Blocks until stop().
  bool listen(const std::string& host, int port) { return server_.listen(host, port); }

  // Binds an ephemeral port and returns it; call listen_after_bind() next.
  int bind_any(const std::string& host) { return server_.bind_to_any_port(host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }

  void stop() { server_.stop(); }
  bool is_running() const { return server_.is_running(); }
  void wait_until_ready() const { server_.wait_until_ready(); }

  nlohmann::json progress() const {
    std::lock_guard lock(mu_);
    std::size_t completed = 0;
    for (const auto& t : tasks_)
      if (auto it = labels_done_.find(t.task_id); it != labels_done_.end() && it->second.size() == 2)
        ++completed;
    nlohmann::json per_annotator = nlohmann::json::object();
    for (const auto& [annotator, done] : annotator_done_) {
      std::size_t n = 0;
      for (const auto& [task_id, labels] : done)
        if (labels.size() == 2) ++n;
      per_annotator[annotator] = n;
    }
    return {{"total", tasks_.size()},
            {"completed", completed},
            {"scores", scores_},
            {"annotators", per_annotator}};
  }

 private:
  // Returns true when (task, label, annotator) was already scored.
  bool record(const HumanScoreRow& row) {
    auto& labels = annotator_done_[row.annotator][row.task_id];
    const bool duplicate = !labels.insert(row.label).second;
    labels_done_[row.task_id].insert(row.label);
    if (!duplicate) ++scores_;
    return duplicate;
  }

  bool authorized(const httplib::Request& req, httplib::Response& res) const {
    if (options_.token.empty() || req.get_header_value(kEvalTokenHeader) == options_.token)
      return true;
    error(res, 401, "missing or wrong " + std::string(kEvalTokenHeader));
    return false;
  }

  static void error(httplib::Response& res, int status, const std::string& message) {
    res.status = status;
    res.set_content(nlohmann::json{{"error", message}}.dump(), "application/json");
  }

  void routes() {
    server_.Get("/tasks/next", [this](const httplib::Request& req, httplib::Response& res) {
      if (!authorized(req, res)) return;
      const std::string annotator = req.get_param_value("annotator");
      if (annotator.empty()) return error(res, 400, "annotator query parameter is required");
      std::lock_guard lock(mu_);
      const auto done = annotator_done_.find(annotator);
      for (const auto& t : tasks_) {
        if (done != annotator_done_.end()) {
          auto it = done->second.find(t.task_id);
          if (it != done->second.end() && it->second.size() == 2) continue;
        }
        res.status = 200;
        res.set_content(human_task_to_json(t).dump(), "application/json");
        return;
      }
      res.status = 204;
    });

    server_.Post("/scores", [this](const httplib::Request& req, httplib::Response& res) {
      if (!authorized(req, res)) return;
      HumanScoreRow row;
      try {
        const auto j = nlohmann::json::parse(req.body);
        row.task_id = j.at("task_id").get<std::string>();
        row.label = j.at("label").get<std::string>();
        row.score = j.at("score").get<int>();
        row.annotator = j.at("annotator").get<std::string>();
      } catch (const nlohmann::json::exception& ex) {
        return error(res, 400, std::string("bad score body: ") + ex.what());
      }
      if (row.score < 1 || row.score > 3) return error(res, 400, "score must be 1, 2 or 3");
      if (row.label != "A" && row.label != "B") return error(res, 400, "label must be A or B");
      if (text::is_blank(row.annotator)) return error(res, 400, "annotator is required");
      if (!by_id_.contains(row.task_id)) return error(res, 404, "unknown task_id " + row.task_id);
      bool duplicate = false;
      {
        std::lock_guard lock(mu_);
        log_.append(row);
        duplicate = record(row);
      }
      res.status = 201;
      res.set_content(nlohmann::json{{"status", "recorded"}, {"duplicate", duplicate}}.dump(),
                      "application/json");
    });

    server_.Get("/progress", [this](const httplib::Request& req, httplib::Response& res) {
      if (!authorized(req, res)) return;
      res.set_content(progress().dump(), "application/json");
    });

    if (!options_.static_dir.empty()) server_.set_mount_point("/", options_.static_dir.string());
  }

  std::vector<HumanTask> tasks_;
  std::map<std::string, std::size_t> by_id_;
  ScoreLog log_;
  Options options_;
  httplib::Server server_;

  mutable std::mutex mu_;
  // annotator -> task -> labels scored
  std::map<std::string, std::map<std::string, std::set<std::string>>> annotator_done_;
  std::map<std::string, std::set<std::string>> labels_done_;  // by any annotator
  std::size_t scores_ = 0;
};

}  // namespace idiomalign

#endif  // IDIOMALIGN_EVAL_SERVER_HPP_
