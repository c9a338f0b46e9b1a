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

// idiomalign command-line tool.
//
// Exit status: 0 success, 1 error (nothing or partial output), 2 batch
// finished with per-item failures (see the errors file), 105+ usage errors
// from the argument parser.

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "idiomalign/embedding.hpp"
#include "idiomalign/error.hpp"
#include "idiomalign/eval_server.hpp"
#include "idiomalign/evaluation.hpp"
#include "idiomalign/http_providers.hpp"
#include "idiomalign/human_eval.hpp"
#include "idiomalign/knowledge_base.hpp"
#include "idiomalign/llm_client.hpp"
#include "idiomalign/manifest.hpp"
#include "idiomalign/pipeline.hpp"
#include "idiomalign/report.hpp"
#include "idiomalign/results.hpp"
#include "idiomalign/retrieval.hpp"
#include "idiomalign/sampling.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace idiomalign::cli {
namespace {

constexpr int kExitPartial = 2;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ConfigError("cannot write " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

template <typename T, typename F>
std::string to_jsonl(const std::vector<T>& items, F&& to_json) {
  std::string out;
  for (const auto& item : items) out += to_json(item).dump() + "\n";
  return out;
}

// Every run records what it was asked to do. Timestamps are the only fields
// that differ between identical runs.
class RunManifest {
 public:
  RunManifest(std::string command, const CLI::App& sub)
      : started_(utc_now_iso()),
        body_{{"tool", "idiomalign"}, {"version", kVersion}, {"command", std::move(command)}} {
    json options = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
      if (opt->get_name() == "--help" || opt->get_name() == "--config") continue;
      if (opt->count() == 0 && opt->get_default_str().empty()) continue;
      const auto results = opt->count() ? opt->results() : std::vector<std::string>{opt->get_default_str()};
      const auto name = opt->get_name(false, true);
      if (opt->get_expected_max() > 1 || results.size() > 1)
        options[name] = results;
      else
        options[name] = results.front();
    }
    body_["options"] = options;
    body_["config_digest"] = json_digest(options);
  }

  json& operator[](const char* key) { return body_[key]; }

  void write(const fs::path& path) {
    body_["started_at"] = started_;
    body_["finished_at"] = utc_now_iso();
    write_json(path, body_);
  }

 private:
  std::string started_;
  json body_;
};

// ---------------------------------------------------------------------------
// Provider options shared by several subcommands

struct LlmOptions {
  std::string provider = "mock";
  std::string mock_script;
  std::string model;
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = "OPENAI_API_KEY";
  int timeout_s = 60;

  void add_to(CLI::App* app, const std::string& role) {
    app->add_option("--llm", provider, "LLM provider for the " + role + ": mock or openai")
        ->check(CLI::IsMember({"mock", "openai"}))
        ->capture_default_str();
    app->add_option("--mock-script", mock_script, "Scripted responses (JSON) for --llm mock")
        ->check(CLI::ExistingFile);
    app->add_option("--model", model, "Model name (default: 'mock' or 'gpt-4o')");
    app->add_option("--base-url", base_url, "OpenAI-compatible API base URL")->capture_default_str();
    app->add_option("--api-key-env", api_key_env, "Environment variable holding the API key")
        ->capture_default_str();
    app->add_option("--timeout", timeout_s, "HTTP timeout in seconds")->capture_default_str();
  }

  std::unique_ptr<LlmClient> make() const {
    if (provider == "mock") {
      auto client = std::make_unique<ScriptedLlmClient>(model.empty() ? "mock" : model);
      if (!mock_script.empty()) {
        try {
          client->load_script(json::parse(read_file(mock_script)));
        } catch (const json::exception& ex) {
          throw ParseError("mock script " + mock_script + ": " + ex.what());
        }
      }
      return client;
    }
    return std::make_unique<OpenAiChatClient>(ChatClientConfig{
        base_url, model.empty() ? "gpt-4o" : model, api_key_env, std::chrono::seconds(timeout_s)});
  }
};

struct EmbedderOptions {
  std::string provider = "test";
  std::size_t dim = 0;  // 0: index dim, else provider default (test: 64)
  std::string endpoint;
  std::string model = "paraphrase-MiniLM-L6-v2";
  std::string api_key_env = "IDIOMALIGN_EMBEDDING_API_KEY";

  void add_to(CLI::App* app) {
    app->add_option("--embedder", provider, "Embedding provider: test or remote")
        ->check(CLI::IsMember({"test", "remote"}))
        ->capture_default_str();
    app->add_option("--dim", dim, "Embedding dimension");
    app->add_option("--embedding-endpoint", endpoint, "URL of the remote embedding route");
    app->add_option("--embedding-model", model, "Remote embedding model")->capture_default_str();
    app->add_option("--embedding-key-env", api_key_env,
                    "Environment variable holding the embedding API key")
        ->capture_default_str();
  }

  // `known_dim` is the dimension of an existing index, 0 when building one.
  std::unique_ptr<EmbeddingProvider> make(std::size_t known_dim) const {
    const std::size_t d = dim ? dim : known_dim;
    if (provider == "test") return std::make_unique<TestEmbedder>(d ? d : 64);
    if (endpoint.empty()) throw ConfigError("--embedder remote needs --embedding-endpoint");
    HttpEmbeddingConfig config;
    config.endpoint = endpoint;
    config.model = model;
    if (d) config.dim = d;
    config.api_key_env = api_key_env;
    return std::make_unique<HttpEmbeddingProvider>(config);
  }
};

struct PipelineOptions {
  double threshold = 0.7;
  std::size_t k = 4;
  double temperature = 0.7;
  double judge_temperature = 0.1;
  int max_retries = 3;
  int backoff_ms = 500;
  std::size_t jobs = 1;

  void add_to(CLI::App* app, bool translating) {
    if (translating) {
      app->add_option("--threshold", threshold, "Cosine threshold for SIA candidates")
          ->capture_default_str();
      app->add_option("-k,--top-k", k, "Maximum SIA candidates")->capture_default_str();
      app->add_option("--temperature", temperature, "Translation temperature")->capture_default_str();
    } else {
      app->add_option("--judge-temperature", judge_temperature, "Judge temperature")
          ->capture_default_str();
    }
    app->add_option("--max-retries", max_retries, "Transport retries per LLM call")->capture_default_str();
    app->add_option("--retry-backoff-ms", backoff_ms, "Base retry backoff")->capture_default_str();
    app->add_option("-j,--jobs", jobs, "Concurrent tasks")->capture_default_str();
  }

  PipelineConfig config() const {
    PipelineConfig c;
    c.retrieval = {threshold, k};
    c.translation_temperature = temperature;
    c.judge_temperature = judge_temperature;
    c.max_llm_retries = max_retries;
    c.retry_backoff = std::chrono::milliseconds(backoff_ms);
    c.parallelism = jobs;
    c.validate();
    return c;
  }
};

// ---------------------------------------------------------------------------
// ingest

struct IngestOptions {
  std::vector<std::string> sources;
  bool csv_header = false;
  std::string out_dir = "out";
};

struct SourceSpec {
  RecordFormat format;
  std::string language;
  fs::path path;
};

SourceSpec parse_source(const std::string& spec) {
  const auto a = spec.find(':');
  const auto b = a == std::string::npos ? a : spec.find(':', a + 1);
  if (b == std::string::npos) throw InputError("--source must be FORMAT:LANG:PATH, got '" + spec + "'");
  SourceSpec s{parse_record_format(spec.substr(0, a)), spec.substr(a + 1, b - a - 1), spec.substr(b + 1)};
  language_info(s.language);
  return s;
}

std::vector<fs::path> source_files(const SourceSpec& s) {
  if (!fs::is_directory(s.path)) {
    if (!fs::exists(s.path)) throw InputError("source " + s.path.string() + " does not exist");
    return {s.path};
  }
  const std::string ext = s.format == RecordFormat::kIdiomKbCsv ? ".csv" : ".jsonl";
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(s.path))
    if (e.is_regular_file() && e.path().extension() == ext) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

int run_ingest(const IngestOptions& o, RunManifest manifest) {
  std::vector<IdiomEntry> all;
  json parse_reports = json::array();
  for (const auto& spec : o.sources) {
    const SourceSpec s = parse_source(spec);
    for (const auto& file : source_files(s)) {
      ParseOptions popts;
      popts.csv_header = o.csv_header;
      auto parsed = parse_idiom_records(read_file(file), s.format, s.language, popts);
      json errors = json::array();
      for (const auto& e : parsed.report.errors) errors.push_back({{"line", e.line}, {"message", e.message}});
      parse_reports.push_back({{"file", file.generic_string()},
                               {"language", s.language},
                               {"records_seen", parsed.report.records_seen},
                               {"accepted", parsed.entries.size()},
                               {"errors", errors}});
      for (auto& e : parsed.entries) all.push_back(std::move(e));
    }
  }
  const std::size_t input_count = all.size();
  const KnowledgeBase kb = build_knowledge_base(std::move(all));
  if (kb.size() == 0) throw InputError("no idiom entries found in the given sources; no KB written");

  const fs::path dir = o.out_dir;
  write_file(dir / "kb.jsonl", serialize_jsonl(kb.entries()));
  json dedup = kb.dedup_report().counts();
  write_json(dir / "dedup_report.json", {{"input_count", input_count},
                                         {"stored_count", kb.size()},
                                         {"dropped", dedup}});
  write_json(dir / "parse_report.json", parse_reports);
  manifest["entry_count"] = kb.size();
  manifest.write(dir / "manifest_ingest.json");
  std::cout << "ingested " << kb.size() << " entries (" << kb.dedup_report().total()
            << " dropped) into " << (dir / "kb.jsonl").generic_string() << "\n";
  return 0;
}

KnowledgeBase load_kb(const fs::path& path) {
  const auto parsed = parse_idiom_records(read_file(path), RecordFormat::kIdiomJsonl, "en");
  if (!parsed.report.errors.empty())
    throw ParseError("knowledge base " + path.string() + " line " +
                     std::to_string(parsed.report.errors.front().line) + ": " +
                     parsed.report.errors.front().message);
  return build_knowledge_base(parsed.entries);
}

// ---------------------------------------------------------------------------
// index

struct IndexOptions {
  std::string kb;
  std::string target;
  std::string out;
  EmbedderOptions embedder;
};

int run_index(const IndexOptions& o, RunManifest manifest) {
  const auto kb = load_kb(o.kb);
  const auto embedder = o.embedder.make(0);
  const auto index = build_meaning_index(kb, o.target, *embedder);
  write_json(o.out, index_to_json(index));
  manifest["embedding_provider"] = embedder->name();
  manifest["item_count"] = index.items.size();
  manifest["excluded"] = index.excluded;
  manifest.write(fs::path(o.out).replace_extension(".manifest.json"));
  std::cout << "indexed " << index.items.size() << " " << o.target << " meanings with "
            << embedder->name() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// translate

struct TranslateOptions {
  std::string kb;
  std::string index;
  std::string tasks;
  std::vector<std::string> methods;
  std::string direction;
  std::size_t sample = 0;
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  LlmOptions llm;
  EmbedderOptions embedder;
  PipelineOptions pipeline;
};

// One task per example sentence of each source-language entry, ids
// "<entry id>#<n>" with n counting from 1, in canonical order.
std::vector<TranslationTask> tasks_from_kb(const KnowledgeBase& kb, const Direction& d) {
  std::vector<const IdiomEntry*> entries = kb.in_language(d.source);
  std::stable_sort(entries.begin(), entries.end(), [](const IdiomEntry* a, const IdiomEntry* b) {
    if (a->id != b->id) return entry_id_less(a->id, b->id);
    return a->idiom < b->idiom;
  });
  std::vector<TranslationTask> tasks;
  for (const IdiomEntry* e : entries)
    for (std::size_t n = 0; n < e->sentences.size(); ++n)
      tasks.push_back({e->id + "#" + std::to_string(n + 1), e->sentences[n], d.source, d.target,
                       e->idiom, e->meaning_en});
  return tasks;
}

int run_translate(const TranslateOptions& o, RunManifest manifest) {
  const Direction dir = Direction::parse(o.direction);
  std::vector<TranslationTask> tasks;
  if (!o.tasks.empty()) {
    tasks = parse_tasks_jsonl(read_file(o.tasks));
    std::stable_sort(tasks.begin(), tasks.end(),
                     [](const auto& a, const auto& b) { return entry_id_less(a.id, b.id); });
    for (const auto& t : tasks)
      if (!(t.direction() == dir))
        throw InputError("task " + t.id + " is " + t.direction().str() + ", expected " + dir.str());
  } else {
    if (o.kb.empty()) throw InputError("translate needs --kb or --tasks");
    tasks = tasks_from_kb(load_kb(o.kb), dir);
  }
  if (tasks.empty()) throw InputError("no " + dir.source + " sentences to translate");
  if (o.sample) {
    if (o.sample > tasks.size())
      throw InputError("--sample " + std::to_string(o.sample) + " exceeds the " +
                       std::to_string(tasks.size()) + " available tasks");
    std::vector<TranslationTask> picked;
    for (auto i : sample_indices(tasks.size(), o.sample, o.seed)) picked.push_back(tasks[i]);
    tasks = std::move(picked);
  }

  const fs::path out = o.out_dir;
  write_file(out / "tasks.jsonl", to_jsonl(tasks, task_to_json));

  BatchDependencies deps;
  deps.config = o.pipeline.config();
  const auto llm = o.llm.make();
  deps.llm = llm.get();
  std::optional<MeaningIndex> index;
  std::unique_ptr<EmbeddingProvider> embedder;

  std::vector<Method> methods;
  for (const auto& m : o.methods) methods.push_back(parse_method(m));
  int status = 0;
  json per_method = json::object();
  for (Method m : methods) {
    if (m == Method::kSia && !index) {
      if (o.index.empty()) throw InputError("--method sia needs --index");
      const auto j = json::parse(read_file(o.index));
      // Without --dim the embedder takes its dimension from the index.
      embedder = o.embedder.make(j.at("dim").get<std::size_t>());
      index = index_from_json(j, embedder->name());
      if (index->target_language != dir.target)
        throw InputError("index is for '" + index->target_language + "', direction targets '" +
                         dir.target + "'");
      deps.index = &*index;
      deps.embedder = embedder.get();
    }
    const std::string name(to_string(m));
    BatchOutput batch;
    try {
      batch = run_batch(tasks, m, deps);
    } catch (const BatchError& ex) {
      batch = ex.output();
    }
    write_file(out / ("results_" + name + ".jsonl"), to_jsonl(batch.results, result_to_json));
    const fs::path errors_path = out / ("errors_" + name + ".jsonl");
    if (!batch.failures.empty()) {
      std::string lines;
      for (const auto& f : batch.failures)
        lines += json{{"task_id", f.task_id}, {"message", f.message}, {"attempts", f.attempts},
                      {"partial", f.partial ? result_to_json(*f.partial) : json(nullptr)}}
                     .dump() +
                 "\n";
      write_file(errors_path, lines);
      // Every task failing is an error, not a partial result.
      if (status == 0) status = kExitPartial;
      if (batch.results.empty()) status = 1;
      std::cerr << name << ": " << batch.failures.size() << " of " << tasks.size()
                << " tasks failed; see " << errors_path.generic_string() << "\n";
    } else if (fs::exists(errors_path)) {
      fs::remove(errors_path);
    }
    const auto stats = match_statistics(batch.results);
    batch.manifest.erase("started_at");
    batch.manifest.erase("finished_at");
    batch.manifest["match_statistics"] = {{"matched", stats.matched}, {"unmatched", stats.unmatched}};
    per_method[name] = batch.manifest;
    std::cout << name << ": " << batch.results.size() << " results";
    if (m == Method::kSia) std::cout << " (matched " << stats.matched << ", unmatched " << stats.unmatched << ")";
    std::cout << "\n";
  }
  manifest["seed"] = o.seed;
  manifest["sample"] = o.sample;
  manifest["task_count"] = tasks.size();
  manifest["methods"] = per_method;
  manifest.write(out / "manifest_translate.json");
  return status;
}

// ---------------------------------------------------------------------------
// judge

struct JudgeOptions {
  std::vector<std::string> results;
  std::string out;
  LlmOptions llm;
  PipelineOptions pipeline;
};

std::vector<TranslationResult> load_results(const std::vector<std::string>& files) {
  std::vector<TranslationResult> all;
  for (const auto& f : files)
    for (auto& r : parse_results_jsonl(read_file(f))) all.push_back(std::move(r));
  return all;
}

int run_judge(const JudgeOptions& o, RunManifest manifest) {
  const auto results = load_results(o.results);
  const auto llm = o.llm.make();
  const auto batch = judge_batch(results, *llm, o.pipeline.config());
  write_file(o.out, to_jsonl(batch.records, score_to_json));
  const fs::path errors_path = fs::path(o.out).replace_extension(".errors.jsonl");
  int status = 0;
  if (!batch.failures.empty()) {
    std::string lines;
    for (const auto& f : batch.failures)
      lines += json{{"result_ref", f.result_ref}, {"message", f.message}, {"responses", f.responses}}.dump() + "\n";
    write_file(errors_path, lines);
    std::cerr << batch.failures.size() << " of " << results.size() << " results could not be scored; see "
              << errors_path.generic_string() << "\n";
    status = batch.records.empty() ? 1 : kExitPartial;
  }
  manifest["judge_model"] = llm->model_name();
  manifest["score_count"] = batch.records.size();
  manifest["failure_count"] = batch.failures.size();
  manifest.write(fs::path(o.out).replace_extension(".manifest.json"));
  std::cout << "scored " << batch.records.size() << " of " << results.size() << " results\n";
  return status;
}

// ---------------------------------------------------------------------------
// export-human / import-human

struct ExportOptions {
  std::string results_a;
  std::string results_b;
  std::uint64_t seed = 42;
  std::string out_tasks;
  std::string out_blind_map;
};

int run_export(const ExportOptions& o, RunManifest manifest) {
  if (fs::absolute(o.out_tasks) == fs::absolute(o.out_blind_map))
    throw InputError("tasks and blind map must be written to different files");
  const auto exported = export_human_tasks(load_results({o.results_a}), load_results({o.results_b}), o.seed);
  write_json(o.out_tasks, human_tasks_to_json(exported.tasks));
  write_json(o.out_blind_map, blind_map_to_json(exported.blind_map, o.seed));
  manifest["task_count"] = exported.tasks.size();
  manifest.write(fs::path(o.out_blind_map).replace_extension(".manifest.json"));
  std::cout << "exported " << exported.tasks.size() << " blind tasks\n";
  return 0;
}

struct ImportOptions {
  std::string scores;
  std::string blind_map;
  std::string out;
};

int run_import(const ImportOptions& o, RunManifest manifest) {
  const auto map = blind_map_from_json(json::parse(read_file(o.blind_map)));
  const auto imported = import_human_scores(read_file(o.scores), map);
  write_file(o.out, to_jsonl(imported.records, score_to_json));
  int status = 0;
  if (!imported.errors.empty()) {
    std::string lines;
    for (const auto& e : imported.errors) lines += json{{"line", e.line}, {"message", e.message}}.dump() + "\n";
    const fs::path errors_path = fs::path(o.out).replace_extension(".errors.jsonl");
    write_file(errors_path, lines);
    std::cerr << imported.errors.size() << " rows rejected; see " << errors_path.generic_string() << "\n";
    status = kExitPartial;
  }
  manifest["record_count"] = imported.records.size();
  manifest["annotator_count"] = imported.annotator_ids.size();
  manifest.write(fs::path(o.out).replace_extension(".manifest.json"));
  std::cout << "imported " << imported.records.size() << " human scores\n";
  return status;
}

// ---------------------------------------------------------------------------
// serve-eval

struct ServeOptions {
  std::string tasks;
  std::string score_log = "human_scores.csv";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string token;
  std::string static_dir;
};

EvalServer* g_server = nullptr;

int run_serve(const ServeOptions& o, RunManifest manifest) {
  auto tasks = human_tasks_from_json(json::parse(read_file(o.tasks)));
  EvalServer server(std::move(tasks), o.score_log, {o.token, o.static_dir});
  manifest["task_count"] = server.progress()["total"];
  manifest.write(fs::path(o.score_log).replace_extension(".manifest.json"));
  g_server = &server;
  std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
  std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
  int port = o.port;
  if (port == 0) port = server.bind_any(o.host);
  std::cout << "serving " << o.tasks << " on http://" << o.host << ":" << port << std::endl;
  const bool ok = o.port == 0 ? server.listen_after_bind() : server.listen(o.host, port);
  g_server = nullptr;
  if (!ok && o.port != 0) throw ConfigError("cannot listen on " + o.host + ":" + std::to_string(port));
  return 0;
}

// ---------------------------------------------------------------------------
// report

struct ReportOptions {
  std::vector<std::string> results;
  std::vector<std::string> scores;
  std::string out;
};

int run_report(const ReportOptions& o, RunManifest manifest) {
  const auto results = load_results(o.results);
  std::vector<ScoreRecord> scores;
  for (const auto& f : o.scores)
    for (auto& s : parse_scores_jsonl(read_file(f))) scores.push_back(std::move(s));
  const std::string md = render_report(results, scores);
  if (o.out.empty()) {
    std::cout << md;
    return 0;
  }
  write_file(o.out, md);
  manifest["result_count"] = results.size();
  manifest["score_count"] = scores.size();
  manifest.write(fs::path(o.out).replace_extension(".manifest.json"));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Idiom-aware translation and evaluation toolkit", "idiomalign"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "TOML config file; subcommand options go in [subcommand] tables");
  app.require_subcommand(1);

  IngestOptions ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse idiom datasets into a knowledge base");
  ingest_cmd->add_option("--source", ingest.sources, "FORMAT:LANG:PATH (FORMAT idiomkb_csv or idiom_jsonl; PATH file or directory)")
      ->required();
  ingest_cmd->add_flag("--header", ingest.csv_header, "CSV files start with a header row");
  ingest_cmd->add_option("--out-dir", ingest.out_dir, "Output directory")->capture_default_str();

  IndexOptions index;
  auto* index_cmd = app.add_subcommand("index", "Embed target-language meanings");
  index_cmd->add_option("--kb", index.kb, "Knowledge base (kb.jsonl)")->required()->check(CLI::ExistingFile);
  index_cmd->add_option("--target", index.target, "Target language code")->required();
  index_cmd->add_option("--out", index.out, "Index file to write")->required();
  index.embedder.add_to(index_cmd);

  TranslateOptions translate;
  auto* translate_cmd = app.add_subcommand("translate", "Translate sentences with SIA, LIA or direct prompting");
  translate_cmd->add_option("--kb", translate.kb, "Knowledge base supplying sentences")->check(CLI::ExistingFile);
  translate_cmd->add_option("--tasks", translate.tasks, "Task file (JSONL) instead of KB sentences")
      ->check(CLI::ExistingFile);
  translate_cmd->add_option("--index", translate.index, "Meaning index (required for sia)")
      ->check(CLI::ExistingFile);
  translate_cmd->add_option("--method", translate.methods, "sia, lia or direct (repeatable)")
      ->required()
      ->check(CLI::IsMember({"sia", "lia", "direct"}));
  translate_cmd->add_option("--direction", translate.direction, "Language pair, e.g. en-zh")->required();
  translate_cmd->add_option("--sample", translate.sample, "Translate a seeded random subset of this size");
  translate_cmd->add_option("--seed", translate.seed, "Sampling seed")->capture_default_str();
  translate_cmd->add_option("--out-dir", translate.out_dir, "Output directory")->capture_default_str();
  translate.llm.add_to(translate_cmd, "translator");
  translate.embedder.add_to(translate_cmd);
  translate.pipeline.add_to(translate_cmd, true);

  JudgeOptions judge;
  auto* judge_cmd = app.add_subcommand("judge", "Score translations with an LLM judge");
  judge_cmd->add_option("--results", judge.results, "Results files (JSONL)")->required()->check(CLI::ExistingFile);
  judge_cmd->add_option("--out", judge.out, "Scores file to write (JSONL)")->required();
  judge.llm.add_to(judge_cmd, "judge");
  judge.pipeline.add_to(judge_cmd, false);

  ExportOptions exp;
  auto* export_cmd = app.add_subcommand("export-human", "Build blind A/B tasks for human evaluators");
  export_cmd->add_option("--results-a", exp.results_a, "Results of the first translator")->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--results-b", exp.results_b, "Results of the second translator")->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--seed", exp.seed, "Blinding seed")->capture_default_str();
  export_cmd->add_option("--out-tasks", exp.out_tasks, "Task payloads for annotators (JSON)")->required();
  export_cmd->add_option("--out-blind-map", exp.out_blind_map, "Sealed label-to-model map (JSON)")->required();

  ImportOptions imp;
  auto* import_cmd = app.add_subcommand("import-human", "Resolve human A/B scores to score records");
  import_cmd->add_option("--scores", imp.scores, "CSV task_id,label,score,annotator")->required()->check(CLI::ExistingFile);
  import_cmd->add_option("--blind-map", imp.blind_map, "Blind map from export-human")->required()->check(CLI::ExistingFile);
  import_cmd->add_option("--out", imp.out, "Scores file to write (JSONL)")->required();

  ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve-eval", "Serve the human-evaluation HTTP API");
  serve_cmd->add_option("--tasks", serve.tasks, "Task payloads from export-human")->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--score-log", serve.score_log, "Append-only score CSV")->capture_default_str();
  serve_cmd->add_option("--host", serve.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "Port (0 picks a free one)")->capture_default_str();
  serve_cmd->add_option("--token", serve.token, "Shared token required in X-Eval-Token")
      ->envname("IDIOMALIGN_EVAL_TOKEN");
  serve_cmd->add_option("--static-dir", serve.static_dir, "Annotator UI files to serve at /")
      ->check(CLI::ExistingDirectory);

  ReportOptions report;
  auto* report_cmd = app.add_subcommand("report", "Render Markdown score tables");
  report_cmd->add_option("--results", report.results, "Results files (JSONL)")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--scores", report.scores, "Score files (JSONL)")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--out", report.out, "Markdown file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*ingest_cmd) return run_ingest(ingest, RunManifest("ingest", *ingest_cmd));
    if (*index_cmd) return run_index(index, RunManifest("index", *index_cmd));
    if (*translate_cmd) return run_translate(translate, RunManifest("translate", *translate_cmd));
    if (*judge_cmd) return run_judge(judge, RunManifest("judge", *judge_cmd));
    if (*export_cmd) return run_export(exp, RunManifest("export-human", *export_cmd));
    if (*import_cmd) return run_import(imp, RunManifest("import-human", *import_cmd));
    if (*serve_cmd) return run_serve(serve, RunManifest("serve-eval", *serve_cmd));
    if (*report_cmd) return run_report(report, RunManifest("report", *report_cmd));
  } catch (const json::exception& ex) {
    std::cerr << "error: malformed JSON: " << ex.what() << "\n";
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace idiomalign::cli

int main(int argc, char** argv) { return idiomalign::cli::main(argc, argv); }
