#include "irec/cli/app.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <memory>
#include <sstream>
#include <unordered_set>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "irec/bssmf/factor_model.hpp"
#include "irec/bssmf/fit.hpp"
#include "irec/cli/config.hpp"
#include "irec/cli/run_dir.hpp"
#include "irec/common/error.hpp"
#include "irec/common/files.hpp"
#include "irec/data/catalog.hpp"
#include "irec/data/curate.hpp"
#include "irec/data/holdout.hpp"
#include "irec/data/metadata_client.hpp"
#include "irec/data/ratings.hpp"
#include "irec/explain/explain.hpp"
#include "irec/recommend/recommend.hpp"
#include "irec/stats/study.hpp"

namespace irec::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kDataset = "dataset.csv";
constexpr std::string_view kCatalog = "catalog.csv";
constexpr std::string_view kCuratedDataset = "dataset_curated.csv";
constexpr std::string_view kCuratedCatalog = "catalog_curated.csv";
constexpr std::string_view kSplit = "split.json";
constexpr std::string_view kTrain = "train.csv";
constexpr std::string_view kTest = "test.csv";
constexpr std::string_view kSlatesSampled = "slates_sampled";
constexpr std::string_view kSlatesTop = "slates_top";
constexpr std::string_view kProfiles = "profiles.jsonl";
constexpr std::string_view kProfileCache = "profile_cache.json";

std::string model_name(std::size_t r) { return fmt::format("model_r{}.json", r); }
std::string report_name(std::size_t r) { return fmt::format("fit_report_r{}.json", r); }

// Per-invocation state shared by the command bodies.
class Run {
 public:
  Run(std::string command, PipelineConfig config, bool force)
      : config_(std::move(config)), dir_(config_.out, force) {
    manifest_.command = std::move(command);
    manifest_.config_hash = sha256_hex(config_json(config_));
    manifest_.seed = config_.seed;
    manifest_.started = std::chrono::system_clock::now();
  }

  const PipelineConfig& config() const { return config_; }
  RunDir& dir() { return dir_; }

  // Outputs this command is about to write, plus its manifest.
  void claim(std::vector<std::string> names) {
    names.push_back(manifest_name(manifest_.command));
    dir_.claim(names);
  }

  // Path of an artifact from an earlier command; DataError if absent.
  fs::path artifact(std::string_view name, std::string_view producer) {
    const fs::path p = dir_.path(name);
    if (!fs::exists(p)) {
      throw DataError(fmt::format("{} not found; run `{}` first", p.string(), producer));
    }
    record(p, std::string(name));
    return p;
  }

  // An input named by the configuration; ConfigError if absent.
  fs::path input(const fs::path& p, std::string_view key) {
    if (p.empty()) throw ConfigError(fmt::format("paths.{} is not set", key));
    if (!fs::exists(p)) throw ConfigError(fmt::format("paths.{} not found: {}", key, p.string()));
    record(p, p.string());
    return p;
  }

  // Curated artifact when curation ran, otherwise the ingested one.
  fs::path working(std::string_view curated, std::string_view ingested) {
    if (fs::exists(dir_.path(curated))) return artifact(curated, "curate");
    return artifact(ingested, "ingest");
  }

  void finish() {
    manifest_.finished = std::chrono::system_clock::now();
    manifest_.outputs = dir_.written();
    dir_.write(manifest_name(manifest_.command), manifest_json(manifest_));
  }

 private:
  void record(const fs::path& p, std::string key) { manifest_.inputs[std::move(key)] = sha256_file(p); }

  PipelineConfig config_;
  RunDir dir_;
  RunManifest manifest_;
};

data::RatingDataset load_ratings(const fs::path& p) {
  auto parsed = data::parse_ratings(p);
  if (parsed.dropped_duplicates > 0) {
    spdlog::warn("{}: dropped {} duplicate ratings", p.string(), parsed.dropped_duplicates);
  }
  return std::move(parsed.dataset);
}

data::ItemCatalog load_catalog(const fs::path& p) {
  auto parsed = data::parse_catalog(p);
  if (parsed.skipped > 0) spdlog::warn("{}: skipped {} rows without a year", p.string(), parsed.skipped);
  return std::move(parsed.catalog);
}

bssmf::FactorModel load_model(Run& run, std::size_t r) {
  return bssmf::model_from_json(read_file(run.artifact(model_name(r), "train")));
}

std::unique_ptr<explain::ChatClient> make_client(const PipelineConfig& c) {
  if (c.llm_mode.starts_with("stub:")) {
    return std::make_unique<explain::StubChatClient>(c.llm_mode.substr(5));
  }
  return std::make_unique<explain::HttpChatClient>(c.llm);
}

int cmd_ingest(Run& run) {
  const auto& c = run.config();
  run.claim({std::string(kDataset), std::string(kCatalog)});
  data::ItemCatalog catalog = load_catalog(run.input(c.paths.catalog, "catalog"));
  data::RatingDataset ratings = load_ratings(run.input(c.paths.ratings, "ratings"));

  if (!c.paths.survey.empty()) {
    const data::RatingDataset survey = load_ratings(run.input(c.paths.survey, "survey"));
    const UserId offset = c.survey_user_offset > 0
                              ? c.survey_user_offset
                              : (ratings.user_ids().empty() ? 0 : ratings.user_ids().back());
    ratings = data::merge_datasets(ratings, survey, offset, catalog);
    spdlog::info("merged {} survey ratings with user offset {}", survey.size(), offset);
  }

  std::vector<ItemId> known;
  for (const auto& item : catalog.entries()) known.push_back(item.id);
  const std::size_t before = ratings.size();
  ratings = data::restrict_items(ratings, known);
  if (ratings.size() < before) {
    spdlog::warn("dropped {} ratings of items missing from the catalog", before - ratings.size());
  }

  if (c.metadata.enabled) {
    data::MetadataConfig mc;
    mc.endpoint = c.metadata.endpoint;
    mc.language = c.metadata.language;
    mc.max_inflight = c.metadata.max_inflight;
    if (const char* key = std::getenv(c.metadata.api_key_env.c_str())) mc.api_key = key;
    const auto links = data::parse_links(run.input(c.paths.links, "links"));
    auto enriched = data::enrich_metadata(catalog, links, mc);
    spdlog::info("metadata: {} requests, {} unmatched", enriched.requests, enriched.unmatched.size());
    catalog = std::move(enriched.catalog);
  }

  run.dir().write(std::string(kDataset), data::serialize_ratings(ratings));
  run.dir().write(std::string(kCatalog), data::serialize_catalog(catalog));
  spdlog::info("ingested {} ratings from {} users over {} items", ratings.size(),
               ratings.n_users(), ratings.n_items());
  return kExitOk;
}

int cmd_curate(Run& run) {
  run.claim({std::string(kCuratedDataset), std::string(kCuratedCatalog)});
  const auto ratings = load_ratings(run.artifact(kDataset, "ingest"));
  const auto catalog = load_catalog(run.artifact(kCatalog, "ingest"));
  const auto keep = data::curate_catalog(ratings, catalog, run.config().curate);
  const auto curated = data::restrict_items(ratings, keep);
  run.dir().write(std::string(kCuratedDataset), data::serialize_ratings(curated));
  run.dir().write(std::string(kCuratedCatalog),
                  data::serialize_catalog(data::restrict_catalog(catalog, keep)));
  spdlog::info("curated {} items, {} ratings kept", keep.size(), curated.size());
  return kExitOk;
}

int cmd_split(Run& run) {
  run.claim({std::string(kSplit), std::string(kTrain), std::string(kTest)});
  const auto ratings = load_ratings(run.working(kCuratedDataset, kDataset));
  const auto split = data::split_holdout(ratings, run.config().split);
  run.dir().write(std::string(kSplit), data::split_manifest_json(split, run.config().split));
  run.dir().write(std::string(kTrain), data::serialize_ratings(split.train));
  run.dir().write(std::string(kTest),
                  data::serialize_ratings(data::RatingDataset(split.test)));
  spdlog::info("split: {} train, {} test ratings", split.train.size(), split.test.size());
  return kExitOk;
}

int cmd_train(Run& run, const std::vector<std::size_t>& ranks) {
  std::vector<std::string> names;
  for (const std::size_t r : ranks) {
    names.push_back(model_name(r));
    names.push_back(report_name(r));
  }
  run.claim(names);
  const auto train = load_ratings(run.artifact(kTrain, "split"));
  for (const std::size_t r : ranks) {
    bssmf::FitConfig fc = run.config().fit;
    fc.rank = r;
    const auto result = bssmf::fit(train, fc);
    run.dir().write(model_name(r), bssmf::model_to_json(result.model));
    run.dir().write(report_name(r), bssmf::report_to_json(result.report, fc));
    spdlog::info("r={}: {} iterations ({}), train RMSE {:.4f}", r, result.report.iterations,
                 bssmf::to_string(result.report.stop), result.report.train_rmse);
  }
  return kExitOk;
}

int cmd_eval(Run& run, const std::vector<std::size_t>& ranks) {
  run.claim({"rmse.csv"});
  const auto source = load_ratings(run.working(kCuratedDataset, kDataset));
  const auto split = data::split_from_manifest(source, read_file(run.artifact(kSplit, "split")));
  std::string out = "r,train_rmse,test_rmse\n";
  for (const std::size_t r : ranks) {
    const auto model = load_model(run, r);
    std::vector<data::Rating> test;
    for (const auto& t : split.test) {
      if (model.user_index(t.user) && model.item_index(t.item)) test.push_back(t);
    }
    if (test.size() < split.test.size()) {
      spdlog::warn("r={}: {} test ratings reference items absent from training", r,
                   split.test.size() - test.size());
    }
    const double train_rmse = bssmf::rmse(model, split.train.triples());
    const double test_rmse = bssmf::rmse(model, test);
    out += fmt::format("{},{:.6f},{:.6f}\n", r, train_rmse, test_rmse);
    spdlog::info("r={}: train RMSE {:.4f}, test RMSE {:.4f}", r, train_rmse, test_rmse);
  }
  run.dir().write("rmse.csv", out);
  return kExitOk;
}

int cmd_recommend(Run& run, std::size_t rank) {
  const std::string sampled(kSlatesSampled);
  const std::string top(kSlatesTop);
  run.claim({sampled + ".csv", sampled + ".json", top + ".csv", top + ".json", "coverage.json"});
  const auto& c = run.config();
  const auto model = load_model(run, rank);
  const auto ratings = load_ratings(run.working(kCuratedDataset, kDataset));

  std::vector<recommend::Slate> sampled_slates;
  std::vector<recommend::Slate> top_slates;
  for (std::size_t u = 0; u < model.n_users(); ++u) {
    const UserId user = model.user_ids()[u];
    std::unordered_set<ItemId> rated;
    for (const auto& r : ratings.ratings_of(user)) rated.insert(r.item);
    const Eigen::VectorXd scores = bssmf::predict(model, u);
    recommend::CandidatePool pool;
    try {
      pool = recommend::build_pool(user, std::span(scores.data(), static_cast<std::size_t>(scores.size())),
                                   model.item_ids(), rated, c.rec);
    } catch (const recommend::NoUnratedItems&) {
      spdlog::warn("user {} has rated every item; no slate", user);
      continue;
    }
    Rng rng = recommend::user_stream(c.rec.seed, user);
    sampled_slates.push_back(recommend::sample_slate(pool, c.rec, rng));
    top_slates.push_back(recommend::top_slate(pool, c.rec));
  }
  const std::size_t sampled_cov = recommend::coverage(sampled_slates);
  const std::size_t top_cov = recommend::coverage(top_slates);
  run.dir().write(sampled + ".csv", recommend::slates_to_csv(sampled_slates));
  run.dir().write(sampled + ".json", recommend::slates_to_json(sampled_slates));
  run.dir().write(top + ".csv", recommend::slates_to_csv(top_slates));
  run.dir().write(top + ".json", recommend::slates_to_json(top_slates));
  run.dir().write("coverage.json", recommend::coverage_json(sampled_cov, top_cov, model.n_items()));
  spdlog::info("{} slates; coverage sampled {} vs top {} of {} items", sampled_slates.size(),
               sampled_cov, top_cov, model.n_items());
  return kExitOk;
}

int cmd_explain_types(Run& run, std::size_t rank) {
  run.claim({std::string(kProfiles)});
  const auto model = load_model(run, rank);
  const auto catalog = load_catalog(run.working(kCuratedCatalog, kCatalog));
  auto client = make_client(run.config());
  explain::ProfileCache cache(run.dir().path(kProfileCache));
  std::vector<explain::UserTypeProfile> profiles;
  try {
    profiles = explain::interpret_user_types(model, catalog, *client, cache);
  } catch (const explain::PartialResult&) {
    cache.save();
    throw;
  }
  cache.save();
  const std::string hash = explain::model_hash(model);
  std::string out;
  for (const auto& p : profiles) out += explain::profile_record_json(p, hash) + "\n";
  run.dir().write(std::string(kProfiles), out);
  spdlog::info("{} user-type profiles written", profiles.size());
  return kExitOk;
}

std::vector<explain::UserTypeProfile> load_profiles(Run& run, const bssmf::FactorModel& model) {
  const fs::path p = run.dir().path(kProfiles);
  if (!fs::exists(p)) {
    throw explain::MissingProfiles(fmt::format("{} not found; run `explain-types` first", p.string()));
  }
  const std::string text = read_file(run.artifact(kProfiles, "explain-types"));
  const std::string hash = explain::model_hash(model);
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || doc.value("model_hash", std::string()) != hash) {
      throw explain::MissingProfiles("profiles.jsonl was produced for a different model");
    }
  }
  return explain::profiles_from_jsonl(text);
}

int cmd_explain(Run& run, explain::Strategy strategy, std::size_t rank) {
  if (strategy == explain::Strategy::UserTypes) {
    throw ConfigError("use `explain-types` for user-type interpretation");
  }
  const std::string out_name = fmt::format("explanations_{}.jsonl", explain::to_string(strategy));
  run.claim({out_name});
  const auto& c = run.config();
  const auto model = load_model(run, rank);
  const auto catalog = load_catalog(run.working(kCuratedCatalog, kCatalog));
  const auto history = load_ratings(run.working(kCuratedDataset, kDataset));
  const auto slates = recommend::slates_from_csv(
      read_file(run.artifact(std::string(kSlatesSampled) + ".csv", "recommend")));
  std::vector<explain::UserTypeProfile> profiles;
  if (strategy != explain::Strategy::HistoryBased) profiles = load_profiles(run, model);

  // Every job is checked before the first request goes out.
  for (const auto& slate : slates) {
    for (const auto& entry : slate.items) {
      explain::make_job(strategy, slate.user, entry.item, model, catalog, history, profiles);
    }
  }

  auto client = make_client(c);
  const explain::ExplanationContext context{model, catalog, history, profiles};
  std::string out;
  std::size_t ok = 0;
  std::size_t total = 0;
  for (const auto& slate : slates) {
    const auto outcomes = explain::explain_slate(slate, strategy, context, *client,
                                                 c.llm.max_inflight, c.llm.keep_translation);
    for (const auto& o : outcomes) {
      ++total;
      if (o.ok()) {
        ++ok;
      } else {
        spdlog::error("user {} item {}: {}", slate.user, o.item, o.error);
      }
      out += explain::explanation_record_json(slate.user, o, strategy, client->model_id()) + "\n";
    }
  }
  run.dir().write(out_name, out);
  spdlog::info("{} of {} explanations succeeded", ok, total);
  if (total > 0 && ok == 0) {
    run.finish();
    spdlog::error("every explanation request failed");
    return kExitTransport;
  }
  return kExitOk;
}

int cmd_analyze(Run& run) {
  run.claim({"table2.csv", "table3.csv", "effects.csv", "summary.csv", "levene.csv"});
  const auto table = stats::parse_responses(run.input(run.config().paths.responses, "responses"));
  const auto report = stats::analyze_study(table, run.config().alpha);
  run.dir().write("table2.csv", stats::table2_csv(report));
  run.dir().write("table3.csv", stats::table3_csv(report));
  run.dir().write("effects.csv", stats::effects_csv(report));
  run.dir().write("summary.csv", stats::summary_csv(report));
  run.dir().write("levene.csv", stats::levene_csv(report));
  const auto flagged = std::count_if(report.questions.begin(), report.questions.end(),
                                     [](const auto& q) { return q.significant; });
  spdlog::info("{} of {} questions differ between groups at alpha={}", flagged,
               report.questions.size(), report.alpha);
  return kExitOk;
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) return kExitConfig;
  if (dynamic_cast<const DataError*>(&e) != nullptr) return kExitData;
  if (dynamic_cast<const TransportError*>(&e) != nullptr) return kExitTransport;
  if (dynamic_cast<const std::invalid_argument*>(&e) != nullptr) return kExitConfig;
  return kExitInternal;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Interpretable movie recommender: factorization, slates, LLM explanations, survey analysis"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool force = false;
  std::string llm_mode;
  std::string log_level = "info";
  app.add_option("--config", config_file, "TOML configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "seed for every randomized stage");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--force", force, "overwrite existing outputs");
  app.add_option("--llm", llm_mode, "LLM transport: http or stub:<fixture dir>");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  std::string ratings, catalog, links, survey, responses;
  auto* ingest = app.add_subcommand("ingest", "load ratings and catalog, merge survey ratings, fetch metadata");
  ingest->add_option("--ratings", ratings, "ratings CSV");
  ingest->add_option("--catalog", catalog, "movies CSV");
  ingest->add_option("--links", links, "links CSV for metadata lookup");
  ingest->add_option("--survey", survey, "survey ratings CSV to merge");

  std::optional<std::size_t> curate_size;
  auto* curate = app.add_subcommand("curate", "keep the most-rated recent items");
  curate->add_option("--size", curate_size, "number of items to keep");

  auto* split = app.add_subcommand("split", "per-user holdout split");

  std::vector<std::size_t> ranks;
  auto* train = app.add_subcommand("train", "fit one model per rank");
  train->add_option("--rank", ranks, "rank(s) to fit, overriding fit.ranks");
  auto* eval = app.add_subcommand("eval", "train and test RMSE per model");
  eval->add_option("--rank", ranks, "rank(s) to evaluate, overriding fit.ranks");

  std::optional<std::size_t> rank;
  auto* rec = app.add_subcommand("recommend", "sampled and top slates with coverage");
  rec->add_option("--rank", rank, "model rank to use, overriding rec.rank");
  auto* types = app.add_subcommand("explain-types", "describe every latent user type");
  types->add_option("--rank", rank, "model rank to use, overriding rec.rank");

  std::string strategy_name;
  auto* expl = app.add_subcommand("explain", "explain the sampled slates");
  expl->add_option("--strategy", strategy_name, "model, history or combined")->required();
  expl->add_option("--rank", rank, "model rank to use, overriding rec.rank");

  std::optional<double> alpha;
  auto* analyze = app.add_subcommand("analyze", "between-group tests on questionnaire answers");
  analyze->add_option("--responses", responses, "responses CSV");
  analyze->add_option("--alpha", alpha, "significance level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    spdlog::set_level(spdlog::level::from_str(log_level));
    PipelineConfig config = config_file.empty()
                                ? parse_config_text("", fs::current_path())
                                : load_config(config_file);
    if (seed) {
      config.seed = *seed;
      config.propagate_seed();
    }
    if (!out_dir.empty()) config.out = out_dir;
    if (!llm_mode.empty()) config.llm_mode = llm_mode;
    if (!ratings.empty()) config.paths.ratings = ratings;
    if (!catalog.empty()) config.paths.catalog = catalog;
    if (!links.empty()) config.paths.links = links;
    if (!survey.empty()) config.paths.survey = survey;
    if (!responses.empty()) config.paths.responses = responses;
    if (curate_size) config.curate.size = *curate_size;
    if (alpha) config.alpha = *alpha;
    if (!ranks.empty()) config.ranks = ranks;
    if (rank) config.rec_rank = *rank;
    config.validate();

    CLI::App* chosen = app.get_subcommands().front();
    const std::string command = chosen->get_name();
    const auto strategy = command == "explain" ? explain::parse_strategy(strategy_name)
                                               : explain::Strategy::UserTypes;
    // Each explanation strategy keeps its own manifest.
    const std::string label = command == "explain"
                                  ? fmt::format("explain-{}", explain::to_string(strategy))
                                  : command;
    Run run(label, std::move(config), force);
    const std::size_t r = run.config().rec_rank;
    int rc = kExitOk;
    if (chosen == ingest) rc = cmd_ingest(run);
    else if (chosen == curate) rc = cmd_curate(run);
    else if (chosen == split) rc = cmd_split(run);
    else if (chosen == train) rc = cmd_train(run, run.config().ranks);
    else if (chosen == eval) rc = cmd_eval(run, run.config().ranks);
    else if (chosen == rec) rc = cmd_recommend(run, r);
    else if (chosen == types) rc = cmd_explain_types(run, r);
    else if (chosen == expl) rc = cmd_explain(run, strategy, r);
    else if (chosen == analyze) rc = cmd_analyze(run);
    if (rc == kExitOk) run.finish();
    return rc;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return exit_code(e);
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace irec::cli
