#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcw/config.hpp"
#include "mcw/corrections.hpp"
#include "mcw/coverage.hpp"
#include "mcw/expansion.hpp"
#include "mcw/manifest.hpp"
#include "mcw/relatedness.hpp"
#include "mcw/review.hpp"
#include "mcw/screening.hpp"
#include "mcw/service.hpp"
#include "mcw/similarity.hpp"
#include "mcw/wsd.hpp"

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string wordnet;
  std::string lexicon;
  std::string embeddings;
  std::string config;
  std::string out;
  std::string manifest;
};

struct Options {
  Common common;
  std::vector<std::string> lexicons;  // build: extra lexicons to merge
  std::vector<std::string> dicts;
  std::string map;
  std::string label;
  std::string queue;
  std::string edits;
  std::string standard;
  std::string stoplist;
  std::string gloss_stoplist;
  std::string pairs;
  std::string instances;
  std::string semeval;
  std::string key;
  std::string inventory;
  std::string screening;
  std::string ui;
  std::string listen;
  bool english = false;
  bool baseline = false;
  bool json = false;
};

class Run {
 public:
  Run(std::string command, const Options& opt) : opt_(opt) {
    manifest_.command = std::move(command);
    manifest_.started = mcw::utc_timestamp();
    if (!opt.common.config.empty()) manifest_.add_input("config", opt.common.config);
    config_ = opt.common.config.empty() ? mcw::Config{} : mcw::load_config(opt.common.config);
    manifest_.config = config_.snapshot();
  }

  const mcw::Config& config() const { return config_; }
  mcw::RunManifest& manifest() { return manifest_; }

  std::string require(const std::string& value, const char* flag) {
    if (value.empty()) throw CLI::RequiredError(flag);
    return value;
  }

  mcw::WordnetDb wordnet() {
    auto dir = require(opt_.common.wordnet, "--wordnet");
    manifest_.add_input("wordnet", dir);
    return mcw::load_db(dir);
  }

  mcw::BilingualLexicon lexicon() {
    auto path = require(opt_.common.lexicon, "--lexicon");
    manifest_.add_input("lexicon", path);
    return mcw::load_lexicon(path);
  }

  mcw::EmbeddingTable embeddings() {
    auto path = require(opt_.common.embeddings, "--embeddings");
    manifest_.add_input("embeddings", path);
    return mcw::load_embeddings(path);
  }

  std::string input(const std::string& role, const std::string& path, const char* flag) {
    require(path, flag);
    manifest_.add_input(role, path);
    return path;
  }

  /// Writes `content` to `path` (stdout when empty) and records its digest.
  void output(const std::string& path, const std::string& content, const std::string& name = "stdout") {
    if (path.empty()) {
      std::cout << content;
      manifest_.add_output_content(name, content);
      return;
    }
    mcw::io::write_file_atomic(path, content);
    manifest_.add_output(path);
  }

  void finish() {
    manifest_.finished = mcw::utc_timestamp();
    auto text = manifest_.to_json().dump(2) + "\n";
    std::string path = opt_.common.manifest;
    if (path.empty() && !opt_.common.out.empty()) path = opt_.common.out + ".manifest.json";
    if (path.empty()) std::cerr << text;
    else mcw::io::write_file_atomic(path, text);
  }

 private:
  const Options& opt_;
  mcw::Config config_;
  mcw::RunManifest manifest_;
};

void warn(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_build(const Options& opt) {
  Run run("build", opt);
  auto db = run.wordnet();
  std::vector<mcw::BilingualLexicon> inputs;
  std::optional<mcw::VersionMap> map;
  if (!opt.common.lexicon.empty()) inputs.push_back(run.lexicon());
  for (std::size_t i = 0; i < opt.lexicons.size(); ++i) {
    run.manifest().add_input("lexicon." + std::to_string(i + 1), opt.lexicons[i]);
    inputs.push_back(mcw::load_lexicon(opt.lexicons[i]));
  }
  for (auto& lex : inputs) {
    if (lex.meta.version.empty() || lex.meta.version == db.version()) continue;
    if (opt.map.empty()) throw mcw::VersionMismatchError("lexicon '" + lex.meta.label + "' is for wordnet " + lex.meta.version + "; pass --map");
    if (!map) {
      run.manifest().add_input("map", opt.map);
      map = mcw::load_version_map(opt.map, lex.meta.version, db.version());
    }
    auto r = mcw::remap_lexicon(lex, *map);
    for (auto id : r.unmapped) std::cerr << "warning: " << lex.meta.label << " " << id.str() << " has no mapping\n";
    lex = std::move(r.lexicon);
  }

  std::vector<mcw::DictionaryEntry> dict;
  for (std::size_t i = 0; i < opt.dicts.size(); ++i) {
    run.manifest().add_input("dict." + std::to_string(i + 1), opt.dicts[i]);
    auto d = mcw::load_dictionary(opt.dicts[i]);
    dict.insert(dict.end(), d.begin(), d.end());
  }
  if (inputs.empty() && dict.empty()) throw CLI::RequiredError("--lexicon or --dict");

  mcw::BilingualLexicon result;
  std::vector<mcw::TranslationMiss> misses;
  for (std::size_t i = 0; i < inputs.size(); ++i) result = i == 0 ? inputs[0] : mcw::merge(result, inputs[i]);
  if (!dict.empty()) {
    auto t = mcw::translate_synsets(db, dict);
    misses = std::move(t.misses);
    result = inputs.empty() ? std::move(t.lexicon) : mcw::merge(result, t.lexicon);
  }
  if (auto dangling = result.unresolved(db); !dangling.empty()) {
    std::vector<std::string> ids;
    for (auto id : dangling) ids.push_back(id.str());
    throw mcw::ConsistencyError("lexicon names synsets missing from the wordnet", ids);
  }
  result.meta.label = opt.label.empty() ? "mcw" : opt.label;
  result.meta.run = run.manifest().run_id();

  auto out = run.require(opt.common.out, "--out");
  run.output(out, mcw::write_lexicon_jsonl(result));
  run.output(out + ".misses.tsv", mcw::write_miss_report(misses));
  run.output(out + ".categories.tsv", mcw::write_category_report(mcw::classify(db, result)));
  std::cerr << result.concept_count() << " synsets, " << result.candidate_count() << " candidates\n";
  run.finish();
  return 0;
}

int cmd_screen(const Options& opt) {
  Run run("screen", opt);
  auto lex = run.lexicon();
  auto table = run.embeddings();
  auto result = mcw::screen_all(lex, table, run.config().screening);
  warn(table.warnings);
  warn(result.warnings);
  result.lexicon.meta.run = run.manifest().run_id();

  auto out = run.require(opt.common.out, "--out");
  run.output(out, mcw::write_lexicon_jsonl(result.lexicon));
  run.output(out + ".report.jsonl", mcw::write_screening_report(result.outcomes));
  run.output(out + ".summary.tsv", mcw::write_screening_summary(result.summary));
  if (!opt.queue.empty()) {
    auto queue = mcw::ReviewQueue::load(opt.queue);
    auto added = mcw::enqueue_screening(queue, result.outcomes, run.config().hard_translation);
    run.output(opt.queue, queue.serialize());
    std::cerr << added << " review items queued\n";
  }
  std::cerr << mcw::write_screening_summary(result.summary);
  run.finish();
  return 0;
}

int cmd_apply_edits(const Options& opt) {
  Run run("apply-edits", opt);
  auto lex = run.lexicon();
  auto path = run.input("edits", opt.edits, "--edits");
  auto log = mcw::EditLog::parse(mcw::io::read_file(path));
  auto result = mcw::apply_edits(lex, log);
  if (auto problems = mcw::audit_provenance(result, log); !problems.empty())
    throw mcw::ConsistencyError("provenance audit failed", problems);
  result.meta.run = run.manifest().run_id();
  run.output(run.require(opt.common.out, "--out"), mcw::write_lexicon_jsonl(result));
  std::cerr << log.size() << " edits applied\n";
  run.finish();
  return 0;
}

int cmd_eval_relatedness(const Options& opt) {
  Run run("eval-relatedness", opt);
  auto lex = run.lexicon();
  auto table = run.embeddings();
  auto path = run.input("standard", opt.standard, "--standard");
  auto standard = mcw::load_gloss_standard(path, opt.label.empty() ? fs::path(path).stem().string() : opt.label);
  warn(mcw::check_canonical(standard));
  mcw::Stoplist stop;
  if (!opt.stoplist.empty()) stop = mcw::load_stoplist(run.input("stoplist", opt.stoplist, "--stoplist"));
  mcw::GreedyTokenizer tokenize(table.tokens());
  auto report = mcw::evaluate_relatedness(lex, standard, table, tokenize, stop);
  run.output(opt.common.out, opt.json || !opt.common.out.empty() ? mcw::to_json(report).dump(2) + "\n" : mcw::format_relatedness_table(report));
  run.finish();
  return 0;
}

int cmd_eval_similarity(const Options& opt) {
  Run run("eval-similarity", opt);
  auto db = run.wordnet();
  auto path = run.input("pairs", opt.pairs, "--pairs");
  auto pairs = mcw::load_word_pairs(path, opt.label.empty() ? fs::path(path).stem().string() : opt.label);
  auto pos = run.config().similarity_pos;
  mcw::Taxonomy taxonomy(db, pos);
  warn(taxonomy.warnings());
  mcw::IcSimilarity sim(taxonomy, run.config().ic_k);
  std::optional<mcw::BilingualLexicon> lex;
  mcw::SenseLookup senses;
  if (opt.english) {
    senses = mcw::english_senses(db, pos);
  } else {
    lex = run.lexicon();
    senses = mcw::lexicon_senses(*lex);
  }
  auto report = mcw::evaluate_pairs(sim, senses, pairs);
  run.output(opt.common.out, mcw::to_json(report).dump(2) + "\n");
  run.finish();
  return 0;
}

int cmd_eval_wsd(const Options& opt) {
  Run run("eval-wsd", opt);
  auto inventory = mcw::load_inventory(run.input("inventory", opt.inventory, "--inventory"));
  std::vector<mcw::WsdInstance> instances;
  if (!opt.semeval.empty()) {
    auto xml = mcw::io::read_utf8_file(run.input("semeval", opt.semeval, "--semeval"));
    auto key = mcw::io::read_utf8_file(run.input("key", opt.key, "--key"));
    instances = mcw::import_semeval2007(xml, key);
  } else {
    instances = mcw::load_instances(run.input("instances", opt.instances, "--instances"));
  }
  for (const auto& in : instances) {
    const auto* senses = inventory.find(in.target);
    bool known = senses && std::any_of(senses->begin(), senses->end(), [&](const mcw::Sense& s) { return s.id == in.gold; });
    if (!known) throw mcw::ConsistencyError("gold sense missing from the inventory", {in.id});
  }

  std::vector<mcw::InstanceOutcome> outcomes;
  if (opt.baseline) {
    outcomes = mcw::first_sense_baseline(instances, inventory);
  } else {
    auto db = run.wordnet();
    auto lex = run.lexicon();
    auto table = run.embeddings();
    mcw::Stoplist stop, gloss_stop;
    if (!opt.stoplist.empty()) stop = mcw::load_stoplist(run.input("stoplist", opt.stoplist, "--stoplist"));
    if (!opt.gloss_stoplist.empty()) gloss_stop = mcw::load_stoplist(run.input("gloss-stoplist", opt.gloss_stoplist, "--gloss-stoplist"));
    std::cerr << "sense representation: " << mcw::sense_representation_name(run.config().wsd.representation) << "\n";
    mcw::WsdEngine engine(db, lex, table, mcw::sentence_tokenizer(lex, inventory, stop), stop, mcw::GreedyTokenizer{}, gloss_stop, run.config().wsd);
    outcomes = mcw::run_wsd(engine, instances, inventory);
  }
  auto result = mcw::score(outcomes);
  warn(result.warnings);
  std::cerr << mcw::format_wsd_table(result);
  run.output(opt.common.out, mcw::to_json(result).dump(2) + "\n");
  run.finish();
  return 0;
}

int cmd_stats(const Options& opt) {
  Run run("stats", opt);
  auto db = run.wordnet();
  auto lex = run.lexicon();
  auto report = mcw::coverage_report(db, lex);
  run.output(opt.common.out, opt.json ? mcw::to_json(report).dump(2) + "\n" : mcw::format_coverage_table(report));
  run.finish();
  return 0;
}

httplib::Server* g_server = nullptr;

int cmd_serve(const Options& opt) {
  Run run("serve", opt);
  auto db = run.wordnet();
  auto lex = run.lexicon();
  auto edits = run.require(opt.edits, "--edits");
  auto queue = run.require(opt.queue, "--queue");
  std::vector<mcw::ScreeningOutcome> screening;
  if (!opt.screening.empty())
    screening = mcw::parse_screening_report(mcw::io::read_file(run.input("screening", opt.screening, "--screening")), opt.screening);
  mcw::ReviewService service(std::move(db), std::move(lex), edits, queue, std::move(screening));
  auto address = opt.listen.empty() ? mcw::listen_from_env() : mcw::parse_listen(opt.listen);
  httplib::Server server;
  service.mount(server, opt.ui);
  run.finish();
  g_server = &server;
  std::signal(SIGINT, [](int) { g_server->stop(); });
  std::signal(SIGTERM, [](int) { g_server->stop(); });
  std::cerr << "listening on " << address.host << ":" << address.port << "\n";
  if (!server.listen(address.host, address.port)) throw mcw::ConfigError("cannot listen on " + address.host + ":" + std::to_string(address.port));
  return 0;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--wordnet", c.wordnet, "PWN database directory (data.* and index.* files)");
  sub->add_option("--lexicon", c.lexicon, "bilingual lexicon JSONL");
  sub->add_option("--embeddings", c.embeddings, "word2vec text-format embeddings");
  sub->add_option("--config", c.config, "key = value config file");
  sub->add_option("--out", c.out, "output file");
  sub->add_option("--manifest", c.manifest, "run manifest path (default: <out>.manifest.json, else stderr)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bilingual wordnet toolkit: build, screen, correct and evaluate an English-Chinese wordnet."};
  app.require_subcommand(1);
  Options opt;

  auto* build = app.add_subcommand("build", "translate synsets through dictionaries and merge lexicons");
  add_common(build, opt.common);
  build->add_option("--dict", opt.dicts, "bilingual dictionary TSV (repeatable)");
  build->add_option("--merge", opt.lexicons, "additional lexicon to merge (repeatable)");
  build->add_option("--map", opt.map, "synset id map for lexicons built on another wordnet version");
  build->add_option("--label", opt.label, "label of the resulting lexicon");

  auto* screen = app.add_subcommand("screen", "machine screening of candidate lemmas");
  add_common(screen, opt.common);
  screen->add_option("--queue", opt.queue, "review queue JSONL to extend");

  auto* apply = app.add_subcommand("apply-edits", "replay a correction edit log over a lexicon");
  add_common(apply, opt.common);
  apply->add_option("--edits", opt.edits, "edit log JSONL");

  auto* rel = app.add_subcommand("eval-relatedness", "lemma-gloss relatedness against a gold standard");
  add_common(rel, opt.common);
  rel->add_option("--standard", opt.standard, "gloss standard TSV");
  rel->add_option("--label", opt.label, "standard label");
  rel->add_option("--stoplist", opt.stoplist, "stopwords for gloss tokens");
  rel->add_flag("--json", opt.json, "print JSON instead of a table");

  auto* sim = app.add_subcommand("eval-similarity", "word-pair similarity and Spearman correlation");
  add_common(sim, opt.common);
  sim->add_option("--pairs", opt.pairs, "word pair TSV");
  sim->add_option("--label", opt.label, "pair set label");
  sim->add_flag("--english", opt.english, "look words up in the English index instead of the lexicon");

  auto* wsd = app.add_subcommand("eval-wsd", "word sense disambiguation with micro/macro precision");
  add_common(wsd, opt.common);
  wsd->add_option("--instances", opt.instances, "instance JSONL");
  wsd->add_option("--semeval", opt.semeval, "SemEval-2007 lexical-sample XML (instead of --instances)");
  wsd->add_option("--key", opt.key, "SemEval key file");
  wsd->add_option("--inventory", opt.inventory, "sense inventory TSV");
  wsd->add_option("--stoplist", opt.stoplist, "sentence stopwords");
  wsd->add_option("--gloss-stoplist", opt.gloss_stoplist, "gloss stopwords");
  wsd->add_flag("--baseline", opt.baseline, "score the first-sense baseline");

  auto* stats = app.add_subcommand("stats", "per-POS coverage of the lexicon");
  add_common(stats, opt.common);
  stats->add_flag("--json", opt.json, "print JSON instead of a table");

  auto* serve = app.add_subcommand("serve", "HTTP review service");
  add_common(serve, opt.common);
  serve->add_option("--edits", opt.edits, "edit log JSONL (created when missing)");
  serve->add_option("--queue", opt.queue, "review queue JSONL");
  serve->add_option("--screening", opt.screening, "screening report JSONL");
  serve->add_option("--ui", opt.ui, "static directory served at /");
  serve->add_option("--listen", opt.listen, "host:port (default: $MCW_LISTEN or 127.0.0.1:8080)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*build) return cmd_build(opt);
    if (*screen) return cmd_screen(opt);
    if (*apply) return cmd_apply_edits(opt);
    if (*rel) return cmd_eval_relatedness(opt);
    if (*sim) return cmd_eval_similarity(opt);
    if (*wsd) return cmd_eval_wsd(opt);
    if (*stats) return cmd_stats(opt);
    if (*serve) return cmd_serve(opt);
  } catch (const CLI::ParseError& e) {
    std::cerr << "missing required option " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
