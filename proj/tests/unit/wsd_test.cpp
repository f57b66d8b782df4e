#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mcw/wsd.hpp"
#include "support.hpp"

using namespace mcw;

namespace {

struct Toy {
  WordnetDb db = load_db(test::fixture("wn"));
  BilingualLexicon lex = load_lexicon(test::fixture("lexicon.jsonl"));
  EmbeddingTable table = load_embeddings(test::fixture("wsd/gloss.vec"));
  SenseInventory inventory = load_inventory(test::fixture("wsd/inventory.tsv"));
  Stoplist stop = load_stoplist(test::fixture("wsd/stoplist.txt"));
  Stoplist gloss_stop = load_stoplist(test::fixture("wsd/gloss_stoplist.txt"));

  WsdEngine engine(WsdConfig cfg = {}) const {
    return WsdEngine(db, lex, table, mcw::sentence_tokenizer(lex, inventory, stop), stop, GreedyTokenizer{}, gloss_stop, cfg);
  }
};

std::vector<double> mean_of(const EmbeddingTable& t, std::vector<std::string> words) {
  std::vector<double> out(t.dimension(), 0.0);
  for (const auto& w : words) {
    auto v = *t.find(w);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i] / static_cast<double>(words.size());
  }
  return out;
}

double cos(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] * b[i], na += a[i] * a[i], nb += b[i] * b[i];
  return d / std::sqrt(na * nb);
}

}  // namespace

TEST(Wsd, PreprocessAndWindow) {
  Toy toy;
  auto tok = mcw::sentence_tokenizer(toy.lex, toy.inventory, toy.stop);
  EXPECT_EQ(preprocess("他们排起了长长的队伍。", tok, toy.stop), (std::vector<std::string>{"排", "起", "长长的", "队伍"}));
  EXPECT_THROW(preprocess("  ", tok, toy.stop), Error);
  std::vector<std::string> t{"a", "b", "c", "d", "e", "f"};
  EXPECT_EQ(context_window(t, 2), (std::vector<std::string>{"a", "b", "d", "e"}));
  EXPECT_EQ(context_window(t, 0), (std::vector<std::string>{"b", "c"}));
  EXPECT_EQ(context_window(t, 5, 1), std::vector<std::string>{"e"});
  EXPECT_TRUE(context_window({"x"}, 0).empty());
  EXPECT_THROW(context_window(t, 6), Error);
}

TEST(Wsd, TargetSpanStaysOneToken) {
  Toy toy;
  auto engine = toy.engine();
  auto instances = load_instances(test::fixture("wsd/instances.jsonl"));
  std::size_t pos = 0;
  auto tokens = engine.tokens_around(instances[0], pos);
  EXPECT_EQ(tokens, (std::vector<std::string>{"排", "起", "长长的", "队伍"}));
  EXPECT_EQ(pos, 3u);
  auto bad = instances[0];
  bad.begin = 7;
  EXPECT_THROW(engine.tokens_around(bad, pos), Error);
}

TEST(Wsd, ContextVectorSumsGlossMeans) {
  Toy toy;
  auto engine = toy.engine();
  auto ctx = engine.context_vector({"起", "长长的"});
  ASSERT_TRUE(ctx);
  auto rise = mean_of(toy.table, {"stand", "form", "line"});
  auto lng = mean_of(toy.table, {"relatively", "great", "length", "extending", "line"});
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR((*ctx)[i], rise[i] + lng[i], 1e-15);
  EXPECT_FALSE(engine.context_vector({"排", "未知"}));
  EXPECT_FALSE(engine.context_vector({}));
}

TEST(Wsd, LongQueueSentencePicksRanks) {
  Toy toy;
  auto engine = toy.engine();
  auto instances = load_instances(test::fixture("wsd/instances.jsonl"));
  auto p = engine.disambiguate(instances[0], toy.inventory);
  EXPECT_EQ(p.sense, "08425303-n");
  EXPECT_FALSE(p.fallback);
  ASSERT_EQ(p.scores.size(), 3u);

  auto ctx = mean_of(toy.table, {"stand", "form", "line"});
  auto lng = mean_of(toy.table, {"relatively", "great", "length", "extending", "line"});
  for (std::size_t i = 0; i < 4; ++i) ctx[i] += lng[i];
  EXPECT_NEAR(*p.scores[0], cos(ctx, mean_of(toy.table, {"soldiers", "collectively"})), 1e-12);
  EXPECT_NEAR(*p.scores[1], cos(ctx, mean_of(toy.table, {"row", "line", "people", "standing", "side", "side"})), 1e-12);
  EXPECT_NEAR(*p.scores[2], cos(ctx, mean_of(toy.table, {"temporary", "military", "unit"})), 1e-12);
  EXPECT_GT(*p.scores[1], *p.scores[0]);
  EXPECT_GT(*p.scores[1], *p.scores[2]);
}

TEST(Wsd, FallsBackToFirstSense) {
  Toy toy;
  auto engine = toy.engine();
  auto instances = load_instances(test::fixture("wsd/instances.jsonl"));
  auto alone = engine.disambiguate(instances[1], toy.inventory);
  EXPECT_TRUE(alone.fallback);
  EXPECT_EQ(alone.sense, "08199025-n");

  SenseInventory no_vectors;
  no_vectors.words["队伍"] = {{"s1", "x", "zzz"}, {"s2", "y", "qqq"}};
  auto p = engine.disambiguate(instances[0], no_vectors);
  EXPECT_TRUE(p.fallback);
  EXPECT_EQ(p.sense, "s1");

  SenseInventory single;
  single.words["队伍"] = {{"08008335-n", "contingent", ""}};
  auto s = engine.disambiguate(instances[0], single);
  EXPECT_EQ(s.sense, "08008335-n");
  EXPECT_FALSE(s.fallback);  // scored through the synset's own gloss

  SenseInventory empty;
  EXPECT_THROW(engine.disambiguate(instances[0], empty), NotFoundError);
}

TEST(Wsd, ChineseLemmaRepresentation) {
  Toy toy;
  toy.table.insert("行列", std::vector<double>{0, 1, 0.1, 0});
  auto engine = toy.engine({2, SenseRepresentation::chinese_lemmas});
  auto instances = load_instances(test::fixture("wsd/instances.jsonl"));
  auto p = engine.disambiguate(instances[0], toy.inventory);
  EXPECT_EQ(p.sense, "08425303-n");
  EXPECT_FALSE(p.scores[0]);  // 部队 and 队伍 have no vectors
}

TEST(Wsd, MicroAndMacroPrecision) {
  auto r = score_counts({{"a", {1, 2}}, {"b", {3, 3}}});
  EXPECT_DOUBLE_EQ(r.micro, 0.8);
  EXPECT_DOUBLE_EQ(r.macro, 0.75);
  EXPECT_EQ(r.word_types, 2u);
  auto z = score_counts({{"a", {1, 2}}, {"empty", {0, 0}}});
  EXPECT_EQ(z.word_types, 1u);
  EXPECT_EQ(z.warnings.size(), 1u);
  EXPECT_DOUBLE_EQ(z.macro, 0.5);
  EXPECT_THROW(score_counts({{"a", {3, 2}}}), Error);
  auto none = score_counts({});
  EXPECT_EQ(none.micro, 0.0);
}

TEST(Wsd, EqualTypeSizesMakeMicroEqualMacro) {
  std::mt19937 rng(4);
  for (int round = 0; round < 200; ++round) {
    std::map<std::string, TypeCounts> counts;
    std::size_t n = 1 + rng() % 20, types = 1 + rng() % 10;
    for (std::size_t t = 0; t < types; ++t) counts["t" + std::to_string(t)] = {rng() % (n + 1), n};
    auto r = score_counts(counts);
    EXPECT_NEAR(r.micro, r.macro, 1e-12);
  }
}

TEST(Wsd, EndToEndOnToyInstances) {
  Toy toy;
  auto engine = toy.engine();
  auto instances = load_instances(test::fixture("wsd/instances.jsonl"));
  auto result = score(run_wsd(engine, instances, toy.inventory));
  EXPECT_EQ(result.per_type.at("队伍"), (TypeCounts{2, 2}));
  EXPECT_EQ(result.per_type.at("穿"), (TypeCounts{0, 1}));
  EXPECT_DOUBLE_EQ(result.micro, 2.0 / 3);
  EXPECT_DOUBLE_EQ(result.macro, 0.5);
  EXPECT_NE(format_wsd_table(result).find("micro\t0.6667"), std::string::npos);

  auto base = score(first_sense_baseline(instances, toy.inventory));
  EXPECT_EQ(base.per_type.at("队伍"), (TypeCounts{1, 2}));
  EXPECT_DOUBLE_EQ(base.micro, 1.0 / 3);
  EXPECT_DOUBLE_EQ(base.macro, 0.25);
  EXPECT_EQ(to_json(base)["instances"].size(), 3u);
}

TEST(Wsd, InvariantUnderScalingAndDuplication) {
  Toy toy;
  auto instances = load_instances(test::fixture("wsd/instances.jsonl"));
  auto plain = score(run_wsd(toy.engine(), instances, toy.inventory));

  Toy scaled;
  EmbeddingTable big(scaled.table.dimension());
  for (const auto& w : scaled.table.tokens()) {
    auto v = *scaled.table.find(w);
    std::vector<double> s(v.begin(), v.end());
    for (auto& x : s) x *= 7.5;
    big.insert(w, s);
  }
  scaled.table = big;
  auto s = score(run_wsd(scaled.engine(), instances, scaled.inventory));
  EXPECT_EQ(s.per_type, plain.per_type);

  auto doubled = instances;
  doubled.insert(doubled.end(), instances.begin(), instances.end());
  auto d = score(run_wsd(toy.engine(), doubled, toy.inventory));
  EXPECT_DOUBLE_EQ(d.micro, plain.micro);
  EXPECT_DOUBLE_EQ(d.macro, plain.macro);
}

TEST(Wsd, InstanceAndInventoryParsing) {
  auto instances = load_instances(test::fixture("wsd/instances.jsonl"));
  ASSERT_EQ(instances.size(), 3u);
  EXPECT_EQ(parse_instances_jsonl(to_json(instances[0]).dump() + "\n")[0].sentence, instances[0].sentence);
  EXPECT_THROW(parse_instances_jsonl(R"({"id":"x","sentence":"他们","target":"们","span":[0,1],"gold":"g"})" "\n"), ParseError);
  EXPECT_THROW(parse_instances_jsonl(R"({"id":"x","sentence":"他们","target":"他","span":[0,1]})" "\n"), ParseError);
  EXPECT_EQ(parse_instances_jsonl(R"({"id":"x","sentence":"他们","target":"他","span":[0,1],"gold":"g"})" "\n")[0].word_type, "他");
  EXPECT_THROW(parse_inventory_tsv("w\ts\te\n"), ParseError);
  EXPECT_THROW(parse_inventory_tsv("w\ts\te\tg\nw\ts\tf\th\n"), ParseError);
  auto inv = load_inventory(test::fixture("wsd/inventory.tsv"));
  EXPECT_EQ(inv.find("队伍")->size(), 3u);
  EXPECT_EQ(inv.find("穿")->front().id, "00047610-v");
}

TEST(Wsd, SemEvalImport) {
  auto xml = io::read_file(test::fixture("wsd/semeval.xml"));
  auto key = io::read_file(test::fixture("wsd/semeval.key"));
  auto in = import_semeval2007(xml, key);
  ASSERT_EQ(in.size(), 2u);
  EXPECT_EQ(in[0].id, "队伍.1");
  EXPECT_EQ(in[0].sentence, "他们排起了长长的队伍。");
  EXPECT_EQ(in[0].begin, 8u);
  EXPECT_EQ(in[0].end, 10u);
  EXPECT_EQ(in[0].gold, "08425303-n");
  EXPECT_EQ(in[1].sentence, "队伍");
  for (const auto& i : in) EXPECT_NO_THROW(validate_span(i));
  EXPECT_EQ(import_semeval2007(xml, "队伍 队伍.2 08199025-n\n").size(), 1u);
  EXPECT_THROW(import_semeval2007("<lexelt item=\"a\"><instance id=\"1\"><context>x</context></instance></lexelt>", "a 1 s\n"), Error);
}
