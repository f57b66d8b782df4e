#include <gtest/gtest.h>

#include "mcw/coverage.hpp"
#include "mcw/expansion.hpp"
#include "mcw/io.hpp"
#include "mcw/lexicon.hpp"
#include "support.hpp"

using namespace mcw;

namespace {

SynsetId id(const char* s) { return *SynsetId::parse(s); }

BilingualLexicon make(std::string label, std::vector<std::pair<const char*, const char*>> items, std::string version = "3.0") {
  BilingualLexicon lex;
  lex.meta.version = std::move(version);
  lex.meta.label = label;
  for (auto [s, t] : items) lex.add({id(s), t, label, Status::proposed, {}});
  return lex;
}

}  // namespace

TEST(Lexicon, StatusOrderOnlyMovesForward) {
  EXPECT_TRUE(can_transition(Status::proposed, Status::machine_kept));
  EXPECT_TRUE(can_transition(Status::machine_dropped, Status::human_kept));
  EXPECT_TRUE(can_transition(Status::machine_kept, Status::machine_dropped));
  EXPECT_FALSE(can_transition(Status::human_kept, Status::machine_dropped));
  EXPECT_FALSE(can_transition(Status::machine_kept, Status::proposed));
  EXPECT_EQ(status_name(Status::machine_kept), "machine-kept");
  EXPECT_EQ(status_from_name("human-dropped"), Status::human_dropped);
}

TEST(Lexicon, PairsAreUnique) {
  BilingualLexicon lex;
  EXPECT_TRUE(lex.add({id("08272961-n"), "结合", "oxford", Status::proposed, {}}));
  EXPECT_FALSE(lex.add({id("08272961-n"), "结合", "xinhua", Status::proposed, {}}));
  EXPECT_EQ(lex.candidates(id("08272961-n")).front().source, "oxford");
  EXPECT_EQ(lex.candidate_count(), 1u);
}

TEST(Lexicon, JsonlRoundTrip) {
  auto lex = load_lexicon(test::fixture("lexicon.jsonl"));
  EXPECT_EQ(lex.meta.version, "3.0");
  EXPECT_EQ(lex.meta.dictionaries, (std::vector<std::string>{"oxford", "xinhua"}));
  EXPECT_EQ(lex.candidate_count(), 19u);
  EXPECT_EQ(lex.concept_count(), 12u);
  EXPECT_EQ(lex.active_lemmas(id("08272961-n")), (std::vector<std::string>{"结合", "组合", "联合", "联合体"}));
  auto text = write_lexicon_jsonl(lex);
  EXPECT_EQ(parse_lexicon_jsonl(text), lex);
  EXPECT_EQ(write_lexicon_jsonl(parse_lexicon_jsonl(text)), text);
}

TEST(Lexicon, ParseErrors) {
  EXPECT_THROW(parse_lexicon_jsonl("{\"synset\":\"bad\",\"text\":\"x\"}\n"), ParseError);
  EXPECT_THROW(parse_lexicon_jsonl("{\"synset\":\"00000001-n\",\"text\":\"x\",\"status\":\"maybe\"}\n"), ParseError);
  EXPECT_THROW(parse_lexicon_jsonl("not json\n"), ParseError);
  EXPECT_THROW(parse_lexicon_jsonl("{\"synset\":\"00000001-n\",\"text\":\"x\"}\n{\"synset\":\"00000001-n\",\"text\":\"x\"}\n"), ParseError);
}

TEST(Lexicon, ReverseIndexAndUnresolved) {
  auto lex = load_lexicon(test::fixture("lexicon.jsonl"));
  auto rev = lex.reverse_index();
  EXPECT_EQ(rev.at("队伍").size(), 3u);
  EXPECT_EQ(rev.at("穿"), (std::vector<SynsetId>{id("00047610-v"), id("00469382-v")}));
  auto db = load_db(test::fixture("wn"));
  EXPECT_TRUE(lex.unresolved(db).empty());
  lex.add({id("09999999-n"), "孤儿", "x", Status::proposed, {}});
  EXPECT_EQ(lex.unresolved(db), std::vector<SynsetId>{id("09999999-n")});
}

TEST(Dictionary, ParsesAndValidates) {
  auto d = load_dictionary(test::fixture("oxford.tsv"));
  ASSERT_EQ(d.size(), 9u);
  EXPECT_EQ(d[0].english, "union");
  EXPECT_EQ(d[0].chinese, (std::vector<std::string>{"结合", "组合"}));
  EXPECT_EQ(d[0].source, "oxford");
  EXPECT_THROW(parse_dictionary_tsv("union\t\toxford\n"), ParseError);
  EXPECT_THROW(parse_dictionary_tsv("\t结合\toxford\n"), ParseError);
  EXPECT_THROW(parse_dictionary_tsv("union\t结合\n"), ParseError);
}

TEST(Expansion, TranslatesAndReportsMisses) {
  auto db = load_db(test::fixture("wn"));
  auto r = translate_synsets(db, load_dictionary(test::fixture("oxford.tsv")));
  EXPECT_EQ(r.lexicon.meta.label, "dict");
  EXPECT_EQ(r.lexicon.meta.dictionaries, std::vector<std::string>{"oxford"});
  EXPECT_EQ(r.lexicon.active_lemmas(id("08272961-n")), (std::vector<std::string>{"结合", "组合", "联合", "联合体"}));
  // get_up matches the spaced dictionary headword
  EXPECT_EQ(r.lexicon.active_lemmas(id("01968569-v")), std::vector<std::string>{"起"});
  EXPECT_EQ(r.lexicon.active_lemmas(id("00047610-v")), (std::vector<std::string>{"穿", "戴"}));
  std::set<std::string> missed;
  for (const auto& m : r.misses) missed.insert(m.english);
  EXPECT_TRUE(missed.count("entity"));
  EXPECT_TRUE(missed.count("military_personnel"));
  EXPECT_FALSE(missed.count("troops"));
  EXPECT_FALSE(r.lexicon.find(id("00001740-n"), "实体"));
  EXPECT_EQ(r.lexicon.entries.count(id("00001740-n")), 0u);
}

TEST(Expansion, EmptyDictionaryGivesEmptyLexicon) {
  auto db = load_db(test::fixture("wn"));
  auto r = translate_synsets(db, {});
  EXPECT_TRUE(r.lexicon.entries.empty());
  std::size_t words = 0;
  for (const auto& [id, s] : db.synsets()) words += s.words.size();
  EXPECT_EQ(r.misses.size(), words);
}

TEST(Expansion, CategoriesFromCounts) {
  EXPECT_EQ(categorize(1, 1), Category::one);
  EXPECT_EQ(categorize(1, 3), Category::two);
  EXPECT_EQ(categorize(2, 2), Category::three);
  EXPECT_EQ(categorize(2, 1), Category::uncategorized);
  EXPECT_EQ(categorize(1, 0), Category::uncategorized);

  auto db = load_db(test::fixture("wn"));
  auto lex = load_lexicon(test::fixture("lexicon.jsonl"));
  std::map<SynsetId, Category> got;
  for (const auto& c : classify(db, lex)) got[c.synset] = c.category;
  EXPECT_EQ(got.at(id("00001740-n")), Category::one);            // entity / 实体
  EXPECT_EQ(got.at(id("08425303-n")), Category::two);            // ranks / 行列, 队伍
  EXPECT_EQ(got.at(id("08272961-n")), Category::three);          // union, alliance / 4 candidates
  EXPECT_EQ(got.at(id("00002137-n")), Category::uncategorized);  // 2 English, 1 Chinese
}

TEST(Merge, BaseWinsAndProvenanceRecorded) {
  auto base = make("sew", {{"08272961-n", "结合"}, {"08199025-n", "部队"}});
  auto added = make("dict", {{"08272961-n", "结合"}, {"08272961-n", "联合"}});
  added.meta.dictionaries = {"oxford"};
  auto m = merge(base, added);
  EXPECT_EQ(m.candidates(id("08272961-n")).front().source, "sew");
  EXPECT_EQ(m.active_lemmas(id("08272961-n")), (std::vector<std::string>{"结合", "联合"}));
  EXPECT_EQ(m.meta.inputs, std::vector<std::string>{"dict"});
  EXPECT_EQ(m.meta.dictionaries, std::vector<std::string>{"oxford"});
  EXPECT_EQ(m.candidate_count(), 3u);
}

TEST(Merge, IdempotentWithEmptyIdentity) {
  auto base = make("sew", {{"08272961-n", "结合"}, {"08199025-n", "部队"}});
  EXPECT_EQ(merge(base, base), base);
  EXPECT_EQ(merge(base, make("empty", {})), base);
}

TEST(Merge, VersionMismatch) {
  EXPECT_THROW(merge(make("a", {}), make("b", {}, "1.6")), VersionMismatchError);
}

TEST(Remap, MovesMappedSynsetsAndReportsTheRest) {
  auto old = load_lexicon(test::fixture("old_lexicon.jsonl"));
  auto map = load_version_map(test::fixture("map.tsv"), "1.6", "3.0");
  auto r = remap_lexicon(old, map);
  EXPECT_EQ(r.lexicon.meta.version, "3.0");
  EXPECT_EQ(r.unmapped, std::vector<SynsetId>{id("09999999-n")});
  EXPECT_EQ(r.lexicon.active_lemmas(id("08272961-n")), std::vector<std::string>{"联盟"});
  EXPECT_EQ(r.lexicon.active_lemmas(id("00047610-v")), std::vector<std::string>{"穿戴"});
  EXPECT_THROW(remap_lexicon(old, parse_version_map("", "2.0", "3.0")), VersionMismatchError);
}

TEST(Coverage, FullEmptyAndPartial) {
  auto db = load_db(test::fixture("wn"));
  auto full = coverage_report(db, load_lexicon(test::fixture("lexicon.jsonl")));
  for (auto p : kAllPos) EXPECT_DOUBLE_EQ(full.row(p).ratio, 1.0);
  EXPECT_EQ(full.total.translated, 12u);
  EXPECT_EQ(full.total.lemmas, 19u);
  EXPECT_EQ(full.row(Pos::verb).lemmas, 4u);

  auto empty = coverage_report(db, BilingualLexicon{});
  for (auto p : kAllPos) EXPECT_EQ(empty.row(p).ratio, 0.0);
  EXPECT_EQ(empty.total.lemmas, 0u);

  auto four = WordnetDb::from_synsets("toy", test::noun_graph({1, 2, 3, 4}, {}));
  auto half = make("x", {{"00000001-n", "甲"}, {"00000002-n", "乙"}, {"00000002-n", "丙"}, {"00000009-n", "丁"}});
  half.entries[id("00000002-n")][1].status = Status::machine_dropped;
  auto r = coverage_report(four, half);
  EXPECT_DOUBLE_EQ(r.row(Pos::noun).ratio, 0.5);
  EXPECT_EQ(r.row(Pos::noun).lemmas, 2u);
  EXPECT_EQ(r.unresolved_synsets, 1u);
  EXPECT_NE(format_coverage_table(r).find("noun\t2\t4\t0.500\t2"), std::string::npos) << format_coverage_table(r);
}
