#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "mcw/service.hpp"
#include "support.hpp"

using namespace mcw;
using nlohmann::json;

namespace {

const SynsetId kUnion{8272961, Pos::noun};
const SynsetId kRanks{8425303, Pos::noun};

struct Fixture {
  test::TempDir dir;
  std::filesystem::path log = dir / "edits.jsonl";
  std::filesystem::path queue = dir / "queue.jsonl";

  Fixture() {
    ReviewQueue q;
    q.add(kUnion, "联合体", ReviewReason::screening_deferred);
    q.add(kRanks, "队伍", ReviewReason::rule_flagged, "x的y");
    q.add(kUnion, "不存在", ReviewReason::conflict);
    io::write_file_atomic(queue, q.serialize());
  }

  std::vector<ScreeningOutcome> outcomes() const {
    ScreeningOutcome o;
    o.synset = kUnion;
    o.kept = {"组合", "结合", "联合"};
    o.dropped = {"联合体"};
    o.magnitudes = {{"组合", 1.0}, {"结合", 1.1}, {"联合", 1.2}, {"联合体", 2.0}};
    return {o};
  }

  ReviewService make() const {
    return ReviewService(load_db(test::fixture("wn")), load_lexicon(test::fixture("lexicon.jsonl")), log, queue, outcomes());
  }
};

const CandidateLemma* find(const BilingualLexicon& lex, SynsetId id, const std::string& text) { return lex.find(id, text); }

}  // namespace

TEST(Service, QueueListingAndFilters) {
  Fixture f;
  auto svc = f.make();
  auto r = svc.get_queue("", "", "", 0, 50);
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["total"], 3);
  ASSERT_EQ(r.body["items"].size(), 3u);
  const auto& first = r.body["items"][0];
  EXPECT_EQ(first["candidate"], "联合体");
  EXPECT_EQ(first["magnitude"], 2.0);
  EXPECT_FALSE(first["english"].empty());
  EXPECT_FALSE(first["gloss"].get<std::string>().empty());
  EXPECT_TRUE(r.body["items"][1]["magnitude"].is_null());

  EXPECT_EQ(svc.get_queue("", "", "rule-flagged", 0, 50).body["total"], 1);
  EXPECT_EQ(svc.get_queue("", "v", "", 0, 50).body["total"], 0);
  auto page = svc.get_queue("all", "", "", 1, 1);
  EXPECT_EQ(page.body["total"], 3);
  ASSERT_EQ(page.body["items"].size(), 1u);
  EXPECT_EQ(page.body["items"][0]["id"], 2);

  EXPECT_EQ(svc.get_queue("closed", "", "", 0, 50).status, 400);
  EXPECT_EQ(svc.get_queue("", "x", "", 0, 50).status, 400);
  EXPECT_EQ(svc.get_queue("", "", "nope", 0, 50).status, 400);
  EXPECT_EQ(svc.get_queue("", "", "", 0, 0).status, 400);
  EXPECT_EQ(svc.get_queue("", "", "", 0, 1001).status, 400);
}

TEST(Service, EmptyQueue) {
  test::TempDir dir;
  ReviewService svc(load_db(test::fixture("wn")), load_lexicon(test::fixture("lexicon.jsonl")), dir / "e", dir / "q");
  auto r = svc.get_queue("", "", "", 0, 50);
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["total"], 0);
  EXPECT_TRUE(r.body["items"].empty());
  EXPECT_TRUE(svc.get_stats().body["screening"].is_null());
}

TEST(Service, DecisionsUpdateLexiconLogAndQueue) {
  Fixture f;
  auto svc = f.make();
  auto r = svc.post_decision("1", R"({"decision":"reject","author":"ana","rationale":"too broad"})", "");
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_EQ(r.body["item"]["status"], "rejected");
  EXPECT_EQ(r.body["edit"]["kind"], "delete-lemma");
  EXPECT_EQ(r.body["edit"]["rule"], "wrong-meaning");
  EXPECT_EQ(r.body["edit"]["author"], "ana");
  EXPECT_EQ(find(svc.lexicon(), kUnion, "联合体")->status, Status::human_dropped);
  EXPECT_EQ(svc.edits().size(), 1u);

  auto again = svc.post_decision("1", R"({"decision":"accept"})", "bob");
  EXPECT_EQ(again.status, 409);
  EXPECT_EQ(again.body["item"]["status"], "rejected");
  EXPECT_EQ(again.body["item"]["edit"], r.body["edit"]["id"]);
  EXPECT_EQ(svc.edits().size(), 1u);

  // author from the header, rule override
  auto edited = svc.post_decision("2", R"({"decision":"edit","newText":"行伍","rule":"hard-translation"})", "bob");
  ASSERT_EQ(edited.status, 200) << edited.body.dump();
  EXPECT_EQ(edited.body["edit"]["author"], "bob");
  EXPECT_EQ(edited.body["item"]["status"], "edited");
  auto lex = svc.lexicon();
  EXPECT_EQ(find(lex, kRanks, "队伍")->status, Status::human_dropped);
  EXPECT_EQ(find(lex, kRanks, "行伍")->status, Status::human_kept);
  EXPECT_EQ(lex.meta.edit_tip, svc.edits().tip_id());

  auto persisted = ReviewQueue::load(f.queue);
  EXPECT_EQ(persisted.find(1)->status, ReviewStatus::rejected);
  EXPECT_EQ(persisted.find(2)->status, ReviewStatus::edited);
  EXPECT_EQ(EditLogFile(f.log).log().records(), svc.edits().records());
}

TEST(Service, InapplicableEditIs422AndLeavesStateUntouched) {
  Fixture f;
  auto svc = f.make();
  auto r = svc.post_decision("3", R"({"decision":"reject","author":"ana"})", "");
  EXPECT_EQ(r.status, 422);
  EXPECT_NE(r.body["error"].get<std::string>().find("不存在"), std::string::npos);
  EXPECT_EQ(svc.edits().size(), 0u);
  EXPECT_FALSE(std::filesystem::exists(f.log) && std::filesystem::file_size(f.log) > 0);
  EXPECT_EQ(ReviewQueue::load(f.queue).find(3)->status, ReviewStatus::open);
}

TEST(Service, BadDecisionRequests) {
  Fixture f;
  auto svc = f.make();
  EXPECT_EQ(svc.post_decision("x", R"({"decision":"accept"})", "a").status, 400);
  EXPECT_EQ(svc.post_decision("1x", R"({"decision":"accept"})", "a").status, 400);
  EXPECT_EQ(svc.post_decision("1", "not json", "a").status, 400);
  EXPECT_EQ(svc.post_decision("1", "[1]", "a").status, 400);
  EXPECT_EQ(svc.post_decision("1", R"({"decision":"maybe"})", "a").status, 400);
  EXPECT_EQ(svc.post_decision("1", R"({"decision":"edit"})", "a").status, 400);
  EXPECT_EQ(svc.post_decision("1", R"({"decision":"accept","rule":"vibes"})", "a").status, 400);
  EXPECT_EQ(svc.post_decision("1", R"({"decision":"accept"})", "").status, 400);
  EXPECT_EQ(svc.post_decision("99", R"({"decision":"accept"})", "a").status, 404);
  EXPECT_EQ(svc.edits().size(), 0u);
}

TEST(Service, SynsetViewCarriesHistoryAndMagnitudes) {
  Fixture f;
  auto svc = f.make();
  ASSERT_EQ(svc.post_decision("1", R"({"decision":"accept"})", "ana").status, 200);
  auto r = svc.get_synset("08272961-n");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["synset"]["id"], "08272961-n");
  EXPECT_EQ(r.body["candidates"].size(), 4u);
  ASSERT_EQ(r.body["history"].size(), 1u);
  EXPECT_EQ(r.body["history"][0]["kind"], "retag-note");
  EXPECT_EQ(r.body["history"][0]["old"], "联合体");
  EXPECT_EQ(r.body["magnitudes"]["联合体"], 2.0);
  EXPECT_FALSE(svc.get_synset("08425303-n").body.contains("magnitudes"));
  EXPECT_EQ(svc.get_synset("8272961-n").status, 400);
  EXPECT_EQ(svc.get_synset("09999999-n").status, 404);
}

TEST(Service, StatsAndSearch) {
  Fixture f;
  auto svc = f.make();
  ASSERT_EQ(svc.post_decision("1", R"({"decision":"accept"})", "ana").status, 200);
  auto s = svc.get_stats().body;
  EXPECT_EQ(s["queue"]["total"], 3);
  EXPECT_EQ(s["queue"]["open"], 2);
  EXPECT_EQ(s["queue"]["accepted"], 1);
  EXPECT_EQ(s["edits"], 1);
  EXPECT_EQ(s["edit_tip"], svc.edits().tip_id());
  EXPECT_FALSE(s["coverage"].is_null());
  EXPECT_FALSE(s["screening"].is_null());

  auto q = svc.search("队伍");
  ASSERT_EQ(q.status, 200);
  EXPECT_EQ(q.body["chinese"].size(), 3u);
  EXPECT_TRUE(q.body["english"].empty());
  auto e = svc.search("troops");
  ASSERT_EQ(e.body["english"].size(), 1u);
  EXPECT_EQ(e.body["english"][0]["id"], "08199025-n");
  EXPECT_EQ(svc.search(" ").status, 400);
}

TEST(Service, ConcurrentDecisionsOnOneItem) {
  Fixture f;
  auto svc = f.make();
  std::atomic<int> ok = 0, conflict = 0, other = 0;
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i)
    threads.emplace_back([&, i] {
      auto r = svc.post_decision("1", i % 2 ? R"({"decision":"accept"})" : R"({"decision":"reject"})", "user" + std::to_string(i));
      (r.status == 200 ? ok : r.status == 409 ? conflict : other)++;
    });
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok, 1);
  EXPECT_EQ(conflict, 7);
  EXPECT_EQ(other, 0);
  EXPECT_EQ(svc.edits().size(), 1u);
  EXPECT_EQ(EditLogFile(f.log).log().size(), 1u);
}

TEST(Service, RestartReplaysLogAndReconcilesQueue) {
  Fixture f;
  const auto open_queue = io::read_file(f.queue);
  {
    auto svc = f.make();
    ASSERT_EQ(svc.post_decision("2", R"({"decision":"reject"})", "ana").status, 200);
  }
  // the queue write was lost after the log append
  io::write_file_atomic(f.queue, open_queue);
  auto svc = f.make();
  auto q = ReviewQueue::load(f.queue);
  EXPECT_EQ(q.find(2)->status, ReviewStatus::rejected);
  EXPECT_EQ(q.find(2)->edit, svc.edits().tip_id());
  EXPECT_EQ(q.find(1)->status, ReviewStatus::open);
  EXPECT_EQ(find(svc.lexicon(), kRanks, "队伍")->status, Status::human_dropped);
  EXPECT_EQ(svc.post_decision("2", R"({"decision":"accept"})", "bob").status, 409);
  EXPECT_EQ(svc.reconcile(), 0u);
}

TEST(Service, SnapshotAheadOfLogIsInconsistent) {
  Fixture f;
  auto lex = load_lexicon(test::fixture("lexicon.jsonl"));
  lex.meta.edit_tip = std::string(64, 'a');
  EXPECT_THROW(ReviewService(load_db(test::fixture("wn")), lex, f.log, f.queue), ConsistencyError);
}

TEST(Service, SnapshotAtTipSkipsAppliedEdits) {
  Fixture f;
  BilingualLexicon snapshot;
  {
    auto svc = f.make();
    ASSERT_EQ(svc.post_decision("2", R"({"decision":"edit","newText":"行伍"})", "ana").status, 200);
    snapshot = svc.lexicon();
  }
  // replaying the edit again over the snapshot would fail on the dropped lemma
  ReviewService again(load_db(test::fixture("wn")), snapshot, f.log, f.queue);
  EXPECT_EQ(again.lexicon(), snapshot);
}

TEST(ServiceHttp, RoutesOverLoopback) {
  Fixture f;
  auto svc = f.make();
  httplib::Server server;
  svc.mount(server);
  int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);

  auto queue = client.Get("/api/queue?limit=2");
  ASSERT_TRUE(queue);
  EXPECT_EQ(queue->status, 200);
  EXPECT_EQ(queue->get_header_value("Content-Type"), "application/json");
  auto qj = json::parse(queue->body);
  EXPECT_EQ(qj["items"].size(), 2u);
  EXPECT_EQ(qj["total"], 3);
  EXPECT_EQ(client.Get("/api/queue?limit=-1")->status, 400);
  EXPECT_EQ(client.Get("/api/queue?offset=abc")->status, 400);

  httplib::Headers author{{"X-Author", "ana"}};
  auto post = client.Post("/api/queue/1/decision", author, R"({"decision":"accept"})", "application/json");
  ASSERT_TRUE(post);
  EXPECT_EQ(post->status, 200);
  EXPECT_EQ(json::parse(post->body)["edit"]["author"], "ana");
  auto dup = client.Post("/api/queue/1/decision", author, R"({"decision":"reject"})", "application/json");
  EXPECT_EQ(dup->status, 409);
  EXPECT_EQ(json::parse(dup->body)["item"]["status"], "accepted");
  EXPECT_EQ(client.Post("/api/queue/3/decision", author, R"({"decision":"reject"})", "application/json")->status, 422);
  EXPECT_EQ(client.Post("/api/queue/42/decision", author, R"({"decision":"reject"})", "application/json")->status, 404);

  auto syn = client.Get("/api/synset/08272961-n");
  EXPECT_EQ(syn->status, 200);
  EXPECT_EQ(json::parse(syn->body)["history"].size(), 1u);
  EXPECT_EQ(client.Get("/api/synset/bogus")->status, 400);

  auto stats = client.Get("/api/stats");
  EXPECT_EQ(json::parse(stats->body)["edits"], 1);
  auto search = client.Get("/api/search?lemma=%E9%98%9F%E4%BC%8D");
  EXPECT_EQ(json::parse(search->body)["chinese"].size(), 3u);
  EXPECT_EQ(client.Get("/api/search")->status, 400);

  server.stop();
  t.join();
}

TEST(ServiceHttp, ConcurrentClientsGetExactlyOneSuccess) {
  Fixture f;
  auto svc = f.make();
  httplib::Server server;
  svc.mount(server);
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  std::atomic<int> ok = 0, conflict = 0;
  std::vector<std::thread> clients;
  for (int i = 0; i < 6; ++i)
    clients.emplace_back([&, i] {
      httplib::Client c("127.0.0.1", port);
      auto r = c.Post("/api/queue/2/decision", R"({"decision":"reject","author":"u)" + std::to_string(i) + "\"}", "application/json");
      if (r && r->status == 200) ++ok;
      if (r && r->status == 409) ++conflict;
    });
  for (auto& c : clients) c.join();
  server.stop();
  t.join();
  EXPECT_EQ(ok, 1);
  EXPECT_EQ(conflict, 5);
}

TEST(Service, StaticMountMustExist) {
  Fixture f;
  auto svc = f.make();
  httplib::Server server;
  EXPECT_THROW(svc.mount(server, f.dir / "missing"), ConfigError);
}

TEST(Service, ListenAddress) {
  auto d = parse_listen("");
  EXPECT_EQ(d.host, "127.0.0.1");
  EXPECT_EQ(d.port, 8080);
  auto a = parse_listen("0.0.0.0:9000");
  EXPECT_EQ(a.host, "0.0.0.0");
  EXPECT_EQ(a.port, 9000);
  auto p = parse_listen(":81");
  EXPECT_EQ(p.host, "127.0.0.1");
  EXPECT_EQ(p.port, 81);
  EXPECT_THROW(parse_listen("localhost"), ConfigError);
  EXPECT_THROW(parse_listen("h:99999"), ConfigError);
  EXPECT_THROW(parse_listen("h:8o"), ConfigError);
}
