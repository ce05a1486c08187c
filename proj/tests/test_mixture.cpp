#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "graspmix/mixture.hpp"

using namespace graspmix;

namespace {

// Full-stage items with SRP, PIP, SRP, PIP segments; ids zero-padded.
std::vector<CorpusItem> full_corpus(std::size_t n) {
  std::vector<CorpusItem> out;
  for (std::size_t i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "full_%04zu", i);
    const std::size_t a = 10 + i % 7;
    out.push_back({id, a + 30, {{Phase::srp, 0, a - 1}, {Phase::pip, a, a + 9}, {Phase::srp, a + 10, a + 19},
                                {Phase::pip, a + 20, a + 29}}});
  }
  return out;
}

std::vector<CorpusItem> srp_corpus(std::size_t n) {
  std::vector<CorpusItem> out;
  for (std::size_t i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "srp_%04zu", i);
    out.push_back({id, 20, {}});
  }
  return out;
}

using Key = std::tuple<int, std::string, int, std::size_t, std::size_t>;

std::map<Key, std::size_t> multiset(const MixtureManifest& m) {
  std::map<Key, std::size_t> out;
  for (const auto& e : m.entries) {
    const Key k{static_cast<int>(e.side), e.source, e.segment ? static_cast<int>(e.segment->phase) : -1,
                e.segment ? e.segment->first : 0, e.segment ? e.segment->last : 0};
    out[k] += e.multiplicity;
  }
  return out;
}

}  // namespace

TEST(PSrp, Arithmetic) {
  EXPECT_NEAR(p_srp(100, 200), 0.6667, 5e-5);
  EXPECT_EQ(p_srp(7, 0), 0.0);
  EXPECT_EQ(p_srp(0, 7), 1.0);
  try {
    p_srp(0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_argument);
  }
}

TEST(Build, RepeatPipTriplesPip) {
  const auto f = full_corpus(150);
  const auto s = srp_corpus(250);
  const auto m = build(f, s, {100, 200, Strategy::repeat_pip, 1});
  EXPECT_EQ(m.repeat_extra, 2u);
  EXPECT_EQ(m.p_srp_rounded(), 0.666667);
  std::size_t pip_total = 0, srp_segments = 0, srp_whole = 0;
  for (const auto& e : m.entries) {
    if (e.segment && e.segment->phase == Phase::pip) {
      EXPECT_EQ(e.multiplicity, 3u);
      pip_total += e.multiplicity;
    } else {
      EXPECT_EQ(e.multiplicity, 1u);
      if (e.segment) ++srp_segments;
      else ++srp_whole;
    }
  }
  EXPECT_EQ(srp_whole, 200u);
  // two PIP segments per full item here, so 100 items * 2 * 3
  EXPECT_EQ(pip_total, 600u);
  EXPECT_EQ(srp_segments, 200u);
}

TEST(Build, RepeatPipBalancesSingleInteraction) {
  // One SRP and one PIP segment per item: PIP total 300 equals the
  // 100 + 200 SRP segments.
  std::vector<CorpusItem> f;
  for (std::size_t i = 0; i < 100; ++i) f.push_back({"f" + std::to_string(1000 + i), 20, {{Phase::srp, 0, 9}, {Phase::pip, 10, 19}}});
  const auto m = build(f, srp_corpus(200), {100, 200, Strategy::repeat_pip, 3});
  std::size_t pip = 0, srp = 0;
  for (const auto& e : m.entries) (e.segment && e.segment->phase == Phase::pip ? pip : srp) += e.multiplicity;
  EXPECT_EQ(pip, 300u);
  EXPECT_EQ(srp, 300u);
}

TEST(Build, NoRepeatCountsEntries) {
  const auto m = build(full_corpus(100), srp_corpus(200), {100, 200, Strategy::no_repeat, 1});
  EXPECT_EQ(m.entries.size(), 100u * 4u + 200u);
  for (const auto& e : m.entries) EXPECT_EQ(e.multiplicity, 1u);
}

TEST(Build, RepeatFullBoostsEverySegment) {
  const auto m = build(full_corpus(50), srp_corpus(200), {40, 130, Strategy::repeat_full, 2});
  for (const auto& e : m.entries) EXPECT_EQ(e.multiplicity, e.side == CorpusSide::full ? 4u : 1u);
}

TEST(Build, SamplesWithoutReplacement) {
  const auto m = build(full_corpus(120), srp_corpus(300), {100, 200, Strategy::no_repeat, 5});
  std::set<std::string> full_ids, srp_ids;
  for (const auto& e : m.entries) (e.side == CorpusSide::full ? full_ids : srp_ids).insert(e.source);
  EXPECT_EQ(full_ids.size(), 100u);
  EXPECT_EQ(srp_ids.size(), 200u);
}

TEST(Build, NoRepeatIsSubMultisetOfRepeats) {
  const auto f = full_corpus(80);
  const auto s = srp_corpus(90);
  const auto base = multiset(build(f, s, {30, 70, Strategy::no_repeat, 9}));
  for (Strategy st : {Strategy::repeat_full, Strategy::repeat_pip}) {
    const auto other = multiset(build(f, s, {30, 70, st, 9}));
    for (const auto& [k, n] : base) {
      ASSERT_TRUE(other.count(k));
      EXPECT_LE(n, other.at(k));
    }
  }
}

TEST(Build, DeterministicAndOrderIndependent) {
  auto f = full_corpus(60);
  const auto s = srp_corpus(60);
  const auto a = to_json(build(f, s, {20, 40, Strategy::repeat_pip, 11})).dump();
  std::reverse(f.begin(), f.end());
  const auto b = to_json(build(f, s, {20, 40, Strategy::repeat_pip, 11})).dump();
  EXPECT_EQ(a, b);
  const auto c = to_json(build(f, s, {20, 40, Strategy::repeat_pip, 12})).dump();
  EXPECT_NE(a, c);
}

TEST(Build, DigestSurvivesRoundTrip) {
  const auto m = build(full_corpus(30), srp_corpus(30), {10, 20, Strategy::repeat_pip, 4});
  const auto j = to_json(m);
  const auto back = manifest_from_json(nlohmann::json::parse(j.dump(2)));
  EXPECT_EQ(back.digest, m.digest);
  EXPECT_EQ(manifest_digest(back), m.digest);
  EXPECT_EQ(to_json(back).dump(), j.dump());
}

TEST(Build, Errors) {
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::io;
  };
  EXPECT_EQ(code([] { build(full_corpus(5), srp_corpus(5), {0, 3, Strategy::repeat_pip, 1}); }),
            Errc::strategy_undefined);
  EXPECT_EQ(code([] { build(full_corpus(5), srp_corpus(5), {6, 3, Strategy::no_repeat, 1}); }),
            Errc::insufficient_corpus);
  EXPECT_EQ(code([] { build(full_corpus(5), srp_corpus(5), {2, 6, Strategy::no_repeat, 1}); }),
            Errc::insufficient_corpus);
  EXPECT_EQ(code([] { build(full_corpus(5), srp_corpus(5), {0, 0, Strategy::no_repeat, 1}); }),
            Errc::invalid_argument);
  // n1 = 0 is fine without repetition
  EXPECT_EQ(build(full_corpus(5), srp_corpus(5), {0, 3, Strategy::no_repeat, 1}).p_srp(), 1.0);
}

TEST(Build, StrategyNames) {
  EXPECT_EQ(parse_strategy("repeat-pip"), Strategy::repeat_pip);
  EXPECT_EQ(parse_strategy("repeat_full"), Strategy::repeat_full);
  EXPECT_THROW(parse_strategy("sometimes"), Error);
}
