#pragma once

// Mixture datasets: n1 full-stage trajectories (kept as their SRP/PIP
// segments) united with n2 independently collected SRP-only trajectories.
// Balancing strategies repeat segments of the full-stage side
// R = floor(n2 / n1) extra times:
//   no_repeat    every entry once
//   repeat_full  every segment of a sampled full trajectory 1 + R times
//   repeat_pip   only PIP segments of sampled full trajectories 1 + R times
// Manifests reference sources by id; they never copy trajectory data.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graspmix/error.hpp"
#include "graspmix/format.hpp"
#include "graspmix/rng.hpp"
#include "graspmix/sha256.hpp"
#include "graspmix/traj.hpp"

namespace graspmix {

enum class Strategy { no_repeat, repeat_full, repeat_pip };

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::no_repeat: return "no-repeat";
    case Strategy::repeat_full: return "repeat-full";
    case Strategy::repeat_pip: return "repeat-pip";
  }
  return "?";
}

inline Strategy parse_strategy(std::string_view s) {
  if (s == "no-repeat" || s == "no_repeat") return Strategy::no_repeat;
  if (s == "repeat-full" || s == "repeat_full") return Strategy::repeat_full;
  if (s == "repeat-pip" || s == "repeat_pip") return Strategy::repeat_pip;
  fail(Errc::invalid_argument, "unknown strategy '" + std::string(s) + "'");
}

struct MixtureSpec {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  Strategy strategy = Strategy::no_repeat;
  std::uint64_t seed = 0;
};

/// n2 / (n1 + n2).
inline double p_srp(std::size_t n1, std::size_t n2) {
  require(n1 + n2 >= 1, Errc::invalid_argument, "p_srp needs n1 + n2 >= 1");
  return static_cast<double>(n2) / static_cast<double>(n1 + n2);
}

/// One trajectory available to the mixer. Full-stage items carry their
/// segmentation; SRP-only items are referenced whole.
struct CorpusItem {
  std::string id;
  std::size_t length = 0;
  std::vector<Segment> segments;
};

inline CorpusItem corpus_item(std::string id, const SegmentedTrajectory& st) {
  return {std::move(id), st.trajectory.size(), st.segments};
}

enum class CorpusSide { full, srp };

struct ManifestEntry {
  CorpusSide side = CorpusSide::full;
  std::string source;
  std::optional<Segment> segment;  // nullopt: the whole trajectory
  std::size_t multiplicity = 1;
};

struct MixtureManifest {
  MixtureSpec spec;
  std::size_t repeat_extra = 0;  // R
  std::vector<ManifestEntry> entries;
  nlohmann::json inputs = nlohmann::json::object();  // provenance echo, covered by the digest
  std::string digest;

  double p_srp() const { return graspmix::p_srp(spec.n1, spec.n2); }

  /// p_srp rounded to 6 decimals, as written to disk.
  double p_srp_rounded() const { return std::round(p_srp() * 1e6) / 1e6; }
};

namespace detail {

inline nlohmann::json manifest_body(const MixtureManifest& m) {
  using nlohmann::json;
  json entries = json::array();
  for (const auto& e : m.entries) {
    json j = {{"corpus", e.side == CorpusSide::full ? "full" : "srp"},
              {"source", e.source},
              {"multiplicity", e.multiplicity}};
    if (e.segment) {
      j["phase"] = std::string(to_string(e.segment->phase));
      j["first"] = e.segment->first;
      j["last"] = e.segment->last;
    } else {
      j["whole"] = true;
    }
    entries.push_back(std::move(j));
  }
  return {{"format", formats::manifest.to_json()},
          {"spec",
           {{"n1", m.spec.n1},
            {"n2", m.spec.n2},
            {"strategy", std::string(to_string(m.spec.strategy))},
            {"seed", m.spec.seed}}},
          {"p_srp", m.p_srp_rounded()},
          {"p_srp_exact", {m.spec.n2, m.spec.n1 + m.spec.n2}},
          {"repeat_extra", m.repeat_extra},
          {"inputs", m.inputs},
          {"entries", std::move(entries)}};
}

}  // namespace detail

/// SHA-256 over the compact, key-sorted serialization of everything but the
/// digest itself.
inline std::string manifest_digest(const MixtureManifest& m) {
  return "sha256:" + sha256_hex(detail::manifest_body(m).dump());
}

inline nlohmann::json to_json(const MixtureManifest& m) {
  auto j = detail::manifest_body(m);
  j["digest"] = manifest_digest(m);
  return j;
}

inline MixtureManifest manifest_from_json(const nlohmann::json& j) {
  check_format(j, formats::manifest);
  MixtureManifest m;
  try {
    const auto& s = j.at("spec");
    m.spec = {s.at("n1").get<std::size_t>(), s.at("n2").get<std::size_t>(),
              parse_strategy(s.at("strategy").get<std::string>()), s.at("seed").get<std::uint64_t>()};
    m.repeat_extra = j.at("repeat_extra").get<std::size_t>();
    m.inputs = j.value("inputs", nlohmann::json::object());
    for (const auto& e : j.at("entries")) {
      ManifestEntry entry;
      entry.side = e.at("corpus").get<std::string>() == "full" ? CorpusSide::full : CorpusSide::srp;
      entry.source = e.at("source").get<std::string>();
      entry.multiplicity = e.at("multiplicity").get<std::size_t>();
      if (!e.value("whole", false)) {
        entry.segment = Segment{parse_phase(e.at("phase").get<std::string>()), e.at("first").get<std::size_t>(),
                                e.at("last").get<std::size_t>()};
      }
      m.entries.push_back(std::move(entry));
    }
    m.digest = j.at("digest").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::format, std::string("malformed manifest: ") + e.what());
  }
  return m;
}

namespace detail {

inline std::vector<std::size_t> sorted_by_id(std::span<const CorpusItem> items) {
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return items[a].id < items[b].id; });
  return order;
}

}  // namespace detail

/// Samples n1 full and n2 SRP-only trajectories without replacement and
/// applies the balancing strategy. Corpora are ordered by id before
/// sampling, so the result does not depend on the order items are passed in.
inline MixtureManifest build(std::span<const CorpusItem> full_corpus, std::span<const CorpusItem> srp_corpus,
                             const MixtureSpec& spec) {
  require(spec.n1 + spec.n2 >= 1, Errc::invalid_argument, "mixture needs n1 + n2 >= 1");
  require(spec.n1 > 0 || spec.strategy == Strategy::no_repeat, Errc::strategy_undefined,
          "repeat strategies need n1 > 0");
  require(full_corpus.size() >= spec.n1, Errc::insufficient_corpus,
          "full corpus has " + std::to_string(full_corpus.size()) + " trajectories, n1 = " + std::to_string(spec.n1));
  require(srp_corpus.size() >= spec.n2, Errc::insufficient_corpus,
          "SRP corpus has " + std::to_string(srp_corpus.size()) + " trajectories, n2 = " + std::to_string(spec.n2));

  MixtureManifest m;
  m.spec = spec;
  m.repeat_extra = spec.n1 > 0 ? spec.n2 / spec.n1 : 0;
  const std::size_t boosted = 1 + m.repeat_extra;

  const auto full_order = detail::sorted_by_id(full_corpus);
  Rng full_rng(spec.seed, Stream::mixture_full);
  for (auto pick : sample_without_replacement(full_corpus.size(), spec.n1, full_rng)) {
    const CorpusItem& item = full_corpus[full_order[pick]];
    require(is_partition(item.segments, item.length), Errc::invalid_argument,
            "full-stage trajectory '" + item.id + "' is not segmented");
    for (const auto& seg : item.segments) {
      std::size_t mult = 1;
      if (spec.strategy == Strategy::repeat_full) mult = boosted;
      if (spec.strategy == Strategy::repeat_pip && seg.phase == Phase::pip) mult = boosted;
      m.entries.push_back({CorpusSide::full, item.id, seg, mult});
    }
  }

  const auto srp_order = detail::sorted_by_id(srp_corpus);
  Rng srp_rng(spec.seed, Stream::mixture_srp);
  for (auto pick : sample_without_replacement(srp_corpus.size(), spec.n2, srp_rng)) {
    m.entries.push_back({CorpusSide::srp, srp_corpus[srp_order[pick]].id, std::nullopt, 1});
  }
  m.digest = manifest_digest(m);
  return m;
}

}  // namespace graspmix
