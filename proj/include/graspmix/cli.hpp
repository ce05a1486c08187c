#pragma once

// graspmix command-line driver. Exit codes:
//   0 success, 1 usage error, 2 input/format error, 3 domain error.
// Randomized subcommands require --seed; nothing reads the clock or the
// entropy pool, so identical argv gives identical output files.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "graspmix/analysis.hpp"
#include "graspmix/error.hpp"
#include "graspmix/format.hpp"
#include "graspmix/grasp.hpp"
#include "graspmix/io/csv.hpp"
#include "graspmix/io/labels_io.hpp"
#include "graspmix/io/ply.hpp"
#include "graspmix/io/trajectory_io.hpp"
#include "graspmix/mixture.hpp"
#include "graspmix/parallel.hpp"
#include "graspmix/rng.hpp"
#include "graspmix/synth.hpp"
#include "graspmix/traj.hpp"

namespace graspmix::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUsage = 1, kInput = 2, kDomain = 3 };

inline int exit_code(Errc c) {
  switch (c) {
    case Errc::format:
    case Errc::io:
    case Errc::missing_target:
    case Errc::invalid_trajectory:
    case Errc::empty_input:
    case Errc::insufficient_corpus:
      return kInput;
    default:
      return kDomain;
  }
}

/// Radians, or degrees with a "deg" suffix ("60deg").
inline double parse_angle(const std::string& text) {
  std::string s = text;
  double scale = 1.0;
  if (s.size() > 3 && s.compare(s.size() - 3, 3, "deg") == 0) {
    s.resize(s.size() - 3);
    scale = std::numbers::pi / 180.0;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == s.size() && used > 0 && std::isfinite(v), Errc::invalid_argument, "cannot parse angle '" + text + "'");
  return v * scale;
}

namespace detail {

struct SegFlags {
  double dist = 0.2;
  std::string angle = "60deg";
  double close = 0.1;
  double lift = 0.02;
  std::size_t hold = 3;
  bool use_gt = false;

  void add(CLI::App* app) {
    app->add_option("--dist", dist, "PIP distance threshold (m)")->capture_default_str();
    app->add_option("--angle", angle, "PIP approach-angle threshold (radians or e.g. 60deg)")->capture_default_str();
    app->add_option("--close", close, "gripper fraction counted as closed")->capture_default_str();
    app->add_option("--lift", lift, "target displacement that ends an interaction (m)")->capture_default_str();
    app->add_option("--hold", hold, "steps the gripper must stay closed")->capture_default_str();
    app->add_flag("--use-gt", use_gt, "use stored ground-truth phases when every step has one");
  }

  SegmentationConfig config() const {
    SegmentationConfig c;
    c.dist_thresh = dist;
    c.angle_thresh = parse_angle(angle);
    c.close_thresh = close;
    c.lift_thresh = lift;
    c.hold_steps = hold;
    c.use_ground_truth = use_gt;
    c.validate();
    return c;
  }
};

inline void write_json(const fs::path& path, const nlohmann::json& j) { io::write_text(path, j.dump(2) + "\n"); }

inline void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  require(!ec && fs::is_directory(p), Errc::io, "cannot create directory " + p.string());
}

inline std::vector<fs::path> list_ext(const fs::path& path, const std::string& ext) {
  require(fs::exists(path), Errc::io, "no such file or directory: " + path.string());
  std::vector<fs::path> files;
  if (!fs::is_directory(path)) return {path};
  for (const auto& e : fs::directory_iterator(path)) {
    if (e.is_regular_file() && e.path().extension() == ext) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

/// Reads trajectories and makes sure each carries a segmentation.
inline std::vector<io::TrajectoryFile> load_segmented(const std::vector<fs::path>& files, const SegmentationConfig& cfg,
                                                      unsigned threads) {
  std::vector<io::TrajectoryFile> out(files.size());
  parallel_for(files.size(), threads, [&](std::size_t i) {
    out[i] = io::read_trajectory(files[i]);
    if (!out[i].segments) {
      out[i].segments = segment(out[i].trajectory, cfg).segments;
      out[i].segmentation = io::config_json(cfg);
    }
  });
  return out;
}

// ---------------------------------------------------------------- subcommands

struct AnnotateCmd {
  std::string cloud, out;
  std::optional<std::uint64_t> seed;
  AnnotationParams params;
  GripperModel gripper;
  std::vector<double> finger_box, palm_box;
  unsigned threads = 1;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("annotate-grasps", "annotate force-closure grasp labels on ASCII PLY clouds");
    c->add_option("--cloud", cloud, "PLY file or directory of PLY files")->required();
    c->add_option("--out", out, "label file (or directory when --cloud is a directory)")->required();
    c->add_option("--seed", seed, "random seed")->required();
    c->add_option("--n-approach", params.n_approach, "approach directions N")->capture_default_str();
    c->add_option("--k-rolls", params.k_rolls, "in-plane rolls K")->capture_default_str();
    c->add_option("--m-seeds", params.m_seeds, "surface seeds M")->capture_default_str();
    c->add_option("--depths", params.depths, "depth offsets D (m), comma separated")->delimiter(',')->capture_default_str();
    c->add_option("--mu", params.mu, "friction coefficient")->capture_default_str();
    c->add_option("--opening", gripper.opening, "finger gap w (m)")->capture_default_str();
    c->add_option("--finger-length", gripper.finger_length, "closing-region depth L (m)")->capture_default_str();
    c->add_option("--min-bite", gripper.min_bite, "minimum bite depth (m)")->capture_default_str();
    c->add_option("--finger-box", finger_box, "finger box x,y,z (m)")->delimiter(',')->expected(3);
    c->add_option("--palm-box", palm_box, "palm box x,y,z (m)")->delimiter(',')->expected(3);
    c->add_option("--threads", threads, "worker threads")->capture_default_str();
  }

  int run(std::ostream& log) {
    params.seed = *seed;
    if (!finger_box.empty()) gripper.finger_extents = Vec3(finger_box[0], finger_box[1], finger_box[2]);
    if (!palm_box.empty()) gripper.palm_extents = Vec3(palm_box[0], palm_box[1], palm_box[2]);
    gripper.validate();
    params.validate();
    const fs::path in_path(cloud);
    const bool many = fs::is_directory(in_path);
    const auto files = list_ext(in_path, ".ply");
    if (many) ensure_dir(out);
    for (const auto& f : files) {
      const PointCloud pc = io::read_ply(f);
      const AnnotationResult r = annotate(pc, gripper, params, threads);
      const fs::path target = many ? fs::path(out) / (f.stem().string() + ".labels.json") : fs::path(out);
      write_json(target, io::labels_document(pc.object_id, params, gripper, r, {{"cloud", f.filename().string()}}));
      log << pc.object_id << ": " << r.labels.size() << " labels from " << r.candidates << " candidates\n";
    }
    return kOk;
  }
};

struct SegmentCmd {
  std::string in, out;
  SegFlags seg;
  unsigned threads = 1;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("segment", "split trajectories into SRP/PIP segments");
    c->add_option("--in", in, "trajectory file or directory")->required();
    c->add_option("--out", out, "output file or directory")->required();
    seg.add(c);
    c->add_option("--threads", threads, "worker threads")->capture_default_str();
  }

  int run(std::ostream& log) {
    const SegmentationConfig cfg = seg.config();
    const bool many = fs::is_directory(in);
    const auto files = io::list_jsonl(in);
    if (many) ensure_dir(out);
    std::vector<std::string> texts(files.size());
    std::vector<std::size_t> counts(files.size());
    parallel_for(files.size(), threads, [&](std::size_t i) {
      const auto tf = io::read_trajectory(files[i]);
      const auto st = segment(tf.trajectory, cfg);
      counts[i] = st.segments.size();
      texts[i] = io::trajectory_jsonl(tf.trajectory, &st.segments, io::config_json(cfg));
    });
    for (std::size_t i = 0; i < files.size(); ++i) {
      io::write_text(many ? fs::path(out) / files[i].filename() : fs::path(out), texts[i]);
    }
    std::size_t total = 0;
    for (auto c : counts) total += c;
    log << "segmented " << files.size() << " trajectories into " << total << " segments\n";
    return kOk;
  }
};

struct MixCmd {
  std::string full, srp, out, strategy;
  std::size_t n1 = 0, n2 = 0;
  std::optional<std::uint64_t> seed;
  SegFlags seg;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("mix", "build a mixture manifest from full-stage and SRP-only corpora");
    c->add_option("--full", full, "directory of full-stage trajectories")->required();
    c->add_option("--srp", srp, "directory of SRP-only trajectories")->required();
    c->add_option("--n1", n1, "full-stage trajectories to sample")->required();
    c->add_option("--n2", n2, "SRP-only trajectories to sample")->required();
    c->add_option("--strategy", strategy, "no-repeat | repeat-full | repeat-pip")->required();
    c->add_option("--seed", seed, "random seed")->required();
    c->add_option("--out", out, "manifest file")->required();
    seg.add(c);
  }

  int run(std::ostream& log) {
    const SegmentationConfig cfg = seg.config();
    const MixtureSpec spec{n1, n2, parse_strategy(strategy), *seed};
    const auto full_files = load_segmented(io::list_jsonl(full), cfg, 1);
    std::vector<CorpusItem> full_items, srp_items;
    for (const auto& f : full_files) full_items.push_back({f.id, f.trajectory.size(), *f.segments});
    for (const auto& p : io::list_jsonl(srp)) {
      const auto f = io::read_trajectory(p);
      srp_items.push_back({f.id, f.trajectory.size(), {}});
    }
    MixtureManifest m = build(full_items, srp_items, spec);
    m.inputs = {{"full", full},
                {"srp", srp},
                {"full_corpus_size", full_items.size()},
                {"srp_corpus_size", srp_items.size()},
                {"segmentation_for_unsegmented", io::config_json(cfg)}};
    const auto j = to_json(m);
    write_json(out, j);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", m.p_srp());
    log << "p_srp " << buf << ", " << m.entries.size() << " entries, " << j["digest"].get<std::string>() << "\n";
    return kOk;
  }
};

struct FitCmd {
  std::string csv, model = "log-proportion", out, plot;
  std::size_t plot_rows = 50;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("fit-scaling", "fit a logarithmic scaling law to (x, sr) points");
    c->add_option("--csv", csv, "CSV with header columns x, sr")->required();
    c->add_option("--model", model, "log-proportion | log-count")->capture_default_str();
    c->add_option("--out", out, "report file (default: stdout)");
    c->add_option("--plot-csv", plot, "write (x, fitted_sr) rows for plotting");
    c->add_option("--plot-rows", plot_rows, "rows in the plot table")->capture_default_str();
  }

  int run(std::ostream& log) {
    const auto pts = io::read_scaling_csv(csv);
    nlohmann::json report = {{"format", formats::fit_report.to_json()},
                             {"model", model},
                             {"inputs", {{"csv", csv}}},
                             {"n_points", pts.size()}};
    double lo = 0.0, hi = 0.0;
    if (!pts.empty()) {
      lo = hi = pts.front().x;
      for (const auto& p : pts) {
        lo = std::min(lo, p.x);
        hi = std::max(hi, p.x);
      }
    }
    std::string plot_text;
    if (model == "log-proportion") {
      const auto f = fit_log_proportion(pts);
      report["k"] = f.k;
      report["b"] = f.b;
      report["p_star"] = f.p_star;
      report["p_star_valid"] = f.p_star_valid;
      report["rss"] = f.rss;
      if (!plot.empty()) plot_text = io::plot_csv(lo, hi, plot_rows, [&](double x) { return f.predict(x); });
    } else if (model == "log-count") {
      const auto f = fit_log_count(pts);
      report["a"] = f.a;
      report["c"] = f.c;
      report["rss"] = f.rss;
      if (!plot.empty()) plot_text = io::plot_csv(lo, hi, plot_rows, [&](double x) { return f.predict(x); });
    } else {
      fail(Errc::invalid_argument, "unknown model '" + model + "'");
    }
    if (!plot.empty()) io::write_text(plot, plot_text);
    if (out.empty()) {
      log << report.dump(2) << "\n";
    } else {
      write_json(out, report);
    }
    return kOk;
  }
};

struct SynthCmd {
  std::string out, kind = "both";
  std::size_t count = 1;
  std::optional<std::uint64_t> seed;
  double noise = 0.0, step = 0.01, lift = 0.10;
  unsigned threads = 1;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("synth", "generate scripted pick trajectories with ground-truth phases");
    c->add_option("--out", out, "output directory")->required();
    c->add_option("--count", count, "trajectories per kind")->capture_default_str();
    c->add_option("--seed", seed, "random seed")->required();
    c->add_option("--kind", kind, "full | srp-only | both (both writes out/full and out/srp)")->capture_default_str();
    c->add_option("--noise", noise, "Gaussian end-effector position noise per axis (m)")->capture_default_str();
    c->add_option("--step", step, "path step length (m)")->capture_default_str();
    c->add_option("--lift", lift, "lift height (m)")->capture_default_str();
    c->add_option("--threads", threads, "worker threads")->capture_default_str();
  }

  int run(std::ostream& log) {
    require(kind == "full" || kind == "srp-only" || kind == "both", Errc::invalid_argument,
            "unknown kind '" + kind + "'");
    const bool do_full = kind != "srp-only";
    const bool do_srp = kind != "full";
    const fs::path root(out);
    const fs::path full_dir = kind == "both" ? root / "full" : root;
    const fs::path srp_dir = kind == "both" ? root / "srp" : root;
    if (do_full) ensure_dir(full_dir);
    if (do_srp) ensure_dir(srp_dir);
    std::vector<std::string> full_text(count), srp_text(count);
    parallel_for(count, threads, [&](std::size_t i) {
      SynthTaskSpec spec;
      spec.step_length = step;
      spec.lift_height = lift;
      spec.seed = derive_seed(*seed, Stream::synth_task, i);
      const std::uint64_t noise_seed = derive_seed(*seed, Stream::noise, i);
      if (do_full) full_text[i] = io::trajectory_jsonl(add_position_noise(gen_full(spec), noise, noise_seed));
      if (do_srp) srp_text[i] = io::trajectory_jsonl(add_position_noise(gen_srp_only(spec), noise, noise_seed));
    });
    char name[32];
    for (std::size_t i = 0; i < count; ++i) {
      std::snprintf(name, sizeof name, "%05zu.jsonl", i);
      if (do_full) io::write_text(full_dir / ("full_" + std::string(name)), full_text[i]);
      if (do_srp) io::write_text(srp_dir / ("srp_" + std::string(name)), srp_text[i]);
    }
    log << "wrote " << (do_full ? count : 0) << " full and " << (do_srp ? count : 0) << " SRP-only trajectories\n";
    return kOk;
  }
};

struct StatsCmd {
  std::vector<std::string> in;
  std::string out;
  SegFlags seg;
  unsigned threads = 1;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("stats", "corpus statistics (segments per phase, lengths)");
    c->add_option("--in", in, "trajectory files or directories")->required();
    c->add_option("--out", out, "report file (default: stdout)");
    seg.add(c);
    c->add_option("--threads", threads, "worker threads")->capture_default_str();
  }

  int run(std::ostream& log) {
    const SegmentationConfig cfg = seg.config();
    std::vector<fs::path> files;
    for (const auto& p : in) {
      const auto more = io::list_jsonl(p);
      files.insert(files.end(), more.begin(), more.end());
    }
    const auto loaded = load_segmented(files, cfg, threads);
    std::vector<SegmentedTrajectory> corpus;
    corpus.reserve(loaded.size());
    for (const auto& f : loaded) corpus.push_back({f.trajectory, *f.segments});
    const CorpusStats s = corpus_stats(corpus);
    nlohmann::json report = {{"format", formats::corpus_stats.to_json()},
                             {"inputs", {{"paths", in}, {"segmentation_for_unsegmented", io::config_json(cfg)}}},
                             {"full_trajectories", s.full_trajectories},
                             {"srp_only_trajectories", s.srp_only_trajectories},
                             {"srp_segments", s.srp_segments},
                             {"pip_segments", s.pip_segments},
                             {"mean_srp_segment_length", s.mean_srp_segment_length},
                             {"mean_pip_segment_length", s.mean_pip_segment_length},
                             {"mean_full_length", s.mean_full_length},
                             {"mean_srp_only_length", s.mean_srp_only_length},
                             {"full_to_srp_length_ratio", s.full_to_srp_length_ratio
                                                              ? nlohmann::json(*s.full_to_srp_length_ratio)
                                                              : nlohmann::json(nullptr)}};
    if (out.empty()) {
      log << report.dump(2) << "\n";
    } else {
      write_json(out, report);
    }
    return kOk;
  }
};

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"graspmix: grasp annotation, phase segmentation and mixture datasets"};
  app.require_subcommand(1);
  detail::AnnotateCmd annotate_cmd;
  detail::SegmentCmd segment_cmd;
  detail::MixCmd mix_cmd;
  detail::FitCmd fit_cmd;
  detail::SynthCmd synth_cmd;
  detail::StatsCmd stats_cmd;
  annotate_cmd.add(app);
  segment_cmd.add(app);
  mix_cmd.add(app);
  fit_cmd.add(app);
  synth_cmd.add(app);
  stats_cmd.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "annotate-grasps") return annotate_cmd.run(out);
    if (name == "segment") return segment_cmd.run(out);
    if (name == "mix") return mix_cmd.run(out);
    if (name == "fit-scaling") return fit_cmd.run(out);
    if (name == "synth") return synth_cmd.run(out);
    if (name == "stats") return stats_cmd.run(out);
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("graspmix");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace graspmix::cli
