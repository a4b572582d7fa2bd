// sbam: synthesize demonstrations, learn action models, execute and cross-validate them.
//
// Exit codes: 0 success, 1 usage error, 2 invalid input, 3 runtime failure.

#include "sbam/sbam.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using sbam::io::Json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

struct RunConfig {
  sbam::LearningConfig learning;
  sbam::ExecutorConfig executor;
  sbam::synth::SynthConfig synth;
  std::uint64_t seed = 1;
};

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  if (path.empty()) return cfg;
  const Json j = sbam::io::read_json_file(path);
  sbam::io::detail::check_keys(j, Json{{"learning", 0}, {"executor", 0}, {"synth", 0}, {"seed", 0}}, path);
  if (j.contains("learning")) sbam::io::update_from_json(cfg.learning, j.at("learning"), path + ".learning");
  if (j.contains("executor")) sbam::io::update_from_json(cfg.executor, j.at("executor"), path + ".executor");
  if (j.contains("synth")) {
    const Json& s = j.at("synth");
    sbam::io::detail::check_keys(s, Json{{"n_demos", 0}, {"noise_sigma", 0}, {"duration", 0}, {"rate", 0}},
                                 path + ".synth");
    if (s.contains("n_demos")) cfg.synth.n_demos = s.at("n_demos").get<int>();
    if (s.contains("noise_sigma")) cfg.synth.noise_sigma = s.at("noise_sigma").get<double>();
    if (s.contains("duration")) cfg.synth.duration = s.at("duration").get<double>();
    if (s.contains("rate")) cfg.synth.rate = s.at("rate").get<double>();
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

Json config_json(const RunConfig& cfg) {
  Json j;
  j["seed"] = cfg.seed;
  j["learning"] = sbam::io::to_json(cfg.learning);
  j["executor"] = sbam::io::to_json(cfg.executor);
  return j;
}

/// Run directory bookkeeping: every written file is listed in manifest.json.
class RunDir {
 public:
  RunDir(fs::path root, std::string command) : root_(std::move(root)) {
    fs::create_directories(root_);
    manifest_ = sbam::io::detail::header("sbam/manifest");
    manifest_["command"] = std::move(command);
    manifest_["inputs"] = Json::array();
    manifest_["outputs"] = Json::array();
  }

  void input(const std::string& path) { manifest_["inputs"].push_back(path); }
  void set(const std::string& key, Json value) { manifest_[key] = std::move(value); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = root_ / name;
    sbam::io::write_text_file(p, text);
    manifest_["outputs"].push_back(name);
    return p;
  }

  void finish() { sbam::io::write_text_file(root_ / "manifest.json", sbam::io::dump(manifest_)); }

 private:
  fs::path root_;
  Json manifest_;
};

std::vector<sbam::SymbolicConstraintDef> symbolic_defs(const std::string& path) {
  return path.empty() ? sbam::default_symbolic_defs() : sbam::io::load_symbolic_defs(path);
}

std::vector<sbam::DemonstrationRecording> load_demos(const std::vector<std::string>& paths) {
  std::vector<sbam::DemonstrationRecording> demos;
  for (const auto& p : paths) demos.push_back(sbam::io::load_demonstration(p));
  return demos;
}

/// Robot path from the command line, else from the scene (relative to the scene file).
sbam::RobotModel load_robot_for(const std::string& robot_path, const std::string& scene_path,
                                const sbam::SceneSpec& scene) {
  if (!robot_path.empty()) return sbam::io::load_robot(robot_path);
  if (scene.robot.empty()) throw sbam::InputError("no robot model given and the scene names none");
  fs::path p = scene.robot;
  if (p.is_relative()) p = fs::path(scene_path).parent_path() / p;
  return sbam::io::load_robot(p);
}

std::string histogram_csv(const sbam::Sbam& model) {
  const auto h = sbam::keypoint_histogram(model.gcacots, model.config.keypoints);
  std::string out = "bin_center,count,filtered,peak\n";
  char buf[96];
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const bool peak = std::find(h.peaks.begin(), h.peaks.end(), b) != h.peaks.end();
    std::snprintf(buf, sizeof buf, "%.6g,%.0f,%.10g,%d\n", (b + 0.5) / h.counts.size(), h.counts[b], h.filtered[b],
                  peak ? 1 : 0);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_synth(const std::string& task, const std::string& out, RunConfig cfg) {
  cfg.synth.seed = cfg.seed;
  std::vector<sbam::DemonstrationRecording> demos;
  if (task == "pour") demos = sbam::synth::synth_pour(cfg.synth);
  else if (task == "roll") demos = sbam::synth::synth_roll(cfg.synth);
  else throw sbam::InputError("unknown task '" + task + "' (expected pour or roll)");
  RunDir run(out, "synth");
  Json synth;
  synth["task"] = task;
  synth["n_demos"] = cfg.synth.n_demos;
  synth["noise_sigma"] = cfg.synth.noise_sigma;
  synth["duration"] = cfg.synth.duration;
  synth["rate"] = cfg.synth.rate;
  synth["seed"] = cfg.seed;
  run.set("synth", synth);
  for (std::size_t d = 0; d < demos.size(); ++d) {
    char name[32];
    std::snprintf(name, sizeof name, "demo_%02zu.json", d);
    run.write(name, sbam::io::dump(sbam::io::to_json(demos[d])));
  }
  run.finish();
  std::cout << "wrote " << demos.size() << " " << task << " demonstrations to " << out << "\n";
  return 0;
}

int cmd_learn(const std::vector<std::string>& demo_paths, const std::string& kind, const std::string& ssac,
              const std::string& out, const RunConfig& cfg) {
  const auto demos = load_demos(demo_paths);
  const auto k = sbam::parse_constraint_kind(kind);
  const auto learned = sbam::learn_sbam(demos, k, symbolic_defs(ssac), cfg.learning);
  RunDir run(out, "learn");
  for (const auto& p : demo_paths) run.input(p);
  run.set("config", config_json(cfg));
  run.write("sbam.json", sbam::io::dump(sbam::io::to_json(learned.sbam)));
  run.write("tracks.csv", sbam::tracks_csv(learned.tracks));
  run.write("histogram.csv", histogram_csv(learned.sbam));
  run.finish();
  std::cout << "learned " << sbam::to_string(k) << " SBAM from " << learned.sbam.demo_count << " demonstrations, "
            << learned.sbam.gcacots.size() << " GCACOTs, " << learned.sbam.global_keypoints.size()
            << " global keypoints\n";
  return 0;
}

void write_execution(RunDir& run, const sbam::ExecutionResult& result) {
  run.write("execution.json", sbam::io::dump(sbam::io::to_json(result)));
  run.write("trajectory.csv", sbam::io::trajectory_csv(result));
  run.write("breakdown.csv", sbam::io::breakdown_csv(result));
}

int cmd_execute(const std::string& sbam_path, const std::string& scene_path, const std::string& robot_path,
                const std::string& out, const RunConfig& cfg) {
  const auto model = sbam::io::load_sbam(sbam_path);
  const auto scene = sbam::io::load_scene(scene_path);
  const auto robot = load_robot_for(robot_path, scene_path, scene);
  const auto start = std::chrono::steady_clock::now();
  const auto result = sbam::execute_sbam(model, scene, robot, cfg.executor);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  RunDir run(out, "execute");
  run.input(sbam_path);
  run.input(scene_path);
  if (!robot_path.empty()) run.input(robot_path);
  run.set("config", config_json(cfg));
  write_execution(run, result);
  run.finish();
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  std::printf("executed %zu keypoints in %.2f s\n", result.keypoints.size(), seconds);
  for (const auto& kp : result.keypoints)
    std::printf("  t=%.3f  t_s=%.4f  t_h=%.4f  t_d=%.4f  total=%.4f\n", kp.t, kp.breakdown.t_s, kp.breakdown.t_h,
                kp.breakdown.t_d, kp.breakdown.total);
  return 0;
}

int cmd_crossval(const std::vector<std::string>& demo_paths, const std::string& kind, const std::string& ssac,
                 const std::string& scene_path, const std::string& robot_path, int jobs, const std::string& out,
                 const RunConfig& cfg) {
  const auto demos = load_demos(demo_paths);
  const auto k = sbam::parse_constraint_kind(kind);
  const auto scene = sbam::io::load_scene(scene_path);
  const auto robot = load_robot_for(robot_path, scene_path, scene);
  sbam::CrossvalConfig cv;
  cv.learning = cfg.learning;
  cv.executor = cfg.executor;
  cv.jobs = jobs;
  const auto start = std::chrono::steady_clock::now();
  const auto report = sbam::crossval(demos, k, symbolic_defs(ssac), scene, robot, cv);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunDir run(out, "crossval");
  for (const auto& p : demo_paths) run.input(p);
  run.input(scene_path);
  run.set("config", config_json(cfg));
  const std::string table = sbam::format_crossval_table(
      report, "Affordance constraint similarity in mm, leave-one-out over " + std::to_string(demos.size()) + " folds");
  run.write("report.txt", table);
  std::string csv = "pair,type,avg,std,min\n";
  for (const auto& r : report.rows)
    csv += "\"" + r.pair.label() + "\"," + sbam::to_string(k) + "," + sbam::io::detail::fmt(r.avg) + "," +
           sbam::io::detail::fmt(r.std) + "," + sbam::io::detail::fmt(r.min) + "\n";
  run.write("report.csv", csv);
  std::string folds = "fold,pair,avg,std,min\n";
  std::string bands = "fold,t,pair,dimension,value,mean,std,weight,inside\n";
  std::size_t inside = 0, total = 0;
  for (const auto& f : report.folds) {
    for (const auto& d : f.distances)
      folds += std::to_string(f.held_out) + ",\"" + d.pair.label() + "\"," + sbam::io::detail::fmt(d.avg) + "," +
               sbam::io::detail::fmt(d.std) + "," + sbam::io::detail::fmt(d.min) + "\n";
    for (const auto& b : f.bands) {
      bands += std::to_string(f.held_out) + "," + sbam::io::detail::fmt(b.t) + ",\"" + b.pair.label() + "\"," +
               b.dimension + "," + sbam::io::detail::fmt(b.value) + "," + sbam::io::detail::fmt(b.mean) + "," +
               sbam::io::detail::fmt(b.std) + "," + sbam::io::detail::fmt(b.weight) + "," + (b.inside ? "1" : "0") +
               "\n";
      inside += b.inside;
      ++total;
    }
    char name[48];
    std::snprintf(name, sizeof name, "fold_%02zu_execution.json", f.held_out);
    run.write(name, sbam::io::dump(sbam::io::to_json(f.execution)));
  }
  run.write("folds.csv", folds);
  run.write("bands.csv", bands);
  run.finish();
  std::cout << table;
  std::printf("constraint bands satisfied: %zu / %zu (weight > 0.5, 3 std)\n", inside, total);
  std::printf("crossval finished in %.1f s\n", seconds);
  return 0;
}

int cmd_inspect(const std::string& sbam_path) {
  const auto m = sbam::io::load_sbam(sbam_path);
  std::printf("kind: %s\ndemonstrations: %d\nGCACOTs: %zu\nglobal keypoints:", sbam::to_string(m.kind).c_str(),
              m.demo_count, m.gcacots.size());
  for (double t : m.global_keypoints) std::printf(" %.3f", t);
  std::printf("\n");
  for (const auto& pair : m.pairs()) {
    std::printf("%s\n", pair.label().c_str());
    for (const auto& g : m.gcacots) {
      if (!(g.pair == pair)) continue;
      std::printf("  %-10s", g.dimension.c_str());
      for (const auto& kp : g.keypoints) std::printf(" (%.2f: %.3g +- %.3g, n=%d)", kp.t, kp.mean, kp.stddev, kp.n);
      std::printf("\n");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn spatial bimanual action models from demonstrations and execute them on a robot"};
  app.require_subcommand(1);
  std::string config_path;
  std::uint64_t seed = 1;
  bool seed_given = false;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { seed = s; seed_given = true; },
                                         "random seed");

  std::string out = "run";
  std::string kind = "cartesian", ssac, scene_path, robot_path, sbam_path, task = "pour";
  std::vector<std::string> demos;
  int jobs = 1;
  int n_demos = -1;
  double sigma = -1.0, duration = -1.0;

  auto* synth = app.add_subcommand("synth", "generate synthetic demonstrations");
  synth->add_option("--task", task, "pour or roll")->check(CLI::IsMember({"pour", "roll"}));
  synth->add_option("--demos", n_demos, "number of demonstrations")->check(CLI::PositiveNumber);
  synth->add_option("--sigma", sigma, "position noise in mm")->check(CLI::NonNegativeNumber);
  synth->add_option("--duration", duration, "demonstration length in s")->check(CLI::PositiveNumber);
  synth->add_option("--out", out, "run directory");

  auto* learn = app.add_subcommand("learn", "learn an SBAM from demonstrations");
  learn->add_option("demos", demos, "demonstration files")->required()->check(CLI::ExistingFile);
  learn->add_option("--kind", kind, "cartesian, cylindrical or symbolic");
  learn->add_option("--ssac", ssac, "symbolic constraint set (default: built-in table)")->check(CLI::ExistingFile);
  learn->add_option("--out", out, "run directory");

  auto* execute = app.add_subcommand("execute", "execute an SBAM on a robot");
  execute->add_option("--sbam", sbam_path, "SBAM file")->required()->check(CLI::ExistingFile);
  execute->add_option("--scene", scene_path, "scene file")->required()->check(CLI::ExistingFile);
  execute->add_option("--robot", robot_path, "robot model (default: the one named by the scene)")
      ->check(CLI::ExistingFile);
  execute->add_option("--out", out, "run directory");

  auto* cv = app.add_subcommand("crossval", "leave-one-out cross-validation");
  cv->add_option("demos", demos, "demonstration files")->required()->check(CLI::ExistingFile);
  cv->add_option("--kind", kind, "cartesian, cylindrical or symbolic");
  cv->add_option("--ssac", ssac, "symbolic constraint set")->check(CLI::ExistingFile);
  cv->add_option("--scene", scene_path, "scene template")->required()->check(CLI::ExistingFile);
  cv->add_option("--robot", robot_path, "robot model")->check(CLI::ExistingFile);
  cv->add_option("--jobs", jobs, "folds run concurrently")->check(CLI::PositiveNumber);
  cv->add_option("--out", out, "run directory");

  auto* inspect = app.add_subcommand("inspect", "print an SBAM summary");
  inspect->add_option("sbam", sbam_path, "SBAM file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (seed_given) cfg.seed = seed;
    if (n_demos > 0) cfg.synth.n_demos = n_demos;
    if (sigma >= 0.0) cfg.synth.noise_sigma = sigma;
    if (duration > 0.0) cfg.synth.duration = duration;
    if (*synth) return cmd_synth(task, out, cfg);
    if (*learn) return cmd_learn(demos, kind, ssac, out, cfg);
    if (*execute) return cmd_execute(sbam_path, scene_path, robot_path, out, cfg);
    if (*cv) return cmd_crossval(demos, kind, ssac, scene_path, robot_path, jobs, out, cfg);
    if (*inspect) return cmd_inspect(sbam_path);
  } catch (const sbam::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const nlohmann::ordered_json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
