// jsdf command-line front end: scene checking, dataset generation, training,
// evaluation, pose resolution, trajectory optimization, and sweep tables.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jsdf/dataset.hpp"
#include "jsdf/formats.hpp"
#include "jsdf/kinematics.hpp"
#include "jsdf/manifest.hpp"
#include "jsdf/optimize.hpp"
#include "jsdf/scene_io.hpp"
#include "jsdf/trainer.hpp"

namespace {

using namespace jsdf;

Pose parse_pose(const std::string& text) {
  std::vector<double> values;
  std::size_t at = 0;
  while (at <= text.size()) {
    std::size_t comma = text.find(',', at);
    if (comma == std::string::npos) comma = text.size();
    const std::string cell = text.substr(at, comma - at);
    if (cell.empty()) {
      throw std::runtime_error("empty pose component in '" + text + "'");
    }
    values.push_back(std::stod(cell));
    at = comma + 1;
  }
  Pose p(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) p[i] = values[i];
  return p;
}

std::vector<Pose> load_poses_jsonl(const std::string& path, int k) {
  const std::string text = read_file(path);
  std::vector<Pose> poses;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    if (!j.contains("theta")) continue;  // header or metadata line
    const auto& arr = j.at("theta");
    Pose p(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) p[i] = arr[i].get<double>();
    if (p.size() != k) {
      throw std::runtime_error("poses file line " + std::to_string(line_no) +
                               ": expected " + std::to_string(k) + " angles");
    }
    poses.push_back(std::move(p));
  }
  if (poses.empty()) {
    throw std::runtime_error("no poses found in " + path);
  }
  return poses;
}

struct TrainFlags {
  std::string data, scene, out, metrics_out;
  std::uint64_t seed = 0;
  int iterations = 10000;
  int batch = 512;
  double lr = 1e-3;
  double alpha = 0.1;
  int eval_every = 500;
  int save_every = 0;
  std::string variant = "hierarchical";
  std::string regularizer = "eikonal";
  std::string scale = "learned";
  std::string head = "sdf";
  std::string eik_points = "batch_uniform";
  int feature_dim = 8;
  int encoder_hidden = 32;
  int trunk_width = 512;
  int trunk_layers = 4;
  double leaky_slope = 0.01;
  double holdout = 0.1;
};

int cmd_train(const TrainFlags& f, const std::vector<std::string>& argv) {
  const Scene scene = load_scene(f.scene);
  const Dataset dataset = load_dataset(f.data);

  TrainConfig cfg;
  cfg.iterations = f.iterations;
  cfg.batch_size = f.batch;
  cfg.learning_rate = f.lr;
  cfg.alpha = f.alpha;
  cfg.eval_every = f.eval_every;
  cfg.seed = f.seed;
  cfg.holdout_fraction = f.holdout;
  cfg.field.feature_dim = f.feature_dim;
  cfg.field.encoder_hidden = f.encoder_hidden;
  cfg.field.trunk_width = f.trunk_width;
  cfg.field.trunk_layers = f.trunk_layers;
  cfg.field.leaky_slope = f.leaky_slope;

  if (f.variant == "hierarchical") {
    cfg.field.variant = EncoderVariant::kHierarchical;
  } else if (f.variant == "flattened") {
    cfg.field.variant = EncoderVariant::kFlattened;
  } else {
    throw std::runtime_error("unknown --variant: " + f.variant);
  }
  if (f.regularizer == "eikonal") {
    cfg.regularizer = Regularizer::kEikonal;
  } else if (f.regularizer == "none") {
    cfg.regularizer = Regularizer::kNone;
  } else {
    throw std::runtime_error("unknown --regularizer: " + f.regularizer);
  }
  if (f.scale == "learned") {
    cfg.scale = ScaleMode::kLearned;
  } else if (f.scale == "fixed_one") {
    cfg.scale = ScaleMode::kFixedOne;
  } else {
    throw std::runtime_error("unknown --scale: " + f.scale);
  }
  if (f.head == "sdf") {
    cfg.head = HeadMode::kSdfClassifier;
  } else if (f.head == "ndf") {
    cfg.head = HeadMode::kNdfRegression;
    cfg.regularizer = Regularizer::kNone;
  } else {
    throw std::runtime_error("unknown --head: " + f.head);
  }
  if (f.eik_points == "batch_uniform") {
    cfg.eik_points = EikonalPoints::kBatchPlusUniform;
  } else if (f.eik_points == "batch") {
    cfg.eik_points = EikonalPoints::kBatchOnly;
  } else {
    throw std::runtime_error("unknown --eik-points: " + f.eik_points);
  }

  TrainCallback on_eval = [&](const MetricsReport& r, const FieldParams& p) {
    std::printf("step %d  acc %s  bce %s  eik %s  gnorm %s\n", r.step,
                fmt_double(r.accuracy).c_str(), fmt_double(r.bce).c_str(),
                fmt_double(r.mean_eikonal).c_str(),
                fmt_double(r.mean_grad_norm).c_str());
    std::fflush(stdout);
    if (f.save_every > 0 && r.step > 0 && r.step % f.save_every == 0) {
      save_checkpoint(p, f.out);
    }
  };

  const TrainResult result =
      cfg.head == HeadMode::kNdfRegression
          ? train_ndf_baseline(dataset, scene.robot, cfg, on_eval)
          : train(dataset, scene.robot, cfg, on_eval);

  save_checkpoint(result.params, f.out);
  RunManifest manifest;
  manifest.command = "train";
  for (const std::string& a : argv) manifest.command += " " + a;
  manifest.config = {
      {"data", f.data},
      {"scene", f.scene},
      {"iterations", std::to_string(f.iterations)},
      {"batch", std::to_string(f.batch)},
      {"lr", fmt_double(f.lr)},
      {"alpha", fmt_double(f.alpha)},
      {"eval_every", std::to_string(f.eval_every)},
      {"variant", f.variant},
      {"regularizer", f.regularizer},
      {"scale", f.scale},
      {"head", f.head},
      {"eik_points", f.eik_points},
      {"feature_dim", std::to_string(f.feature_dim)},
      {"encoder_hidden", std::to_string(f.encoder_hidden)},
      {"trunk_width", std::to_string(f.trunk_width)},
      {"trunk_layers", std::to_string(f.trunk_layers)},
      {"leaky_slope", fmt_double(f.leaky_slope)},
      {"holdout", fmt_double(f.holdout)},
  };
  manifest.seed = f.seed;
  manifest.has_seed = true;
  manifest.inputs = {f.data, f.scene};
  manifest.outputs = {f.out};
  if (!f.metrics_out.empty()) {
    write_file(f.metrics_out, metrics_to_csv(result.metrics));
    manifest.outputs.push_back(f.metrics_out);
  }
  write_manifest(manifest, f.out);

  const MetricsReport& last = result.metrics.back();
  std::printf("final: accuracy %s  eikonal %s  grad_norm %s -> %s\n",
              fmt_double(last.accuracy).c_str(),
              fmt_double(last.mean_eikonal).c_str(),
              fmt_double(last.mean_grad_norm).c_str(), f.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learned joint-space collision fields for articulated robots"};
  app.require_subcommand(1);
  std::vector<std::string> raw_args(argv + 1, argv + argc);

  // ---- scene check ----
  auto* scene_cmd = app.add_subcommand("scene", "scene file utilities");
  scene_cmd->require_subcommand(1);
  auto* scene_check = scene_cmd->add_subcommand("check", "validate a scene");
  std::string scene_path;
  scene_check->add_option("scene", scene_path, "scene JSON")->required();

  // ---- data gen ----
  auto* data_cmd = app.add_subcommand("data", "dataset commands");
  data_cmd->require_subcommand(1);
  auto* data_gen = data_cmd->add_subcommand("gen", "sample a labeled dataset");
  std::string dg_scene, dg_out;
  int dg_n = 20000;
  double dg_tol = 0.05;
  std::uint64_t dg_seed = 0;
  int dg_ndf_k = 0;
  data_gen->add_option("--scene", dg_scene)->required();
  data_gen->add_option("--n", dg_n, "dataset size");
  data_gen->add_option("--balance-tol", dg_tol, "class balance tolerance");
  data_gen->add_option("--seed", dg_seed)->required();
  data_gen->add_option("--out", dg_out)->required();
  data_gen->add_option("--ndf-k", dg_ndf_k,
                       "fill ndf labels from the k nearest opposite samples");

  // ---- train ----
  auto* train_cmd = app.add_subcommand("train", "fit the collision field");
  TrainFlags tf;
  train_cmd->add_option("--data", tf.data)->required();
  train_cmd->add_option("--scene", tf.scene)->required();
  train_cmd->add_option("--out", tf.out)->required();
  train_cmd->add_option("--metrics-out", tf.metrics_out);
  train_cmd->add_option("--seed", tf.seed)->required();
  train_cmd->add_option("--iterations", tf.iterations);
  train_cmd->add_option("--batch", tf.batch);
  train_cmd->add_option("--lr", tf.lr);
  train_cmd->add_option("--alpha", tf.alpha);
  train_cmd->add_option("--eval-every", tf.eval_every);
  train_cmd->add_option("--save-every", tf.save_every,
                        "also write the checkpoint every N steps");
  train_cmd->add_option("--variant", tf.variant, "hierarchical|flattened");
  train_cmd->add_option("--regularizer", tf.regularizer, "eikonal|none");
  train_cmd->add_option("--scale", tf.scale, "learned|fixed_one");
  train_cmd->add_option("--head", tf.head, "sdf|ndf");
  train_cmd->add_option("--eik-points", tf.eik_points, "batch_uniform|batch");
  train_cmd->add_option("--feature-dim", tf.feature_dim);
  train_cmd->add_option("--encoder-hidden", tf.encoder_hidden);
  train_cmd->add_option("--trunk-width", tf.trunk_width);
  train_cmd->add_option("--trunk-layers", tf.trunk_layers);
  train_cmd->add_option("--leaky-slope", tf.leaky_slope);
  train_cmd->add_option("--holdout", tf.holdout);

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand("eval", "metrics of a checkpoint");
  std::string ev_ckpt, ev_data, ev_out;
  eval_cmd->add_option("--ckpt", ev_ckpt)->required();
  eval_cmd->add_option("--data", ev_data)->required();
  eval_cmd->add_option("--out", ev_out, "optional metrics CSV");

  // ---- resolve ----
  auto* resolve_cmd =
      app.add_subcommand("resolve", "descend poses out of collision");
  std::string rs_ckpt, rs_scene, rs_poses, rs_out, rs_traces, rs_mode = "sdf";
  double rs_lthres = -0.1, rs_lr = 0.01;
  int rs_max_iters = 1000, rs_sample = 0;
  std::uint64_t rs_seed = 0;
  resolve_cmd->add_option("--ckpt", rs_ckpt)->required();
  resolve_cmd->add_option("--scene", rs_scene)->required();
  resolve_cmd->add_option("--poses", rs_poses, "JSONL with theta records");
  resolve_cmd->add_option("--sample-collided", rs_sample,
                          "draw N oracle-collided poses instead");
  resolve_cmd->add_option("--seed", rs_seed, "required with --sample-collided");
  resolve_cmd->add_option("--l-thres", rs_lthres);
  resolve_cmd->add_option("--lr", rs_lr);
  resolve_cmd->add_option("--max-iters", rs_max_iters);
  resolve_cmd->add_option("--mode", rs_mode, "sdf|probability");
  resolve_cmd->add_option("--out", rs_out, "summary CSV")->required();
  resolve_cmd->add_option("--traces", rs_traces, "directory for trace CSVs");

  // ---- traj ----
  auto* traj_cmd =
      app.add_subcommand("traj", "optimize an interpolated trajectory");
  std::string tj_ckpt, tj_scene, tj_start, tj_end, tj_out, tj_trace_out;
  int tj_n = 100, tj_max_iters = 1000;
  double tj_g1 = 1.0, tj_g2 = 1.0, tj_lthres = -0.05, tj_lr = 0.01;
  traj_cmd->add_option("--ckpt", tj_ckpt)->required();
  traj_cmd->add_option("--scene", tj_scene)->required();
  traj_cmd->add_option("--start", tj_start, "comma-separated angles")
      ->required();
  traj_cmd->add_option("--end", tj_end, "comma-separated angles")->required();
  traj_cmd->add_option("--n", tj_n, "waypoint count");
  traj_cmd->add_option("--gamma1", tj_g1);
  traj_cmd->add_option("--gamma2", tj_g2);
  traj_cmd->add_option("--l-thres", tj_lthres);
  traj_cmd->add_option("--lr", tj_lr);
  traj_cmd->add_option("--max-iters", tj_max_iters);
  traj_cmd->add_option("--out", tj_out, "waypoint CSV")->required();
  traj_cmd->add_option("--trace-out", tj_trace_out, "loss trace CSV");

  // ---- tangent ----
  auto* tan_cmd = app.add_subcommand(
      "tangent", "goal steps projected onto the field level set");
  std::string tn_ckpt, tn_scene, tn_start, tn_end, tn_out;
  double tn_delta = 0.01, tn_tol = 1e-2;
  int tn_max_iters = 1000;
  tan_cmd->add_option("--ckpt", tn_ckpt)->required();
  tan_cmd->add_option("--scene", tn_scene)->required();
  tan_cmd->add_option("--start", tn_start)->required();
  tan_cmd->add_option("--end", tn_end)->required();
  tan_cmd->add_option("--delta", tn_delta, "step size");
  tan_cmd->add_option("--tol", tn_tol, "L1 stopping tolerance");
  tan_cmd->add_option("--max-iters", tn_max_iters);
  tan_cmd->add_option("--out", tn_out, "trace CSV")->required();

  // ---- sweep ----
  auto* sweep_cmd = app.add_subcommand("sweep", "resolution sweep tables");
  sweep_cmd->require_subcommand(1);
  auto* sweep_thr =
      sweep_cmd->add_subcommand("thresholds", "vary l_thres at fixed lr");
  auto* sweep_lrs =
      sweep_cmd->add_subcommand("lrs", "vary lr at fixed l_thres");
  std::string sw_ckpt, sw_scene, sw_out;
  int sw_n = 200, sw_max_iters = 1000;
  std::uint64_t sw_seed = 0;
  double sw_lr = 0.01, sw_lthres = -0.1;
  for (CLI::App* sub : {sweep_thr, sweep_lrs}) {
    sub->add_option("--ckpt", sw_ckpt)->required();
    sub->add_option("--scene", sw_scene)->required();
    sub->add_option("--out", sw_out)->required();
    sub->add_option("--n", sw_n, "collided pose count");
    sub->add_option("--seed", sw_seed)->required();
    sub->add_option("--max-iters", sw_max_iters);
  }
  sweep_thr->add_option("--lr", sw_lr);
  sweep_lrs->add_option("--l-thres", sw_lthres);

  try {
    app.parse(argc, argv);

    if (*scene_check) {
      const Scene scene = load_scene(scene_path);
      int capsules = 0;
      for (const auto& link : scene.robot.link_capsules) {
        capsules += static_cast<int>(link.size());
      }
      std::printf(
          "scene %s: K=%d links=%d capsules=%d obstacles=%zu self_pairs=%zu "
          "clearance=%s\n",
          scene.id.c_str(), scene.robot.joint_count(),
          scene.robot.link_count(), capsules, scene.obstacles.size(),
          scene.self_pairs.size(), fmt_double(scene.clearance).c_str());
      return 0;
    }

    if (*data_gen) {
      const Scene scene = load_scene(dg_scene);
      Dataset ds = generate_dataset(scene, dg_n, dg_tol, dg_seed);
      if (dg_ndf_k > 0) ds = ndf_distance_labels(ds, dg_ndf_k);
      save_dataset(ds, dg_out);
      RunManifest m;
      m.command = "data gen";
      for (const std::string& a : raw_args) m.command += " " + a;
      m.config = {{"scene", dg_scene},
                  {"n", std::to_string(dg_n)},
                  {"balance_tol", fmt_double(dg_tol)},
                  {"ndf_k", std::to_string(dg_ndf_k)}};
      m.seed = dg_seed;
      m.has_seed = true;
      m.inputs = {dg_scene};
      m.outputs = {dg_out};
      write_manifest(m, dg_out);
      const auto [free, collided] = ds.class_counts();
      std::printf("dataset %s: %zu samples (%d free, %d collided)\n",
                  dg_out.c_str(), ds.samples.size(), free, collided);
      return 0;
    }

    if (*train_cmd) {
      return cmd_train(tf, raw_args);
    }

    if (*eval_cmd) {
      const FieldParams params = load_checkpoint(ev_ckpt);
      const Dataset ds = load_dataset(ev_data);
      if (ds.joint_count != params.joint_count) {
        throw std::runtime_error("checkpoint K does not match dataset K");
      }
      // limits-only robot view rebuilt from the checkpoint
      RobotModel model;
      for (int k = 0; k < params.joint_count; ++k) {
        Joint j;
        j.parent = params.parent[k];
        j.axis = Eigen::Vector3d::UnitZ();
        j.lo = params.limit_lo[k];
        j.hi = params.limit_hi[k];
        model.joints.push_back(j);
      }
      model.link_capsules.resize(params.joint_count + 1);
      model.link_capsules[1].push_back(
          Capsule{Eigen::Vector3d::Zero(), Eigen::Vector3d(1, 0, 0), 0.1});
      const MetricsReport r = evaluate_metrics(params, model, ds.samples);
      std::printf("accuracy %s  bce %s  eikonal %s  grad_norm %s\n",
                  fmt_double(r.accuracy).c_str(), fmt_double(r.bce).c_str(),
                  fmt_double(r.mean_eikonal).c_str(),
                  fmt_double(r.mean_grad_norm).c_str());
      if (!ev_out.empty()) {
        write_file(ev_out, metrics_to_csv({r}));
        RunManifest m;
        m.command = "eval";
        for (const std::string& a : raw_args) m.command += " " + a;
        m.config = {{"ckpt", ev_ckpt}, {"data", ev_data}};
        m.inputs = {ev_ckpt, ev_data};
        m.outputs = {ev_out};
        write_manifest(m, ev_out);
      }
      return 0;
    }

    if (*resolve_cmd) {
      const Scene scene = load_scene(rs_scene);
      const FieldParams params = load_checkpoint(rs_ckpt);
      check_model_compatible(params, scene.robot);
      std::vector<Pose> poses;
      if (rs_sample > 0) {
        if (!resolve_cmd->count("--seed")) {
          throw std::runtime_error("--sample-collided requires --seed");
        }
        poses = sample_collided_poses(scene, rs_sample, rs_seed);
      } else if (!rs_poses.empty()) {
        poses = load_poses_jsonl(rs_poses, scene.robot.joint_count());
      } else {
        throw std::runtime_error("need --poses or --sample-collided");
      }
      ResolveConfig cfg;
      cfg.l_thres = rs_lthres;
      cfg.learning_rate = rs_lr;
      cfg.max_iters = rs_max_iters;
      if (rs_mode == "probability") {
        cfg.objective = ResolveObjective::kProbability;
      } else if (rs_mode != "sdf") {
        throw std::runtime_error("unknown --mode: " + rs_mode);
      }
      std::string summary =
          "pose,iters,converged,g_final,move_angle,pairs_before,pairs_after\n";
      for (std::size_t i = 0; i < poses.size(); ++i) {
        const int before = detect_collisions(scene, poses[i]).pair_count;
        const OptimTrace trace =
            resolve_pose(params, scene.robot, poses[i], cfg);
        const int after =
            detect_collisions(scene, trace.rows.back().pose).pair_count;
        summary +=
            csv_row({std::to_string(i), std::to_string(trace.iterations),
                     trace.converged ? "1" : "0",
                     fmt_double(trace.rows.back().g),
                     fmt_double(trace.move_angle), std::to_string(before),
                     std::to_string(after)});
        if (!rs_traces.empty()) {
          write_file(rs_traces + "/pose_" + std::to_string(i) + ".csv",
                     trace_to_csv(trace));
        }
      }
      write_file(rs_out, summary);
      RunManifest m;
      m.command = "resolve";
      for (const std::string& a : raw_args) m.command += " " + a;
      m.config = {{"ckpt", rs_ckpt},
                  {"scene", rs_scene},
                  {"l_thres", fmt_double(rs_lthres)},
                  {"lr", fmt_double(rs_lr)},
                  {"max_iters", std::to_string(rs_max_iters)},
                  {"mode", rs_mode}};
      if (!rs_poses.empty()) {
        m.config["poses"] = rs_poses;
        m.inputs = {rs_ckpt, rs_scene, rs_poses};
      } else {
        m.config["sample_collided"] = std::to_string(rs_sample);
        m.inputs = {rs_ckpt, rs_scene};
      }
      m.seed = rs_seed;
      m.has_seed = resolve_cmd->count("--seed") > 0;
      m.outputs = {rs_out};
      write_manifest(m, rs_out);
      std::printf("resolved %zu poses -> %s\n", poses.size(), rs_out.c_str());
      return 0;
    }

    if (*traj_cmd) {
      const Scene scene = load_scene(tj_scene);
      const FieldParams params = load_checkpoint(tj_ckpt);
      check_model_compatible(params, scene.robot);
      const Pose start = parse_pose(tj_start);
      const Pose end = parse_pose(tj_end);
      const std::vector<Pose> raw = interpolate_poses(start, end, tj_n);
      TrajConfig cfg;
      cfg.gamma1 = tj_g1;
      cfg.gamma2 = tj_g2;
      cfg.l_thres = tj_lthres;
      cfg.learning_rate = tj_lr;
      cfg.max_iters = tj_max_iters;
      const auto [path, trace] =
          optimize_trajectory(params, scene.robot, raw, cfg);
      write_file(tj_out, waypoints_to_csv(path));
      RunManifest m;
      m.command = "traj";
      for (const std::string& a : raw_args) m.command += " " + a;
      m.config = {{"ckpt", tj_ckpt},
                  {"scene", tj_scene},
                  {"start", tj_start},
                  {"end", tj_end},
                  {"n", std::to_string(tj_n)},
                  {"gamma1", fmt_double(tj_g1)},
                  {"gamma2", fmt_double(tj_g2)},
                  {"l_thres", fmt_double(tj_lthres)},
                  {"lr", fmt_double(tj_lr)},
                  {"max_iters", std::to_string(tj_max_iters)}};
      m.inputs = {tj_ckpt, tj_scene};
      m.outputs = {tj_out};
      if (!tj_trace_out.empty()) {
        write_file(tj_trace_out, trace_to_csv(trace));
        m.outputs.push_back(tj_trace_out);
      }
      write_manifest(m, tj_out);
      std::printf("trajectory: %d waypoints, converged=%d -> %s\n", tj_n,
                  trace.converged ? 1 : 0, tj_out.c_str());
      return 0;
    }

    if (*tan_cmd) {
      const Scene scene = load_scene(tn_scene);
      const FieldParams params = load_checkpoint(tn_ckpt);
      check_model_compatible(params, scene.robot);
      const auto [pose, trace] =
          tangent_descent(params, scene.robot, parse_pose(tn_start),
                          parse_pose(tn_end), tn_delta, tn_max_iters, tn_tol);
      write_file(tn_out, trace_to_csv(trace));
      RunManifest m;
      m.command = "tangent";
      for (const std::string& a : raw_args) m.command += " " + a;
      m.config = {{"ckpt", tn_ckpt},
                  {"scene", tn_scene},
                  {"start", tn_start},
                  {"end", tn_end},
                  {"delta", fmt_double(tn_delta)},
                  {"tol", fmt_double(tn_tol)},
                  {"max_iters", std::to_string(tn_max_iters)}};
      m.inputs = {tn_ckpt, tn_scene};
      m.outputs = {tn_out};
      write_manifest(m, tn_out);
      std::printf("tangent: %d iterations, converged=%d, fallbacks=%d -> %s\n",
                  trace.iterations, trace.converged ? 1 : 0,
                  trace.fallback_steps, tn_out.c_str());
      return 0;
    }

    if (*sweep_thr || *sweep_lrs) {
      const Scene scene = load_scene(sw_scene);
      const FieldParams params = load_checkpoint(sw_ckpt);
      check_model_compatible(params, scene.robot);
      const std::vector<Pose> poses =
          sample_collided_poses(scene, sw_n, sw_seed);
      std::vector<SweepRow> rows;
      std::string parameter_name;
      if (*sweep_thr) {
        rows = threshold_sweep(
            params, scene, poses,
            {0.0, -0.001, -0.005, -0.01, -0.02, -0.03, -0.04, -0.05, -0.1},
            sw_lr, sw_max_iters);
        parameter_name = "l_thres";
      } else {
        rows = lr_sweep(params, scene, poses,
                        {0.001, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0},
                        sw_lthres, sw_max_iters);
        parameter_name = "lr";
      }
      write_file(sw_out, sweep_to_csv(rows, parameter_name));
      RunManifest m;
      m.command = *sweep_thr ? "sweep thresholds" : "sweep lrs";
      for (const std::string& a : raw_args) m.command += " " + a;
      m.config = {{"ckpt", sw_ckpt},
                  {"scene", sw_scene},
                  {"n", std::to_string(sw_n)},
                  {"max_iters", std::to_string(sw_max_iters)}};
      if (*sweep_thr) m.config["lr"] = fmt_double(sw_lr);
      if (*sweep_lrs) m.config["l_thres"] = fmt_double(sw_lthres);
      m.seed = sw_seed;
      m.has_seed = true;
      m.inputs = {sw_ckpt, sw_scene};
      m.outputs = {sw_out};
      write_manifest(m, sw_out);
      std::printf("sweep -> %s\n", sw_out.c_str());
      return 0;
    }

    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help and friends
    }
    nlohmann::json err;
    err["error"] = "argument_error";
    err["message"] = e.what();
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return e.get_exit_code();
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = "runtime_error";
    err["message"] = e.what();
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  }
}
