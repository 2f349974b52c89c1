#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "jsdf/formats.hpp"

// End-to-end checks of the binary: exit codes, determinism of artifacts,
// manifest layout. Training-quality checks live in the acceptance suite.

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("jsdf_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

int run(const std::string& args) {
  const std::string cmd = std::string(JSDF_CLI_PATH) + " " + args +
                          " >/dev/null 2>/dev/null";
  return std::system(cmd.c_str());
}

int run_capture(const std::string& args, const std::string& out_file) {
  const std::string cmd = std::string(JSDF_CLI_PATH) + " " + args + " >" +
                          out_file + " 2>" + out_file + ".err";
  return std::system(cmd.c_str());
}

std::string scene() {
  return std::string(JSDF_SCENES_DIR) + "/planar4.json";
}

}  // namespace

TEST_CASE("scene check succeeds on the bundled scenes") {
  CHECK(run("scene check " + scene()) == 0);
  CHECK(run("scene check " + std::string(JSDF_SCENES_DIR) +
            "/spatial6.json") == 0);
}

TEST_CASE("scene check fails on schema violations") {
  TempDir tmp;
  jsdf::write_file(tmp.file("bad.json"), "{\"version\": 1}");
  CHECK(run("scene check " + tmp.file("bad.json")) != 0);
  jsdf::write_file(tmp.file("nonjson.json"), "not json at all");
  CHECK(run("scene check " + tmp.file("nonjson.json")) != 0);
}

TEST_CASE("unknown flags are rejected") {
  CHECK(run("data gen --scene " + scene() + " --does-not-exist 1") != 0);
}

TEST_CASE("data gen is byte-deterministic and writes a manifest") {
  TempDir tmp;
  const std::string base = "data gen --scene " + scene() +
                           " --n 300 --seed 7 --out ";
  REQUIRE(run(base + tmp.file("a.jsonl")) == 0);
  REQUIRE(run(base + tmp.file("b.jsonl")) == 0);
  CHECK(jsdf::read_file(tmp.file("a.jsonl")) ==
        jsdf::read_file(tmp.file("b.jsonl")));

  const std::string manifest_text =
      jsdf::read_file(tmp.file("a.jsonl") + ".manifest.json");
  const nlohmann::json manifest = nlohmann::json::parse(manifest_text);
  CHECK(manifest.at("seed") == 7);
  CHECK(manifest.at("config").at("n") == "300");
  CHECK(manifest.at("outputs").size() == 1);
  CHECK(manifest.at("inputs").contains(scene()));
  CHECK(manifest.contains("created"));
}

TEST_CASE("data gen requires a seed") {
  TempDir tmp;
  CHECK(run("data gen --scene " + scene() + " --n 100 --out " +
            tmp.file("x.jsonl")) != 0);
  CHECK_FALSE(fs::exists(tmp.file("x.jsonl")));
}

TEST_CASE("train, eval, resolve, traj, tangent, sweep round trip") {
  TempDir tmp;
  const std::string data = tmp.file("d.jsonl");
  REQUIRE(run("data gen --scene " + scene() + " --n 1200 --seed 3 --out " +
              data) == 0);

  // tiny but real training run through the CLI
  const std::string ckpt = tmp.file("f.json");
  const std::string train_flags =
      "train --data " + data + " --scene " + scene() + " --out " + ckpt +
      " --metrics-out " + tmp.file("m.csv") +
      " --seed 5 --iterations 300 --batch 128 --eval-every 150"
      " --trunk-width 32 --encoder-hidden 8 --feature-dim 6";
  REQUIRE(run_capture(train_flags, tmp.file("train.log")) == 0);
  REQUIRE(fs::exists(ckpt));
  const std::string metrics = jsdf::read_file(tmp.file("m.csv"));
  CHECK(metrics.rfind("step,bce,eikonal,accuracy,grad_norm\n", 0) == 0);

  // determinism: retrain into another file, byte-compare checkpoints
  const std::string ckpt2 = tmp.file("f2.json");
  REQUIRE(run_capture("train --data " + data + " --scene " + scene() +
                          " --out " + ckpt2 +
                          " --seed 5 --iterations 300 --batch 128"
                          " --eval-every 150 --trunk-width 32"
                          " --encoder-hidden 8 --feature-dim 6",
                      tmp.file("train2.log")) == 0);
  CHECK(jsdf::read_file(ckpt) == jsdf::read_file(ckpt2));

  // eval runs from checkpoint + data alone
  REQUIRE(run_capture("eval --ckpt " + ckpt + " --data " + data,
                      tmp.file("eval.log")) == 0);

  // checkpoint / scene mismatch is refused
  CHECK(run("eval --ckpt " + ckpt + " --data " + data + " --out " +
            tmp.file("e.csv")) == 0);
  CHECK(run("resolve --ckpt " + ckpt + " --scene " +
            std::string(JSDF_SCENES_DIR) +
            "/spatial6.json --sample-collided 2 --seed 1 --out " +
            tmp.file("r0.csv")) != 0);

  // resolve a few sampled collided poses, twice, byte-identical
  const std::string resolve_flags =
      "resolve --ckpt " + ckpt + " --scene " + scene() +
      " --sample-collided 5 --seed 11 --max-iters 50 --out ";
  REQUIRE(run_capture(resolve_flags + tmp.file("r1.csv"),
                      tmp.file("r1.log")) == 0);
  REQUIRE(run_capture(resolve_flags + tmp.file("r2.csv"),
                      tmp.file("r2.log")) == 0);
  CHECK(jsdf::read_file(tmp.file("r1.csv")) ==
        jsdf::read_file(tmp.file("r2.csv")));

  // trajectory between two straight-down-free poses
  const std::string traj_flags =
      "traj --ckpt " + ckpt + " --scene " + scene() +
      " --start -0.4,0.2,0.2,0.1 --end 0.5,-0.3,0.1,0.2 --n 20"
      " --l-thres -0.02 --max-iters 100 --out ";
  const int traj_rc =
      run_capture(traj_flags + tmp.file("w.csv"), tmp.file("traj.log"));
  if (traj_rc == 0) {
    const std::string w = jsdf::read_file(tmp.file("w.csv"));
    CHECK(w.rfind("waypoint,theta0,theta1,theta2,theta3\n", 0) == 0);
    REQUIRE(run_capture(traj_flags + tmp.file("w2.csv"),
                        tmp.file("traj2.log")) == 0);
    CHECK(w == jsdf::read_file(tmp.file("w2.csv")));
  } else {
    // endpoints may legitimately violate g <= l_thres for this tiny net;
    // the error must be machine-readable JSON on stderr
    const std::string err = jsdf::read_file(tmp.file("traj.log") + ".err");
    CHECK(nlohmann::json::parse(err).contains("error"));
  }

  // tangent descent trace
  REQUIRE(run_capture("tangent --ckpt " + ckpt + " --scene " + scene() +
                          " --start 0.1,0.1,0.1,0.1 --end 0.4,0.1,0.2,0"
                          " --delta 0.01 --tol 0.05 --max-iters 100 --out " +
                          tmp.file("t.csv"),
                      tmp.file("tan.log")) == 0);
  CHECK(jsdf::read_file(tmp.file("t.csv"))
            .rfind("iter,g,grad_norm,theta0", 0) == 0);

  // small threshold sweep; only check shape and determinism of the
  // non-time columns
  const std::string sweep_flags = "sweep thresholds --ckpt " + ckpt +
                                  " --scene " + scene() +
                                  " --n 3 --seed 2 --max-iters 40 --out ";
  REQUIRE(run_capture(sweep_flags + tmp.file("s1.csv"),
                      tmp.file("s1.log")) == 0);
  const std::string s1 = jsdf::read_file(tmp.file("s1.csv"));
  CHECK(s1.rfind("l_thres,mean_iters,mean_time_s,mean_move_angle,"
                 "pairs_before,pairs_after\n",
                 0) == 0);
  CHECK(std::count(s1.begin(), s1.end(), '\n') == 10);  // header + 9 rows
}

TEST_CASE("errors are machine-readable json on stderr") {
  TempDir tmp;
  const int rc = run_capture("eval --ckpt /nonexistent.json --data /none",
                             tmp.file("out.txt"));
  CHECK(rc != 0);
  const std::string err = jsdf::read_file(tmp.file("out.txt") + ".err");
  const nlohmann::json j = nlohmann::json::parse(err);
  CHECK(j.contains("error"));
  CHECK(j.contains("message"));
}
