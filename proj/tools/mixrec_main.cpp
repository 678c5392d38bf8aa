// Command-line front end: dataset generation, the four recovery stages
// individually or end to end, and the cut-reduction verifier.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>

#include "mixrec/gram.hpp"
#include "mixrec/hardness.hpp"
#include "mixrec/oracle.hpp"
#include "mixrec/pipeline.hpp"
#include "mixrec/signsolve.hpp"

namespace {

using namespace mixrec;

int run_selftest();

hardness::RoundingCheck soundness_trial(const hardness::ReductionInstance& inst, Rng& rng) {
  Eigen::VectorXd z(inst.n());
  for (int i = 0; i < inst.n(); ++i) z[i] = 2.0 * rng.uniform01() - 1.0;
  return hardness::verify_soundness_rounding(inst, z);
}

int run_verify_hardness(const std::string& graph_file, bool campaign,
                        std::vector<long long> cs, int z_trials, std::uint64_t seed,
                        const std::string& out_file) {
  pipeline::ordered_json report;
  bool all_hold = true;

  const auto check_graph = [&](const SimpleGraph& g, const std::string& name) {
    pipeline::ordered_json item;
    item["graph"] = name;
    item["n"] = g.n_vertices;
    item["m"] = g.m();
    const hardness::CutResult cut = hardness::brute_force_maxcut(g);
    item["opt_cut"] = cut.best_value;

    bool completeness = true;
    for (const auto& subset : hardness::all_optimal_cuts(g)) {
      const hardness::ReductionInstance inst = hardness::reduce_maxcut(g, cs.front());
      const double obj =
          hardness::objective(inst, hardness::cut_to_assignment(subset, g.n_vertices));
      completeness &= obj == 4.0 * (g.m() - cut.best_value);
    }
    item["completeness_identity"] = completeness;
    all_hold &= completeness;

    const std::vector<int> deg = g.degrees();
    const bool regular35 =
        !deg.empty() && std::all_of(deg.begin(), deg.end(),
                                    [&](int x) { return x == deg.front(); }) &&
        (deg.front() == 3 || deg.front() == 5);
    if (regular35) {
      pipeline::ordered_json sound;
      Rng rng = derive_stream(seed, Stream::monte_carlo);
      for (long long c : cs) {
        const hardness::ReductionInstance inst = hardness::reduce_maxcut(g, c);
        double max_gap = 0.0, bound = 0.0;
        bool holds = true;
        for (int t = 0; t < z_trials; ++t) {
          try {
            const hardness::RoundingCheck rc = soundness_trial(inst, rng);
            max_gap = std::max(max_gap, rc.gap);
            bound = rc.bound;
          } catch (const SoundnessBoundError&) {
            holds = false;
          }
        }
        pipeline::ordered_json one;
        one["c"] = c;
        one["trials"] = z_trials;
        one["max_gap"] = max_gap;
        one["bound"] = bound;
        one["holds"] = holds;
        sound[std::to_string(c)] = one;
        all_hold &= holds;
      }
      item["soundness"] = sound;
    } else {
      item["soundness"] = "skipped (graph is not 3- or 5-regular)";
    }
    report["graphs"].push_back(item);
  };

  if (!graph_file.empty()) check_graph(load_edge_list(graph_file), graph_file);
  if (campaign) {
    Rng rng = derive_stream(seed, Stream::graphs);
    for (int t = 0; t < 10; ++t) {
      const int n = 4 + 2 * static_cast<int>(rng.below(5));  // even n in [4, 12]
      check_graph(random_regular_graph(n, 3, rng),
                  "random-3-regular-" + std::to_string(t));
    }
  }
  report["bound_holds"] = all_hold;
  if (!out_file.empty())
    pipeline::write_json(out_file, report);
  else
    std::cout << report.dump(2) << std::endl;
  return all_hold ? 0 : 1;
}

int run_selftest() {
  int failures = 0;
  const auto check = [&](bool ok, const std::string& name) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name.c_str());
    if (!ok) ++failures;
  };

  check(std::fabs(gram::folded_moment(0.0, 1.0) - 2.0 / M_PI) < 1e-12,
        "folded moment at rho=0");
  check(std::fabs(gram::folded_moment(1.0, 1.0) - 1.0) < 1e-12, "folded moment at rho=1");
  check(std::fabs(gram::invert_folded_moment(gram::folded_moment(0.3, 2.0), 2.0) - 0.3) <
            1e-9,
        "folded moment inversion round trip");

  {  // triangle system: 3x3 invertible, every sign pattern solves exactly
    Eigen::MatrixXd W(3, 3);
    W << 1, 1, 0, 1, 0, 1, 0, 1, 1;
    Eigen::VectorXd y(3);
    y << 1, 4, 1;
    const signsolve::PixelSolution sol =
        signsolve::solve_pixel(W, Eigen::VectorXd::Zero(3), y, 1e-9);
    bool has = false;
    for (const auto& z : sol.solutions) {
      Eigen::VectorXd want(3);
      want << 1, -2, 3;
      if ((z - want).cwiseAbs().maxCoeff() < 1e-9) has = true;
    }
    check(sol.solutions.size() == 8 && has, "hidden-sign solver triangle fixture");
  }

  {  // K4 reduction: completeness identity at the optimum
    SimpleGraph k4;
    k4.n_vertices = 4;
    for (int u = 0; u < 4; ++u)
      for (int v = u + 1; v < 4; ++v) k4.add_edge(u, v);
    const hardness::CutResult cut = hardness::brute_force_maxcut(k4);
    const hardness::ReductionInstance inst = hardness::reduce_maxcut(k4, 10);
    const double obj =
        hardness::objective(inst, hardness::cut_to_assignment(cut.best_subset, 4));
    check(cut.best_value == 4 && obj == 4.0 * (6 - 4), "cut reduction completeness on K4");
  }

  {  // reduction files on disk: single edge, c = 1, a 3x2 instance
    const auto dir = std::filesystem::temp_directory_path() / "mixrec_selftest";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    SimpleGraph edge;
    edge.n_vertices = 2;
    edge.add_edge(0, 1);
    const hardness::ReductionInstance inst = hardness::reduce_maxcut(edge, 1);
    save_matrix((dir / "W.mat").string(), inst.dense_W());
    save_matrix((dir / "y.mat").string(), inst.dense_y());
    const Eigen::MatrixXd W = load_matrix((dir / "W.mat").string());
    const Eigen::MatrixXd y = load_matrix((dir / "y.mat").string());
    check(W.rows() == 3 && W.cols() == 2 && y.rows() == 3 && W(0, 0) == 1.0 &&
              W(0, 1) == 1.0 && y(0, 0) == 0.0 && y(1, 0) == 1.0 && y(2, 0) == 1.0,
          "single-edge reduction instance on disk");

    std::ofstream bad((dir / "bad.txt").string());
    bad << "3 2\n0 1\nnot an edge\n";
    bad.close();
    bool parse_error = false;
    try {
      load_edge_list((dir / "bad.txt").string());
    } catch (const FormatError& e) {
      parse_error = std::string(e.what()).find(":3") != std::string::npos;
    }
    check(parse_error, "malformed edge list reports its line number");
    std::filesystem::remove_all(dir);
  }

  {  // K4: brute-force cut plus the rounding bound on random points
    SimpleGraph k4;
    k4.n_vertices = 4;
    for (int u = 0; u < 4; ++u)
      for (int v = u + 1; v < 4; ++v) k4.add_edge(u, v);
    const hardness::ReductionInstance inst = hardness::reduce_maxcut(k4, 100);
    Rng rng(99);
    bool bound_holds = true;
    try {
      for (int t = 0; t < 200; ++t) soundness_trial(inst, rng);
    } catch (const SoundnessBoundError&) {
      bound_holds = false;
    }
    check(bound_holds, "rounding bound holds on K4");
  }

  {  // tiny end-to-end recovery
    pipeline::ExperimentConfig cfg;
    cfg.split = SplitSpec{6, 5, 2, 2};
    cfg.d = 20000;
    cfg.m = 12;
    cfg.seed = 5;
    const GeneratedData data = generate_dataset(cfg.split, cfg.d, cfg.m, cfg.seed);
    pipeline::RecoveryResult res =
        pipeline::recover_all(data.Y, data.X_pub(), cfg.split, {});
    bool ok = res.artifacts.has_value();
    if (ok) {
      pipeline::evaluate_against_truth(data, *res.artifacts, res.report);
      ok = res.report.final_success;
    }
    check(ok, "end-to-end recovery on a small dataset");
  }

  std::printf("%s\n", failures == 0 ? "selftest: all checks passed"
                                    : "selftest: FAILURES PRESENT");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"private-image recovery pipeline for mixed absolute-value datasets"};
  app.require_subcommand(1);

  int threads = 1;
  double tol = -1.0;
  app.add_option("--threads", threads, "worker threads for per-pixel/per-image stages")
      ->capture_default_str();
  app.add_option("--tol", tol, "solver residual tolerance (<0: per-pixel default)");

  // generate
  auto* gen = app.add_subcommand("generate", "sample a synthetic dataset to a directory");
  pipeline::ExperimentConfig cfg;
  cfg.split = SplitSpec{12, 6, 2, 2};
  cfg.d = 20000;
  cfg.m = 16;
  cfg.seed = 1;
  std::string config_file, out_dir = ".";
  gen->add_option("--config", config_file, "read n_pub/n_priv/k_pub/k_priv/d/m/seed from file");
  gen->add_option("--n_pub", cfg.split.n_pub)->capture_default_str();
  gen->add_option("--n_priv", cfg.split.n_priv)->capture_default_str();
  gen->add_option("--k_pub", cfg.split.k_pub)->capture_default_str();
  gen->add_option("--k_priv", cfg.split.k_priv)->capture_default_str();
  gen->add_option("--d", cfg.d)->capture_default_str();
  gen->add_option("--m", cfg.m)->capture_default_str();
  gen->add_option("--seed", cfg.seed)->capture_default_str();
  gen->add_option("--out", out_dir, "output directory")->required();

  // stage subcommands
  std::string data_dir, stage_dir;
  auto* gram_cmd = app.add_subcommand("gram", "estimate the mixing Gram matrix from Y");
  gram_cmd->add_option("--data", data_dir, "generated dataset directory")->required();
  gram_cmd->add_option("--out", out_dir, "output directory")->required();

  auto* public_cmd =
      app.add_subcommand("public", "recover per-image public supports from Y and X_pub");
  public_cmd->add_option("--data", data_dir)->required();
  public_cmd->add_option("--out", out_dir)->required();

  auto* assign_cmd = app.add_subcommand(
      "assign", "recover the private mixup matrix from the Gram estimate");
  assign_cmd->add_option("--data", data_dir)->required();
  assign_cmd->add_option("--stage", stage_dir, "directory with M.mat and W_pub.mat")
      ->required();
  assign_cmd->add_option("--out", out_dir)->required();

  auto* solve_cmd =
      app.add_subcommand("solve", "recover private pixel values by sign enumeration");
  solve_cmd->add_option("--data", data_dir)->required();
  solve_cmd->add_option("--stage", stage_dir, "directory with W_pub.mat and W_priv.mat")
      ->required();
  solve_cmd->add_option("--out", out_dir)->required();

  auto* recover_cmd =
      app.add_subcommand("recover-all", "run the full recovery pipeline and report");
  recover_cmd->add_option("--data", data_dir)->required();
  recover_cmd->add_option("--out", out_dir)->required();

  // hardness subcommands
  std::string graph_file, meta_out;
  long long c_value = 1'000'000;
  auto* reduce_cmd = app.add_subcommand(
      "reduce-maxcut", "encode a cut instance as a hidden-sign regression");
  reduce_cmd->add_option("--graph", graph_file, "edge list file (\"n m\" then \"u v\" lines)")
      ->required();
  reduce_cmd->add_option("--c", c_value, "singleton-row replication count")
      ->capture_default_str();
  reduce_cmd->add_option("--out", out_dir)->required();

  std::vector<long long> cs{10, 100};
  int z_trials = 1000;
  std::uint64_t seed = 1;
  bool campaign = false;
  std::string verify_graph, verify_out;
  auto* verify_cmd = app.add_subcommand(
      "verify-hardness", "check the reduction's completeness identity and rounding bound");
  verify_cmd->add_option("--graph", verify_graph, "edge list file");
  verify_cmd->add_flag("--campaign", campaign, "also sweep random 3-regular graphs");
  verify_cmd->add_option("--c", cs, "replication counts to test")->capture_default_str();
  verify_cmd->add_option("--z-trials", z_trials, "random z vectors per graph and c")
      ->capture_default_str();
  verify_cmd->add_option("--seed", seed)->capture_default_str();
  verify_cmd->add_option("--out", verify_out, "write the JSON report here");

  auto* selftest_cmd = app.add_subcommand("selftest", "quick deterministic sanity suite");

  for (CLI::App* sub : {gen, gram_cmd, public_cmd, assign_cmd, solve_cmd, recover_cmd,
                        reduce_cmd, verify_cmd, selftest_cmd})
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  pipeline::RecoveryOptions opts;
  opts.threads = threads;
  opts.tol = tol;

  try {
    if (gen->parsed()) {
      if (!config_file.empty()) cfg = pipeline::load_config(config_file);
      pipeline::cmd_generate(cfg, out_dir);
    } else if (gram_cmd->parsed()) {
      pipeline::cmd_gram(data_dir, out_dir);
    } else if (public_cmd->parsed()) {
      pipeline::cmd_public(data_dir, out_dir, threads);
    } else if (assign_cmd->parsed()) {
      pipeline::cmd_assign(data_dir, stage_dir, out_dir);
    } else if (solve_cmd->parsed()) {
      pipeline::cmd_solve(data_dir, stage_dir, out_dir, opts);
    } else if (recover_cmd->parsed()) {
      pipeline::RecoveryReport report;
      const int code = pipeline::cmd_recover_all(data_dir, out_dir, opts, &report);
      for (const auto& [name, status] : report.stages)
        if (status.ran && !status.ok)
          std::cerr << "stage " << name << " failed: " << status.error << '\n';
      std::cout << (code == 0 ? "recovery succeeded" : "recovery failed") << '\n';
      return code;
    } else if (reduce_cmd->parsed()) {
      const SimpleGraph g = load_edge_list(graph_file);
      const hardness::ReductionInstance inst = hardness::reduce_maxcut(g, c_value);
      std::filesystem::create_directories(out_dir);
      save_matrix(out_dir + "/W.mat", inst.dense_W());
      save_matrix(out_dir + "/y.mat", inst.dense_y());
      std::ofstream meta(out_dir + "/meta.txt", std::ios::trunc);
      meta << inst.edge_rows() << ' ' << inst.n() << ' ' << inst.c << '\n';
      if (!meta) throw IoError("reduce-maxcut: cannot write meta.txt");
    } else if (verify_cmd->parsed()) {
      return run_verify_hardness(verify_graph, campaign, cs, z_trials, seed, verify_out);
    } else if (selftest_cmd->parsed()) {
      return run_selftest();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
