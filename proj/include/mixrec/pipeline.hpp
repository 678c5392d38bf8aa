#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mixrec/assign.hpp"
#include "mixrec/core_data.hpp"
#include "mixrec/errors.hpp"
#include "mixrec/gram.hpp"
#include "mixrec/matrix_io.hpp"
#include "mixrec/oracle.hpp"
#include "mixrec/parallel.hpp"
#include "mixrec/publearn.hpp"
#include "mixrec/signsolve.hpp"

namespace mixrec::pipeline {

using ordered_json = nlohmann::ordered_json;

struct ExperimentConfig {
  SplitSpec split;
  int d = 0;
  int m = 0;
  std::uint64_t seed = 0;
};

// Flat key=value text file; all seven keys required, unknown keys rejected.
inline void save_config(const std::string& path, const ExperimentConfig& cfg) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("save_config: cannot open " + path);
  out << "n_pub=" << cfg.split.n_pub << '\n'
      << "n_priv=" << cfg.split.n_priv << '\n'
      << "k_pub=" << cfg.split.k_pub << '\n'
      << "k_priv=" << cfg.split.k_priv << '\n'
      << "d=" << cfg.d << '\n'
      << "m=" << cfg.m << '\n'
      << "seed=" << cfg.seed << '\n';
  if (!out) throw IoError("save_config: write failed for " + path);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_config: cannot open " + path);
  std::map<std::string, long long> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError(path + ":" + std::to_string(line_no) + ": expected key=value");
    const std::string key = line.substr(0, eq);
    long long value = 0;
    try {
      value = std::stoll(line.substr(eq + 1));
    } catch (const std::exception&) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": bad value for " + key);
    }
    if (values.count(key))
      throw FormatError(path + ":" + std::to_string(line_no) + ": duplicate key " + key);
    values[key] = value;
  }
  for (const char* key : {"n_pub", "n_priv", "k_pub", "k_priv", "d", "m", "seed"})
    if (!values.count(key)) throw FormatError(path + ": missing key " + key);
  for (const auto& [key, value] : values) {
    (void)value;
    if (key != "n_pub" && key != "n_priv" && key != "k_pub" && key != "k_priv" &&
        key != "d" && key != "m" && key != "seed")
      throw FormatError(path + ": unknown key " + key);
  }
  ExperimentConfig cfg;
  cfg.split.n_pub = static_cast<int>(values["n_pub"]);
  cfg.split.n_priv = static_cast<int>(values["n_priv"]);
  cfg.split.k_pub = static_cast<int>(values["k_pub"]);
  cfg.split.k_priv = static_cast<int>(values["k_priv"]);
  cfg.d = static_cast<int>(values["d"]);
  cfg.m = static_cast<int>(values["m"]);
  cfg.seed = static_cast<std::uint64_t>(values["seed"]);
  return cfg;
}

struct RecoveryOptions {
  int threads = 1;
  double tol = -1.0;        // solver tolerance; < 0 = per-pixel default
  // Once the supports are recovered exactly, the per-pixel systems are exact
  // up to machine rounding, so the pipeline runs the solver much tighter than
  // the general-purpose 1e-6 default. A looser tolerance admits spurious
  // near-solutions at pixels where two rows' public contributions nearly
  // coincide.
  double tol_factor = 1e-9;
  double eval_tol = 1e-6;   // max |X~| error accepted as success
  int enumeration_bound = 24;
};

struct StageStatus {
  bool ok = false;
  bool ran = false;
  std::string error;
};

struct RecoveryArtifacts {
  gram::GramEstimate gram;
  Eigen::MatrixXi W_pub;
  gram::PrivateGram M_priv;
  assign::AssignmentResult assignment;
  Eigen::MatrixXd Y_pub;
  signsolve::RecoveredImages recovered;
};

struct RecoveryReport {
  std::map<std::string, StageStatus> stages;
  bool gram_exact = false;
  double public_support_accuracy = 0.0;
  bool assignment_success = false;
  bool assignment_ambiguous = false;
  bool whitney_exception = false;
  bool single_edge = false;
  bool disconnected = false;
  std::map<int, int> pixel_ambiguity_histogram;
  double max_abs_error = std::numeric_limits<double>::infinity();
  double tolerance = 1e-6;
  bool evaluated = false;
  bool final_success = false;
  std::map<std::string, double> timings;

  ordered_json to_json(bool include_timings = true) const {
    ordered_json j;
    j["final_success"] = final_success;
    j["tolerance"] = tolerance;
    ordered_json js;
    for (const char* name : {"gram", "public", "assign", "solve"}) {
      if (!stages.count(name)) continue;
      const StageStatus& s = stages.at(name);
      ordered_json one;
      one["status"] = !s.ran ? "skipped" : (s.ok ? "ok" : "error");
      if (!s.error.empty()) one["error"] = s.error;
      js[name] = one;
    }
    j["stages"] = js;
    j["evaluated"] = evaluated;
    j["gram_exact"] = gram_exact;
    j["public_support_accuracy"] = public_support_accuracy;
    ordered_json ja;
    ja["success"] = assignment_success;
    ja["ambiguous"] = assignment_ambiguous;
    ja["whitney_exception"] = whitney_exception;
    ja["single_edge"] = single_edge;
    ja["disconnected"] = disconnected;
    j["assignment"] = ja;
    ordered_json jh;
    for (const auto& [count, pixels] : pixel_ambiguity_histogram)
      jh[std::to_string(count)] = pixels;
    j["pixel_ambiguity_histogram"] = jh;
    j["max_abs_error"] = max_abs_error;
    if (include_timings) {
      ordered_json jt;
      for (const auto& [name, seconds] : timings) jt[name] = seconds;
      j["timings"] = jt;
    }
    return j;
  }
};

struct RecoveryResult {
  std::optional<RecoveryArtifacts> artifacts;
  RecoveryReport report;
};

// Steps 1-4 wired exactly as the recovery procedure prescribes, including the
// sqrt(k_priv) scaling handoff into the solver. Ground truth never enters
// here; accuracy fields are filled by evaluate_against_truth afterwards.
inline RecoveryResult recover_all(const SyntheticDataset& data, const Eigen::MatrixXd& X_pub,
                                  const SplitSpec& split, const RecoveryOptions& opts = {}) {
  split.require_pipeline();
  if (X_pub.cols() != split.n_pub)
    throw std::invalid_argument("recover_all: X_pub column count != n_pub");

  RecoveryResult result;
  RecoveryArtifacts art;
  auto& report = result.report;
  report.tolerance = opts.eval_tol;
  for (const char* name : {"gram", "public", "assign", "solve"})
    report.stages[name] = StageStatus{};

  const auto timed = [&](const char* name, auto&& body) {
    auto& status = report.stages[name];
    status.ran = true;
    const auto start = std::chrono::steady_clock::now();
    try {
      body();
      status.ok = true;
    } catch (const std::exception& e) {
      status.error = e.what();
    }
    report.timings[std::string(name) + "_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return status.ok;
  };

  const bool ok =
      timed("gram", [&] { art.gram = gram::gram_extract(data, split); }) &&
      timed("public",
            [&] {
              const Eigen::Index m = data.Y.rows();
              art.W_pub = Eigen::MatrixXi::Zero(m, split.n_pub);
              std::vector<std::string> errors(static_cast<std::size_t>(m));
              parallel_for(static_cast<std::size_t>(m), opts.threads, [&](std::size_t i) {
                try {
                  const publearn::PublicSupport s = publearn::learn_public_support(
                      data.Y.row(static_cast<Eigen::Index>(i)).transpose(), X_pub,
                      split.k_pub);
                  for (int idx : s.indices) art.W_pub(static_cast<Eigen::Index>(i), idx) = 1;
                } catch (const std::exception& e) {
                  errors[i] = e.what();
                }
              });
              for (const auto& e : errors)
                if (!e.empty()) throw Error("image support: " + e);
            }) &&
      timed("assign",
            [&] {
              art.M_priv = gram::private_gram(art.gram, art.W_pub, split);
              art.assignment = assign::assign_original_images(art.M_priv, split.n_priv);
            }) &&
      timed("solve", [&] {
        art.Y_pub = publearn::public_contribution(art.W_pub, X_pub, split.k_pub);
        signsolve::SolveOptions sopts;
        sopts.tol = opts.tol;
        sopts.tol_factor = opts.tol_factor;
        sopts.threads = opts.threads;
        sopts.enumeration_bound = opts.enumeration_bound;
        art.recovered = signsolve::solve_all(art.assignment.W_priv, art.Y_pub, data.Y,
                                             split, sopts);
      });

  if (ok) {
    report.assignment_ambiguous = art.assignment.ambiguous;
    report.whitney_exception = art.assignment.whitney_exception;
    report.single_edge = art.assignment.single_edge;
    report.disconnected = art.assignment.disconnected;
    report.pixel_ambiguity_histogram = art.recovered.ambiguity_histogram();
    result.artifacts = std::move(art);
  }
  return result;
}

// Does some column permutation turn `got` into `want`? Columns are matched by
// exact content; duplicate columns are handled as multisets.
inline bool matches_up_to_column_permutation(const Eigen::MatrixXi& got,
                                             const Eigen::MatrixXi& want) {
  if (got.rows() != want.rows() || got.cols() != want.cols()) return false;
  std::vector<std::vector<int>> a, b;
  for (Eigen::Index j = 0; j < got.cols(); ++j) {
    std::vector<int> ca(static_cast<std::size_t>(got.rows()));
    std::vector<int> cb(static_cast<std::size_t>(got.rows()));
    for (Eigen::Index i = 0; i < got.rows(); ++i) {
      ca[static_cast<std::size_t>(i)] = got(i, j);
      cb[static_cast<std::size_t>(i)] = want(i, j);
    }
    a.push_back(std::move(ca));
    b.push_back(std::move(cb));
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

// Fills the accuracy fields of the report from retained ground truth. This is
// the only place recovery output ever meets the true X and W.
inline void evaluate_against_truth(const GeneratedData& truth, const RecoveryArtifacts& art,
                                   RecoveryReport& report) {
  const SplitSpec& split = truth.Y.split;
  report.evaluated = true;

  const Eigen::MatrixXd true_gram = oracle::exact_gram(truth.W, split);
  report.gram_exact = art.gram.M.rows() == true_gram.rows() &&
                      (art.gram.M - true_gram).cwiseAbs().maxCoeff() < 1e-9;

  const Eigen::MatrixXi true_pub = truth.W.pub_block();
  int hits = 0;
  for (Eigen::Index i = 0; i < art.W_pub.rows(); ++i)
    hits += (art.W_pub.row(i) == true_pub.row(i)) ? 1 : 0;
  report.public_support_accuracy =
      art.W_pub.rows() ? static_cast<double>(hits) / static_cast<double>(art.W_pub.rows())
                       : 0.0;

  report.assignment_success =
      matches_up_to_column_permutation(art.assignment.W_priv, truth.W.priv_block());

  const signsolve::ColumnMatch match = signsolve::match_columns(
      art.recovered.Xtilde.cwiseAbs(), truth.X_priv().cwiseAbs());
  report.max_abs_error = match.max_error;

  bool stages_ok = true;
  for (const auto& [name, status] : report.stages) stages_ok &= status.ok;
  report.final_success = stages_ok && report.max_abs_error <= report.tolerance;
}

// ---- directory-level commands (the CLI is a thin wrapper over these) ----

namespace files {
inline std::string config(const std::string& dir) { return dir + "/config.txt"; }
inline std::string X(const std::string& dir) { return dir + "/X.mat"; }
inline std::string W(const std::string& dir) { return dir + "/W.mat"; }
inline std::string X_pub(const std::string& dir) { return dir + "/X_pub.mat"; }
inline std::string Y(const std::string& dir) { return dir + "/Y.mat"; }
inline std::string gram(const std::string& dir) { return dir + "/M.mat"; }
inline std::string gram_raw(const std::string& dir) { return dir + "/M_raw.mat"; }
inline std::string W_pub(const std::string& dir) { return dir + "/W_pub.mat"; }
inline std::string M_priv(const std::string& dir) { return dir + "/M_priv.mat"; }
inline std::string W_priv(const std::string& dir) { return dir + "/W_priv.mat"; }
inline std::string Y_pub(const std::string& dir) { return dir + "/Y_pub.mat"; }
inline std::string Xtilde(const std::string& dir) { return dir + "/Xtilde.mat"; }
inline std::string report(const std::string& dir) { return dir + "/report.json"; }
}  // namespace files

inline void write_json(const std::string& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("write_json: cannot open " + path);
  out << j.dump(2) << '\n';
}

inline void cmd_generate(const ExperimentConfig& cfg, const std::string& out_dir) {
  cfg.split.validate();
  std::filesystem::create_directories(out_dir);
  const GeneratedData data = generate_dataset(cfg.split, cfg.d, cfg.m, cfg.seed);
  save_config(files::config(out_dir), cfg);
  save_matrix(files::X(out_dir), data.X.values);
  save_matrix(files::W(out_dir), data.W.rows.cast<double>());
  save_matrix(files::X_pub(out_dir), data.X_pub());
  save_matrix(files::Y(out_dir), data.Y.Y);
}

inline SyntheticDataset load_observations(const std::string& data_dir,
                                          ExperimentConfig& cfg) {
  cfg = load_config(files::config(data_dir));
  cfg.split.require_pipeline();
  SyntheticDataset data;
  data.Y = load_matrix(files::Y(data_dir));
  data.split = cfg.split;
  data.seed = cfg.seed;
  if (data.Y.rows() != cfg.m || data.Y.cols() != cfg.d)
    throw FormatError("load_observations: Y.mat does not match config dimensions");
  if ((data.Y.array() < 0.0).any())
    throw FormatError("load_observations: Y.mat has negative entries");
  return data;
}

inline void cmd_gram(const std::string& data_dir, const std::string& out_dir) {
  ExperimentConfig cfg;
  const SyntheticDataset data = load_observations(data_dir, cfg);
  std::filesystem::create_directories(out_dir);
  const gram::GramEstimate est = gram::gram_extract(data, cfg.split);
  save_matrix(files::gram(out_dir), est.M);
  save_matrix(files::gram_raw(out_dir), est.raw);
}

inline void cmd_public(const std::string& data_dir, const std::string& out_dir,
                       int threads = 1) {
  ExperimentConfig cfg;
  const SyntheticDataset data = load_observations(data_dir, cfg);
  const Eigen::MatrixXd X_pub = load_matrix(files::X_pub(data_dir));
  if (X_pub.rows() != cfg.d || X_pub.cols() != cfg.split.n_pub)
    throw FormatError("cmd_public: X_pub.mat does not match config dimensions");
  std::filesystem::create_directories(out_dir);
  Eigen::MatrixXi W_pub = Eigen::MatrixXi::Zero(cfg.m, cfg.split.n_pub);
  std::vector<std::string> errors(static_cast<std::size_t>(cfg.m));
  parallel_for(static_cast<std::size_t>(cfg.m), threads, [&](std::size_t i) {
    try {
      const publearn::PublicSupport s = publearn::learn_public_support(
          data.Y.row(static_cast<Eigen::Index>(i)).transpose(), X_pub, cfg.split.k_pub);
      for (int idx : s.indices) W_pub(static_cast<Eigen::Index>(i), idx) = 1;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) throw Error("cmd_public: " + e);
  save_matrix(files::W_pub(out_dir), W_pub.cast<double>());
}

inline Eigen::MatrixXi load_binary_matrix(const std::string& path) {
  const Eigen::MatrixXd raw = load_matrix(path);
  Eigen::MatrixXi out(raw.rows(), raw.cols());
  for (Eigen::Index i = 0; i < raw.rows(); ++i)
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
      const long v = std::lround(raw(i, j));
      if (std::fabs(raw(i, j) - static_cast<double>(v)) > 1e-9)
        throw FormatError(path + ": expected an integer matrix");
      out(i, j) = static_cast<int>(v);
    }
  return out;
}

inline void cmd_assign(const std::string& data_dir, const std::string& stage_dir,
                       const std::string& out_dir) {
  const ExperimentConfig cfg = load_config(files::config(data_dir));
  cfg.split.require_pipeline();
  gram::GramEstimate est;
  est.M = load_matrix(files::gram(stage_dir));
  est.grid = gram::achievable_grid(cfg.split);
  const Eigen::MatrixXi W_pub = load_binary_matrix(files::W_pub(stage_dir));
  std::filesystem::create_directories(out_dir);
  const gram::PrivateGram priv = gram::private_gram(est, W_pub, cfg.split);
  const assign::AssignmentResult res = assign::assign_original_images(priv, cfg.split.n_priv);
  save_matrix(files::M_priv(out_dir), priv.M.cast<double>());
  save_matrix(files::W_priv(out_dir), res.W_priv.cast<double>());
  ordered_json j;
  j["ambiguous"] = res.ambiguous;
  j["whitney_exception"] = res.whitney_exception;
  j["single_edge"] = res.single_edge;
  j["disconnected"] = res.disconnected;
  j["components"] = res.components;
  write_json(out_dir + "/assign.json", j);
}

inline void cmd_solve(const std::string& data_dir, const std::string& stage_dir,
                      const std::string& out_dir, const RecoveryOptions& opts = {}) {
  ExperimentConfig cfg;
  const SyntheticDataset data = load_observations(data_dir, cfg);
  const Eigen::MatrixXd X_pub = load_matrix(files::X_pub(data_dir));
  const Eigen::MatrixXi W_pub = load_binary_matrix(files::W_pub(stage_dir));
  const Eigen::MatrixXi W_priv = load_binary_matrix(files::W_priv(stage_dir));
  std::filesystem::create_directories(out_dir);
  const Eigen::MatrixXd Y_pub = publearn::public_contribution(W_pub, X_pub, cfg.split.k_pub);
  signsolve::SolveOptions sopts;
  sopts.tol = opts.tol;
  sopts.tol_factor = opts.tol_factor;
  sopts.threads = opts.threads;
  sopts.enumeration_bound = opts.enumeration_bound;
  const signsolve::RecoveredImages rec =
      signsolve::solve_all(W_priv, Y_pub, data.Y, cfg.split, sopts);
  save_matrix(files::Xtilde(out_dir), rec.Xtilde);
  ordered_json j;
  ordered_json jh;
  for (const auto& [count, pixels] : rec.ambiguity_histogram())
    jh[std::to_string(count)] = pixels;
  j["pixel_ambiguity_histogram"] = jh;
  j["rank_deficient"] = rec.rank_deficient;
  write_json(out_dir + "/solve.json", j);
}

// Full pipeline over a generated dataset directory. Recovery consumes only
// Y.mat, X_pub.mat and config.txt; X.mat and W.mat are read afterwards, for
// the report's accuracy fields only. Returns the process exit code.
inline int cmd_recover_all(const std::string& data_dir, const std::string& out_dir,
                           const RecoveryOptions& opts, RecoveryReport* report_out = nullptr) {
  ExperimentConfig cfg;
  const SyntheticDataset data = load_observations(data_dir, cfg);
  const Eigen::MatrixXd X_pub = load_matrix(files::X_pub(data_dir));
  if (X_pub.rows() != cfg.d || X_pub.cols() != cfg.split.n_pub)
    throw FormatError("recover-all: X_pub.mat does not match config dimensions");
  std::filesystem::create_directories(out_dir);

  RecoveryResult result = recover_all(data, X_pub, cfg.split, opts);
  if (result.artifacts) {
    const RecoveryArtifacts& art = *result.artifacts;
    save_matrix(files::gram(out_dir), art.gram.M);
    save_matrix(files::W_pub(out_dir), art.W_pub.cast<double>());
    save_matrix(files::M_priv(out_dir), art.M_priv.M.cast<double>());
    save_matrix(files::W_priv(out_dir), art.assignment.W_priv.cast<double>());
    save_matrix(files::Xtilde(out_dir), art.recovered.Xtilde);

    GeneratedData truth;
    truth.X.values = load_matrix(files::X(data_dir));
    truth.W.n_pub = cfg.split.n_pub;
    truth.W.n_priv = cfg.split.n_priv;
    truth.W.rows = load_binary_matrix(files::W(data_dir));
    truth.Y = data;
    evaluate_against_truth(truth, art, result.report);
  }
  write_json(files::report(out_dir), result.report.to_json());
  if (report_out) *report_out = result.report;
  return result.report.final_success ? 0 : 1;
}

}  // namespace mixrec::pipeline
