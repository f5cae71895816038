#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bgpc/bgpc.hpp"
#include "bgpc/io.hpp"

namespace bgpc::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kNegative = 2, kRefused = 3 };

namespace detail {

using io::json;

inline void emit(const json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << '\n';
  } else {
    io::write_file(path, j);
  }
}

// --tol wins, then BGPC_TOL, then the per-matrix default rule.
inline std::optional<double> resolve_tol(const std::optional<double>& flag) {
  if (flag) return flag;
  if (const char* env = std::getenv("BGPC_TOL"); env && *env) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v >= 0.0)) throw InputError("BGPC_TOL must be a nonnegative number");
    return v;
  }
  return std::nullopt;
}

// A matrix file, or an instance file from which the named part is taken
// (Y is the forward product of the instance).
inline ComplexMatrix load_matrix_or_instance(const std::string& path, const char* part) {
  const json j = io::parse_file(path);
  if (j.is_object() && j.contains("A") && j.contains("X0")) {
    const Instance inst = io::instance_from_json(j);
    return std::string(part) == "Y" ? forward(inst) : inst.A;
  }
  return io::matrix_from_json(j, "'" + path + "'");
}

inline json alignment_report(const RecoveryResult& r, const Instance& truth) {
  if (r.status != RecoveryStatus::Unique) return nullptr;
  const auto x = align_scale(r.X, truth.X0);
  const auto lam = align_scale(r.lambda, truth.lambda0);
  const Complex product = x.sigma * lam.sigma;
  return {{"X_relative_error", x.relative_error},
          {"lambda_relative_error", lam.relative_error},
          {"sigma_product", {product.real(), product.imag()}}};
}

}  // namespace detail

/// Runs one CLI invocation; args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  using detail::json;
  CLI::App app{"Blind gain and phase calibration: identifiability certificates, constructions, "
               "recovery and phase-transition sweeps"};
  app.require_subcommand(1);
  app.fallthrough();
  std::size_t threads = default_threads();
  app.add_option("--threads", threads, "Worker thread cap")->check(CLI::PositiveNumber);

  std::optional<double> tol;
  std::string out_path;
  std::size_t n = 0, m = 0, N = 0;
  std::optional<std::size_t> s_opt;
  std::size_t s = 0;
  std::uint64_t seed = 0;
  std::uint64_t max_cells = 1'000'000;
  std::string instance_path, in_path, y_path, a_path, truth_path, y_out, config_path, csv_path,
      json_path;
  bool allow_inconsistent = false;

  auto* gen = app.add_subcommand("gen", "Write a seeded random instance");
  gen->add_option("--n", n)->required();
  gen->add_option("--m", m)->required();
  gen->add_option("--N", N)->required();
  gen->add_option("--s", s_opt, "Joint-sparsity level (random row support)");
  gen->add_option("--seed", seed)->required();
  gen->add_option("--out", out_path);
  gen->add_option("--y-out", y_out, "Also write the measurements Y");

  auto* cert = app.add_subcommand("certify", "Subspace identifiability certificate");
  cert->add_option("--instance", instance_path)->required()->check(CLI::ExistingFile);
  cert->add_option("--tol", tol);
  cert->add_option("--out", out_path);

  auto* cert_sp = app.add_subcommand("certify-sparse", "Joint-sparsity identifiability certificate");
  cert_sp->add_option("--instance", instance_path)->required()->check(CLI::ExistingFile);
  cert_sp->add_option("--s", s)->required();
  cert_sp->add_option("--tol", tol);
  cert_sp->add_option("--max-cells", max_cells);
  cert_sp->add_option("--out", out_path);

  auto* cons = app.add_subcommand("construct", "Explicit DFT rank witness");
  cons->add_option("--n", n)->required();
  cons->add_option("--m", m)->required();
  cons->add_option("--N", N)->required();
  cons->add_option("--out", out_path);

  auto* vcons = app.add_subcommand("verify-construct", "Check the ranks of a constructed witness");
  vcons->add_option("--in", in_path)->required()->check(CLI::ExistingFile);
  vcons->add_option("--tol", tol);
  vcons->add_option("--out", out_path);

  auto add_recover_flags = [&](CLI::App* sub) {
    sub->add_option("--Y", y_path, "Matrix or instance file")->required()->check(CLI::ExistingFile);
    sub->add_option("--A", a_path, "Matrix or instance file")->required()->check(CLI::ExistingFile);
    sub->add_option("--tol", tol);
    sub->add_option("--truth", truth_path, "Instance to report alignment errors against")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_path);
  };
  auto* rec = app.add_subcommand("recover", "Null-space recovery of (lambda, X)");
  add_recover_flags(rec);
  rec->add_flag("--allow-inconsistent", allow_inconsistent,
                "Use the smallest singular vector when Y is inconsistent (no accuracy guarantee)");
  auto* rec_sp = app.add_subcommand("recover-sparse", "Joint-sparse recovery over candidate supports");
  add_recover_flags(rec_sp);
  rec_sp->add_option("--s", s)->required();
  rec_sp->add_option("--max-cells", max_cells);

  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo phase-transition sweep");
  sweep->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  sweep->add_option("--csv", csv_path);
  sweep->add_option("--json", json_path);

  std::vector<const char*> argv{"bgpc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kInputError;
  }

  try {
    if (gen->parsed()) {
      const Instance inst = random_instance(n, m, N, seed, s_opt);
      detail::emit(io::to_json(inst), out_path, out);
      if (!y_out.empty()) io::write_file(y_out, io::to_json(forward(inst)));
      return kOk;
    }
    if (cert->parsed() || cert_sp->parsed()) {
      const Instance inst = io::instance_from_json(io::parse_file(instance_path));
      const auto t = detail::resolve_tol(tol);
      const CertificateReport rep =
          cert->parsed() ? certify_subspace(inst, t)
                         : certify_joint_sparse(inst, s, JointSparseOptions{t, max_cells, threads});
      detail::emit(io::to_json(rep), out_path, out);
      return rep.verdict == Verdict::IdentifiableUpToScaling ? kOk : kNegative;
    }
    if (cons->parsed()) {
      detail::emit(io::to_json(construct_claim1(n, m, N)), out_path, out);
      return kOk;
    }
    if (vcons->parsed()) {
      const ConstructedInstance ci = io::constructed_from_json(io::parse_file(in_path));
      const ConstructionCheck check = verify_claim1_rank(ci, detail::resolve_tol(tol));
      detail::emit(io::to_json(check), out_path, out);
      return check.pass ? kOk : kNegative;
    }
    if (rec->parsed() || rec_sp->parsed()) {
      const ComplexMatrix Y = detail::load_matrix_or_instance(y_path, "Y");
      const ComplexMatrix A = detail::load_matrix_or_instance(a_path, "A");
      std::optional<Instance> truth;
      if (!truth_path.empty()) truth = io::instance_from_json(io::parse_file(truth_path));
      RecoverOptions ro;
      ro.tol = detail::resolve_tol(tol);
      ro.allow_inconsistent = allow_inconsistent;
      ro.max_cells = max_cells;
      ro.threads = threads;
      if (allow_inconsistent)
        err << "warning: --allow-inconsistent returns a least-squares heuristic with no accuracy guarantee\n";
      const RecoveryResult r = rec->parsed() ? recover(Y, A, ro) : recover_joint_sparse(Y, A, s, ro);
      json j = io::to_json(r);
      if (truth) j["alignment"] = detail::alignment_report(r, *truth);
      detail::emit(j, out_path, out);
      return r.status == RecoveryStatus::Unique ? kOk : kNegative;
    }
    if (sweep->parsed()) {
      SweepConfig cfg = io::sweep_config_from_json(io::parse_file(config_path));
      cfg.threads = threads;
      if (!csv_path.empty()) cfg.output_path = csv_path;
      const auto cells = run_sweep(cfg);
      if (cfg.output_path.empty()) {
        write_csv(out, cells);
      } else {
        std::ofstream csv(cfg.output_path);
        if (!csv) throw InputError("cannot write '" + cfg.output_path + "'");
        write_csv(csv, cells);
      }
      if (!json_path.empty()) io::write_file(json_path, io::to_json(cells));
      return kOk;
    }
  } catch (const RefusalError& e) {
    err << "refused: " << e.what() << '\n';
    return kRefused;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const InconsistentError& e) {
    err << "inconsistent input: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace bgpc::cli
