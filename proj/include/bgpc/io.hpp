#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bgpc/certify.hpp"
#include "bgpc/construct.hpp"
#include "bgpc/cxmat.hpp"
#include "bgpc/error.hpp"
#include "bgpc/experiment.hpp"
#include "bgpc/model.hpp"
#include "bgpc/recover.hpp"

// JSON file formats. Matrices are {"rows","cols","data"} with data a
// row-major array of [re, im] pairs. Index sets are one-based on disk.
namespace bgpc::io {

using json = nlohmann::json;

namespace detail {

inline const json& field(const json& j, const std::string& name, const std::string& ctx) {
  if (!j.is_object()) throw InputError(ctx + ": expected a JSON object");
  auto it = j.find(name);
  if (it == j.end()) throw InputError(ctx + ": missing field '" + name + "'");
  return *it;
}

inline bool is_count(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
}

inline std::size_t read_count(const json& j, const std::string& name, const std::string& ctx) {
  const json& v = field(j, name, ctx);
  if (!is_count(v))
    throw InputError(ctx + ": field '" + name + "' must be a nonnegative integer");
  return v.get<std::size_t>();
}

inline std::vector<std::size_t> read_indices(const json& v, const std::string& name,
                                             const std::string& ctx) {
  if (!v.is_array()) throw InputError(ctx + ": field '" + name + "' must be an array");
  std::vector<std::size_t> out;
  for (const auto& e : v) {
    if (!e.is_number_integer() || e.get<long long>() < 1)
      throw InputError(ctx + ": field '" + name + "' must hold one-based positive integers");
    out.push_back(e.get<std::size_t>() - 1);
  }
  return out;
}

inline json write_indices(const std::vector<std::size_t>& idx) {
  json a = json::array();
  for (auto i : idx) a.push_back(i + 1);
  return a;
}

}  // namespace detail

inline json to_json(const ComplexMatrix& m) {
  json data = json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) data.push_back({m(i, j).real(), m(i, j).imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline ComplexMatrix matrix_from_json(const json& j, const std::string& ctx = "matrix") {
  const auto rows = detail::read_count(j, "rows", ctx);
  const auto cols = detail::read_count(j, "cols", ctx);
  if (rows == 0 || cols == 0) throw InputError(ctx + ": rows and cols must be positive");
  const json& data = detail::field(j, "data", ctx);
  if (!data.is_array()) throw InputError(ctx + ": field 'data' must be an array");
  if (data.size() != rows * cols)
    throw InputError(ctx + ": field 'data' has " + std::to_string(data.size()) +
                     " entries, expected rows*cols = " + std::to_string(rows * cols));
  ComplexMatrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t k = 0; k < data.size(); ++k) {
    const json& e = data[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw InputError(ctx + ": field 'data' entry " + std::to_string(k) + " must be [re, im]");
    const double re = e[0].get<double>();
    const double im = e[1].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im))
      throw InputError(ctx + ": field 'data' entry " + std::to_string(k) + " is not finite");
    m(static_cast<Index>(k / cols), static_cast<Index>(k % cols)) = {re, im};
  }
  return m;
}

inline json to_json(const Instance& inst) {
  json j = {{"n", inst.n},
            {"m", inst.m},
            {"N", inst.N},
            {"lambda0", to_json(ComplexMatrix(inst.lambda0))},
            {"X0", to_json(inst.X0)},
            {"A", to_json(inst.A)}};
  if (inst.sparsity) j["support"] = detail::write_indices(inst.sparsity->support);
  return j;
}

inline Instance instance_from_json(const json& j) {
  const std::string ctx = "instance";
  Instance inst;
  inst.n = detail::read_count(j, "n", ctx);
  inst.m = detail::read_count(j, "m", ctx);
  inst.N = detail::read_count(j, "N", ctx);
  const ComplexMatrix lam = matrix_from_json(detail::field(j, "lambda0", ctx), "instance field 'lambda0'");
  if (lam.cols() != 1) throw InputError("instance: field 'lambda0' must be a column (cols = 1)");
  inst.lambda0 = lam.col(0);
  inst.X0 = matrix_from_json(detail::field(j, "X0", ctx), "instance field 'X0'");
  inst.A = matrix_from_json(detail::field(j, "A", ctx), "instance field 'A'");
  if (auto it = j.find("support"); it != j.end() && !it->is_null()) {
    Sparsity sp;
    sp.support = detail::read_indices(*it, "support", ctx);
    sp.s = sp.support.size();
    inst.sparsity = std::move(sp);
  }
  validate(inst);
  return inst;
}

/// Constructed witnesses are written in the instance layout (unit gains)
/// plus the column bookkeeping.
inline json to_json(const ConstructedInstance& ci) {
  Instance inst;
  inst.n = ci.n;
  inst.m = ci.m;
  inst.N = ci.N;
  inst.lambda0 = ComplexVector::Ones(static_cast<Index>(ci.n));
  inst.A = ci.A;
  inst.X0 = ci.X0;
  json j = to_json(inst);
  j["selected_cols"] = detail::write_indices(ci.selected_cols);
  j["complement_cols"] = detail::write_indices(ci.complement_cols);
  j["expected_left_null_dim"] = ci.expected_left_null_dim;
  return j;
}

inline ConstructedInstance constructed_from_json(const json& j) {
  const std::string ctx = "constructed instance";
  const Instance inst = instance_from_json(j);
  ConstructedInstance ci;
  ci.n = inst.n;
  ci.m = inst.m;
  ci.N = inst.N;
  ci.A = inst.A;
  ci.X0 = inst.X0;
  ci.selected_cols = detail::read_indices(detail::field(j, "selected_cols", ctx), "selected_cols", ctx);
  ci.complement_cols =
      detail::read_indices(detail::field(j, "complement_cols", ctx), "complement_cols", ctx);
  const json& e = detail::field(j, "expected_left_null_dim", ctx);
  if (!e.is_number_integer()) throw InputError(ctx + ": field 'expected_left_null_dim' must be an integer");
  ci.expected_left_null_dim = e.get<std::int64_t>();
  if (ci.selected_cols.size() != ci.m || ci.selected_cols.size() + ci.complement_cols.size() != ci.n)
    throw InputError(ctx + ": fields 'selected_cols'/'complement_cols' do not partition 1..n");
  return ci;
}

inline json to_json(const CertificateReport& r) {
  json j = {{"mode", to_string(r.mode)},
            {"verdict", to_string(r.verdict)},
            {"condition1_rank_full", r.condition1_rank_full},
            {"condition2_lambda_unique", r.condition2_lambda_unique},
            {"stacked_rank", r.stacked_rank},
            {"required_rank", r.required_rank},
            {"tolerance_used", r.tolerance_used},
            {"support_cells_checked", nullptr}};
  if (r.support_cells_checked) j["support_cells_checked"] = *r.support_cells_checked;
  if (r.failing_support) j["failing_support"] = detail::write_indices(*r.failing_support);
  return j;
}

inline json to_json(const ConstructionCheck& c) {
  return {{"stacked_rank", c.stacked_rank},   {"D_rank", c.D_rank},
          {"left_null_dim", c.left_null_dim}, {"expected_left_null_dim", c.expected_left_null_dim},
          {"tolerance_used", c.tolerance_used}, {"pass", c.pass}};
}

inline json to_json(const RecoveryResult& r) {
  json j = {{"status", to_string(r.status)}, {"null_dim", r.null_dim}, {"consistent", r.consistent}};
  j["lambda"] = r.lambda.size() ? to_json(ComplexMatrix(r.lambda)) : json(nullptr);
  j["X"] = r.X.size() ? to_json(r.X) : json(nullptr);
  if (r.support) j["support"] = detail::write_indices(*r.support);
  return j;
}

inline json to_json(const PhaseCell& c) {
  return {{"mode", to_string(c.mode)},
          {"n", c.n},
          {"dim", c.dim},
          {"N", c.N},
          {"threshold_met", c.threshold_met},
          {"trials", c.trials},
          {"successes", c.successes},
          {"rate", c.rate},
          {"mean_runtime_ms", c.mean_runtime_ms},
          {"skipped_reason", c.skipped_reason}};
}

inline json to_json(const std::vector<PhaseCell>& cells) {
  json a = json::array();
  for (const auto& c : cells) a.push_back(to_json(c));
  return a;
}

/// Sweep config: {"mode": "subspace"|"joint_sparse", "n", "m"?, "dim_range":
/// [lo, hi], "N_range": [lo, hi], "trials", "seed", "tol"?, "output"?,
/// "require_recovery"?, "record_timing"?, "max_cells"?}.
inline SweepConfig sweep_config_from_json(const json& j) {
  const std::string ctx = "sweep config";
  SweepConfig cfg;
  const json& mode = detail::field(j, "mode", ctx);
  if (mode == "subspace") {
    cfg.mode = Mode::Subspace;
  } else if (mode == "joint_sparse") {
    cfg.mode = Mode::JointSparse;
  } else {
    throw InputError(ctx + ": field 'mode' must be \"subspace\" or \"joint_sparse\"");
  }
  cfg.n = detail::read_count(j, "n", ctx);
  if (j.contains("m")) cfg.m = detail::read_count(j, "m", ctx);
  auto range = [&](const char* name) {
    const json& r = detail::field(j, name, ctx);
    if (!r.is_array() || r.size() != 2 || !detail::is_count(r[0]) || !detail::is_count(r[1]))
      throw InputError(ctx + ": field '" + name + "' must be [first, last] nonnegative integers");
    return IntRange{r[0].get<std::size_t>(), r[1].get<std::size_t>()};
  };
  cfg.dim_range = range("dim_range");
  cfg.N_range = range("N_range");
  cfg.trials = detail::read_count(j, "trials", ctx);
  const json& seed = detail::field(j, "seed", ctx);
  if (!detail::is_count(seed)) throw InputError(ctx + ": field 'seed' must be a nonnegative integer");
  cfg.base_seed = seed.get<std::uint64_t>();
  if (auto it = j.find("tol"); it != j.end() && !it->is_null()) {
    if (!it->is_number() || it->get<double>() < 0.0) throw InputError(ctx + ": field 'tol' must be >= 0");
    cfg.tol = it->get<double>();
  }
  if (auto it = j.find("output"); it != j.end()) {
    if (!it->is_string()) throw InputError(ctx + ": field 'output' must be a string");
    cfg.output_path = it->get<std::string>();
  }
  auto flag = [&](const char* name, bool& dst) {
    if (auto it = j.find(name); it != j.end()) {
      if (!it->is_boolean()) throw InputError(ctx + ": field '" + std::string(name) + "' must be boolean");
      dst = it->get<bool>();
    }
  };
  flag("require_recovery", cfg.require_recovery);
  flag("record_timing", cfg.record_timing);
  if (j.contains("max_cells")) cfg.max_cells = detail::read_count(j, "max_cells", ctx);
  validate(cfg);
  return cfg;
}

inline json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path + "': malformed JSON: " + e.what());
  }
}

inline void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace bgpc::io
