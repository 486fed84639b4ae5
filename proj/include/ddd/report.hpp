#pragma once

// JSON reports printed by the command-line tool.

#include <algorithm>

#include "json.hpp"

#include "ddd/excitation.hpp"
#include "ddd/gain_estimator.hpp"
#include "ddd/oracle.hpp"
#include "ddd/verifier.hpp"

namespace ddd::report {

using json = nlohmann::json;

inline json to_json(const Verdict& v) {
  json j = {
      {"dissipative", v.dissipative},
      {"min_eigenvalue", v.min_eigenvalue},
      {"eig_tol", v.eig_tol},
      {"trajectory_min_eigenvalue", v.trajectory_min_eigenvalue},
      {"trajectory_dim", v.trajectory_dim},
      {"nullspace_dim", v.nullspace_dim},
      {"pe_order_checked", v.pe_order_checked},
      {"pe_passed", v.pe_passed},
      {"statement_ii_applicable", v.statement_ii_applicable},
      {"weighting", to_string(v.weighting)},
      {"L", v.horizon},
      {"nu", v.nu},
      {"N", v.depth},
      {"T", v.samples},
      {"hankel_shape", {v.hankel_rows, v.hankel_cols}},
      {"constraint_rows", v.constraint_rows},
      {"constraint_rank", v.constraint_rank},
      {"constraint_norm", v.constraint_norm},
      {"nullspace_residual", v.nullspace_residual},
  };
  if (v.pe_order_checked == 0) j["pe_passed"] = nullptr;
  return j;
}

inline json to_json(const OracleVerdict& v, Eigen::Index horizon, Eigen::Index nu, int depth,
                    double eig_tol, LeadIn lead_in) {
  return {{"dissipative", v.dissipative},
          {"min_eigenvalue", v.min_eigenvalue},
          {"eig_tol", eig_tol},
          {"input_dim", v.input_dim},
          {"lead_in", lead_in == LeadIn::kIncluded},
          {"L", horizon},
          {"nu", nu},
          {"N", depth}};
}

inline json to_json(const ExcitationReport& r, Eigen::Index order, std::size_t smallest = 10) {
  json sv = json::array();
  const Eigen::Index count = std::min<Eigen::Index>(static_cast<Eigen::Index>(smallest), r.singular_values.size());
  for (Eigen::Index i = 0; i < count; ++i) sv.push_back(r.singular_values(r.singular_values.size() - 1 - i));
  return {{"persistently_exciting", r.exciting},
          {"order", order},
          {"rank", r.rank},
          {"required_rank", r.required_rank},
          {"smallest_singular_values", sv}};
}

inline json to_json(const GainEstimate& e) {
  json history = json::array();
  for (const auto& h : e.history) history.push_back({h.gamma, h.min_eigenvalue});
  json j = {{"feasible", e.feasible()},
            {"gamma_est", nullptr},
            {"iterations", e.iterations},
            {"converged", e.converged},
            {"bracket", {e.lower, e.upper}},
            {"history", history}};
  if (e.gamma) j["gamma_est"] = *e.gamma;
  return j;
}

}  // namespace ddd::report
