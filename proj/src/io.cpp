#include "equilib/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace equilib {

namespace {

using nlohmann::json;

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  if (s == "inf" || s == "+inf") return kInf;
  if (s == "-inf") return -kInf;
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("malformed number '" + s + "'");
  return v;
}

json measure_weights_json(const Eigen::VectorXd& w) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < w.size(); ++i) arr.push_back(w[i]);
  return arr;
}

}  // namespace

std::string format_double(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string cloud_to_csv(const PointCloud& cloud) {
  std::ostringstream out;
  for (int d = 0; d < cloud.dim; ++d) out << "x" << d << ",";
  out << "region\n";
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    for (int d = 0; d < cloud.dim; ++d) out << format_double(cloud.points(i, d)) << ",";
    out << cloud.region[i] << "\n";
  }
  return out.str();
}

PointCloud cloud_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty cloud CSV");
  const auto header = split_line(line);
  if (header.size() < 2 || header.back() != "region")
    throw std::invalid_argument("cloud CSV header must be x0,...,region");
  const int dim = static_cast<int>(header.size()) - 1;

  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw std::invalid_argument("cloud CSV row width mismatch");
    std::vector<double> coords(dim);
    for (int d = 0; d < dim; ++d) coords[d] = parse_double(cells[d]);
    rows.push_back(std::move(coords));
    labels.push_back(cells.back());
  }
  PointCloud cloud;
  cloud.dim = dim;
  cloud.points.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int d = 0; d < dim; ++d) cloud.points(static_cast<Eigen::Index>(i), d) = rows[i][d];
  cloud.region = std::move(labels);
  validate_cloud(cloud);
  return cloud;
}

std::string measure_to_csv(const DiscreteMeasure& nu) {
  std::ostringstream out;
  out << "index,weight\n";
  for (Eigen::Index i = 0; i < nu.size(); ++i)
    out << i << "," << format_double(nu.weights[i]) << "\n";
  return out.str();
}

DiscreteMeasure measure_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split_line(line) != std::vector<std::string>{"index", "weight"})
    throw std::invalid_argument("measure CSV header must be index,weight");
  std::vector<double> weights;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != 2) throw std::invalid_argument("measure CSV row width mismatch");
    const auto idx = static_cast<size_t>(std::stoll(cells[0]));
    if (idx != weights.size()) throw std::invalid_argument("measure CSV indices must be 0..N-1");
    weights.push_back(parse_double(cells[1]));
  }
  Eigen::VectorXd w(static_cast<Eigen::Index>(weights.size()));
  for (size_t i = 0; i < weights.size(); ++i) w[static_cast<Eigen::Index>(i)] = weights[i];
  DiscreteMeasure nu(std::move(w));
  validate_measure(nu);
  return nu;
}

nlohmann::json measure_to_json(const DiscreteMeasure& nu) {
  return measure_weights_json(nu.weights);
}

DiscreteMeasure measure_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("measure JSON must be an array");
  Eigen::VectorXd w(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) w[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  DiscreteMeasure nu(std::move(w));
  validate_measure(nu);
  return nu;
}

nlohmann::json field_to_json(const FieldSpec& field) {
  json out;
  if (field.kind == FieldCase::CaseI) {
    out["case"] = "I";
    json vals = json::array();
    for (Eigen::Index i = 0; i < field.values.size(); ++i) {
      if (field.values[i] == kInf) vals.push_back("inf");
      else vals.push_back(field.values[i]);
    }
    out["values"] = vals;
  } else {
    out["case"] = "II";
    out["zeta_plus"] = measure_to_json(field.zeta_plus);
    out["zeta_minus"] = measure_to_json(field.zeta_minus);
  }
  return out;
}

FieldSpec field_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("case").get<std::string>();
  if (kind == "I") {
    const auto& vals = j.at("values");
    Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) {
      if (vals[i].is_string()) {
        if (vals[i].get<std::string>() != "inf")
          throw std::invalid_argument("field value strings must be 'inf'");
        v[static_cast<Eigen::Index>(i)] = kInf;
      } else {
        v[static_cast<Eigen::Index>(i)] = vals[i].get<double>();
      }
    }
    return FieldSpec::case_i(std::move(v));
  }
  if (kind == "II")
    return FieldSpec::case_ii(measure_from_json(j.at("zeta_plus")),
                              measure_from_json(j.at("zeta_minus")));
  throw std::invalid_argument("field case must be 'I' or 'II'");
}

nlohmann::json solution_to_json(const Solution& sol, const SolverOptions& opts,
                                const std::string& hash) {
  json out;
  out["lambda"] = measure_to_json(sol.lambda);
  out["value"] = sol.value;
  out["gap"] = sol.gap;
  out["iterations"] = sol.iterations;
  out["ell"] = sol.ell == -kInf ? json("-inf") : json(sol.ell);
  out["L"] = sol.L == kInf ? json("inf") : json(sol.L);
  out["converged"] = sol.converged;
  out["provenance"]["options"]["max_iters"] = opts.max_iters;
  out["provenance"]["options"]["gap_tol"] = opts.gap_tol;
  out["provenance"]["options"]["step_rule"] =
      opts.step_rule == StepRule::ExactLineSearch ? "exact_line_search" : "fixed_decay";
  out["provenance"]["options"]["algorithm"] =
      opts.algorithm == Algorithm::ConditionalGradient ? "conditional_gradient"
                                                       : "projected_gradient";
  out["provenance"]["problem_hash"] = hash;
  return out;
}

nlohmann::json report_to_json(const VariationalReport& report) {
  json out;
  out["ell"] = report.ell == -kInf ? json("-inf") : json(report.ell);
  out["L"] = report.L == kInf ? json("inf") : json(report.L);
  out["w"] = report.w;
  out["w_interval"] = {out["ell"], out["L"]};
  out["eps_ineq"] = report.eps_ineq;
  out["eps_supp"] = report.eps_supp;
  auto viols = [](const std::vector<Violation>& v) {
    json arr = json::array();
    for (const auto& x : v) arr.push_back({{"index", x.index}, {"margin", x.margin}});
    return arr;
  };
  out["ineq1_violations"] = viols(report.ineq1_violations);
  out["ineq2_violations"] = viols(report.ineq2_violations);
  out["passed"] = report.passed;
  return out;
}

std::string report_to_text(const VariationalReport& report) {
  std::ostringstream out;
  out << "ell = " << format_double(report.ell) << ", L = " << format_double(report.L)
      << ", w = " << format_double(report.w) << "\n";
  out << "w-interval [" << format_double(report.ell) << ", " << format_double(report.L)
      << "], eps_ineq = " << format_double(report.eps_ineq)
      << ", eps_supp = " << format_double(report.eps_supp) << "\n";
  out << (report.passed ? "PASSED" : "FAILED") << "\n";
  auto dump = [&](const char* name, const std::vector<Violation>& v) {
    out << name << ": " << v.size() << " violation(s)\n";
    const size_t top = std::min<size_t>(v.size(), 10);
    for (size_t i = 0; i < top; ++i)
      out << "  index " << v[i].index << " margin " << format_double(v[i].margin) << "\n";
  };
  dump("ineq1 (W >= w g on residual support)", report.ineq1_violations);
  dump("ineq2 (W <= w g on support)", report.ineq2_violations);
  return out.str();
}

nlohmann::json family_to_json(const FamilyRun& run) {
  json stages = json::array();
  for (size_t s = 0; s < run.stages.size(); ++s) {
    const auto& st = run.stages[s];
    json j;
    j["id"] = st.id;
    j["value"] = st.value;
    j["gap"] = st.gap;
    j["feasible"] = st.feasible;
    j["skipped"] = st.skipped;
    j["distance_to_limit"] =
        run.distances[s] == kInf ? json("inf") : json(run.distances[s]);
    j["lambda"] = measure_to_json(st.lambda);
    stages.push_back(j);
  }
  json out;
  out["stages"] = stages;
  out["limit_value"] = run.limit_value;
  out["monotone"] = run.monotone;
  out["convex_bound_ok"] = run.convex_bound_ok;
  out["final_value_diff"] = run.final_value_diff;
  out["final_distance"] =
      run.final_distance == kInf ? json("inf") : json(run.final_distance);
  return out;
}

std::string family_to_csv(const FamilyRun& run) {
  std::ostringstream out;
  out << "stage,G,gap,distance_to_final\n";
  for (size_t s = 0; s < run.stages.size(); ++s) {
    const auto& st = run.stages[s];
    out << st.id << "," << format_double(st.value) << "," << format_double(st.gap) << ","
        << format_double(run.distances[s]) << "\n";
  }
  return out.str();
}

std::string problem_hash(const Problem& p) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const double* data, size_t count) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(data);
    for (size_t i = 0; i < count * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  mix(p.matrix->entries.data(), static_cast<size_t>(p.matrix->entries.size()));
  mix(p.g.data(), static_cast<size_t>(p.g.size()));
  mix(p.f.data(), static_cast<size_t>(p.f.size()));
  mix(p.sigma.weights.data(), static_cast<size_t>(p.sigma.weights.size()));
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace equilib
