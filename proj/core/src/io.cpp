#include "descest/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace descest {
namespace io {

namespace {

using nlohmann::json;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ContractViolation("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

int nesting_depth(const json& j) {
  if (!j.is_array()) return 0;
  if (j.empty()) return 1;
  return 1 + nesting_depth(j[0]);
}

Mat mat_from_json(const json& j, const std::string& what) {
  if (nesting_depth(j) != 2) throw ContractViolation(what + ": expected a matrix [[..]]");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = rows > 0 ? static_cast<Index>(j[0].size()) : 0;
  Mat M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (static_cast<Index>(j[i].size()) != cols) {
      throw ContractViolation(what + ": ragged rows");
    }
    for (Index k = 0; k < cols; ++k) M(i, k) = j[i][k].get<double>();
  }
  if (!M.allFinite()) throw ContractViolation(what + ": non-finite entries");
  return M;
}

Vec vec_from_json(const json& j, const std::string& what) {
  if (nesting_depth(j) != 1) throw ContractViolation(what + ": expected a vector [..]");
  Vec v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

/// Accepts [[..]] (single matrix, broadcast) or [[[..]]] (sequence).
std::vector<Mat> mat_seq_from_json(const json& j, int count, const std::string& what) {
  int depth = nesting_depth(j);
  if (depth == 2) {
    return std::vector<Mat>(count, mat_from_json(j, what));
  }
  if (depth != 3) throw ContractViolation(what + ": expected [[..]] or [[[..]]]");
  if (static_cast<int>(j.size()) != count) {
    throw ContractViolation(what + ": expected " + std::to_string(count) + " matrices, got " +
                            std::to_string(j.size()));
  }
  std::vector<Mat> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(mat_from_json(j[i], what + "[" + std::to_string(i) + "]"));
  }
  return out;
}

const json& require(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw ContractViolation(path + ": missing field \"" + key + "\"");
  return *it;
}

json mat_to_json(const Mat& M) {
  json rows = json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

std::vector<std::vector<double>> read_csv_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ContractViolation(path + ": empty CSV");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const std::string& f : split_csv_line(line)) {
      try {
        row.push_back(std::stod(f));
      } catch (const std::exception&) {
        throw ContractViolation(path + ": bad numeric field \"" + f + "\"");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

DiscreteProblem load_discrete_model(const std::string& path) {
  json j = read_json_file(path);
  DiscreteProblem p;
  p.model.n = require(j, "n", path).get<int>();
  p.model.steps = require(j, "N", path).get<int>();
  p.model.time_invariant = j.value("time_invariant", false);
  const int N = p.model.steps;
  p.model.F = mat_seq_from_json(require(j, "F", path), N + 1, path + ": F");
  p.model.C = mat_seq_from_json(require(j, "C", path), N, path + ": C");
  p.model.H = mat_seq_from_json(require(j, "H", path), N + 1, path + ": H");
  p.weights.S = mat_from_json(require(j, "S", path), path + ": S");
  p.weights.S_seq = mat_seq_from_json(require(j, "S_seq", path), N, path + ": S_seq");
  p.weights.R_seq = mat_seq_from_json(require(j, "R_seq", path), N + 1, path + ": R_seq");
  return p;
}

void write_discrete_model(const std::string& path, const DiscreteProblem& p) {
  json j;
  j["n"] = p.model.n;
  j["N"] = p.model.steps;
  j["time_invariant"] = p.model.time_invariant;
  if (p.model.time_invariant) {
    j["F"] = mat_to_json(p.model.F[0]);
    j["C"] = mat_to_json(p.model.C.empty() ? Mat(0, p.model.n) : p.model.C[0]);
    j["H"] = mat_to_json(p.model.H[0]);
    j["S_seq"] = mat_to_json(p.weights.S_seq.empty() ? Mat(0, 0) : p.weights.S_seq[0]);
    j["R_seq"] = mat_to_json(p.weights.R_seq[0]);
  } else {
    auto seq = [](const std::vector<Mat>& ms) {
      json arr = json::array();
      for (const Mat& m : ms) arr.push_back(mat_to_json(m));
      return arr;
    };
    j["F"] = seq(p.model.F);
    j["C"] = seq(p.model.C);
    j["H"] = seq(p.model.H);
    j["S_seq"] = seq(p.weights.S_seq);
    j["R_seq"] = seq(p.weights.R_seq);
  }
  j["S"] = mat_to_json(p.weights.S);
  atomic_write(path, j.dump(2) + "\n");
}

ContinuousProblem load_continuous_model(const std::string& path) {
  json j = read_json_file(path);
  ContinuousProblem p;
  p.model.F = mat_from_json(require(j, "F", path), path + ": F");
  p.grid.t0 = require(j, "t0", path).get<double>();
  p.grid.T = require(j, "T", path).get<double>();
  p.grid.K = require(j, "K", path).get<int>();
  p.model.t0 = p.grid.t0;
  p.model.T = p.grid.T;
  const int nodes = p.grid.K + 1;
  p.model.C = mat_seq_from_json(require(j, "C", path), nodes, path + ": C");
  p.model.H = mat_seq_from_json(require(j, "H", path), nodes, path + ": H");
  p.model.Q0 = mat_from_json(require(j, "Q0", path), path + ": Q0");
  p.model.Q1 = mat_seq_from_json(require(j, "Q1", path), nodes, path + ": Q1");
  p.model.Q2 = mat_seq_from_json(require(j, "Q2", path), nodes, path + ": Q2");

  const json& ell = require(j, "ell", path);
  if (nesting_depth(ell) == 1) {
    p.model.ell.assign(nodes, vec_from_json(ell, path + ": ell"));
  } else if (nesting_depth(ell) == 2) {
    if (static_cast<int>(ell.size()) != nodes) {
      throw ContractViolation(path + ": ell must have K+1 node samples");
    }
    for (const auto& e : ell) p.model.ell.push_back(vec_from_json(e, path + ": ell"));
  } else {
    throw ContractViolation(path + ": ell must be [..] or [[..]]");
  }
  return p;
}

MeasurementSequence load_measurements_csv(const std::string& path) {
  MeasurementSequence y;
  for (const auto& row : read_csv_rows(path)) {
    if (row.size() < 2) throw ContractViolation(path + ": row needs k plus components");
    Vec v(static_cast<Index>(row.size()) - 1);
    for (Index i = 0; i < v.size(); ++i) v(i) = row[i + 1];
    y.y.push_back(v);
  }
  return y;
}

std::string measurements_to_csv(const MeasurementSequence& y) {
  std::ostringstream os;
  os.precision(17);
  Index dim = y.y.empty() ? 0 : y.y[0].size();
  os << "k";
  for (Index i = 0; i < dim; ++i) os << ",y" << i;
  os << "\n";
  for (std::size_t k = 0; k < y.y.size(); ++k) {
    os << k;
    for (Index i = 0; i < y.y[k].size(); ++i) os << "," << y.y[k](i);
    os << "\n";
  }
  return os.str();
}

std::vector<Vec> load_grid_measurements_csv(const std::string& path) {
  std::vector<Vec> out;
  for (const auto& row : read_csv_rows(path)) {
    if (row.size() < 2) throw ContractViolation(path + ": row needs t plus components");
    Vec v(static_cast<Index>(row.size()) - 1);
    for (Index i = 0; i < v.size(); ++i) v(i) = row[i + 1];
    out.push_back(v);
  }
  return out;
}

std::string grid_values_to_csv(const Grid& grid, const std::vector<Vec>& values,
                               const std::string& value_prefix) {
  std::ostringstream os;
  os.precision(17);
  Index dim = values.empty() ? 0 : values[0].size();
  os << "t";
  for (Index i = 0; i < dim; ++i) os << "," << value_prefix << i;
  os << "\n";
  for (std::size_t j = 0; j < values.size(); ++j) {
    os << grid.node(static_cast<int>(j));
    for (Index i = 0; i < values[j].size(); ++i) os << "," << values[j](i);
    os << "\n";
  }
  return os.str();
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ContractViolation("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw NumericalError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw NumericalError("rename failed for " + target.string() + ": " + ec.message());
  }
}

}  // namespace io
}  // namespace descest
