#include "qflqg/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "qflqg/pareto.hpp"

namespace qflqg::cli {

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& path, const std::string& why) const {
    std::ostringstream os;
    os << source_;
    if (node.IsDefined() && node.Mark().line >= 0) os << ":" << node.Mark().line + 1 << ":" << node.Mark().column + 1;
    os << ": " << path << ": " << why;
    throw ConfigError(os.str());
  }

  YAML::Node require(const YAML::Node& parent, const std::string& key, const std::string& path) const {
    YAML::Node child = parent[key];
    if (!child.IsDefined() || child.IsNull()) fail(parent, join(path, key), "missing required field");
    return child;
  }

  double number(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) fail(node, path, "expected a number");
    double v = 0.0;
    if (!YAML::convert<double>::decode(node, v)) fail(node, path, "expected a number, got '" + node.Scalar() + "'");
    return v;
  }

  long long integer(const YAML::Node& node, const std::string& path) const {
    const double v = number(node, path);
    if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 9.0e15) fail(node, path, "expected an integer");
    return static_cast<long long>(v);
  }

  std::uint64_t seed(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) fail(node, path, "expected an unsigned integer");
    std::uint64_t v = 0;
    if (!YAML::convert<std::uint64_t>::decode(node, v) || node.Scalar().starts_with("-")) {
      fail(node, path, "expected an unsigned 64-bit integer");
    }
    return v;
  }

  bool boolean(const YAML::Node& node, const std::string& path) const {
    bool v = false;
    if (!node.IsScalar() || !YAML::convert<bool>::decode(node, v)) fail(node, path, "expected true or false");
    return v;
  }

  std::string string(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) fail(node, path, "expected a string");
    return node.Scalar();
  }

  Vector vector(const YAML::Node& node, const std::string& path) const {
    if (node.IsScalar()) return Vector::Constant(1, number(node, path));
    if (!node.IsSequence()) fail(node, path, "expected a list of numbers");
    Vector v(static_cast<Eigen::Index>(node.size()));
    for (std::size_t i = 0; i < node.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(node[i], index(path, i));
    return v;
  }

  std::vector<double> list(const YAML::Node& node, const std::string& path) const {
    const Vector v = vector(node, path);
    return {v.data(), v.data() + v.size()};
  }

  Matrix matrix(const YAML::Node& node, const std::string& path) const {
    if (node.IsScalar()) return Matrix::Constant(1, 1, number(node, path));
    if (!node.IsSequence() || node.size() == 0) fail(node, path, "expected a matrix as a list of rows");
    const std::size_t rows = node.size();
    std::size_t cols = 0;
    for (std::size_t i = 0; i < rows; ++i) {
      const YAML::Node row = node[i];
      const std::size_t c = row.IsSequence() ? row.size() : 1;
      if (i == 0) cols = c;
      if (c != cols || c == 0) fail(row, index(path, i), "rows must have equal, nonzero length");
    }
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
      const YAML::Node row = node[i];
      if (!row.IsSequence()) {
        m(static_cast<Eigen::Index>(i), 0) = number(row, index(path, i));
        continue;
      }
      for (std::size_t j = 0; j < cols; ++j) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = number(row[j], index(index(path, i), j));
      }
    }
    return m;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
  static std::string index(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
  }

 private:
  std::string source_;
};

void check_shape(const Reader& rd, const YAML::Node& node, const std::string& path, const Matrix& m,
                 Eigen::Index rows, Eigen::Index cols) {
  if (m.rows() != rows || m.cols() != cols) {
    rd.fail(node, path, "expected " + std::to_string(rows) + "x" + std::to_string(cols) + ", got " + shape_string(m));
  }
}

void parse_model(const Reader& rd, const YAML::Node& root, ExperimentConfig& cfg) {
  const YAML::Node node = rd.require(root, "model", "");
  if (!node.IsMap()) rd.fail(node, "model", "expected a table");
  SystemModel& m = cfg.model;
  auto mat = [&](const char* key) { return rd.matrix(rd.require(node, key, "model"), std::string("model.") + key); };
  m.A = mat("A");
  m.B = mat("B");
  const Eigen::Index n = m.A.rows();

  if (YAML::Node dn = node["n"]; dn.IsDefined()) {
    const long long declared = rd.integer(dn, "model.n");
    if (declared != n || m.A.cols() != n) {
      rd.fail(node["A"], "model.A", "expected " + std::to_string(declared) + "x" + std::to_string(declared) +
                                        " for declared n, got " + shape_string(m.A));
    }
  }
  if (m.A.rows() != m.A.cols()) rd.fail(node["A"], "model.A", "must be square, got " + shape_string(m.A));
  const Eigen::Index mdim = m.B.cols();
  if (YAML::Node dm = node["m"]; dm.IsDefined()) {
    const long long declared = rd.integer(dm, "model.m");
    check_shape(rd, node["B"], "model.B", m.B, n, static_cast<Eigen::Index>(declared));
  }
  check_shape(rd, node["B"], "model.B", m.B, n, mdim);

  m.noise_cov = mat("noise_cov");
  check_shape(rd, node["noise_cov"], "model.noise_cov", m.noise_cov, n, n);
  m.init_cov = mat("init_cov");
  check_shape(rd, node["init_cov"], "model.init_cov", m.init_cov, n, n);
  if (YAML::Node mu = node["init_mean"]; mu.IsDefined() && !mu.IsNull()) {
    m.init_mean = rd.vector(mu, "model.init_mean");
    if (m.init_mean.size() != n) rd.fail(mu, "model.init_mean", "expected length " + std::to_string(n));
  } else {
    m.init_mean = Vector::Zero(n);
  }
  m.Q1 = mat("Q1");
  check_shape(rd, node["Q1"], "model.Q1", m.Q1, n, n);
  m.Q2 = mat("Q2");
  check_shape(rd, node["Q2"], "model.Q2", m.Q2, n, n);
  m.R = mat("R");
  check_shape(rd, node["R"], "model.R", m.R, mdim, mdim);
  const long long T = rd.integer(rd.require(node, "horizon", "model"), "model.horizon");
  if (T < 1 || T > 1000000) rd.fail(node["horizon"], "model.horizon", "must be a positive integer");
  m.horizon = static_cast<int>(T);

  try {
    m.validate();
  } catch (const ConfigError& e) {
    rd.fail(node, "model", e.what());
  }
}

void parse_bank(const Reader& rd, const YAML::Node& root, ExperimentConfig& cfg) {
  const YAML::Node node = rd.require(root, "bank", "");
  if (!node.IsMap()) rd.fail(node, "bank", "expected a table");
  if (YAML::Node ol = node["include_open_loop"]; ol.IsDefined()) {
    cfg.include_open_loop = rd.boolean(ol, "bank.include_open_loop");
  }
  const YAML::Node qs = node["quantizers"];
  if (!qs.IsDefined() || qs.IsNull()) {
    if (!cfg.include_open_loop) rd.fail(node, "bank.quantizers", "missing required field");
    return;
  }
  if (!qs.IsSequence()) rd.fail(qs, "bank.quantizers", "expected a list");
  const Eigen::Index n = cfg.model.n();
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const std::string path = Reader::index("bank.quantizers", i);
    const YAML::Node q = qs[i];
    if (!q.IsMap()) rd.fail(q, path, "expected a table");
    QuantizerConfig qc;
    qc.name = q["name"].IsDefined() ? rd.string(q["name"], path + ".name") : "Q" + std::to_string(i + 1);
    qc.cost = rd.number(rd.require(q, "cost", path), path + ".cost");
    if (!(qc.cost >= 0.0) || !std::isfinite(qc.cost)) rd.fail(q["cost"], path + ".cost", "must be a finite value >= 0");

    const YAML::Node bp = q["breakpoints"];
    const YAML::Node cells = q["cells"];
    if (bp.IsDefined() == cells.IsDefined()) rd.fail(q, path, "give exactly one of 'breakpoints' or 'cells'");
    if (bp.IsDefined()) {
      if (!bp.IsSequence() || static_cast<Eigen::Index>(bp.size()) != n) {
        rd.fail(bp, path + ".breakpoints", "expected one list per axis (" + std::to_string(n) + ")");
      }
      for (std::size_t d = 0; d < bp.size(); ++d) {
        const YAML::Node axis = bp[d];
        const std::string ap = Reader::index(path + ".breakpoints", d);
        if (!axis.IsSequence()) rd.fail(axis, ap, "expected a list of numbers");
        qc.breakpoints.push_back(rd.list(axis, ap));
      }
      try {
        qc.cells = grid_cells(qc.breakpoints);
      } catch (const ConfigError& e) {
        rd.fail(bp, path + ".breakpoints", e.what());
      }
    } else {
      if (!cells.IsSequence() || cells.size() == 0) rd.fail(cells, path + ".cells", "expected a non-empty list");
      for (std::size_t j = 0; j < cells.size(); ++j) {
        const std::string cp = Reader::index(path + ".cells", j);
        const YAML::Node c = cells[j];
        Cell cell{rd.vector(rd.require(c, "lower", cp), cp + ".lower"), rd.vector(rd.require(c, "upper", cp), cp + ".upper")};
        if (cell.lower.size() != n || cell.upper.size() != n) rd.fail(c, cp, "bounds must have length " + std::to_string(n));
        for (Eigen::Index d = 0; d < n; ++d) {
          if (std::isnan(cell.lower(d)) || std::isnan(cell.upper(d)) || !(cell.lower(d) < cell.upper(d))) {
            rd.fail(c, cp, "requires lower < upper on every axis");
          }
          if (cell.lower(d) == inf || cell.upper(d) == -inf) rd.fail(c, cp, "empty cell");
        }
        qc.cells.push_back(std::move(cell));
      }
    }
    if (YAML::Node reps = q["representatives"]; reps.IsDefined() && !reps.IsNull()) {
      const Matrix r = rd.matrix(reps, path + ".representatives");
      if (r.rows() != static_cast<Eigen::Index>(qc.cells.size()) || r.cols() != n) {
        rd.fail(reps, path + ".representatives", "expected one length-" + std::to_string(n) + " row per cell");
      }
      for (Eigen::Index j = 0; j < r.rows(); ++j) qc.representatives.push_back(r.row(j).transpose());
    }
    cfg.quantizers.push_back(std::move(qc));
  }
  if (cfg.quantizers.empty() && !cfg.include_open_loop) rd.fail(qs, "bank.quantizers", "at least one quantizer is required");
}

void parse_policy(const Reader& rd, const YAML::Node& root, ExperimentConfig& cfg) {
  const YAML::Node node = root["policy"];
  if (!node.IsDefined() || node.IsNull()) return;
  if (!node.IsMap()) rd.fail(node, "policy", "expected a table");
  if (YAML::Node k = node["kind"]; k.IsDefined()) {
    try {
      cfg.policy.kind = parse_policy_kind(rd.string(k, "policy.kind"));
    } catch (const ConfigError& e) {
      rd.fail(k, "policy.kind", e.what());
    }
  }
  if (YAML::Node s = node["n_samples"]; s.IsDefined()) {
    const long long v = rd.integer(s, "policy.n_samples");
    if (v < 1 || v > 100000000) rd.fail(s, "policy.n_samples", "must be >= 1");
    cfg.policy.n_samples = static_cast<int>(v);
  }
  if (YAML::Node p = node["oracle_points"]; p.IsDefined()) {
    const long long v = rd.integer(p, "policy.oracle_points");
    if (v != 3 && v != 5) rd.fail(p, "policy.oracle_points", "must be 3 or 5");
    cfg.policy.oracle_points = static_cast<int>(v);
  }
}

void parse_run(const Reader& rd, const YAML::Node& root, ExperimentConfig& cfg) {
  cfg.run.betas = default_beta_grid();
  const YAML::Node node = root["run"];
  if (!node.IsDefined() || node.IsNull()) return;
  if (!node.IsMap()) rd.fail(node, "run", "expected a table");
  if (YAML::Node r = node["n_runs"]; r.IsDefined()) {
    const long long v = rd.integer(r, "run.n_runs");
    if (v < 1) rd.fail(r, "run.n_runs", "must be >= 1");
    cfg.run.n_runs = static_cast<std::size_t>(v);
  }
  if (YAML::Node s = node["seed"]; s.IsDefined()) cfg.run.seed = rd.seed(s, "run.seed");
  if (YAML::Node b = node["betas"]; b.IsDefined() && !b.IsNull()) {
    cfg.run.betas = rd.list(b, "run.betas");
    if (cfg.run.betas.empty()) rd.fail(b, "run.betas", "must not be empty");
    for (double beta : cfg.run.betas) {
      if (!(beta > 0.0 && beta <= 1.0)) rd.fail(b, "run.betas", "every beta must lie in (0, 1]");
    }
  }
  if (YAML::Node t = node["keep_traces"]; t.IsDefined()) {
    const long long v = rd.integer(t, "run.keep_traces");
    if (v < 0) rd.fail(t, "run.keep_traces", "must be >= 0");
    cfg.run.keep_traces = static_cast<std::size_t>(v);
  }
}

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json bound_json(double v) {
  // JSON has no infinity; YAML reads these spellings back as +-inf.
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  return v;
}

}  // namespace

BankSpec ExperimentConfig::bank_spec() const {
  BankSpec spec;
  spec.include_open_loop = include_open_loop;
  for (const QuantizerConfig& q : quantizers) spec.quantizers.push_back({q.cells, q.cost, q.representatives});
  return spec;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source_name) {
  Reader rd(source_name);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    std::ostringstream os;
    os << source_name << ":" << e.mark.line + 1 << ":" << e.mark.column + 1 << ": " << e.msg;
    throw ConfigError(os.str());
  }
  if (!root.IsMap()) rd.fail(root, "<root>", "expected a table at top level");

  ExperimentConfig cfg;
  parse_model(rd, root, cfg);
  parse_bank(rd, root, cfg);
  parse_policy(rd, root, cfg);
  parse_run(rd, root, cfg);
  if (YAML::Node out = root["output"]; out.IsDefined() && !out.IsNull()) {
    if (!out.IsMap()) rd.fail(out, "output", "expected a table");
    if (YAML::Node dir = out["dir"]; dir.IsDefined()) cfg.output_dir = rd.string(dir, "output.dir");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

nlohmann::json resolved_json(const ExperimentConfig& cfg, bool with_output) {
  using nlohmann::json;
  const SystemModel& m = cfg.model;
  json model = {
      {"n", m.n()},
      {"m", m.m()},
      {"A", matrix_json(m.A)},
      {"B", matrix_json(m.B)},
      {"noise_cov", matrix_json(m.noise_cov)},
      {"init_mean", std::vector<double>(m.init_mean.data(), m.init_mean.data() + m.init_mean.size())},
      {"init_cov", matrix_json(m.init_cov)},
      {"Q1", matrix_json(m.Q1)},
      {"Q2", matrix_json(m.Q2)},
      {"R", matrix_json(m.R)},
      {"horizon", m.horizon},
  };
  json quantizers = json::array();
  for (const QuantizerConfig& q : cfg.quantizers) {
    json jq = {{"name", q.name}, {"cost", q.cost}};
    if (!q.breakpoints.empty()) {
      jq["breakpoints"] = q.breakpoints;
    } else {
      json cells = json::array();
      for (const Cell& c : q.cells) {
        json lo = json::array(), hi = json::array();
        for (Eigen::Index d = 0; d < c.lower.size(); ++d) {
          lo.push_back(bound_json(c.lower(d)));
          hi.push_back(bound_json(c.upper(d)));
        }
        cells.push_back({{"lower", lo}, {"upper", hi}});
      }
      jq["cells"] = cells;
    }
    if (!q.representatives.empty()) {
      Matrix r(static_cast<Eigen::Index>(q.representatives.size()), m.n());
      for (std::size_t j = 0; j < q.representatives.size(); ++j) r.row(static_cast<Eigen::Index>(j)) = q.representatives[j].transpose();
      jq["representatives"] = matrix_json(r);
    }
    quantizers.push_back(std::move(jq));
  }
  json out = {
      {"model", model},
      {"bank", {{"include_open_loop", cfg.include_open_loop}, {"quantizers", quantizers}}},
      {"policy",
       {{"kind", to_string(cfg.policy.kind)},
        {"n_samples", cfg.policy.n_samples},
        {"oracle_points", cfg.policy.oracle_points}}},
      {"run",
       {{"n_runs", cfg.run.n_runs},
        {"seed", cfg.run.seed},
        {"betas", cfg.run.betas},
        {"keep_traces", cfg.run.keep_traces}}},
  };
  if (with_output) out["output"] = {{"dir", cfg.output_dir}};
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = resolved_json(cfg, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qflqg::cli
