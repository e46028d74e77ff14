#include "dplogit/csv.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace dplogit {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, int line_no) {
  double v = 0.0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw std::runtime_error("CSV parse error at line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

long parse_long(const std::string& s, int line_no) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("CSV parse error at line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  return v;
}

}  // namespace

void write_panel_csv(const PanelDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "id,t";
  out << ",y";
  for (int k = 1; k <= data.spec.K; ++k) out << ",x" << k;
  out << '\n';
  out.precision(17);
  for (const Individual& ind : data.individuals) {
    for (int j = 0; j < ind.y.size(); ++j) {
      const bool y_obs = ind.outcome_observed(j);
      const bool x_obs = ind.regressors_observed(j);
      if (!y_obs && !x_obs) continue;  // fully missing period: leave a gap
      out << ind.id << ',' << j << ',';
      if (y_obs) out << ind.y(j);
      for (int k = 0; k < data.spec.K; ++k) {
        out << ',';
        if (x_obs) out << ind.x(j, k);
      }
      out << '\n';
    }
  }
}

PanelDataset read_panel_csv(const std::string& path, int p) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("CSV parse error: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "id" || header[1] != "t" || header[2] != "y")
    throw std::runtime_error("CSV parse error: header must start with id,t,y");
  const int K = static_cast<int>(header.size()) - 3;
  for (int k = 0; k < K; ++k)
    if (header[3 + k] != "x" + std::to_string(k + 1))
      throw std::runtime_error("CSV parse error: regressor columns must be x1..xK in order");

  struct Row {
    long t;
    int y;  // -1 missing
    Eigen::RowVectorXd x;
  };
  std::vector<std::string> order;
  std::map<std::string, std::vector<Row>> rows;
  std::map<std::string, std::map<long, int>> seen;
  long t_min = std::numeric_limits<long>::max(), t_max = std::numeric_limits<long>::min();

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != 3 + K)
      throw std::runtime_error("CSV parse error at line " + std::to_string(line_no) + ": expected " +
                               std::to_string(3 + K) + " fields");
    Row row;
    const std::string& id = fields[0];
    row.t = parse_long(fields[1], line_no);
    if (fields[2].empty()) row.y = -1;
    else {
      const long y = parse_long(fields[2], line_no);
      if (y != 0 && y != 1)
        throw std::runtime_error("CSV parse error at line " + std::to_string(line_no) + ": y must be 0 or 1");
      row.y = static_cast<int>(y);
    }
    row.x.resize(K);
    for (int k = 0; k < K; ++k)
      row.x(k) = fields[3 + k].empty() ? std::numeric_limits<double>::quiet_NaN() : parse_double(fields[3 + k], line_no);
    if (rows.find(id) == rows.end()) order.push_back(id);
    auto& dup = seen[id];
    if (dup.count(row.t))
      throw std::runtime_error("CSV parse error at line " + std::to_string(line_no) + ": duplicate (id,t)");
    dup[row.t] = 1;
    t_min = std::min(t_min, row.t);
    t_max = std::max(t_max, row.t);
    rows[id].push_back(std::move(row));
  }
  if (order.empty()) throw std::runtime_error("CSV parse error: no data rows in " + path);

  const int t_obs = static_cast<int>(t_max - t_min + 1);
  PanelDataset data;
  data.spec.p = p;
  data.spec.T = t_obs - p;
  data.spec.K = K;
  if (data.spec.T < 1) throw std::runtime_error("read_panel_csv: fewer periods than lags");
  for (const std::string& id : order) {
    Individual ind;
    ind.id = id;
    ind.y = Eigen::ArrayXi::Constant(t_obs, -1);
    ind.x = Eigen::MatrixXd::Constant(t_obs, K, std::numeric_limits<double>::quiet_NaN());
    for (const Row& row : rows[id]) {
      const int j = static_cast<int>(row.t - t_min);
      ind.y(j) = row.y;
      if (K > 0) ind.x.row(j) = row.x;
    }
    data.individuals.push_back(std::move(ind));
  }
  return data;
}

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::runtime_error("config: bad boolean for " + key + ": " + v);
}

}  // namespace

RunConfig RunConfig::from_map(const std::map<std::string, std::string>& kv) {
  RunConfig cfg;
  for (const auto& [key, value] : kv) {
    if (key == "p") cfg.p = static_cast<int>(parse_long(value, 0));
    else if (key == "weighting") {
      if (value != "pilot" && value != "identity") throw std::runtime_error("config: weighting must be pilot|identity");
      cfg.weighting = value;
    } else if (key == "grad_tol") cfg.grad_tol = parse_double(value, 0);
    else if (key == "max_iter") cfg.max_iter = static_cast<int>(parse_long(value, 0));
    else if (key == "restarts") cfg.restarts = static_cast<int>(parse_long(value, 0));
    else if (key == "bootstrap") cfg.bootstrap = static_cast<int>(parse_long(value, 0));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(value, 0));
    else if (key == "threads") cfg.threads = static_cast<int>(parse_long(value, 0));
    else if (key == "triplet_weighting") cfg.triplet_weighting = parse_bool(value, key);
    else if (key == "t_i_counts_outcomes") cfg.t_i_counts_outcomes = parse_bool(value, key);
    else throw std::runtime_error("config: unknown key '" + key + "'");
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config parse error at line " + std::to_string(line_no) + ": expected key=value");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return from_map(kv);
}

std::map<std::string, std::string> RunConfig::to_map() const {
  std::map<std::string, std::string> kv;
  kv["p"] = std::to_string(p);
  kv["weighting"] = weighting;
  kv["grad_tol"] = std::to_string(grad_tol);
  kv["max_iter"] = std::to_string(max_iter);
  kv["restarts"] = std::to_string(restarts);
  kv["bootstrap"] = std::to_string(bootstrap);
  kv["seed"] = std::to_string(seed);
  kv["threads"] = std::to_string(threads);
  kv["triplet_weighting"] = triplet_weighting ? "true" : "false";
  kv["t_i_counts_outcomes"] = t_i_counts_outcomes ? "true" : "false";
  return kv;
}

}  // namespace dplogit
