#ifndef DPLOGIT_CSV_HPP
#define DPLOGIT_CSV_HPP

#include <map>
#include <string>

#include "dplogit/dataset.hpp"

namespace dplogit {

// Panel CSV interchange: comma separated, mandatory header
// id,t,y,x1,...,xK; '.' decimal; empty field = missing.  Periods per
// individual form an integer set with gaps allowed; individuals are aligned
// on the global period range.

void write_panel_csv(const PanelDataset& data, const std::string& path);

// p is the lag order used to split initial conditions from modeled periods.
PanelDataset read_panel_csv(const std::string& path, int p);

// Flat key=value run configuration.  Unknown keys are rejected; every key has
// a default.
struct RunConfig {
  int p = 1;
  std::string weighting = "pilot";  // pilot | identity
  double grad_tol = 1e-8;
  int max_iter = 500;
  int restarts = 5;
  int bootstrap = 0;  // replications; 0 disables
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  bool triplet_weighting = true;
  bool t_i_counts_outcomes = false;

  static RunConfig from_map(const std::map<std::string, std::string>& kv);
  static RunConfig from_file(const std::string& path);
  std::map<std::string, std::string> to_map() const;
};

}  // namespace dplogit

#endif  // DPLOGIT_CSV_HPP
