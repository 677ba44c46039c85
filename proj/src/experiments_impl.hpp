#pragma once

// Internal plumbing shared by the experiment translation units. Not installed.

#include <string>
#include <vector>

#include "pathspace/experiments.hpp"
#include "pathspace/montecarlo.hpp"
#include "pathspace/report.hpp"

namespace pathspace {
namespace detail {

struct Ctx {
  Config cfg;  // merged with defaults
  std::string id;
  std::uint64_t seed = 0;
  std::string dir;  // <out>/<id>/<seed>
  int threads = 1;
  bool plots = false;
  ExperimentResult res;

  double d(const std::string& key) const { return cfg.get_double(key); }
  int i(const std::string& key) const { return cfg.get_int(key); }
  std::string s(const std::string& key) const { return cfg.get_string(key); }
  std::vector<double> list(const std::string& key) const { return cfg.get_list(key); }

  // Two-sided z-test: pass iff |value - target| <= 3 se.
  CheckRow& check_z(const std::string& name, double value, double target, double se,
                    bool mandatory = true);
  // Absolute tolerance: pass iff |value - target| <= tol (reported in `se`).
  CheckRow& check_tol(const std::string& name, double value, double target, double tol,
                      bool mandatory = true);
  // One-sided margin: pass iff value <= bound + 3 se (se may be 0).
  CheckRow& check_le(const std::string& name, double value, double bound, double se,
                     bool mandatory = true);
  // Free-form: caller supplies the verdict.
  CheckRow& check_bool(const std::string& name, bool pass, double value, double target,
                       bool mandatory = true);

  void artifact(const std::string& filename);
  std::string path_of(const std::string& filename) const { return dir + "/" + filename; }
  void maybe_plot(const std::string& filename, const std::string& title,
                  const std::string& x_label, const std::string& y_label,
                  const std::vector<SvgSeries>& series, bool log_x = false, bool log_y = false);
};

void run_bm_stats(Ctx& c);
void run_ibp(Ctx& c);
void run_dirichlet_form(Ctx& c);
void run_grad_expectation(Ctx& c);
void run_lsi(Ctx& c);
void run_poincare(Ctx& c);
void run_poincare_failure(Ctx& c);
void run_nonergodicity(Ctx& c);
void run_tail_bound(Ctx& c);
void run_spde_invariance(Ctx& c);
void run_covariance_limit(Ctx& c);
void run_ergodicity(Ctx& c);
void run_stationarity(Ctx& c);
void run_shift_invariance(Ctx& c);

// Largest admissible bound constant c2(n) = sup_{t>0} ( t sqrt((n-1) K1(t)) - 2 c1 t^2 )
// for the radial tail estimate, with K1(r) = curv_c * (1 + r^alpha); grid scan
// plus golden-section refinement.
double tail_c2_constant(int n, double c1, double curv_c, double alpha);

}  // namespace detail
}  // namespace pathspace
