#ifndef MSDG_HARNESS_HPP
#define MSDG_HARNESS_HPP

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "msdg/linsolve.hpp"
#include "msdg/solution.hpp"

namespace msdg {

/// Condition-number policy for experiment runs.  automatic picks the dense
/// SVD up to dimension 2000 and the 1-norm estimate above.
enum class CondPolicy { automatic, dense, onenorm };

CondPolicy parse_cond_policy(const std::string& label);

/// One experiment configuration.
struct CasePoint {
  SpaceKind space;
  double eps = 0.005;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.5;
  int n = 10;
  CoefficientField f;
  double a = 0.0;
  double b = 1.0;
  CondPolicy cond = CondPolicy::automatic;
  double quad_ppw = 10.0;
  int quad_extra = 0;
};

/// One sweep point: configuration plus measured outputs.
struct ExperimentRecord {
  SpaceKind space;
  double eps = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.5;
  int n = 0;
  double h = 0.0;
  double l2_error_u = 0.0;
  double l2_error_q = 0.0;
  ConditionReport condition;
  bool singular = false;
  double wall_time = 0.0;  ///< seconds
};

/// Cartesian sweep specification.  Records come out ordered space-major,
/// then eps, then penalty pair, then N.
struct SweepSpec {
  std::string f_case = "sinp2";
  double a = 0.0;
  double b = 1.0;
  std::vector<SpaceKind> spaces;
  std::vector<double> eps_list;
  std::vector<std::pair<double, double>> penalties;  ///< (alpha, beta)
  double gamma = 0.5;
  std::vector<int> n_list;
  CondPolicy cond = CondPolicy::automatic;
  double quad_ppw = 10.0;
  int workers = 0;  ///< 0 = hardware concurrency
  std::filesystem::path ref_cache_dir = "msdg_ref_cache";
  std::int64_t n_ref_override = 0;  ///< 0 = default_reference_elements(eps)
};

/// Fine-mesh resolution used when none is requested: 250/eps elements
/// (50,000 at eps = 5e-3, 250,000 at eps = 1e-3), raised to the
/// 20-per-wavelength floor when needed.
std::int64_t default_reference_elements(const CoefficientField& f, double eps,
                                        double a, double b);

/// Disk-backed cache of reference solutions keyed by (f, eps, domain).
/// Generation is serialized per key; loads of stale or mismatched files
/// fall back to regeneration.
class ReferenceStore {
public:
  explicit ReferenceStore(std::filesystem::path dir);

  std::shared_ptr<const ReferenceSolution> get(const CoefficientField& f,
                                               double eps, double a, double b,
                                               std::int64_t n_ref = 0);

  std::filesystem::path cache_path(const std::string& f_name, double eps,
                                   std::int64_t n_ref) const;

private:
  std::filesystem::path dir_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const ReferenceSolution>> loaded_;
};

/// Runs one case end to end: assemble, factorize, solve, error, condition.
/// Constant-f cases are checked against the analytic plane wave; variable-f
/// cases need the reference (pass nullptr only for constant f).  Solver
/// singularity is surfaced in the record, never thrown.
ExperimentRecord run_case(const CasePoint& point,
                          const ReferenceSolution* reference);

/// Full Cartesian sweep; points run concurrently up to the worker limit and
/// the output order is deterministic (spec order, not completion order).
std::vector<ExperimentRecord> run_sweep(const SweepSpec& spec);

struct RatePoint {
  int n_coarse = 0;
  int n_fine = 0;
  double rate = 0.0;
  bool reliable = true;  ///< false when either error sits at round-off
};

/// Observed orders log(e1/e2)/log(N2/N1) for consecutive records of one
/// configuration sorted by N.  Pairs with an error below 1e-10 are flagged
/// unreliable.
std::vector<RatePoint> convergence_rates(std::vector<ExperimentRecord> records);

/// Resonance spikes in an N-scan: a point is a spike when its error is at
/// least spike_factor times the median error of its `window` nearest
/// neighbors in N; adjacent spikes merge and each region reports its peak N.
std::vector<int> resonance_report(std::vector<ExperimentRecord> records,
                                  double spike_factor = 10.0, int window = 8);

/// CSV with a fixed header and 6-significant-digit scientific floats.
/// wall_time is written as zero unless include_times is set, keeping the
/// byte-level output reproducible across runs.
void write_csv(const std::vector<ExperimentRecord>& records, std::ostream& out,
               bool include_times = false);
void write_csv(const std::vector<ExperimentRecord>& records,
               const std::filesystem::path& path, bool include_times = false);

std::vector<ExperimentRecord> read_csv(std::istream& in);
std::vector<ExperimentRecord> read_csv(const std::filesystem::path& path);

/// Two-column (log10 N, log10 value) files, one error file and one
/// condition file per (space, eps, penalty) curve:
/// <prefix><space>_eps<eps>_a<alpha>_b<beta>_{err,cond}.txt
void emit_plot_data(const std::vector<ExperimentRecord>& records,
                    const std::string& prefix);

/// "5:100,110:200:10,240" -> {5,...,100,110,...,200,240}.
std::vector<int> parse_n_list(const std::string& text);

}  // namespace msdg

#endif
