// Experiment driver for the multiscale DG solver: single runs, sweeps,
// reference-cache management and post-processing of sweep CSVs.
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msdg/harness.hpp"

namespace {

using namespace msdg;

std::vector<SpaceKind> parse_spaces(const std::string& text) {
  std::vector<SpaceKind> out;
  std::istringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ','))
    if (!part.empty()) out.push_back(SpaceKind::parse(part));
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ','))
    if (!part.empty()) out.push_back(std::stod(part));
  return out;
}

// "0,0.1,1" -> equal alpha and beta; "0.5:0.25" -> distinct pair
std::vector<std::pair<double, double>> parse_penalties(
    const std::string& text) {
  std::vector<std::pair<double, double>> out;
  std::istringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    const auto colon = part.find(':');
    if (colon == std::string::npos) {
      const double v = std::stod(part);
      out.emplace_back(v, v);
    } else {
      out.emplace_back(std::stod(part.substr(0, colon)),
                       std::stod(part.substr(colon + 1)));
    }
  }
  return out;
}

void print_report(const std::vector<ExperimentRecord>& records,
                  std::ostream& out) {
  std::map<std::string, std::vector<ExperimentRecord>> groups;
  for (const ExperimentRecord& r : records) {
    std::ostringstream key;
    key << r.space.label() << " eps=" << r.eps << " alpha=" << r.alpha
        << " beta=" << r.beta << " gamma=" << r.gamma;
    groups[key.str()].push_back(r);
  }
  for (auto& [key, group] : groups) {
    out << "config: " << key << "\n";
    const auto rates = convergence_rates(group);
    if (rates.empty()) {
      out << "  rates: need at least two N values\n";
    } else {
      out << "  rates:\n";
      for (const RatePoint& rp : rates) {
        out << "    N " << rp.n_coarse << " -> " << rp.n_fine << ": "
            << rp.rate;
        if (!rp.reliable) out << "  (unreliable: round-off floor)";
        out << "\n";
      }
    }
    const auto peaks = resonance_report(group);
    if (peaks.empty()) {
      out << "  resonance spikes: none\n";
    } else {
      out << "  resonance spikes at N =";
      for (int n : peaks) out << ' ' << n;
      out << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiscale discontinuous Galerkin solver for the 1D "
               "stationary Schrodinger equation"};
  app.require_subcommand(1);

  // shared settings
  std::string space_arg = "E1";
  std::string eps_arg = "0.005";
  std::string penalty_arg = "0";
  std::string nelems_arg = "10";
  std::string fcase = "sinp2";
  std::string cond_arg = "auto";
  double a = 0.0, b = 1.0, gamma = 0.5, quad_ppw = 10.0;
  double alpha = 0.0, beta = 0.0, eps_single = 0.005;
  int nelems_single = 10, workers = 0;
  long long n_ref = 0;
  bool include_times = false;
  std::string out_path, plot_prefix, in_path;
  std::string ref_cache = "msdg_ref_cache";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--fcase", fcase, "coefficient case: const10 | sinp2")
        ->capture_default_str();
    cmd->add_option("--a", a, "left endpoint")->capture_default_str();
    cmd->add_option("--b", b, "right endpoint")->capture_default_str();
    cmd->add_option("--gamma", gamma, "boundary trace weight in (0,1)")
        ->capture_default_str();
    cmd->add_option("--quad-ppw", quad_ppw,
                    "quadrature points per wavelength")
        ->capture_default_str();
    cmd->add_option("--ref-cache", ref_cache,
                    "reference cache directory")
        ->envname("MSDG_REF_CACHE")
        ->capture_default_str();
  };

  CLI::App* run = app.add_subcommand("run", "solve one configuration");
  add_common(run);
  run->add_option("--space", space_arg, "space label (E1,E2,E3,T3,T5,P3)")
      ->capture_default_str();
  run->add_option("--eps", eps_single, "scale parameter eps")
      ->capture_default_str();
  run->add_option("--alpha", alpha, "penalty on [u]")->capture_default_str();
  run->add_option("--beta", beta, "penalty on [q]")->capture_default_str();
  run->add_option("--nelems", nelems_single, "number of elements")
      ->capture_default_str();
  run->add_option("--cond", cond_arg, "condition method: auto|dense|onenorm")
      ->capture_default_str();
  run->add_option("--nref", n_ref, "reference element count override");
  run->add_option("--out", out_path, "CSV output path (default stdout)");
  run->add_flag("--times", include_times, "write measured wall times");

  CLI::App* sweep = app.add_subcommand("sweep", "run a Cartesian sweep");
  add_common(sweep);
  sweep->set_config("--config", "", "flat key = value configuration file");
  sweep->add_option("--space", space_arg, "comma list of space labels")
      ->capture_default_str();
  sweep->add_option("--eps", eps_arg, "comma list of eps values")
      ->capture_default_str();
  sweep->add_option("--penalty", penalty_arg,
                    "comma list of alpha[:beta] penalty values")
      ->capture_default_str();
  sweep->add_option("--nelems", nelems_arg,
                    "element counts, e.g. 5:100,110:200:10,240")
      ->capture_default_str();
  sweep->add_option("--cond", cond_arg, "condition method: auto|dense|onenorm")
      ->capture_default_str();
  sweep->add_option("--workers", workers, "concurrent sweep points (0 = auto)")
      ->capture_default_str();
  sweep->add_option("--nref", n_ref, "reference element count override");
  sweep->add_option("--out", out_path, "CSV output path (default stdout)");
  sweep->add_option("--plot-prefix", plot_prefix,
                    "emit log-log plot data files with this prefix");
  sweep->add_flag("--times", include_times, "write measured wall times");

  CLI::App* reference =
      app.add_subcommand("reference", "build and cache a reference solution");
  add_common(reference);
  reference->add_option("--eps", eps_single, "scale parameter eps")
      ->capture_default_str();
  reference->add_option("--nref", n_ref,
                        "fine-mesh element count (0 = default for eps)");
  reference->add_option("--out", out_path,
                        "explicit cache file path (default: under the cache "
                        "directory)");

  CLI::App* report =
      app.add_subcommand("report", "convergence rates and spikes from a CSV");
  report->add_option("--in", in_path, "sweep CSV to analyze")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      CasePoint point;
      point.space = SpaceKind::parse(space_arg);
      point.eps = eps_single;
      point.alpha = alpha;
      point.beta = beta;
      point.gamma = gamma;
      point.n = nelems_single;
      point.f = CoefficientField::from_case(fcase);
      point.a = a;
      point.b = b;
      point.cond = parse_cond_policy(cond_arg);
      point.quad_ppw = quad_ppw;

      std::shared_ptr<const ReferenceSolution> ref;
      if (!point.f.constant) {
        ReferenceStore store(ref_cache);
        ref = store.get(point.f, point.eps, a, b, n_ref);
      }
      const ExperimentRecord rec = run_case(point, ref.get());
      if (out_path.empty())
        write_csv({rec}, std::cout, include_times);
      else
        write_csv({rec}, std::filesystem::path(out_path), include_times);
    } else if (sweep->parsed()) {
      SweepSpec spec;
      spec.f_case = fcase;
      spec.a = a;
      spec.b = b;
      spec.spaces = parse_spaces(space_arg);
      spec.eps_list = parse_doubles(eps_arg);
      spec.penalties = parse_penalties(penalty_arg);
      spec.gamma = gamma;
      spec.n_list = parse_n_list(nelems_arg);
      spec.cond = parse_cond_policy(cond_arg);
      spec.quad_ppw = quad_ppw;
      spec.workers = workers;
      spec.ref_cache_dir = ref_cache;
      spec.n_ref_override = n_ref;

      const auto records = run_sweep(spec);
      if (out_path.empty())
        write_csv(records, std::cout, include_times);
      else
        write_csv(records, std::filesystem::path(out_path), include_times);
      if (!plot_prefix.empty()) emit_plot_data(records, plot_prefix);
    } else if (reference->parsed()) {
      const CoefficientField f = CoefficientField::from_case(fcase);
      ReferenceStore store(ref_cache);
      if (n_ref <= 0) n_ref = default_reference_elements(f, eps_single, a, b);
      if (out_path.empty()) {
        store.get(f, eps_single, a, b, n_ref);
        std::cout << "cached: "
                  << store.cache_path(f.name, eps_single, n_ref).string()
                  << "\n";
      } else {
        const ReferenceSolution ref =
            generate_reference(f, eps_single, n_ref, a, b, gamma);
        save_reference(ref, out_path);
        std::cout << "wrote: " << out_path << "\n";
      }
    } else if (report->parsed()) {
      print_report(read_csv(std::filesystem::path(in_path)), std::cout);
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
