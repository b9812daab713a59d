#include "msdg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace msdg {

namespace {

std::string fmt_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::string fmt_compact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double finite_or_inf(double e) {
  return std::isnan(e) ? std::numeric_limits<double>::infinity() : e;
}

}  // namespace

CondPolicy parse_cond_policy(const std::string& label) {
  if (label == "auto") return CondPolicy::automatic;
  if (label == "dense") return CondPolicy::dense;
  if (label == "onenorm") return CondPolicy::onenorm;
  throw std::invalid_argument("unknown condition policy: " + label);
}

std::int64_t default_reference_elements(const CoefficientField& f, double eps,
                                        double a, double b) {
  if (!(eps > 0.0)) throw std::domain_error("eps must be positive");
  const auto by_eps = static_cast<std::int64_t>(std::ceil(250.0 / eps));
  return std::max(by_eps, min_reference_elements(f, eps, a, b));
}

ReferenceStore::ReferenceStore(std::filesystem::path dir)
    : dir_(std::move(dir)) {}

std::filesystem::path ReferenceStore::cache_path(const std::string& f_name,
                                                 double eps,
                                                 std::int64_t n_ref) const {
  return dir_ / ("ref_" + f_name + "_eps" + fmt_sci(eps) + "_N" +
                 std::to_string(n_ref) + ".msref");
}

std::shared_ptr<const ReferenceSolution> ReferenceStore::get(
    const CoefficientField& f, double eps, double a, double b,
    std::int64_t n_ref) {
  if (n_ref <= 0) n_ref = default_reference_elements(f, eps, a, b);
  std::ostringstream key;
  key << f.name << '|' << fmt_sci(eps) << '|' << fmt_sci(a) << '|'
      << fmt_sci(b) << '|' << n_ref;

  std::lock_guard<std::mutex> lock(mutex_);
  auto it = loaded_.find(key.str());
  if (it != loaded_.end()) return it->second;

  const std::filesystem::path path = cache_path(f.name, eps, n_ref);
  std::shared_ptr<const ReferenceSolution> ref;
  if (std::filesystem::exists(path)) {
    try {
      ref = std::make_shared<ReferenceSolution>(
          load_reference_checked(path, f.name, eps, a, b));
      if (ref->meta.n_ref != n_ref) ref.reset();
    } catch (const std::exception&) {
      ref.reset();  // stale or foreign file: regenerate
    }
  }
  if (!ref) {
    std::filesystem::create_directories(dir_);
    ref = std::make_shared<ReferenceSolution>(
        generate_reference(f, eps, n_ref, a, b));
    save_reference(*ref, path);
  }
  loaded_[key.str()] = ref;
  return ref;
}

ExperimentRecord run_case(const CasePoint& point,
                          const ReferenceSolution* reference) {
  const auto t0 = std::chrono::steady_clock::now();

  SolveConfig cfg{MeshPartition::uniform(point.a, point.b, point.n),
                  point.space,
                  point.eps,
                  point.f,
                  TraceParams{point.alpha, point.beta, point.gamma},
                  point.quad_ppw,
                  point.quad_extra,
                  1.0};

  ExperimentRecord rec;
  rec.space = point.space;
  rec.eps = point.eps;
  rec.alpha = point.alpha;
  rec.beta = point.beta;
  rec.gamma = point.gamma;
  rec.n = point.n;
  rec.h = cfg.mesh.h();

  WaveOracle oracle;
  if (point.f.constant) {
    oracle = exact_plane_wave(*point.f.constant, point.eps, point.a);
  } else {
    if (!reference)
      throw std::invalid_argument(
          "variable-coefficient case needs a reference solution");
    if (reference->meta.f_name != point.f.name ||
        reference->meta.eps != point.eps || reference->meta.a != point.a ||
        reference->meta.b != point.b)
      throw std::invalid_argument("reference does not match the case");
    oracle = reference->oracle();
  }

  GlobalSystem sys = assemble_global(cfg);
  BandedLU lu(sys);
  rec.singular = lu.near_singular();

  if (!lu.exactly_singular()) {
    DGSolution sol = make_solution(cfg, lu.solve(sys.rhs()));
    const L2Errors errs = l2_errors(sol, oracle);
    rec.l2_error_u = errs.u;
    rec.l2_error_q = errs.q;
  } else {
    rec.l2_error_u = std::numeric_limits<double>::quiet_NaN();
    rec.l2_error_q = std::numeric_limits<double>::quiet_NaN();
  }

  const bool dense =
      point.cond == CondPolicy::dense ||
      (point.cond == CondPolicy::automatic && sys.dimension() <= 2000);
  if (lu.exactly_singular()) {
    rec.condition = {std::numeric_limits<double>::infinity(),
                     dense ? CondMethod::dense_2norm
                           : CondMethod::onenorm_estimate,
                     sys.dimension(), true};
  } else if (dense) {
    rec.condition = condition_estimate(sys, CondMethod::dense_2norm);
  } else {
    rec.condition = {lu.condition_onenorm(), CondMethod::onenorm_estimate,
                     sys.dimension(), false};
    rec.condition.singular = !std::isfinite(rec.condition.value);
  }

  rec.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rec;
}

std::vector<ExperimentRecord> run_sweep(const SweepSpec& spec) {
  for (int n : spec.n_list)
    if (n < 1) throw std::invalid_argument("element counts must be >= 1");
  for (double eps : spec.eps_list)
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");

  const CoefficientField f = CoefficientField::from_case(spec.f_case);

  // references are produced up front, serialized per (f, eps) key
  std::map<double, std::shared_ptr<const ReferenceSolution>> refs;
  if (!f.constant && !spec.n_list.empty()) {
    ReferenceStore store(spec.ref_cache_dir);
    for (double eps : spec.eps_list)
      if (!refs.count(eps))
        refs[eps] =
            store.get(f, eps, spec.a, spec.b, spec.n_ref_override);
  }

  struct Job {
    CasePoint point;
    const ReferenceSolution* ref;
  };
  std::vector<Job> jobs;
  for (const SpaceKind& space : spec.spaces)
    for (double eps : spec.eps_list)
      for (const auto& [alpha, beta] : spec.penalties)
        for (int n : spec.n_list) {
          CasePoint p;
          p.space = space;
          p.eps = eps;
          p.alpha = alpha;
          p.beta = beta;
          p.gamma = spec.gamma;
          p.n = n;
          p.f = f;
          p.a = spec.a;
          p.b = spec.b;
          p.cond = spec.cond;
          p.quad_ppw = spec.quad_ppw;
          const auto it = refs.find(eps);
          jobs.push_back({p, it == refs.end() ? nullptr : it->second.get()});
        }

  std::vector<ExperimentRecord> records(jobs.size());
  int workers = spec.workers > 0
                    ? spec.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));

  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i)
      records[i] = run_case(jobs[i].point, jobs[i].ref);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        try {
          records[i] = run_case(jobs[i].point, jobs[i].ref);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  return records;
}

std::vector<RatePoint> convergence_rates(
    std::vector<ExperimentRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const ExperimentRecord& a, const ExperimentRecord& b) {
              return a.n < b.n;
            });
  std::vector<RatePoint> rates;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double e1 = records[i - 1].l2_error_u;
    const double e2 = records[i].l2_error_u;
    const double n1 = records[i - 1].n;
    const double n2 = records[i].n;
    RatePoint rp;
    rp.n_coarse = records[i - 1].n;
    rp.n_fine = records[i].n;
    rp.rate = std::log(e1 / e2) / std::log(n2 / n1);
    rp.reliable = std::isfinite(e1) && std::isfinite(e2) && e1 >= 1e-10 &&
                  e2 >= 1e-10;
    rates.push_back(rp);
  }
  return rates;
}

std::vector<int> resonance_report(std::vector<ExperimentRecord> records,
                                  double spike_factor, int window) {
  std::sort(records.begin(), records.end(),
            [](const ExperimentRecord& a, const ExperimentRecord& b) {
              return a.n < b.n;
            });
  const int count = static_cast<int>(records.size());
  if (count < 5) return {};

  std::vector<double> err(count);
  for (int i = 0; i < count; ++i)
    err[i] = finite_or_inf(records[i].l2_error_u);

  std::vector<bool> spike(count, false);
  std::vector<int> order(count);
  for (int i = 0; i < count; ++i) {
    // the `window` nearest other records by |N - N'|
    order.clear();
    for (int j = 0; j < count; ++j)
      if (j != i) order.push_back(j);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const int da = std::abs(records[a].n - records[i].n);
      const int db = std::abs(records[b].n - records[i].n);
      return da != db ? da < db : records[a].n < records[b].n;
    });
    const int w = std::min<int>(window, static_cast<int>(order.size()));
    std::vector<double> neighborhood(w);
    for (int k = 0; k < w; ++k) neighborhood[k] = err[order[k]];
    std::sort(neighborhood.begin(), neighborhood.end());
    const double median =
        w % 2 == 1 ? neighborhood[w / 2]
                   : 0.5 * (neighborhood[w / 2 - 1] + neighborhood[w / 2]);
    if (median > 0.0 || err[i] > 0.0)
      spike[i] = err[i] >= spike_factor * median;
  }

  std::vector<int> peaks;
  for (int i = 0; i < count;) {
    if (!spike[i]) {
      ++i;
      continue;
    }
    int best = i;
    int j = i;
    while (j < count && spike[j]) {
      if (err[j] > err[best]) best = j;
      ++j;
    }
    peaks.push_back(records[best].n);
    i = j;
  }
  return peaks;
}

static const char kCsvHeader[] =
    "space,eps,alpha,beta,gamma,N,h,l2_error_u,l2_error_q,cond,cond_method,"
    "singular,wall_time";

void write_csv(const std::vector<ExperimentRecord>& records, std::ostream& out,
               bool include_times) {
  out << kCsvHeader << '\n';
  for (const ExperimentRecord& r : records) {
    out << r.space.label() << ',' << fmt_sci(r.eps) << ',' << fmt_sci(r.alpha)
        << ',' << fmt_sci(r.beta) << ',' << fmt_sci(r.gamma) << ',' << r.n
        << ',' << fmt_sci(r.h) << ',' << fmt_sci(r.l2_error_u) << ','
        << fmt_sci(r.l2_error_q) << ',' << fmt_sci(r.condition.value) << ','
        << cond_method_label(r.condition.method) << ','
        << (r.singular ? 1 : 0) << ','
        << fmt_sci(include_times ? r.wall_time : 0.0) << '\n';
  }
}

void write_csv(const std::vector<ExperimentRecord>& records,
               const std::filesystem::path& path, bool include_times) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(records, out, include_times);
  if (!out) throw std::runtime_error("short write to " + path.string());
}

std::vector<ExperimentRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::runtime_error("unrecognized CSV header");
  std::vector<ExperimentRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 13)
      throw std::runtime_error("malformed CSV row: " + line);
    ExperimentRecord r;
    r.space = SpaceKind::parse(fields[0]);
    r.eps = std::stod(fields[1]);
    r.alpha = std::stod(fields[2]);
    r.beta = std::stod(fields[3]);
    r.gamma = std::stod(fields[4]);
    r.n = std::stoi(fields[5]);
    r.h = std::stod(fields[6]);
    r.l2_error_u = std::stod(fields[7]);
    r.l2_error_q = std::stod(fields[8]);
    r.condition.value = std::stod(fields[9]);
    r.condition.method = parse_cond_method(fields[10]);
    r.condition.dimension = 2 * r.space.local_dim() * r.n;
    r.condition.singular = !std::isfinite(r.condition.value);
    r.singular = fields[11] == "1";
    r.wall_time = std::stod(fields[12]);
    records.push_back(r);
  }
  return records;
}

std::vector<ExperimentRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_csv(in);
}

void emit_plot_data(const std::vector<ExperimentRecord>& records,
                    const std::string& prefix) {
  std::map<std::string, std::vector<const ExperimentRecord*>> curves;
  for (const ExperimentRecord& r : records) {
    const std::string key = r.space.label() + "_eps" + fmt_compact(r.eps) +
                            "_a" + fmt_compact(r.alpha) + "_b" +
                            fmt_compact(r.beta);
    curves[key].push_back(&r);
  }
  for (auto& [key, rows] : curves) {
    std::sort(rows.begin(), rows.end(),
              [](const ExperimentRecord* a, const ExperimentRecord* b) {
                return a->n < b->n;
              });
    std::ofstream err_out(prefix + key + "_err.txt", std::ios::trunc);
    std::ofstream cond_out(prefix + key + "_cond.txt", std::ios::trunc);
    if (!err_out || !cond_out)
      throw std::runtime_error("cannot write plot data with prefix " + prefix);
    for (const ExperimentRecord* r : rows) {
      if (std::isfinite(r->l2_error_u) && r->l2_error_u > 0.0)
        err_out << fmt_sci(std::log10(double(r->n))) << ' '
                << fmt_sci(std::log10(r->l2_error_u)) << '\n';
      if (std::isfinite(r->condition.value) && r->condition.value > 0.0)
        cond_out << fmt_sci(std::log10(double(r->n))) << ' '
                 << fmt_sci(std::log10(r->condition.value)) << '\n';
    }
  }
}

std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> out;
  std::istringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    int lo = 0, hi = 0, step = 1;
    const auto c1 = part.find(':');
    if (c1 == std::string::npos) {
      lo = hi = std::stoi(part);
    } else {
      lo = std::stoi(part.substr(0, c1));
      const auto c2 = part.find(':', c1 + 1);
      if (c2 == std::string::npos) {
        hi = std::stoi(part.substr(c1 + 1));
      } else {
        hi = std::stoi(part.substr(c1 + 1, c2 - c1 - 1));
        step = std::stoi(part.substr(c2 + 1));
      }
    }
    if (step < 1 || hi < lo)
      throw std::invalid_argument("bad element-count range: " + part);
    for (int n = lo; n <= hi; n += step) out.push_back(n);
  }
  return out;
}

}  // namespace msdg
