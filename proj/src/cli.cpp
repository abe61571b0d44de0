#include "kronmle/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "kronmle/canonical.hpp"
#include "kronmle/errors.hpp"
#include "kronmle/likelihood_ideals.hpp"
#include "kronmle/matrix_io.hpp"
#include "kronmle/model.hpp"
#include "kronmle/random.hpp"
#include "kronmle/solvers.hpp"

namespace kronmle {

namespace {

using json = nlohmann::json;

struct RunConfig {
  long m1 = 0;
  long m2 = 0;
  long n = 0;
  long k = 0;
  std::string seed = "1";
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  std::size_t pair_budget = kDefaultPairBudget;
  std::string format = "text";
  std::string in;
  std::string out;
  std::string cache;
  std::string m1_range;
  std::string n_range;
  std::string case_name = "one";
  std::size_t instances = 100;
  bool no_compare = false;
};

class BadArguments : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t single_seed(const std::string& text) {
  const auto seeds = parse_range(text);
  if (seeds.size() != 1) throw BadArguments("expected a single seed, got '" + text + "'");
  return seeds.front();
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  file << content;
  if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

std::string read_input(const std::string& path) {
  if (path.empty()) throw BadArguments("--in is required");
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "'");
    buf << file.rdbuf();
  }
  return buf.str();
}

std::string format_double(double x) { return to_string(x); }

json matrix_json(const Matrix<double>& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

void require_positive(long v, const char* name) {
  if (v <= 0) throw BadArguments(std::string("--") + name + " must be positive");
}

int cmd_sample(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_positive(cfg.m1, "m1");
  require_positive(cfg.m2, "m2");
  require_positive(cfg.n, "n");
  const std::uint64_t seed = single_seed(cfg.seed);
  const auto sample = sample_matrix_normal(Matrix<double>::identity(cfg.m1),
                                           Matrix<double>::identity(cfg.m2),
                                           static_cast<std::size_t>(cfg.n), seed);
  std::ostringstream body;
  write_sample_set(body, sample);
  const ThresholdBounds b = thresholds(cfg.m1, cfg.m2);
  std::ostream& info = (cfg.out.empty() || cfg.out == "-") ? err : out;
  write_output(cfg.out, body.str(), out);
  info << "seed = " << seed << '\n';
  info << "k = " << sample.k() << '\n';
  info << "threshold bounds: lower " << format_double(b.lower.get_d()) << ", upper "
       << b.upper << '\n';
  return kExitOk;
}

int cmd_mle(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (!(cfg.tol > 0)) throw BadArguments("--tol must be positive");
  std::istringstream in(read_input(cfg.in));
  const SampleSet<double> sample = read_sample_set<double>(in);
  MleConfig config;
  config.flipflop.tol = cfg.tol;
  config.flipflop.max_iter = cfg.max_iter;
  const KroneckerEstimate<double> est = mle(sample, config);

  std::vector<double> deviations;
  if (est.method == EstimateMethod::Exact && !cfg.no_compare) {
    FlipFlopOptions ff = config.flipflop;
    ff.observer = [&](std::size_t, const SymmetricMatrix<double>&,
                      const SymmetricMatrix<double>& k2, double) {
      deviations.push_back(max_abs(k2.full() - est.k2.full()));
    };
    flipflop(sample, SymmetricMatrix<double>::identity(sample.m2()), ff);
  }

  std::ostringstream estimate;
  write_estimate(estimate, est);
  const bool to_stdout = cfg.out.empty() || cfg.out == "-";
  if (!to_stdout) write_output(cfg.out, estimate.str(), out);

  if (cfg.format == "json") {
    json j;
    j["method"] = to_string(est.method);
    j["m1"] = sample.m1();
    j["m2"] = sample.m2();
    j["n"] = sample.n();
    j["k"] = sample.k();
    j["iterations"] = est.iterations;
    j["converged"] = est.converged;
    j["loglik"] = est.loglik;
    j["K1"] = matrix_json(est.k1.full());
    j["K2"] = matrix_json(est.k2.full());
    if (!deviations.empty()) j["flipflop_deviation"] = deviations;
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "method: " << to_string(est.method) << '\n';
  out << "dims: m1 = " << sample.m1() << ", m2 = " << sample.m2() << ", n = " << sample.n()
      << ", k = " << sample.k() << '\n';
  out << "iterations: " << est.iterations << '\n';
  out << "converged: " << (est.converged ? "true" : "false") << '\n';
  out << "loglik: " << format_double(est.loglik) << '\n';
  if (!deviations.empty()) {
    out << "flip-flop deviation from exact K2 (max abs, det-normalized):\n";
    if (cfg.format == "csv") out << "sweep,deviation\n";
    for (std::size_t i = 0; i < deviations.size(); ++i) {
      if (cfg.format == "csv") {
        out << (i + 1) << ',' << format_double(deviations[i]) << '\n';
      } else {
        out << "  sweep " << (i + 1) << ": " << format_double(deviations[i]) << '\n';
      }
    }
  }
  if (to_stdout) out << "estimate:\n" << estimate.str();
  return kExitOk;
}

SymmetricMatrix<Rational> random_pd(std::size_t m, SeededRng& rng) {
  Matrix<Rational> l(m, m);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < m; ++c) l(r, c) = Rational(rng.uniform_int(-3, 3));
  return SymmetricMatrix<Rational>::symmetrize(l * l.transpose() + Matrix<Rational>::identity(m));
}

std::string rational_matrix_string(const Matrix<Rational>& m) {
  std::string s = "[";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    s += r ? ", [" : "[";
    for (std::size_t c = 0; c < m.cols(); ++c) s += (c ? ", " : "") + to_string(m(r, c));
    s += "]";
  }
  return s + "]";
}

int cmd_verify_lemma(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const std::uint64_t seed = single_seed(cfg.seed);
  bool all_ok = true;

  const Matrix<Rational> c_example{{1, 2}, {3, 4}, {5, 6}, {7, 8}};
  const SymmetricMatrix<Rational> k_example(Matrix<Rational>{{3, 1}, {1, 3}});
  const auto example = det_reduction_check(canonical_from_c<Rational>(2, 3, c_example), k_example);
  const bool example_ok = example.lhs == example.rhs;
  all_ok = all_ok && example_ok;
  out << "example (m1 = 4, m2 = 2, n = 3): lhs = " << to_string(example.lhs)
      << ", rhs = " << to_string(example.rhs) << ", det(K)^n = "
      << to_string(example.det_k_power) << ", inner det = " << to_string(example.inner_det)
      << '\n';
  out << "example inner matrix: " << rational_matrix_string(example.inner) << '\n';
  out << "example: " << (example_ok ? "pass" : "FAIL") << '\n';

  const bool fixed_dims = cfg.m1 > 0 || cfg.m2 > 0 || cfg.n > 0;
  if (fixed_dims) {
    require_positive(cfg.m1, "m1");
    require_positive(cfg.m2, "m2");
    require_positive(cfg.n, "n");
    if (cfg.n * cfg.m2 - cfg.m1 < 1) throw BadArguments("verify-lemma needs k = n*m2 - m1 >= 1");
  }
  SeededRng rng(seed);
  std::size_t passed = 0;
  for (std::size_t t = 0; t < cfg.instances; ++t) {
    std::size_t m1, m2, n;
    if (fixed_dims) {
      m1 = cfg.m1;
      m2 = cfg.m2;
      n = cfg.n;
    } else {
      long lm1 = 0, lm2 = 0, ln = 0;
      do {
        lm2 = rng.uniform_int(2, 4);
        const long k = rng.uniform_int(1, 4);
        ln = rng.uniform_int(1, 7);
        lm1 = ln * lm2 - k;
      } while (lm1 < 1 || lm1 > 10);
      m1 = lm1;
      m2 = lm2;
      n = ln;
    }
    const std::size_t k = n * m2 - m1;
    Matrix<Rational> c(m1, k);
    for (std::size_t r = 0; r < m1; ++r)
      for (std::size_t j = 0; j < k; ++j) c(r, j) = Rational(rng.uniform_int(-5, 5));
    const auto kmat = random_pd(m2, rng);
    const auto r = det_reduction_check(canonical_from_c<Rational>(m2, n, c), kmat);
    if (r.lhs == r.rhs) {
      ++passed;
    } else {
      all_ok = false;
      out << "FAIL: m1 = " << m1 << ", m2 = " << m2 << ", n = " << n << ": lhs = "
          << to_string(r.lhs) << ", rhs = " << to_string(r.rhs) << '\n';
    }
    if (fixed_dims && k == 1 && t == 0) {
      out << "k = 1: rhs = det(K)^n * " << to_string(r.inner(0, 0)) << " = "
          << to_string(r.rhs) << '\n';
    }
  }
  out << "random: " << passed << "/" << cfg.instances << " passed (seed " << seed << ")\n";
  return all_ok ? kExitOk : kExitFailure;
}

struct CellKey {
  std::size_t m1, n;
  std::uint64_t seed;
  auto operator<=>(const CellKey&) const = default;
};

std::map<CellKey, MlDegreeResult> load_cache(const std::string& path) {
  std::map<CellKey, MlDegreeResult> cache;
  if (path.empty()) return cache;
  std::ifstream file(path);
  std::string line;
  while (std::getline(file, line)) {
    std::istringstream ls(line);
    MlDegreeResult r;
    std::size_t degree = 0;
    int zero_dim = 0;
    if (ls >> r.m1 >> r.n >> r.seed >> degree >> zero_dim >> r.basis_size >> r.seconds) {
      r.degree = degree;
      r.zero_dimensional = zero_dim != 0;
      cache[{r.m1, r.n, r.seed}] = r;
    }
  }
  return cache;
}

std::string status_of(const MlDegreeResult& r) {
  if (r.timed_out) return "timeout";
  return *r.degree == 0 ? "degenerate" : "ok";
}

int cmd_mldegree(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.m1_range.empty() || cfg.n_range.empty()) {
    throw BadArguments("mldegree needs --m1 and --n (single values or ranges like 2-4)");
  }
  const auto m1s = parse_range(cfg.m1_range);
  const auto ns = parse_range(cfg.n_range);
  const auto seeds = parse_range(cfg.seed);
  for (auto m1 : m1s)
    if (m1 < 1) throw BadArguments("--m1 values must be positive");
  for (auto n : ns)
    if (n < 1) throw BadArguments("--n values must be positive");
  if (cfg.format != "text" && cfg.format != "csv" && cfg.format != "json") {
    throw BadArguments("--format must be text, csv or json");
  }

  std::vector<CellKey> cells;
  for (auto m1 : m1s)
    for (auto n : ns)
      for (auto s : seeds) cells.push_back({m1, n, s});

  auto cache = load_cache(cfg.cache);
  std::vector<MlDegreeResult> results(cells.size());
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto it = cache.find(cells[i]);
    if (it != cache.end()) {
      results[i] = it->second;
    } else {
      todo.push_back(i);
    }
  }

  std::mutex cache_mutex;
  std::ofstream cache_file;
  if (!cfg.cache.empty()) cache_file.open(cfg.cache, std::ios::app);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto work = [&] {
    for (;;) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= todo.size()) return;
      const std::size_t i = todo[slot];
      try {
        results[i] = ml_degree(cells[i].m1, cells[i].n, cells[i].seed, cfg.pair_budget);
      } catch (...) {
        std::lock_guard lock(cache_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
      const auto& r = results[i];
      if (!r.timed_out && cache_file.is_open()) {
        std::lock_guard lock(cache_mutex);
        cache_file << r.m1 << ' ' << r.n << ' ' << r.seed << ' ' << *r.degree << ' '
                   << (r.zero_dimensional ? 1 : 0) << ' ' << r.basis_size << ' '
                   << format_double(r.seconds) << std::endl;
      }
    }
  };
  const std::size_t workers = worker_count(todo.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::ostringstream body;
  if (cfg.format == "json") {
    json cells_json = json::array();
    for (const auto& r : results) {
      json j;
      j["m1"] = r.m1;
      j["n"] = r.n;
      j["seed"] = r.seed;
      j["degree"] = r.degree ? json(*r.degree) : json(nullptr);
      j["status"] = status_of(r);
      j["seconds"] = r.seconds;
      cells_json.push_back(j);
    }
    json doc;
    doc["m2"] = 2;
    doc["pair_budget"] = cfg.pair_budget;
    doc["cells"] = cells_json;
    body << doc.dump(2) << '\n';
  } else if (cfg.format == "csv") {
    body << "m1,n,seed,degree,status,seconds\n";
    for (const auto& r : results) {
      body << r.m1 << ',' << r.n << ',' << r.seed << ','
           << (r.degree ? std::to_string(*r.degree) : "") << ',' << status_of(r) << ','
           << format_double(r.seconds) << '\n';
    }
  } else {
    for (const auto& r : results) {
      body << "m1 = " << r.m1 << ", n = " << r.n << ", seed = " << r.seed << ": ";
      if (r.timed_out) {
        body << "TIMEOUT";
      } else {
        body << "degree " << *r.degree;
        if (*r.degree == 0) body << " (degenerate)";
      }
      body << " [" << format_double(r.seconds) << " s]\n";
    }
  }
  write_output(cfg.out, body.str(), out);
  if (!(cfg.out.empty() || cfg.out == "-")) {
    err << results.size() << " cells written to " << cfg.out << '\n';
  }
  return kExitOk;
}

int cmd_multiplicity(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const MultiplicityCase which = parse_multiplicity_case(cfg.case_name);
  const QuadraticInfo q = b0_quadratic(cfg.m2, cfg.k, which);
  const MultiplicityResult m = ml_multiplicity_prop43(cfg.m2, cfg.k, which, cfg.pair_budget);
  std::string roots;
  for (double r : q.real_roots) roots += (roots.empty() ? "" : ", ") + format_double(r);

  if (cfg.format == "json") {
    json j;
    j["case"] = to_string(which);
    j["m2"] = cfg.m2;
    j["k"] = cfg.k;
    j["quadratic"] = to_string(q.poly);
    j["denominator"] = to_string(q.denominator);
    j["discriminant"] = to_string(q.discriminant);
    j["real_roots"] = q.real_roots;
    j["count"] = m.count ? json(*m.count) : json(nullptr);
    j["timed_out"] = m.timed_out;
    j["bound"] = m.bound;
    j["at_least_two"] = m.at_least_two;
    j["within_bound"] = m.within_bound;
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "case " << to_string(which) << ", m2 = " << cfg.m2 << ", k = " << cfg.k << '\n';
  out << "b = 0 quadratic: " << to_string(q.poly) << '\n';
  out << "denominator: " << to_string(q.denominator) << '\n';
  out << "discriminant: " << to_string(q.discriminant) << '\n';
  out << "real roots: " << (roots.empty() ? "none" : roots) << '\n';
  if (m.timed_out) {
    out << "solutions: TIMEOUT\n";
  } else if (!m.count) {
    out << "solutions: infinitely many\n";
  } else {
    out << "solutions: " << *m.count << '\n';
    out << "at least two: " << (m.at_least_two ? "yes" : "no") << '\n';
    out << "bound <= " << m.bound << ": " << (m.within_bound ? "ok" : "EXCEEDED") << '\n';
  }
  return kExitOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kronecker covariance MLE toolkit", "kronmle"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* sample = app.add_subcommand("sample", "draw a seeded matrix normal sample (A = B = I)");
  sample->add_option("--m1", cfg.m1, "rows")->required();
  sample->add_option("--m2", cfg.m2, "columns")->required();
  sample->add_option("--n", cfg.n, "sample size")->required();
  sample->add_option("--seed", cfg.seed, "RNG seed");
  sample->add_option("--out", cfg.out, "output file (default stdout)");

  auto* mle_cmd = app.add_subcommand("mle", "estimate K1, K2 from a sample file");
  mle_cmd->add_option("--in", cfg.in, "sample file, '-' for stdin")->required();
  mle_cmd->add_option("--out", cfg.out, "estimate file (default stdout)");
  mle_cmd->add_option("--tol", cfg.tol, "flip-flop tolerance");
  mle_cmd->add_option("--max-iter", cfg.max_iter, "flip-flop sweep limit");
  mle_cmd->add_option("--format", cfg.format, "text | csv | json");
  mle_cmd->add_flag("--no-compare", cfg.no_compare, "skip the k = 1 flip-flop comparison");

  auto* verify = app.add_subcommand("verify-lemma", "check the determinant reduction identity");
  verify->add_option("--m1", cfg.m1, "rows (random dims when omitted)");
  verify->add_option("--m2", cfg.m2, "columns");
  verify->add_option("--n", cfg.n, "sample size");
  verify->add_option("--instances", cfg.instances, "random instances");
  verify->add_option("--seed", cfg.seed, "RNG seed");

  auto* mld = app.add_subcommand("mldegree", "ML degree table for m2 = 2");
  mld->add_option("--m1", cfg.m1_range, "m1 values, e.g. 2-4 or 2,3")->required();
  mld->add_option("--n", cfg.n_range, "n values")->required();
  mld->add_option("--seed", cfg.seed, "seed or seed list");
  mld->add_option("--pair-budget", cfg.pair_budget, "S-pair budget per cell");
  mld->add_option("--format", cfg.format, "text | csv | json");
  mld->add_option("--out", cfg.out, "output file (default stdout)");
  mld->add_option("--cache", cfg.cache, "resumable cell cache file");

  auto* mult = app.add_subcommand("multiplicity", "ML multiplicity of the structured two-case data sets");
  mult->add_option("--m2", cfg.m2, "m2")->required();
  mult->add_option("--k", cfg.k, "k = n*m2 - m1")->required();
  mult->add_option("--case", cfg.case_name, "one | two");
  mult->add_option("--pair-budget", cfg.pair_budget, "S-pair budget");
  mult->add_option("--format", cfg.format, "text | json");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitBadArguments;
  }

  if (sample->parsed()) return cmd_sample(cfg, out, err);
  if (mle_cmd->parsed()) return cmd_mle(cfg, out, err);
  if (verify->parsed()) return cmd_verify_lemma(cfg, out, err);
  if (mld->parsed()) return cmd_mldegree(cfg, out, err);
  return cmd_multiplicity(cfg, out, err);
}

}  // namespace

std::vector<std::size_t> parse_range(const std::string& text) {
  std::vector<std::size_t> values;
  std::stringstream ss(text);
  std::string part;
  auto number = [&](const std::string& s) -> std::size_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw BadArguments("bad range element '" + s + "' in '" + text + "'");
    }
    return std::stoull(s);
  };
  while (std::getline(ss, part, ',')) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      values.push_back(number(part));
    } else {
      const std::size_t lo = number(part.substr(0, dash));
      const std::size_t hi = number(part.substr(dash + 1));
      if (lo > hi) throw BadArguments("empty range '" + part + "'");
      for (std::size_t v = lo; v <= hi; ++v) values.push_back(v);
    }
  }
  if (values.empty()) throw BadArguments("empty range '" + text + "'");
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

std::size_t worker_count(std::size_t cells) {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("KRONMLE_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) workers = static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::min(workers, cells));
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const BadArguments& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadArguments;
  } catch (const WrongRegime& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadArguments;
  } catch (const NonPositiveK& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadArguments;
  } catch (const MleNotExists& e) {
    err << "MLE does not exist: " << e.what() << '\n';
    return kExitMleNotExists;
  } catch (const DegenerateData& e) {
    err << "degenerate data: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const SingularMatrix& e) {
    err << "degenerate data: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const NotPositiveDefinite& e) {
    err << "degenerate data: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const kronmle::ParseError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitBadArguments;
  } catch (const DimensionMismatch& e) {
    err << "input error: " << e.what() << '\n';
    return kExitBadArguments;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace kronmle
