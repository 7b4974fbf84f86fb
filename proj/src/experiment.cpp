#include "superkrylov/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "superkrylov/csv.hpp"
#include "superkrylov/error.hpp"
#include "superkrylov/random.hpp"

namespace superkrylov::experiment {

namespace {

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool uses_minimax(const ExperimentConfig& config, double theta) {
  switch (config.pair_mode) {
    case PairMode::Exact: return false;
    case PairMode::Minimax: return true;
    case PairMode::Auto: return theta > 0.0;
  }
  return theta > 0.0;
}

// Fits for gaps d = 1 .. m_max - 1, keyed (0, d).
krylov::FitMap fit_gaps(const ExperimentConfig& config, const spectral::SpectralDecomposition& spec,
                        const spectral::StateVector& v, const Window& w, int m_max, double theta,
                        double gamma0, int trial, int D) {
  const auto grid = measurement::sample_grid(w.t_star, w.delta_t, D);
  krylov::FitMap fits;
  for (int d = 1; d < m_max; ++d) {
    const spectral::RecoverySignal signal(spec, v, 0, d);
    // One noise realization per gap, shared by every m in the sweep.
    const std::uint64_t seed = derive_seed({config.master_seed, bits(theta), bits(gamma0),
                                            static_cast<std::uint64_t>(trial), 0,
                                            static_cast<std::uint64_t>(d)});
    auto sf = measure_and_fit(signal, 0, d, grid, theta, seed, config.M, w.tau, config.forcing,
                              config.exact_noise_budget);
    fits.emplace(std::make_pair(0, d), std::move(sf.fit));
  }
  return fits;
}

krylov::KrylovPair leading_block(const krylov::KrylovPair& full, int m) {
  krylov::KrylovPair p = full;
  p.m = m;
  p.R_hat = full.R_hat.topLeftCorner(m, m);
  p.J_hat = full.J_hat.topLeftCorner(m, m);
  return p;
}

}  // namespace

Problem build_problem(const ExperimentConfig& config) {
  if (config.model == "heisenberg") {
    const auto h = pauli::build_heisenberg_chain(config.n, config.coupling_seed);
    auto dense = pauli::assemble_dense(h);
    auto spec = spectral::eigendecompose(dense);
    return {std::move(dense), std::move(spec), h.class_tag(), h.top_energy()};
  }
  if (config.model == "bipartite") {
    const auto h = pauli::build_random_bipartite(config.n / 2, config.coupling_seed);
    auto dense = pauli::assemble_dense(h);
    auto spec = spectral::eigendecompose(dense);
    return {std::move(dense), std::move(spec), h.class_tag(), std::nullopt};
  }
  if (config.model == "random_hermitian") {
    auto dense = pauli::random_hermitian(config.n, config.coupling_seed);
    auto spec = spectral::eigendecompose(dense);
    const double top = spec.highest();
    return {std::move(dense), std::move(spec), pauli::HamiltonianClass::Generic, top};
  }
  throw Error(ErrorCode::ConfigParse, "unknown model '" + config.model + "'");
}

Window make_window(const ExperimentConfig& config, const spectral::SpectralDecomposition& spec) {
  const double t_star = config.t_star
                            ? *config.t_star
                            : krylov::choose_timestep(2.0 * (spec.highest() - spec.lowest()));
  const double delta_t = config.delta_t_fraction * t_star;
  return {t_star, delta_t, t_star + 2.0 * delta_t};
}

SeriesFit measure_and_fit(const spectral::RecoverySignal& signal, int j, int k,
                          const std::vector<double>& grid, double theta, std::uint64_t seed,
                          int M, double tau, minimax::ForcingModel forcing,
                          bool exact_noise_budget) {
  auto series = measurement::measure_series(signal, j, k, grid, theta, seed);
  std::optional<double> eta;
  if (exact_noise_budget) {
    double sum = 0.0;
    for (std::size_t s = 0; s < grid.size(); ++s) {
      const double e = series.values[s] - signal.value(grid[s]);
      sum += e * e;
    }
    eta = sum;
  }
  double f_norm = measurement::forcing_norm_sq(signal, M, tau);
  if (!(f_norm > 0.0)) f_norm = std::numeric_limits<double>::min();
  const auto budget = measurement::simulation_budget(f_norm, static_cast<int>(grid.size()), theta, eta);
  const auto model =
      minimax::build_model(M, minimax::recovery_initial_state(signal, M), tau, budget, forcing);
  auto f = minimax::fit(model, series);
  return {std::move(series), std::move(f)};
}

double epsilon_for(const ExperimentConfig& config, int m, double theta) {
  switch (config.eps_rule) {
    case EpsRule::NoiseFree: return 1e-12 * m;
    case EpsRule::MTheta: return theta > 0.0 ? m * theta : 1e-12 * m;
    case EpsRule::Fixed: return config.eps_value;
  }
  return 1e-12 * m;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const auto workers =
      static_cast<std::size_t>(std::max(1, std::min<int>(threads, static_cast<int>(count))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<ConvergenceRecord> run_convergence(const ExperimentConfig& config, int threads) {
  const Problem problem = build_problem(config);
  const Window w = make_window(config, problem.spec);
  const int m_max = *std::max_element(config.m_values.begin(), config.m_values.end());

  struct Cell {
    double gamma0;
    double theta;
    int trial;
  };
  std::vector<Cell> cells;
  for (double g : config.gamma0)
    for (double th : config.theta_values) {
      // Without noise and without fitting every trial is identical.
      const int trials = uses_minimax(config, th) ? config.trials : 1;
      for (int t = 0; t < trials; ++t) cells.push_back({g, th, t});
    }

  std::vector<std::vector<ConvergenceRecord>> per_cell(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t c) {
    const auto [gamma0, theta, trial] = cells[c];
    const auto start = std::chrono::steady_clock::now();
    const auto v = spectral::build_initial_state(problem.spec, gamma0, config.state_seed);
    const auto exact = krylov::assemble_pair_exact(problem.spec, v, m_max, w.t_star);
    std::optional<krylov::KrylovPair> estimated;
    if (uses_minimax(config, theta)) {
      const int D = config.D_values.front();
      const auto fits = fit_gaps(config, problem.spec, v, w, m_max, theta, gamma0, trial, D);
      estimated = krylov::assemble_pair_minimax(fits, m_max, w.t_star);
    }
    const double setup = seconds_since(start);

    for (int m : config.m_values) {
      const auto cell_start = std::chrono::steady_clock::now();
      const auto exact_m = leading_block(exact, m);
      auto pair = estimated ? leading_block(*estimated, m) : exact_m;
      pair.omega = estimated ? krylov::noise_rate(pair, exact_m, problem.commutator_norm()) : 0.0;
      const double eps = epsilon_for(config, m, theta);
      const auto ritz = krylov::threshold_solve(pair, eps);
      const double estimate = krylov::ground_energy(ritz, problem.class_tag, problem.top_energy);
      ConvergenceRecord r;
      r.m = m;
      r.theta = theta;
      r.gamma0 = gamma0;
      r.trial = trial;
      r.delta0_prime = ritz.ground_gap();
      r.estimate = estimate;
      r.rel_error = std::abs(estimate - problem.ground_energy()) / std::abs(problem.ground_energy());
      r.omega = *pair.omega;
      r.kept_dim = ritz.kept_dim;
      r.eps = eps;
      r.seed = derive_seed({config.master_seed, bits(theta), bits(gamma0),
                            static_cast<std::uint64_t>(trial)});
      r.wall_seconds = seconds_since(cell_start) + setup / config.m_values.size();
      per_cell[c].push_back(r);
    }
  });

  std::vector<ConvergenceRecord> out;
  for (auto& cell : per_cell) out.insert(out.end(), cell.begin(), cell.end());
  return out;
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRecord>& records) {
  os << "m,theta,gamma0,trial,delta0_prime,estimate,rel_error,omega,kept_dim\n";
  for (const auto& r : records)
    os << r.m << ',' << format_double(r.theta) << ',' << format_double(r.gamma0) << ',' << r.trial
       << ',' << format_double(r.delta0_prime) << ',' << format_double(r.estimate) << ','
       << format_double(r.rel_error) << ',' << format_double(r.omega) << ',' << r.kept_dim << '\n';
}

DerivativeScaling run_derivative_scaling(const ExperimentConfig& config, int threads) {
  const Problem problem = build_problem(config);
  const Window w = make_window(config, problem.spec);
  const auto v =
      spectral::build_initial_state(problem.spec, config.gamma0.front(), config.state_seed);
  const spectral::RecoverySignal signal(problem.spec, v, config.pair_j, config.pair_k);
  const double truth = signal.derivative(w.t_star, 1);

  struct Cell {
    double theta;
    int D;
    int trial;
  };
  std::vector<Cell> cells;
  for (double th : config.theta_values)
    for (int D : config.D_values)
      for (int t = 0; t < config.trials; ++t) cells.push_back({th, D, t});

  DerivativeScaling result;
  result.records.resize(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t c) {
    const auto [theta, D, trial] = cells[c];
    const auto grid = measurement::sample_grid(w.t_star, w.delta_t, D);
    const std::uint64_t seed =
        derive_seed({config.master_seed, static_cast<std::uint64_t>(D), bits(theta),
                     static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(config.pair_j),
                     static_cast<std::uint64_t>(config.pair_k)});
    const auto sf = measure_and_fit(signal, config.pair_j, config.pair_k, grid, theta, seed,
                                    config.M, w.tau, config.forcing, config.exact_noise_budget);
    const double estimate = minimax::evaluate_x1(sf.fit, w.t_star);
    const auto cert = minimax::error_certificate(sf.fit.model, grid, w.t_star, 1);
    result.records[c] = {D, theta, trial, std::abs(estimate - truth), cert.sigma};
  });

  for (std::size_t c = 0; c < result.records.size(); c += static_cast<std::size_t>(config.trials)) {
    DerivativeSummary s{result.records[c].D, result.records[c].theta, 0.0, 0.0};
    for (int t = 0; t < config.trials; ++t) {
      s.mean_abs_error += result.records[c + static_cast<std::size_t>(t)].abs_error;
      s.mean_sigma += result.records[c + static_cast<std::size_t>(t)].sigma;
    }
    s.mean_abs_error /= config.trials;
    s.mean_sigma /= config.trials;
    result.summaries.push_back(s);
  }
  return result;
}

void write_derivative_csv(std::ostream& os, const DerivativeScaling& result) {
  os << "D,theta,trial,abs_error,sigma_certificate\n";
  for (const auto& r : result.records)
    os << r.D << ',' << format_double(r.theta) << ',' << r.trial << ','
       << format_double(r.abs_error) << ',' << format_double(r.sigma) << '\n';
  for (const auto& s : result.summaries)
    os << s.D << ',' << format_double(s.theta) << ",mean," << format_double(s.mean_abs_error)
       << ',' << format_double(s.mean_sigma) << '\n';
}

MinimaxDemo run_minimax_demo(const ExperimentConfig& config) {
  const Problem problem = build_problem(config);
  const Window w = make_window(config, problem.spec);
  const auto v =
      spectral::build_initial_state(problem.spec, config.gamma0.front(), config.state_seed);
  const spectral::RecoverySignal signal(problem.spec, v, config.pair_j, config.pair_k);
  const double theta = config.theta_values.front();
  const int D = config.D_values.front();
  const auto grid = measurement::sample_grid(w.t_star, w.delta_t, D);
  const std::uint64_t seed =
      derive_seed({config.master_seed, bits(theta), 0, static_cast<std::uint64_t>(config.pair_j),
                   static_cast<std::uint64_t>(config.pair_k)});
  const auto base = measure_and_fit(signal, config.pair_j, config.pair_k, grid, theta, seed,
                                    config.M, w.tau, config.forcing, config.exact_noise_budget);

  MinimaxDemo demo;
  demo.series = base.series;
  const auto& model0 = base.fit.model;
  for (double scale : {0.1, 1.0, 10.0}) {
    auto model = model0;
    model.budget.r *= scale;
    demo.r_sweep.push_back(minimax::fit(model, demo.series));
    double misfit = 0.0;
    for (std::size_t s = 0; s < grid.size(); ++s) {
      const double e = demo.series.values[s] - minimax::evaluate_x0(demo.r_sweep.back(), grid[s]);
      misfit += e * e;
    }
    demo.data_misfit.push_back(misfit);
  }
  for (double scale : demo.q_scale) {
    auto model = model0;
    model.budget.q *= scale;
    const auto f = minimax::fit(model, demo.series);
    const MatrixXr K = minimax::kernel_matrix(f.model, f.timepoints);
    demo.roughness.push_back(f.beta.dot(K * f.beta));
  }

  const auto& fit0 = demo.r_sweep[1];
  for (int i = 0; i < config.demo_points; ++i) {
    const double t = w.tau * i / (config.demo_points - 1);
    DemoRow row;
    row.t = t;
    row.exact_R = signal.value(t);
    row.exact_dR = signal.derivative(t, 1);
    row.xhat0_rlow = minimax::evaluate_x0(demo.r_sweep[0], t);
    row.xhat0_r0 = minimax::evaluate_x0(fit0, t);
    row.xhat0_rhigh = minimax::evaluate_x0(demo.r_sweep[2], t);
    row.xhat1 = minimax::evaluate_x1(fit0, t);
    row.sigma = minimax::error_certificate(fit0.model, grid, t, 1).sigma;
    demo.rows.push_back(row);
  }
  return demo;
}

void write_demo_csv(std::ostream& os, const MinimaxDemo& demo) {
  os << "t,exact_R,exact_dR,xhat0_rlow,xhat0_r0,xhat0_rhigh,xhat1,sigma\n";
  for (const auto& r : demo.rows)
    os << format_double(r.t) << ',' << format_double(r.exact_R) << ',' << format_double(r.exact_dR)
       << ',' << format_double(r.xhat0_rlow) << ',' << format_double(r.xhat0_r0) << ','
       << format_double(r.xhat0_rhigh) << ',' << format_double(r.xhat1) << ','
       << format_double(r.sigma) << '\n';
}

void write_demo_points_csv(std::ostream& os, const MinimaxDemo& demo) {
  os << "t,y\n";
  for (std::size_t s = 0; s < demo.series.size(); ++s)
    os << format_double(demo.series.timepoints[s]) << ',' << format_double(demo.series.values[s])
       << '\n';
}

GramDump run_gram(const ExperimentConfig& config) {
  const Problem problem = build_problem(config);
  const Window w = make_window(config, problem.spec);
  const int m_max = *std::max_element(config.m_values.begin(), config.m_values.end());
  const double gamma0 = config.gamma0.front();
  const double theta = config.theta_values.front();
  const auto v = spectral::build_initial_state(problem.spec, gamma0, config.state_seed);
  GramDump dump{krylov::assemble_pair_exact(problem.spec, v, m_max, w.t_star), std::nullopt, {}};
  if (uses_minimax(config, theta)) {
    dump.fits =
        fit_gaps(config, problem.spec, v, w, m_max, theta, gamma0, 0, config.D_values.front());
    dump.estimated = krylov::assemble_pair_minimax(dump.fits, m_max, w.t_star);
    dump.estimated->omega = krylov::noise_rate(*dump.estimated, dump.exact, problem.commutator_norm());
  }
  return dump;
}

void write_gram_csv(std::ostream& os, const GramDump& dump) {
  os << "source,j,k,R_re,R_im,J_re,J_im\n";
  auto emit = [&](const krylov::KrylovPair& p) {
    for (int j = 0; j < p.m; ++j)
      for (int k = 0; k < p.m; ++k)
        os << krylov::to_string(p.source) << ',' << j << ',' << k << ','
           << format_double(p.R_hat(j, k).real()) << ',' << format_double(p.R_hat(j, k).imag())
           << ',' << format_double(p.J_hat(j, k).real()) << ','
           << format_double(p.J_hat(j, k).imag()) << '\n';
  };
  emit(dump.exact);
  if (dump.estimated) emit(*dump.estimated);
}

namespace {

nlohmann::json config_json(const ExperimentConfig& config) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : config.echo()) j[k] = v;
  return j;
}

nlohmann::json problem_json(const Problem& p, const Window& w) {
  return {{"dimension", p.spec.dim()},
          {"class", pauli::to_string(p.class_tag)},
          {"lambda_min", p.spec.lowest()},
          {"lambda_max", p.spec.highest()},
          {"t_star", w.t_star},
          {"delta_t", w.delta_t},
          {"tau", w.tau}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
  out << text;
}

template <typename Writer, typename Payload>
std::string to_text(Writer writer, const Payload& payload) {
  std::ostringstream os;
  writer(os, payload);
  return os.str();
}

}  // namespace

std::vector<std::string> run_subcommand(const std::string& name, const ExperimentConfig& config,
                                        const std::string& out_dir, int threads) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::InvalidArgument, "cannot create output directory '" + out_dir + "'");

  const auto start = std::chrono::steady_clock::now();
  const Problem problem = build_problem(config);
  const Window window = make_window(config, problem.spec);

  nlohmann::json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["subcommand"] = name;
  manifest["config"] = config_json(config);
  manifest["problem"] = problem_json(problem, window);
  manifest["threads"] = threads;

  std::vector<std::string> written;
  auto emit = [&](const std::string& file, const std::string& text) {
    write_file(dir / file, text);
    written.push_back((dir / file).string());
  };

  if (name == "convergence") {
    const auto records = run_convergence(config, threads);
    emit("convergence.csv", to_text(write_convergence_csv, records));
    auto& cells = manifest["records"] = nlohmann::json::array();
    for (const auto& r : records)
      cells.push_back({{"m", r.m}, {"theta", r.theta}, {"gamma0", r.gamma0}, {"trial", r.trial},
                       {"seed", r.seed}, {"delta0_prime", r.delta0_prime},
                       {"estimate", r.estimate}, {"rel_error", r.rel_error}, {"omega", r.omega},
                       {"kept_dim", r.kept_dim}, {"eps", r.eps},
                       {"wall_seconds", r.wall_seconds}});
    manifest["reference_ground_energy"] = problem.ground_energy();
  } else if (name == "deriv-scaling") {
    const auto result = run_derivative_scaling(config, threads);
    emit("deriv-scaling.csv", to_text(write_derivative_csv, result));
    auto& cells = manifest["records"] = nlohmann::json::array();
    for (const auto& r : result.records)
      cells.push_back({{"D", r.D}, {"theta", r.theta}, {"trial", r.trial},
                       {"abs_error", r.abs_error}, {"sigma_certificate", r.sigma}});
    auto& summary = manifest["summary"] = nlohmann::json::array();
    for (const auto& s : result.summaries)
      summary.push_back({{"D", s.D}, {"theta", s.theta}, {"mean_abs_error", s.mean_abs_error},
                         {"mean_sigma", s.mean_sigma}});
  } else if (name == "minimax-demo") {
    const auto demo = run_minimax_demo(config);
    emit("minimax-demo.csv", to_text(write_demo_csv, demo));
    emit("minimax-demo-points.csv", to_text(write_demo_points_csv, demo));
    emit("series.csv", to_text(measurement::write_series_csv,
                               std::vector<measurement::MeasurementSeries>{demo.series}));
    manifest["data_misfit"] = {{"r_low", demo.data_misfit[0]},
                               {"r0", demo.data_misfit[1]},
                               {"r_high", demo.data_misfit[2]}};
    manifest["roughness"] = nlohmann::json::array();
    for (std::size_t i = 0; i < demo.roughness.size(); ++i)
      manifest["roughness"].push_back({{"q_scale", demo.q_scale[i]}, {"value", demo.roughness[i]}});
    manifest["fits"] = nlohmann::json::array();
    for (const auto& f : demo.r_sweep)
      manifest["fits"].push_back(nlohmann::json::parse(minimax::fit_to_json(f)));
  } else if (name == "gram") {
    const auto dump = run_gram(config);
    emit("gram.csv", to_text(write_gram_csv, dump));
    if (dump.estimated) manifest["omega"] = *dump.estimated->omega;
    manifest["fits"] = nlohmann::json::object();
    for (const auto& [key, f] : dump.fits)
      manifest["fits"][std::to_string(key.first) + "," + std::to_string(key.second)] =
          nlohmann::json::parse(minimax::fit_to_json(f));
  } else {
    throw Error(ErrorCode::ConfigParse, "unknown subcommand '" + name + "'");
  }

  manifest["outputs"] = written;
  manifest["wall_seconds"] = seconds_since(start);
  emit("manifest.json", manifest.dump(2) + "\n");
  return written;
}

}  // namespace superkrylov::experiment
