// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "circgossip/circle.hpp"
#include "circgossip/crossing.hpp"
#include "circgossip/csv.hpp"
#include "circgossip/dynamics.hpp"
#include "circgossip/lift_frame.hpp"
#include "circgossip/observables.hpp"
#include "circgossip/philox.hpp"
#include "circgossip/sweep.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace circgossip;
using nlohmann::json;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("circgossip_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CIRCGOSSIP_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_path(const std::string& name) {
  return std::string(CIRCGOSSIP_CONFIG_DIR) + "/" + name;
}

Configuration noisy_twist(std::size_t n, std::int64_t w0, double noise, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  const Configuration base = Configuration::twisted(Topology::ring(n), w0);
  std::vector<double> v(base.angles().begin(), base.angles().end());
  for (double& a : v) a += noise * (2.0 * rng.uniform_unit() - 1.0);
  return Configuration::wrapped(Topology::ring(n), v);
}

Configuration iid_ring(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  std::vector<double> v(n);
  for (double& a : v) a = wrap_pi(-kPi + kTwoPi * rng.uniform_unit());
  return Configuration(Topology::ring(n), std::move(v));
}

/// Sum of |delta| with a single add-or-subtract wrap per difference.
double full_l1(std::span<const double> th, bool ring) {
  auto w = [](double d) {
    if (d >= kPi) return d - kTwoPi;
    if (d < -kPi) return d + kTwoPi;
    return d;
  };
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < th.size(); ++i) s += std::abs(w(th[i + 1] - th[i]));
  if (ring) s += std::abs(w(th[0] - th[th.size() - 1]));
  return s;
}

// =============================================================== criteria

Verdict first_crossing_probability() {
  const fs::path out = scratch("crossing");
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = run_cli("crossing-prob --config " + config_path("crossing_prob.json") + " --out " +
                         out.string());
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const json s = json::parse(read_text_file(out / "summary.json"))["result"];
  const double mean = s["pooled_mean"];
  const double se = s["pooled_se"];
  const bool sizes = s["n"] == 500 && s["edges_per_replica"] == 50 && s["replicas"] == 200;
  const double grid = oracle::crossing_probability_grid(4000);
  const bool ok = rc == 0 && sizes && secs < 10.0 &&
                  std::abs(mean - kNoCrossingReference) <= 3.0 * se &&
                  std::abs(grid - 11.0 / 48.0) <= 1e-4;
  return {ok, fmt::format("rc={} wall={:.3f}s mean={:.6f} se={:.6f} |z|={:.3f} grid={:.7f} "
                          "(11/48={:.7f})",
                          rc, secs, mean, se, std::abs(mean - kNoCrossingReference) / se, grid,
                          11.0 / 48.0)};
}

struct RingRun {
  std::uint64_t steps = 0;
  std::uint64_t jump_violations = 0;
  std::uint64_t corridor_violations = 0;
  std::uint64_t corridor_steps = 0;
  std::uint64_t crossings = 0;
  std::uint64_t antipodal = 0;
  std::uint64_t lyapunov_violations = 0;
};

/// N = 32 ring from iid initial data, 1e6 steps, every step checked against
/// a long-double recomputation of the winding and the full sum |delta|.
const RingRun& ring_run() {
  static const RingRun result = [] {
    RingRun r;
    SimOptions o;
    o.winding_check_stride = 0;
    o.check_lyapunov = false;
    SimState st(iid_ring(32, 2024), RandomStream(2024, 1), o);
    long long w = oracle::ring_winding(st.config().angles());
    bool corridor = corridor_margin(increment_field(st.config())).ok;
    double l1 = full_l1(st.config().angles(), true);
    for (std::uint64_t t = 0; t < 1'000'000; ++t) {
      const UpdateEvent ev = step(st);
      const long long w_next = oracle::ring_winding(st.config().angles());
      if (w_next - w != -(ev.m_minus + ev.m_plus)) ++r.jump_violations;
      if (corridor) {
        ++r.corridor_steps;
        if (ev.m_minus != 0 || ev.m_plus != 0) ++r.corridor_violations;
      }
      const double l1_next = full_l1(st.config().angles(), true);
      if (l1_next > l1 + 1e-12) ++r.lyapunov_violations;
      r.crossings += ev.crossing() ? 1 : 0;
      r.antipodal += ev.antipodal ? 1 : 0;
      corridor = corridor_margin(increment_field(st.config())).ok;
      l1 = l1_next;
      w = w_next;
      ++r.steps;
    }
    return r;
  }();
  return result;
}

Verdict winding_jump_identity() {
  const RingRun& r = ring_run();
  return {r.jump_violations == 0 && r.steps == 1'000'000,
          fmt::format("steps={} violations={} crossings={} antipodal={}", r.steps,
                      r.jump_violations, r.crossings, r.antipodal)};
}

Verdict corridor_sufficiency() {
  const RingRun& r = ring_run();
  return {r.corridor_violations == 0 && r.corridor_steps > 0,
          fmt::format("corridor steps={} violations={}", r.corridor_steps,
                      r.corridor_violations)};
}

Verdict lyapunov_monotonicity() {
  const RingRun& ring = ring_run();

  SimOptions o;
  o.check_lyapunov = false;
  const Configuration iid = iid_ring(50, 77);
  SimState st(Configuration(Topology::open_path(50),
                            std::vector<double>(iid.angles().begin(), iid.angles().end())),
              RandomStream(77, 1), o);
  double l1 = full_l1(st.config().angles(), false);
  std::uint64_t violations = 0;
  std::uint64_t reached = 0;
  for (std::uint64_t t = 1; t <= 10'000'000; ++t) {
    step(st);
    const double next = full_l1(st.config().angles(), false);
    if (next > l1 + 1e-12) ++violations;
    l1 = next;
    if (l1 < 1e-6) {
      reached = t;
      break;
    }
  }
  return {ring.lyapunov_violations == 0 && violations == 0 && reached != 0,
          fmt::format("ring violations={} path violations={} path sum|delta|<1e-6 at step {} "
                      "(final {:.3e})",
                      ring.lyapunov_violations, violations, reached, l1)};
}

Verdict detrended_frame() {
  const std::size_t n = 100;
  SimState st(noisy_twist(n, 1, 0.05, 31), RandomStream(31, 1));
  ComovingFrame frame(st.config(), 0);
  DetrendedProfile z = frame.zeta();
  double psi = variance_functional(z);
  double diam = zeta_diameter(z);
  double worst_mid = 0.0, worst_psi = 0.0;
  std::uint64_t monotone_violations = 0;
  std::uint64_t dtilde_step = 0;
  for (std::uint64_t t = 1; t <= 1'000'000; ++t) {
    const UpdateEvent ev = step(st);
    frame.apply(ev, st.config());
    const DetrendedProfile next = frame.zeta();
    const std::size_t k = ev.edge;
    const std::size_t k1 = k + 1 == n ? 0 : k + 1;
    const double mean = 0.5 * (z.values[k] + z.values[k + 1]);
    worst_mid = std::max({worst_mid, std::abs(next.values[k] - mean),
                          std::abs(next.values[k1] - mean)});
    const double gap = z.values[k + 1] - z.values[k];
    const double next_psi = variance_functional(next);
    worst_psi = std::max(worst_psi, std::abs(next_psi - psi + 0.5 * gap * gap));
    const double next_diam = zeta_diameter(next);
    if (next_psi > psi + 1e-12 || next_diam > diam + 1e-12) ++monotone_violations;
    if (dtilde_step == 0 && comoving_distance(increment_field(st.config()),
                                              frame.compensator()) < 1e-4) {
      dtilde_step = t;
    }
    z = next;
    psi = next_psi;
    diam = next_diam;
  }
  const double final_dtilde = comoving_distance(increment_field(st.config()), frame.compensator());
  return {worst_mid <= 1e-12 && worst_psi <= 1e-12 && monotone_violations == 0 && dtilde_step != 0,
          fmt::format("max midpoint err={:.2e} max psi-decrement err={:.2e} monotone "
                      "violations={} D~<1e-4 at step {} (final {:.2e}, diameter {:.2e})",
                      worst_mid, worst_psi, monotone_violations, dtilde_step, final_dtilde, diam)};
}

Verdict lift_invariants() {
  SimState st(noisy_twist(100, 1, 0.05, 41), RandomStream(41, 1));
  ComovingFrame frame(st.config(), ComovingFrame::kDefaultResyncStride, 1e-9);
  for (std::uint64_t t = 0; t < 1'000'000; ++t) {
    const UpdateEvent ev = step(st);
    frame.apply(ev, st.config());
  }
  const LiftCheck final_check = frame.resync(st.config());
  const ResyncRecord& rec = frame.resync_record();
  return {rec.violations == 0 && rec.checkpoints >= 15 && final_check.ok(1e-9),
          fmt::format("checkpoints={} violations={} worst={:.2e} (projection {:.2e}, increment "
                      "{:.2e}, closing {:.2e} at the end)",
                      rec.checkpoints, rec.violations, rec.worst, final_check.projection,
                      final_check.increment, final_check.closing)};
}

Verdict compensator_contracts() {
  const std::size_t n = 64;
  SimState st(noisy_twist(n, 2, 0.01, 51), RandomStream(51, 1));
  Compensator s = Compensator::zero(n, 2);
  const double bound = std::pow(kTwoPi * 2, 2);
  double max_sum = 0.0, max_l2 = 0.0;
  for (std::uint64_t t = 0; t < 1'000'000; ++t) {
    compensator_step_in_place(s, step(st).edge);
    max_sum = std::max(max_sum, std::abs(s.sum()));
    max_l2 = std::max(max_l2, s.l2_per_site());
  }

  std::mt19937_64 gen(52);
  double worst_drift = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t m = 3 + gen() % 60;
    Compensator c = Compensator::zero(m, static_cast<std::int64_t>(gen() % 9) - 4);
    std::normal_distribution<double> g(0.0, 1.0);
    double mean = 0.0;
    for (double& v : c.values) mean += (v = g(gen));
    for (double& v : c.values) v -= mean / static_cast<double>(m);
    // Long-double evaluation of the edge-averaged change of ||s||^2.
    oracle::real before = 0, total = 0, grad = 0;
    for (double v : c.values) before += static_cast<oracle::real>(v) * v;
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<oracle::real> x(c.values.begin(), c.values.end());
      const std::size_t k1 = (k + 1) % m;
      grad += (x[k] - x[k1]) * (x[k] - x[k1]);
      const oracle::real avg = (x[k] + x[k1]) / 2;
      x[k] = avg + static_cast<oracle::real>(c.beta) / 2;
      x[k1] = avg - static_cast<oracle::real>(c.beta) / 2;
      oracle::real after = 0;
      for (oracle::real v : x) after += v * v;
      total += after - before;
    }
    const oracle::real beta = c.beta;
    const double reference = static_cast<double>(-grad / (2 * m) + beta * beta / 2);
    worst_drift = std::max({worst_drift, std::abs(mean_one_step_drift(c) - reference),
                            std::abs(static_cast<double>(total / m) - reference)});
  }
  return {max_sum <= 1e-9 * n && max_l2 <= bound && worst_drift <= 1e-10,
          fmt::format("max|sum s|={:.2e} max per-site L2={:.4f} (bound {:.2f}) drift err={:.2e}",
                      max_sum, max_l2, bound, worst_drift)};
}

Verdict sweep_formula() {
  std::mt19937_64 gen(61);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (std::size_t n = 3; n <= 20; ++n) {
    for (int rep = 0; rep < 1000; ++rep) {
      std::vector<double> d(n);
      for (double& x : d) x = u(gen);
      worst = std::max(worst,
                       std::abs(closing_edge_prediction(d) - cyclic_sweep(LinearIncrementState(d)).closing()));
    }
  }
  double worst3 = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const double a = u(gen), b = u(gen), c = u(gen);
    const double expected = c + 0.75 * a + 0.5 * b;
    worst3 = std::max({worst3, std::abs(cyclic_sweep(LinearIncrementState({a, b, c})).closing() - expected),
                       std::abs(closing_edge_prediction(std::vector<double>{a, b, c}) - expected)});
  }
  return {worst <= 1e-12 && worst3 <= 1e-12,
          fmt::format("max |formula - sweep|={:.2e} over 18000 inputs; N=3 symbolic err={:.2e}",
                      worst, worst3)};
}

Verdict geometric_accumulation() {
  std::uint64_t monotone = 0, bound = 0;
  double worst_limit = 0.0;
  for (std::size_t n = 4; n <= 16; ++n) {
    const LinearIncrementState s0 = LinearIncrementState::uniform_twist(n, 1);
    const double gap0 = s0.total() - s0.closing();
    const double c = std::ldexp(1.0, -static_cast<int>(n - 2));
    const SweepTrajectory traj = iterate_sweeps(s0, 200);
    for (std::size_t m = 1; m < traj.records.size(); ++m) {
      if (traj.records[m].closing_delta < traj.records[m - 1].closing_delta - 1e-12) ++monotone;
      if (traj.records[m].gap > std::pow(1.0 - c, static_cast<double>(m)) * gap0 + 1e-12) ++bound;
    }
    if (n <= 10) {
      worst_limit = std::max(worst_limit, std::abs(traj.records.back().closing_delta - kTwoPi));
    }
  }
  return {monotone == 0 && bound == 0 && worst_limit <= 1e-6,
          fmt::format("monotonicity violations={} bound violations={} max |limit - 2pi| "
                      "(N<=10)={:.2e}",
                      monotone, bound, worst_limit)};
}

Verdict escape_replay() {
  EscapeOptions o;
  o.sweep_budget = 200;
  o.replay_step_budget = 10'000'000;
  const EscapeReport r = escape_scenario(60, 3, o);
  bool piecewise = true;
  for (const WindingChange& c : r.winding_changes) {
    piecewise = piecewise && c.at_crossing && c.after < c.before;
  }
  return {r.final_winding == 0 && r.steps_to_zero_winding && r.inconsistent_events == 0 &&
              r.strictly_decreasing && piecewise,
          fmt::format("winding 3 -> {} at step {}; changes={} crossings={} inconsistent={} "
                      "first crossing step {} (linear prediction {})",
                      r.final_winding,
                      r.steps_to_zero_winding ? std::to_string(*r.steps_to_zero_winding) : "-",
                      r.winding_changes.size(), r.crossing_events, r.inconsistent_events,
                      r.replay_first_crossing_step ? std::to_string(*r.replay_first_crossing_step) : "-",
                      r.predicted_first_crossing_step ? std::to_string(*r.predicted_first_crossing_step) : "-")};
}

Verdict determinism() {
  struct Run {
    std::string command;
    std::string config;
  };
  const std::vector<Run> runs{
      {"simulate", "path_consensus.json"},   {"simulate", "ring_consensus.json"},
      {"simulate", "winding_freeze.json"},   {"simulate", "compensator_bound.json"},
      {"crossing-prob", "crossing_prob.json"}, {"sweep", "sweep_escape.json"},
      {"lift-check", "lift_check.json"}};
  std::size_t compared = 0;
  std::vector<std::string> mismatches;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const fs::path a = scratch(fmt::format("det{}a", i));
    const fs::path b = scratch(fmt::format("det{}b", i));
    const std::string base = runs[i].command + " --config " + config_path(runs[i].config);
    const int ra = run_cli(base + " --out " + a.string());
    const int rb = run_cli(base + " --threads 3 --out " + b.string());
    if (ra != 0 || rb != 0) mismatches.push_back(runs[i].config + " (exit status)");
    for (const auto& entry : fs::directory_iterator(a)) {
      const std::string name = entry.path().filename().string();
      if (name == "manifest.json") continue;
      ++compared;
      if (!fs::exists(b / name) || read_text_file(a / name) != read_text_file(b / name)) {
        mismatches.push_back(runs[i].config + ":" + name);
      }
    }
  }
  std::string detail = fmt::format("{} files compared across {} scenario runs", compared, runs.size());
  for (const auto& m : mismatches) detail += "; differs: " + m;
  return {mismatches.empty() && compared > 0, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"first-crossing probability", first_crossing_probability},
      {"winding jump identity", winding_jump_identity},
      {"corridor sufficiency", corridor_sufficiency},
      {"Lyapunov monotonicity", lyapunov_monotonicity},
      {"detrended frame exactness", detrended_frame},
      {"lift invariants", lift_invariants},
      {"compensator contracts", compensator_contracts},
      {"sweep formula", sweep_formula},
      {"geometric accumulation", geometric_accumulation},
      {"escape replay", escape_replay},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += v.pass ? 0 : 1;
    std::cout << fmt::format("{} {:>2} {} [{:.1f}s]: {}\n", v.pass ? "PASS" : "FAIL", i + 1,
                             criteria[i].first, secs, v.detail)
              << std::flush;
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failures,
                           criteria.size());
  return failures == 0 ? 0 : 1;
}
