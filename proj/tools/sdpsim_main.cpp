#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdp/dynamics.hpp"
#include "sdp/enumerate.hpp"
#include "sdp/estimators.hpp"
#include "sdp/sweep.hpp"

using namespace sdp;
using nlohmann::json;

namespace {

struct RuleOpts {
  std::string rule = "window-boundary";
  int k = 1;

  DestructionRule resolve() const {
    if (rule == "finite-range") return DestructionRule::finite_range(k);
    if (rule == "window-boundary") return DestructionRule::window_boundary();
    if (rule == "none") return DestructionRule::none();
    throw CLI::ValidationError("--rule must be finite-range, window-boundary or none");
  }
};

void add_rule_opts(CLI::App* cmd, RuleOpts& opts) {
  cmd->add_option("--rule", opts.rule, "destruction rule")
      ->check(CLI::IsMember({"finite-range", "window-boundary", "none"}));
  cmd->add_option("--k", opts.k, "finite-range cutoff")->check(CLI::PositiveNumber);
}

json estimate_json(const std::string& quantity, const json& params,
                   const EstimateResult& e, double elapsed_ms) {
  return json{{"quantity", quantity},
              {"params", params},
              {"estimate", e.point},
              {"ci", {e.ci_low, e.ci_high}},
              {"n_samples", e.n_samples},
              {"seed", e.seed},
              {"elapsed_ms", elapsed_ms}};
}

void print_estimate(const EstimateResult& e) {
  std::printf("%s\n  point    %.6f\n  95%% CI   [%.6f, %.6f]\n  samples  %llu\n  seed     %llu\n",
              e.quantity.c_str(), e.point, e.ci_low, e.ci_high,
              static_cast<unsigned long long>(e.n_samples),
              static_cast<unsigned long long>(e.seed));
}

std::vector<double> parse_grid(const std::string& text) {
  // Either "0.1,0.2,0.3" or "lo:hi:count" (inclusive linspace).
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double lo, hi;
    int count;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 ||
        count < 1) {
      throw CLI::ValidationError("grid must be 'lo:hi:count' or a comma list");
    }
    for (int i = 0; i < count; ++i) {
      out.push_back(count == 1 ? lo
                               : lo + (hi - lo) * static_cast<double>(i) /
                                     static_cast<double>(count - 1));
    }
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::vector<int> parse_scales(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

// ---- selftest suites ----------------------------------------------------

bool selftest_duality(std::uint64_t samples, std::uint64_t seed) {
  const std::uint64_t per_cell = std::max<std::uint64_t>(1, samples / 9);
  for (double p : {0.3, 0.6, 0.9}) {
    for (double d : {0.3, 0.6, 0.9}) {
      const CrossingEstimate ce =
          estimate_crossing(SdpParams(p, d), 3.0, 16,
                            DestructionRule::window_boundary(), per_cell, seed);
      if (ce.duality_violations != 0) {
        std::printf("[FAIL] duality: %llu violations at p=%g delta=%g\n",
                    static_cast<unsigned long long>(ce.duality_violations), p, d);
        return false;
      }
    }
  }
  std::printf("[ok] duality sweep (occupied-horizontal xor vacant-vertical)\n");
  return true;
}

bool selftest_oracle(std::uint64_t samples, std::uint64_t seed) {
  const Window region(3, 3, Site{-1, -1});
  const SdpParams params(0.6, 0.2);
  const ExactFiniteRangeModel oracle(region, 1, params.p);
  const double exact = oracle.site_occupancy(params.delta, Site{0, 0});
  const double pi1 = params.p * (1.0 - std::pow(1.0 - params.p, 4));
  if (std::abs(exact - occupancy_identity(params, pi1)) > 1e-12) {
    std::printf("[FAIL] oracle: occupancy identity mismatch\n");
    return false;
  }
  std::uint64_t hits = 0;
  for (std::uint64_t rep = 0; rep < samples; ++rep) {
    hits += sample_sdp(region, params, DestructionRule::finite_range(1), seed,
                       rep)
                .z.get(Site{0, 0});
  }
  const double mc = static_cast<double>(hits) / static_cast<double>(samples);
  if (std::abs(mc - exact) > 4.0 * binomial_se(exact, samples)) {
    std::printf("[FAIL] oracle: MC %.5f vs exact %.5f beyond 4 SE\n", mc, exact);
    return false;
  }
  const ExactFiniteRangeModel strip(Window(7, 1), 1, 0.6);
  const auto law = strip.site_pair_law(0.2, Site{0, 0}, Site{6, 0});
  const double pa = law[2] + law[3], pb = law[1] + law[3];
  if (std::abs(law[3] - pa * pb) > 1e-12) {
    std::printf("[FAIL] oracle: strip joint law does not factorize\n");
    return false;
  }
  std::printf("[ok] enumeration oracle (identity, MC agreement, factorization)\n");
  return true;
}

bool selftest_coupling(std::uint64_t samples, std::uint64_t seed) {
  const Window w(32, 32);
  const std::uint64_t fields = std::max<std::uint64_t>(10, samples / 100);
  for (std::uint64_t rep = 0; rep < fields; ++rep) {
    const ClockField c = sample_clocks(w, 2.4, seed, rep);
    const DynParams d1(0.9, 1.2), d2(0.9, 2.2);
    const auto r = quadrant_monotonicity_check(
        c, d1, d2, DestructionRule::window_boundary());
    const SiteField evolved =
        evolve_destruct(c, d2, DestructionRule::window_boundary());
    if (r.violations != 0 || !evolved.le(config_at(c, d2.t))) {
      std::printf("[FAIL] coupling: pointwise violation at replicate %llu\n",
                  static_cast<unsigned long long>(rep));
      return false;
    }
    const SiteField lo = sample_field(w, 0.3, seed, Stream::x_field, rep);
    const SiteField hi = sample_field(w, 0.8, seed, Stream::x_field, rep);
    if (!lo.le(hi)) {
      std::printf("[FAIL] coupling: density coupling violated\n");
      return false;
    }
    const SdpSample s = sample_sdp(Window(8, 8), SdpParams(0.6, 0.3),
                                   DestructionRule::window_boundary(), seed, rep);
    if (!s.y.le(s.z) || !s.x_star.le(s.x)) {
      std::printf("[FAIL] coupling: SDP sample ordering violated\n");
      return false;
    }
  }
  std::printf("[ok] coupling monotonicity (%llu clock fields)\n",
              static_cast<unsigned long long>(fields));
  return true;
}

bool selftest_fkg(std::uint64_t samples, std::uint64_t seed) {
  const Window region(3, 3);
  const auto catalog = fkg_catalog_3x3(region);
  const ExactFiniteRangeModel m(region, 1, 0.6);
  const FkgReport exact = fkg_check_exact(m, 0.2, catalog);
  if (!exact.all_ok) {
    for (const auto& pr : exact.pairs) {
      if (!pr.ok) {
        std::printf("[FAIL] fkg exact: %s & %s gap %.3e\n", pr.a.c_str(),
                    pr.b.c_str(), pr.gap);
      }
    }
    return false;
  }
  const FkgReport mc = fkg_check(SdpParams(0.3, 0.7),
                                 DestructionRule::finite_range(1), region,
                                 catalog, samples, seed);
  if (!mc.all_ok) {
    std::printf("[FAIL] fkg MC: violation beyond 4 SE\n");
    return false;
  }
  std::printf("[ok] FKG catalog (10 pairs, exact and MC)\n");
  return true;
}

bool selftest_param_map(std::uint64_t samples, std::uint64_t seed) {
  const std::uint64_t reps = std::max<std::uint64_t>(1000, samples);
  for (std::uint64_t rep = 0; rep < reps; ++rep) {
    const double p = uniform01(seed, Stream::generic, rep, 0);
    const double d = uniform01(seed, Stream::generic, rep, 1);
    const SdpParams back = params_from_times(times_from_params(SdpParams(p, d)));
    if (std::abs(back.p - p) + std::abs(back.delta - d) >= 1e-12) {
      std::printf("[FAIL] parameter map: roundtrip error at p=%g delta=%g\n", p, d);
      return false;
    }
  }
  std::printf("[ok] parameter map roundtrip (%llu pairs)\n",
              static_cast<unsigned long long>(reps));
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sdpsim: self-destructive percolation simulation toolkit"};
  app.require_subcommand(1);

  // Shared knobs.
  double p = 0.5, delta = 0.0, rho = 3.0, alpha = 0.005, tau = 0.0, t = 0.0;
  int n = 16;
  std::uint64_t samples = 10000, seed = 1;
  int threads = 0;
  bool as_json = false;
  RuleOpts rule_opts;

  auto add_common = [&](CLI::App* cmd, bool with_rule = true) {
    cmd->add_option("--samples", samples, "Monte Carlo replicates");
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--threads", threads,
                    "worker threads (0: SDP_THREADS env or hardware)");
    cmd->add_flag("--json", as_json, "machine-readable single-result output");
    if (with_rule) add_rule_opts(cmd, rule_opts);
  };

  // theta
  auto* c_theta = app.add_subcommand("theta", "one-arm order-parameter estimate");
  c_theta->add_option("--p", p, "initial density")->check(CLI::Range(0.0, 1.0));
  c_theta->add_option("--delta", delta, "enhancement density")
      ->check(CLI::Range(0.0, 1.0));
  c_theta->add_option("--n", n, "arm radius")->check(CLI::PositiveNumber);
  add_common(c_theta);

  // crossing
  auto* c_cross = app.add_subcommand("crossing", "rectangle crossing estimate");
  c_cross->add_option("--p", p, "initial density")->check(CLI::Range(0.0, 1.0));
  c_cross->add_option("--delta", delta, "enhancement density")
      ->check(CLI::Range(0.0, 1.0));
  c_cross->add_option("--rho", rho, "aspect ratio")->check(CLI::PositiveNumber);
  c_cross->add_option("--n", n, "short side s")->check(CLI::PositiveNumber);
  add_common(c_cross);

  // criterion
  int n_max = 512, n_hat = 0;
  std::uint64_t phi_samples = 30000, chain_samples = 0;
  auto* c_crit = app.add_subcommand(
      "criterion", "finite-size supercriticality criterion (scale search)");
  c_crit->add_option("--p", p, "initial density")->check(CLI::Range(0.0, 1.0));
  c_crit->add_option("--delta", delta, "enhancement density")
      ->check(CLI::Range(0.0, 1.0));
  c_crit->add_option("--alpha", alpha, "criterion threshold (< 1/196)");
  int crit_n = 0;
  c_crit->add_option("--n", crit_n, "single scale (0: doubling search from 16)");
  c_crit->add_option("--n-max", n_max, "largest scale in the search");
  c_crit->add_option("--n-hat", n_hat,
                     "lower admissible scale (0: derive from a decay fit)");
  c_crit->add_option("--phi-samples", phi_samples,
                     "samples for the decay-rate fit");
  c_crit->add_option("--chain", chain_samples,
                     "samples for the h(3,3^k n) scale chain (0: off)");
  add_common(c_crit);

  // pc
  std::string pc_scales_text = "64,128";
  int pc_steps = 7;
  auto* c_pc = app.add_subcommand(
      "pc", "estimate the ordinary critical density by bisection");
  c_pc->add_option("--scales", pc_scales_text, "square sides, comma list");
  c_pc->add_option("--steps", pc_steps, "bisection steps");
  add_common(c_pc, /*with_rule=*/false);

  // dynamics
  auto* c_dyn = app.add_subcommand(
      "dynamics", "clock evolution vs the mapped SDP draw");
  c_dyn->add_option("--tau", tau, "destruction time")->required();
  c_dyn->add_option("--t", t, "observation time")->required();
  c_dyn->add_option("--rho", rho, "aspect ratio");
  c_dyn->add_option("--n", n, "short side s")->check(CLI::PositiveNumber);
  add_common(c_dyn);

  // sweep
  std::string p_grid_text = "0.1:0.9:5", delta_grid_text = "0.1:0.9:5";
  std::string scales_text = "16";
  std::string store_path = "sweep.jsonl", out_path, quantity_text = "theta";
  std::uint64_t max_cells = 0;
  auto* c_sweep = app.add_subcommand("sweep", "grid sweep into a resumable store");
  c_sweep->add_option("--quantity", quantity_text, "theta|crossing|criterion");
  c_sweep->add_option("--p-grid", p_grid_text, "comma list or lo:hi:count");
  c_sweep->add_option("--delta-grid", delta_grid_text, "comma list or lo:hi:count");
  c_sweep->add_option("--scales", scales_text, "comma list of scales n");
  c_sweep->add_option("--rho", rho, "aspect ratio (crossing)");
  c_sweep->add_option("--alpha", alpha, "criterion threshold");
  c_sweep->add_option("--n-hat", n_hat, "criterion lower admissible scale");
  c_sweep->add_option("--store", store_path, "store path (line-delimited JSON)");
  c_sweep->add_option("--max-cells", max_cells,
                      "evaluate at most this many cells (0: all)");
  add_common(c_sweep);

  // export
  auto* c_export = app.add_subcommand("export", "store to CSV");
  c_export->add_option("--store", store_path, "store path")->required();
  c_export->add_option("--out", out_path, "CSV output path")->required();

  // heatmap
  int heat_n = 0;
  double pc_marker = 0.0;
  auto* c_heat = app.add_subcommand("heatmap", "store to SVG heatmap");
  c_heat->add_option("--store", store_path, "store path")->required();
  c_heat->add_option("--out", out_path, "SVG output path")->required();
  c_heat->add_option("--n", heat_n, "scale to plot (0: unique scale in store)");
  c_heat->add_option("--pc", pc_marker,
                     "draw a marker line at this estimated critical density");

  // selftest
  auto* c_self = app.add_subcommand("selftest", "run the invariant suites");
  add_common(c_self, /*with_rule=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  };

  try {
    if (c_theta->parsed()) {
      const EstimateResult e = estimate_theta(
          SdpParams(p, delta), n, rule_opts.resolve(), samples, seed, threads);
      if (as_json) {
        std::cout << estimate_json("theta",
                                   {{"p", p},
                                    {"delta", delta},
                                    {"n", n},
                                    {"rule", rule_opts.resolve().to_string()}},
                                   e, elapsed_ms())
                         .dump()
                  << "\n";
      } else {
        print_estimate(e);
      }
      return 0;
    }

    if (c_cross->parsed()) {
      const CrossingEstimate ce =
          estimate_crossing(SdpParams(p, delta), rho, n, rule_opts.resolve(),
                            samples, seed, threads);
      if (ce.duality_violations != 0) {
        std::cerr << "error: duality violated on " << ce.duality_violations
                  << " draws\n";
        return 2;
      }
      if (as_json) {
        std::cout << estimate_json("crossing",
                                   {{"p", p},
                                    {"delta", delta},
                                    {"rho", rho},
                                    {"s", n},
                                    {"rule", rule_opts.resolve().to_string()}},
                                   ce.f, elapsed_ms())
                         .dump()
                  << "\n";
      } else {
        print_estimate(ce.f);
        std::printf("  dual h   %.6f (1 - f per draw)\n", ce.h_dual.point);
      }
      return 0;
    }

    if (c_crit->parsed()) {
      const SdpParams params(p, delta);
      const DestructionRule rule = rule_opts.resolve();
      if (n_hat == 0) {
        const std::vector<int> ks{2, 4, 6, 8, 12, 16};
        const PhiEstimate phi = estimate_phi(p, ks, phi_samples, seed + 1, threads);
        n_hat = n_hat_from_phi(alpha, phi.phi_hat);
        std::printf("phi_hat %.4f%s  ->  N_hat %d\n", phi.phi_hat,
                    phi.lower_bound_only ? " (lower bound)" : "", n_hat);
      }
      std::vector<int> search_scales;
      if (crit_n > 0) {
        search_scales = {crit_n};
      } else {
        for (int s = 16; s <= n_max; s *= 2) search_scales.push_back(s);
      }
      ScaleSearchResult r = criterion_scale_search(
          params, alpha, search_scales, rule, samples, seed, n_hat, threads);
      if (chain_samples > 0 && !r.verdicts.empty()) {
        // Re-run the last verdict's scale with the chain attached.
        const int last_n = r.verdicts.back().n;
        r.verdicts.back() = finite_size_criterion(
            params, CriterionConfig(alpha, last_n, n_hat), rule, samples,
            derive_seed(seed, static_cast<std::uint64_t>(last_n)), threads,
            chain_samples);
      }
      for (int skipped : r.skipped_scales) {
        std::printf("n=%-4d skipped (below N_hat=%d)\n", skipped, n_hat);
      }
      for (const CriterionVerdict& v : r.verdicts) {
        std::printf(
            "n=%-4d f(3,n) %.6f  CI-low %.6f  margin %+0.6f  samples %llu%s  %s\n",
            v.n, v.f3n.point, v.f3n.ci_low, v.margin,
            static_cast<unsigned long long>(v.f3n.n_samples),
            v.full_samples ? "" : " (stopped early)",
            v.holds ? "QUALIFIES" : "no");
        int chain_scale = v.n;
        for (const EstimateResult& h : v.scale_chain) {
          std::printf("        h(3,%d) = %.6f\n", chain_scale, h.point);
          chain_scale *= 3;
        }
      }
      if (as_json) {
        json out{{"quantity", "criterion"},
                 {"params", {{"p", p}, {"delta", delta}, {"alpha", alpha},
                             {"n_hat", n_hat}, {"rule", rule.to_string()}}},
                 {"qualifying_n", r.qualifying_n ? json(*r.qualifying_n) : json()},
                 {"elapsed_ms", elapsed_ms()}};
        std::cout << out.dump() << "\n";
      } else if (r.qualifying_n) {
        std::printf("criterion holds at n=%d (alpha=%g, N_hat=%d)\n",
                    *r.qualifying_n, alpha, n_hat);
      } else {
        std::printf("criterion does not hold at any tested scale\n");
      }
      return 0;
    }

    if (c_pc->parsed()) {
      const std::vector<int> scales = parse_scales(pc_scales_text);
      const PcEstimate pc = estimate_pc(scales, samples, seed, threads, pc_steps);
      if (as_json) {
        json per_scale = json::array();
        for (const auto& [s, v] : pc.per_scale) {
          per_scale.push_back({{"s", s}, {"pc", v}});
        }
        json out{{"quantity", "pc"},
                 {"params", {{"scales", scales}, {"steps", pc_steps}}},
                 {"estimate", pc.point},
                 {"ci", {pc.bracket_low, pc.bracket_high}},
                 {"per_scale", per_scale},
                 {"n_samples", samples},
                 {"seed", seed},
                 {"elapsed_ms", elapsed_ms()}};
        std::cout << out.dump() << "\n";
      } else {
        for (const auto& [s, v] : pc.per_scale) {
          std::printf("s=%-4d pc_hat %.5f\n", s, v);
        }
        std::printf("pc_hat %.5f (bracket [%.5f, %.5f] after %d steps at the "
                    "largest scale)\n",
                    pc.point, pc.bracket_low, pc.bracket_high, pc.steps);
      }
      return 0;
    }

    if (c_dyn->parsed()) {
      const DynamicsComparison r = dynamics_crossing_comparison(
          DynParams(tau, t), rho, n, rule_opts.resolve(), samples, seed, threads);
      if (as_json) {
        json out{{"quantity", "dynamics-crossing"},
                 {"params", {{"tau", tau}, {"t", t}, {"rho", rho}, {"s", n},
                             {"p", r.mapped.p}, {"delta", r.mapped.delta},
                             {"rule", rule_opts.resolve().to_string()}}},
                 {"estimate", r.dynamics_f.point},
                 {"ci", {r.dynamics_f.ci_low, r.dynamics_f.ci_high}},
                 {"sdp_estimate", r.sdp_f.point},
                 {"gap", r.gap},
                 {"gap_se", r.gap_se},
                 {"n_samples", samples},
                 {"seed", seed},
                 {"elapsed_ms", elapsed_ms()}};
        std::cout << out.dump() << "\n";
      } else {
        print_estimate(r.dynamics_f);
        std::printf("  mapped   p=%.6f delta=%.6f\n", r.mapped.p, r.mapped.delta);
        print_estimate(r.sdp_f);
        std::printf("  gap      %+0.6f (se %.6f) %s\n", r.gap, r.gap_se,
                    r.within_4se ? "within 4 SE" : "BEYOND 4 SE");
      }
      return r.within_4se ? 0 : 2;
    }

    if (c_sweep->parsed()) {
      SweepSpec spec;
      spec.p_grid = parse_grid(p_grid_text);
      spec.delta_grid = parse_grid(delta_grid_text);
      spec.scales = parse_scales(scales_text);
      spec.rule = rule_opts.resolve();
      spec.samples_per_cell = samples;
      spec.master_seed = seed;
      spec.quantity = parse_quantity(quantity_text);
      spec.rho = rho;
      spec.alpha = alpha;
      spec.n_hat = n_hat > 0 ? n_hat : 1;
      const SweepStats stats = run_sweep(spec, store_path, threads, max_cells);
      std::printf("sweep: %llu evaluated, %llu already present, store %s\n",
                  static_cast<unsigned long long>(stats.evaluated),
                  static_cast<unsigned long long>(stats.skipped),
                  store_path.c_str());
      return 0;
    }

    if (c_export->parsed()) {
      export_csv(store_path, out_path);
      std::printf("wrote %s\n", out_path.c_str());
      return 0;
    }

    if (c_heat->parsed()) {
      emit_heatmap(store_path, out_path,
                   heat_n > 0 ? std::optional<int>(heat_n) : std::nullopt,
                   pc_marker > 0.0 ? std::optional<double>(pc_marker)
                                   : std::nullopt);
      std::printf("wrote %s\n", out_path.c_str());
      return 0;
    }

    if (c_self->parsed()) {
      bool ok = true;
      ok &= selftest_duality(samples, seed);
      ok &= selftest_oracle(samples, seed);
      ok &= selftest_coupling(samples, seed);
      ok &= selftest_fkg(samples, seed);
      ok &= selftest_param_map(samples, seed);
      std::printf(ok ? "selftest: all suites passed\n"
                     : "selftest: FAILURES above\n");
      return ok ? 0 : 3;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
