#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdp/dynamics.hpp"
#include "sdp/enumerate.hpp"
#include "sdp/estimators.hpp"
#include "sdp/model.hpp"

namespace py = pybind11;
using namespace sdp;

namespace {

py::array_t<std::uint8_t> field_to_numpy(const SiteField& f) {
  const Window& w = f.window();
  py::array_t<std::uint8_t> out({w.height, w.width});
  auto view = out.mutable_unchecked<2>();
  for (int y = 0; y < w.height; ++y) {
    for (int x = 0; x < w.width; ++x) {
      view(y, x) = f.get_index(static_cast<std::int64_t>(y) * w.width + x);
    }
  }
  return out;
}

DestructionRule rule_from_string(const std::string& text) {
  return DestructionRule::parse(text);
}

py::dict estimate_to_dict(const EstimateResult& e) {
  py::dict d;
  d["point"] = e.point;
  d["ci_low"] = e.ci_low;
  d["ci_high"] = e.ci_high;
  d["n_samples"] = e.n_samples;
  d["seed"] = e.seed;
  d["quantity"] = e.quantity;
  return d;
}

}  // namespace

PYBIND11_MODULE(sdpsim, m) {
  m.doc() =
      "Self-destructive percolation simulation: seeded field sampling, the "
      "destruction transform, Poisson-clock dynamics, and Monte Carlo "
      "estimators with Wilson intervals.";

  m.def(
      "sample_field",
      [](int width, int height, double prob, std::uint64_t seed,
         std::uint64_t replicate) {
        return field_to_numpy(
            sample_field(Window(width, height), prob, seed, Stream::x_field,
                         replicate));
      },
      py::arg("width"), py::arg("height"), py::arg("prob"), py::arg("seed"),
      py::arg("replicate") = 0,
      "Bernoulli(prob) occupancy as a (height, width) uint8 array; "
      "deterministic in (seed, replicate).");

  m.def(
      "sample_sdp",
      [](int width, int height, double p, double delta, const std::string& rule,
         std::uint64_t seed, std::uint64_t replicate) {
        const SdpSample s =
            sample_sdp(Window(width, height), SdpParams(p, delta),
                       rule_from_string(rule), seed, replicate);
        py::dict d;
        d["x"] = field_to_numpy(s.x);
        d["x_star"] = field_to_numpy(s.x_star);
        d["y"] = field_to_numpy(s.y);
        d["z"] = field_to_numpy(s.z);
        return d;
      },
      py::arg("width"), py::arg("height"), py::arg("p"), py::arg("delta"),
      py::arg("rule") = "window-boundary", py::arg("seed") = 1,
      py::arg("replicate") = 0,
      "One SDP draw; fields as (height, width) uint8 arrays. x and x_star "
      "live on the window enlarged by the rule margin.");

  m.def(
      "has_crossing",
      [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>
             field,
         bool occupied, const std::string& direction) {
        const auto view = field.unchecked<2>();
        const Window w(static_cast<int>(view.shape(1)),
                       static_cast<int>(view.shape(0)));
        SiteField f(w);
        for (int y = 0; y < w.height; ++y) {
          for (int x = 0; x < w.width; ++x) {
            f.set_index(static_cast<std::int64_t>(y) * w.width + x,
                        view(y, x) != 0);
          }
        }
        const Direction dir = direction == "horizontal" ? Direction::horizontal
                                                        : Direction::vertical;
        // Occupied crossings are 4-connected, vacant ones 8-connected.
        return occupied
                   ? has_crossing(f, true, Connectivity::four, dir)
                   : has_crossing(f, false, Connectivity::eight, dir);
      },
      py::arg("field"), py::arg("occupied") = true,
      py::arg("direction") = "horizontal");

  m.def(
      "estimate_theta",
      [](double p, double delta, int n, const std::string& rule,
         std::uint64_t samples, std::uint64_t seed, int threads) {
        return estimate_to_dict(estimate_theta(SdpParams(p, delta), n,
                                               rule_from_string(rule), samples,
                                               seed, threads));
      },
      py::arg("p"), py::arg("delta"), py::arg("n"),
      py::arg("rule") = "window-boundary", py::arg("samples") = 10000,
      py::arg("seed") = 1, py::arg("threads") = 0,
      "One-arm order-parameter estimate with a 95% Wilson interval.");

  m.def(
      "estimate_crossing",
      [](double p, double delta, double rho, int s, const std::string& rule,
         std::uint64_t samples, std::uint64_t seed, int threads) {
        const CrossingEstimate ce =
            estimate_crossing(SdpParams(p, delta), rho, s,
                              rule_from_string(rule), samples, seed, threads);
        py::dict d = estimate_to_dict(ce.f);
        d["h_dual"] = ce.h_dual.point;
        d["duality_violations"] = ce.duality_violations;
        return d;
      },
      py::arg("p"), py::arg("delta"), py::arg("rho"), py::arg("s"),
      py::arg("rule") = "window-boundary", py::arg("samples") = 10000,
      py::arg("seed") = 1, py::arg("threads") = 0);

  m.def(
      "finite_size_criterion",
      [](double p, double delta, double alpha, int n, int n_hat,
         const std::string& rule, std::uint64_t samples, std::uint64_t seed,
         int threads) {
        const CriterionVerdict v = finite_size_criterion(
            SdpParams(p, delta), CriterionConfig(alpha, n, n_hat),
            rule_from_string(rule), samples, seed, threads);
        py::dict d;
        d["holds"] = v.holds;
        d["f3n"] = estimate_to_dict(v.f3n);
        d["margin"] = v.margin;
        d["n"] = v.n;
        d["n_hat"] = v.n_hat;
        d["full_samples"] = v.full_samples;
        return d;
      },
      py::arg("p"), py::arg("delta"), py::arg("alpha") = 0.005,
      py::arg("n") = 16, py::arg("n_hat") = 1,
      py::arg("rule") = "window-boundary", py::arg("samples") = 10000,
      py::arg("seed") = 1, py::arg("threads") = 0);

  m.def(
      "params_from_times",
      [](double tau, double t) {
        const SdpParams s = params_from_times(DynParams(tau, t));
        return py::make_tuple(s.p, s.delta);
      },
      py::arg("tau"), py::arg("t"));

  m.def(
      "times_from_params",
      [](double p, double delta) {
        const DynParams d = times_from_params(SdpParams(p, delta));
        return py::make_tuple(d.tau, d.t);
      },
      py::arg("p"), py::arg("delta"));

  m.def(
      "exact_occupancy",
      [](int width, int height, int k, double p, double delta) {
        const Window region(width, height);
        const ExactFiniteRangeModel model(region, k, p);
        return model.site_occupancy(delta,
                                    Site{width / 2, height / 2});
      },
      py::arg("width"), py::arg("height"), py::arg("k"), py::arg("p"),
      py::arg("delta"),
      "Exact center-site occupancy of the finite-range model on a small "
      "region (enumeration).");

  m.def("occupancy_identity",
        [](double p, double delta, double pi_k) {
          return occupancy_identity(SdpParams(p, delta), pi_k);
        },
        py::arg("p"), py::arg("delta"), py::arg("pi_k"));
}
