#include "sdp/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "sdp/parallel.hpp"
#include "sdp/rng.hpp"

namespace sdp {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string quantity_name(Quantity q) {
  switch (q) {
    case Quantity::theta:
      return "theta";
    case Quantity::crossing:
      return "crossing";
    case Quantity::criterion:
      return "criterion";
  }
  return "?";
}

Quantity parse_quantity(const std::string& text) {
  if (text == "theta") return Quantity::theta;
  if (text == "crossing") return Quantity::crossing;
  if (text == "criterion") return Quantity::criterion;
  throw std::invalid_argument("unknown quantity '" + text + "'");
}

void SweepSpec::validate() const {
  auto check_grid = [](const std::vector<double>& g, const char* name) {
    if (g.empty()) {
      throw std::invalid_argument(std::string("SweepSpec: empty ") + name);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(g[i] >= 0.0 && g[i] <= 1.0)) {
        throw std::invalid_argument(std::string("SweepSpec: ") + name +
                                    " value outside [0,1]");
      }
      if (i > 0 && !(g[i] > g[i - 1])) {
        throw std::invalid_argument(std::string("SweepSpec: ") + name +
                                    " must be strictly ascending");
      }
    }
  };
  check_grid(p_grid, "p grid");
  check_grid(delta_grid, "delta grid");
  if (scales.empty()) throw std::invalid_argument("SweepSpec: empty scales");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] < 1) throw std::invalid_argument("SweepSpec: scale < 1");
    if (i > 0 && scales[i] <= scales[i - 1]) {
      throw std::invalid_argument("SweepSpec: scales must be strictly ascending");
    }
  }
  if (samples_per_cell < 1) {
    throw std::invalid_argument("SweepSpec: samples_per_cell must be >= 1");
  }
}

std::string SweepSpec::canonical() const {
  std::ostringstream os;
  os << "sweep-v1|p=";
  for (double v : p_grid) os << fmt_double(v) << ",";
  os << "|delta=";
  for (double v : delta_grid) os << fmt_double(v) << ",";
  os << "|n=";
  for (int v : scales) os << v << ",";
  os << "|rule=" << rule.to_string() << "|samples=" << samples_per_cell
     << "|seed=" << master_seed << "|quantity=" << quantity_name(quantity);
  if (quantity == Quantity::crossing) os << "|rho=" << fmt_double(rho);
  if (quantity == Quantity::criterion) {
    os << "|alpha=" << fmt_double(alpha) << "|n_hat=" << n_hat;
  }
  return os.str();
}

std::uint64_t SweepSpec::spec_hash() const { return fnv1a64(canonical()); }

std::string ResultRecord::canonical() const {
  std::ostringstream os;
  os << hash_hex(spec_hash) << "|" << pi << "," << di << "," << ni << "|"
     << fmt_double(p) << "," << fmt_double(delta) << "," << n << "|"
     << quantity << "|" << fmt_double(estimate.point) << ","
     << fmt_double(estimate.ci_low) << "," << fmt_double(estimate.ci_high)
     << "," << estimate.n_samples << "," << estimate.seed << "|"
     << (holds ? 1 : 0);
  return os.str();
}

namespace {

nlohmann::json to_json(const ResultRecord& r) {
  nlohmann::json j{{"spec_hash", hash_hex(r.spec_hash)},
                   {"pi", r.pi},
                   {"di", r.di},
                   {"ni", r.ni},
                   {"p", r.p},
                   {"delta", r.delta},
                   {"n", r.n},
                   {"quantity", r.quantity},
                   {"point", r.estimate.point},
                   {"ci_low", r.estimate.ci_low},
                   {"ci_high", r.estimate.ci_high},
                   {"n_samples", r.estimate.n_samples},
                   {"seed", r.estimate.seed},
                   {"wall_ms", r.wall_ms},
                   {"ts", r.timestamp}};
  if (r.quantity == "criterion") j["holds"] = r.holds;
  return j;
}

ResultRecord record_from_json(const nlohmann::json& j) {
  ResultRecord r;
  r.spec_hash = std::stoull(j.at("spec_hash").get<std::string>(), nullptr, 16);
  r.pi = j.at("pi").get<int>();
  r.di = j.at("di").get<int>();
  r.ni = j.at("ni").get<int>();
  r.p = j.at("p").get<double>();
  r.delta = j.at("delta").get<double>();
  r.n = j.at("n").get<int>();
  r.quantity = j.at("quantity").get<std::string>();
  r.estimate.point = j.at("point").get<double>();
  r.estimate.ci_low = j.at("ci_low").get<double>();
  r.estimate.ci_high = j.at("ci_high").get<double>();
  r.estimate.n_samples = j.at("n_samples").get<std::uint64_t>();
  r.estimate.seed = j.at("seed").get<std::uint64_t>();
  r.estimate.quantity = r.quantity;
  r.holds = j.value("holds", false);
  r.wall_ms = j.value("wall_ms", 0.0);
  r.timestamp = j.value("ts", std::string{});
  return r;
}

ResultRecord evaluate_cell(const SweepSpec& spec, int pi, int di, int ni,
                           int threads) {
  ResultRecord r;
  r.spec_hash = spec.spec_hash();
  r.pi = pi;
  r.di = di;
  r.ni = ni;
  r.p = spec.p_grid[static_cast<std::size_t>(pi)];
  r.delta = spec.delta_grid[static_cast<std::size_t>(di)];
  r.n = spec.scales[static_cast<std::size_t>(ni)];
  r.quantity = quantity_name(spec.quantity);
  const std::uint64_t cell_seed =
      derive_seed(spec.master_seed, static_cast<std::uint64_t>(pi),
                  static_cast<std::uint64_t>(di), static_cast<std::uint64_t>(ni));
  const SdpParams params(r.p, r.delta);
  const auto t0 = std::chrono::steady_clock::now();
  switch (spec.quantity) {
    case Quantity::theta:
      r.estimate = estimate_theta(params, r.n, spec.rule, spec.samples_per_cell,
                                  cell_seed, threads);
      break;
    case Quantity::crossing:
      r.estimate = estimate_crossing(params, spec.rho, r.n, spec.rule,
                                     spec.samples_per_cell, cell_seed, threads)
                       .f;
      break;
    case Quantity::criterion: {
      const CriterionConfig cfg(spec.alpha, r.n, spec.n_hat);
      const CriterionVerdict v = finite_size_criterion(
          params, cfg, spec.rule, spec.samples_per_cell, cell_seed, threads);
      r.estimate = v.f3n;
      r.holds = v.holds;
      break;
    }
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  r.timestamp = utc_now();
  return r;
}

}  // namespace

std::vector<ResultRecord> read_store(const std::string& store_path) {
  std::vector<ResultRecord> out;
  std::ifstream in(store_path);
  if (!in) return out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      std::cerr << "warning: " << store_path << ":" << lineno
                << ": skipping corrupt record (" << e.what() << ")\n";
    }
  }
  return out;
}

SweepStats run_sweep(const SweepSpec& spec, const std::string& store_path,
                     int threads, std::uint64_t max_cells) {
  spec.validate();
  const std::uint64_t hash = spec.spec_hash();

  std::set<std::tuple<int, int, int>> done;
  for (const ResultRecord& r : read_store(store_path)) {
    if (r.spec_hash == hash) done.insert({r.pi, r.di, r.ni});
  }

  std::vector<std::tuple<int, int, int>> pending;
  for (int pi = 0; pi < static_cast<int>(spec.p_grid.size()); ++pi) {
    for (int di = 0; di < static_cast<int>(spec.delta_grid.size()); ++di) {
      for (int ni = 0; ni < static_cast<int>(spec.scales.size()); ++ni) {
        if (!done.count({pi, di, ni})) pending.emplace_back(pi, di, ni);
      }
    }
  }

  SweepStats stats;
  stats.skipped = done.size();
  std::uint64_t todo = pending.size();
  if (max_cells > 0) todo = std::min(todo, max_cells);
  if (todo == 0) return stats;

  // A crash can leave a partial final line; make sure appends start fresh.
  {
    std::ifstream probe(store_path, std::ios::binary | std::ios::ate);
    if (probe && probe.tellg() > 0) {
      probe.seekg(-1, std::ios::end);
      char last = 0;
      probe.read(&last, 1);
      if (last != '\n') {
        std::ofstream fix(store_path, std::ios::app);
        fix << "\n";
      }
    }
  }
  std::ofstream out(store_path, std::ios::app);
  if (!out) {
    throw std::runtime_error("run_sweep: cannot open store for append: " +
                             store_path);
  }

  const int workers = std::max(
      1, std::min<int>(resolve_threads(threads), static_cast<int>(todo)));
  std::atomic<std::uint64_t> next{0};
  std::mutex write_mutex;
  std::atomic<bool> failed{false};
  std::string first_error;

  auto worker = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= todo || failed.load()) return;
      const auto [pi, di, ni] = pending[static_cast<std::size_t>(i)];
      try {
        // Cells parallelize across workers; estimators run single-threaded
        // inside a sweep so the two levels do not oversubscribe.
        const ResultRecord r = evaluate_cell(spec, pi, di, ni, 1);
        std::lock_guard<std::mutex> lock(write_mutex);
        out << to_json(r).dump() << "\n";
        out.flush();
        ++stats.evaluated;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(write_mutex);
        if (!failed.exchange(true)) first_error = e.what();
        return;
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) {
    throw std::runtime_error("run_sweep: cell evaluation failed: " + first_error);
  }
  return stats;
}

void export_csv(const std::string& store_path, const std::string& out_path) {
  std::vector<ResultRecord> records = read_store(store_path);
  std::sort(records.begin(), records.end(),
            [](const ResultRecord& a, const ResultRecord& b) {
              return std::tie(a.p, a.delta, a.n) < std::tie(b.p, b.delta, b.n);
            });
  std::ofstream out(out_path);
  if (!out) {
    throw std::runtime_error("export_csv: cannot open " + out_path);
  }
  out << "p,delta,n,point,ci_low,ci_high,n_samples,seed\n";
  for (const ResultRecord& r : records) {
    out << fmt_double(r.p) << "," << fmt_double(r.delta) << "," << r.n << ","
        << fmt_double(r.estimate.point) << "," << fmt_double(r.estimate.ci_low)
        << "," << fmt_double(r.estimate.ci_high) << "," << r.estimate.n_samples
        << "," << r.estimate.seed << "\n";
  }
}

namespace {

std::string fmt_tick(double v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

void emit_heatmap(const std::string& store_path, const std::string& out_path,
                  std::optional<int> scale, std::optional<double> pc_marker) {
  std::vector<ResultRecord> records = read_store(store_path);
  if (records.empty()) {
    throw std::runtime_error("emit_heatmap: store is empty");
  }
  std::set<int> scales_present;
  for (const ResultRecord& r : records) scales_present.insert(r.n);
  int n_used;
  if (scale) {
    n_used = *scale;
    if (!scales_present.count(n_used)) {
      throw std::runtime_error("emit_heatmap: no records at requested scale");
    }
  } else if (scales_present.size() == 1) {
    n_used = *scales_present.begin();
  } else {
    throw std::runtime_error(
        "emit_heatmap: several scales in store; pass the scale explicitly");
  }

  std::set<double> ps, ds;
  std::map<std::pair<double, double>, double> value;
  for (const ResultRecord& r : records) {
    if (r.n != n_used) continue;
    ps.insert(r.p);
    ds.insert(r.delta);
    value[{r.p, r.delta}] = r.estimate.point;
  }
  std::vector<double> pv(ps.begin(), ps.end()), dv(ds.begin(), ds.end());
  std::string missing;
  for (double p : pv) {
    for (double d : dv) {
      if (!value.count({p, d})) {
        missing += " (" + fmt_tick(p) + "," + fmt_tick(d) + ")";
      }
    }
  }
  if (!missing.empty()) {
    throw std::runtime_error("emit_heatmap: ragged grid; missing cells:" +
                             missing);
  }

  // 800x800 plot area plus margins for the axis labels.
  const double left = 70, bottom = 60, top = 10, right = 10;
  const double plot = 800;
  const double width = left + plot + right, height = top + plot + bottom;
  const double cw = plot / static_cast<double>(pv.size());
  const double ch = plot / static_cast<double>(dv.size());

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < pv.size(); ++i) {
    for (std::size_t j = 0; j < dv.size(); ++j) {
      const double v = value[{pv[i], dv[j]}];
      const int g = static_cast<int>(255.0 * (1.0 - std::min(1.0, std::max(0.0, v))) + 0.5);
      const double x = left + cw * static_cast<double>(i);
      const double y = top + plot - ch * static_cast<double>(j + 1);
      char cell[160];
      std::snprintf(cell, sizeof(cell),
                    "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                    "fill=\"rgb(%d,%d,%d)\"/>\n",
                    x, y, cw, ch, g, g, g);
      svg << cell;
    }
  }
  // Tick labels at cell centers.
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double x = left + cw * (static_cast<double>(i) + 0.5);
    svg << "<text x=\"" << x << "\" y=\"" << top + plot + 18
        << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt_tick(pv[i])
        << "</text>\n";
  }
  for (std::size_t j = 0; j < dv.size(); ++j) {
    const double y = top + plot - ch * (static_cast<double>(j) + 0.5);
    svg << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
        << "\" font-size=\"12\" text-anchor=\"end\">" << fmt_tick(dv[j])
        << "</text>\n";
  }
  svg << "<text x=\"" << left + plot / 2 << "\" y=\"" << height - 16
      << "\" font-size=\"14\" text-anchor=\"middle\">p</text>\n";
  svg << "<text x=\"18\" y=\"" << top + plot / 2
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << top + plot / 2 << ")\">delta</text>\n";
  if (pc_marker && pv.size() > 1 && *pc_marker >= pv.front() &&
      *pc_marker <= pv.back()) {
    // Position by linear interpolation between the neighboring cell centers.
    double xpos = left + cw * 0.5;
    for (std::size_t i = 0; i + 1 < pv.size(); ++i) {
      if (*pc_marker >= pv[i] && *pc_marker <= pv[i + 1]) {
        const double f = (*pc_marker - pv[i]) / (pv[i + 1] - pv[i]);
        xpos = left + cw * (static_cast<double>(i) + 0.5 + f);
        break;
      }
    }
    char line[200];
    std::snprintf(line, sizeof(line),
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                  "stroke=\"red\" stroke-width=\"2\" stroke-dasharray=\"6,4\"/>\n",
                  xpos, top, xpos, top + plot);
    svg << line;
  }
  svg << "</svg>\n";

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_heatmap: cannot open " + out_path);
  out << svg.str();
}

}  // namespace sdp
