#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdp/estimators.hpp"

namespace sdp {

enum class Quantity { theta, crossing, criterion };
std::string quantity_name(Quantity q);
Quantity parse_quantity(const std::string& text);

/// A grid of (p, delta, n) cells to estimate, with resume-keyed identity.
struct SweepSpec {
  std::vector<double> p_grid;
  std::vector<double> delta_grid;
  std::vector<int> scales;
  DestructionRule rule = DestructionRule::window_boundary();
  std::uint64_t samples_per_cell = 1000;
  std::uint64_t master_seed = 0;
  Quantity quantity = Quantity::theta;
  double rho = 3.0;      // crossing cells
  double alpha = 0.005;  // criterion cells
  int n_hat = 1;         // criterion cells

  void validate() const;
  /// Deterministic serialization; the hash of this string keys the store.
  std::string canonical() const;
  std::uint64_t spec_hash() const;
};

struct ResultRecord {
  std::uint64_t spec_hash = 0;
  int pi = 0, di = 0, ni = 0;  // grid indices
  double p = 0.0, delta = 0.0;
  int n = 0;
  std::string quantity;
  EstimateResult estimate;
  bool holds = false;  // criterion cells only
  double wall_ms = 0.0;
  std::string timestamp;  // informational; not part of record identity

  /// The reproducible payload (everything except wall time and timestamp).
  std::string canonical() const;
};

struct SweepStats {
  std::uint64_t evaluated = 0;
  std::uint64_t skipped = 0;
};

/// Evaluate every cell not already present in the store (resume semantics
/// keyed by spec hash + cell indices) and append one JSON line per cell.
/// Cell workers run in parallel; the writer is serialized. max_cells > 0
/// caps the number of evaluations, for chunked runs and interruption tests.
SweepStats run_sweep(const SweepSpec& spec, const std::string& store_path,
                     int threads = 0, std::uint64_t max_cells = 0);

/// Parse a store; corrupt lines are skipped with a warning on stderr.
std::vector<ResultRecord> read_store(const std::string& store_path);

/// One CSV row per record, sorted by (p, delta, n); numbers round-trip
/// exactly.
void export_csv(const std::string& store_path, const std::string& out_path);

/// Grayscale SVG heatmap over the (p, delta) grid for one scale (required
/// when the store holds several). Optional vertical marker at an estimated
/// critical density. Bytes are deterministic for a given store.
void emit_heatmap(const std::string& store_path, const std::string& out_path,
                  std::optional<int> scale = std::nullopt,
                  std::optional<double> pc_marker = std::nullopt);

}  // namespace sdp
