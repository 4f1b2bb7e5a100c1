#pragma once

// End-to-end comb embedding: sample a field, certify the stacked surfaces,
// classify good and bad sites, build H over the certified layers, choose the
// largest comb window the certified data supports, map it and verify.

#include <cstdint>
#include <optional>
#include <string>

#include "combperc/embedding.hpp"
#include "combperc/lattice.hpp"
#include "combperc/surfaces.hpp"

namespace combperc {

struct EmbedConfig {
  int d = 2;
  double p = 0.99;
  std::uint64_t seed = 1;
  int width = 200;   // certified interior extent along every horizontal axis
  int height = 200;  // certified interior extent along the vertical axis, heights [0, height)
  int padding = 16;  // P; certification compares P against 2P
  int perp_padding = 8;
  int M = 2;
};

// Horizontal axes centred on 0, heights [0, height), grown by the padding.
LatticeWindow embed_window(const EmbedConfig& config);

struct EmbedRun {
  EmbedConfig config;
  bool complete = false;
  std::string reason;  // why the run is incomplete

  PercolationField field;
  std::optional<SurfaceStack> stack;
  std::optional<GoodBadField> classes;
  std::optional<PerpSurface> H;
  std::optional<CombEmbedding> embedding;

  StackInvariantReport stack_invariants;
  PerpInvariantReport perp_invariants;
  EmbeddingReport report;

  // 0 when complete with zero violations, 1 otherwise.
  int exit_code() const { return complete && report.ok() ? 0 : 1; }
};

EmbedRun run_embedding(const EmbedConfig& config);

}  // namespace combperc
