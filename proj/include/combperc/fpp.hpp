#pragma once

// First-passage percolation on finite directed graphs with per-vertex source
// times, and the simultaneous-exploration coupling that realizes
// min_i T_i <= T for a family of independent models.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace combperc {

// Saturating sentinel: compares above every finite time and absorbs addition
// of non-negative weights.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Law of one directed passage time.
struct PassageLaw {
  enum class Kind { kConstant, kInfinite, kTwoPoint, kPerturbedConstant };

  Kind kind = Kind::kInfinite;
  double low = 0.0;      // constant value, or the value taken w.p. 1 - p_high
  double high = 0.0;     // value taken w.p. p_high (two-point)
  double p_high = 0.0;
  double epsilon = 0.0;  // width of the Uniform(0, epsilon) perturbation

  static PassageLaw constant(double c);
  static PassageLaw infinite();
  static PassageLaw two_point(double low, double high, double p_high);
  // Percolation rule: 1 if the target is open (probability p_open), else 0.
  static PassageLaw bernoulli(double p_open);
  static PassageLaw perturbed_constant(double c, double epsilon);

  // Inversion from independent uniforms in [0,1): `u` picks the atom,
  // `v` drives the perturbation.
  double sample(double u, double v) const;
  // Finite support with probabilities; empty for continuous laws.
  std::vector<std::pair<double, double>> atoms() const;
};

struct Edge {
  int from = 0;
  int to = 0;
  PassageLaw law;
};

// Vertex set {0..n-1} plus the directed edges that carry a law; every other
// ordered pair has passage time infinity.
class PassageSpec {
 public:
  PassageSpec() = default;
  explicit PassageSpec(std::size_t vertex_count, std::vector<std::string> names = {});

  int add_edge(int from, int to, PassageLaw law);

  std::size_t vertex_count() const { return out_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const Edge& edge(std::size_t id) const { return edges_[id]; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const int> out_edges(int v) const {
    return out_[static_cast<std::size_t>(v)];
  }
  std::optional<int> find_edge(int from, int to) const;
  const std::string& name(int v) const { return names_[static_cast<std::size_t>(v)]; }

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_;
  std::vector<std::string> names_;
};

// Sampled passage time per edge id.
using WeightTable = std::vector<double>;

struct SourceTimes {
  std::vector<double> t;         // kInfinity for "never switched on"
  double perturbation = 0.0;     // Uniform(0, perturbation) added when sampled
};

struct OccupationTimes {
  std::vector<double> T;
  std::optional<int> model;      // nullopt: the merged model
};

enum class PassageMethod { kAuto, kLabelSetting, kZeroOne };

// T(x) = inf over walks ending at x of t(y_0) + sum of weights.
OccupationTimes occupation_times(const PassageSpec& spec, const WeightTable& weights,
                                 std::span<const double> sources,
                                 PassageMethod method = PassageMethod::kAuto);

// True when every finite weight is 0 or 1 and every finite source time is an
// integer, which is what the deque kernel requires.
bool zero_one_eligible(const WeightTable& weights, std::span<const double> sources);

WeightTable sample_weights(const PassageSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Graph-generic kernels. `out_edges(v, visit)` must call visit(u, w) for every
// edge v -> u with finite non-negative weight w.

template <class OutEdges>
std::vector<double> label_setting_times(std::size_t n, std::span<const double> sources,
                                        OutEdges&& out_edges) {
  std::vector<double> dist(sources.begin(), sources.end());
  std::vector<char> done(n, 0);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (std::size_t v = 0; v < n; ++v) {
    if (dist[v] < kInfinity) heap.emplace(dist[v], v);
  }
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (done[v] || d > dist[v]) continue;
    done[v] = 1;
    out_edges(v, [&](std::size_t u, double w) {
      const double cand = d + w;
      if (cand < dist[u]) {
        dist[u] = cand;
        heap.emplace(cand, u);
      }
    });
  }
  return dist;
}

// Level-synchronous 0/1 relaxation: a deque per level, zero-weight edges stay
// in the current level, unit edges go to the next, sources join the level
// matching their (integer) switch-on time.
template <class OutEdges>
std::vector<double> zero_one_times(std::size_t n, std::span<const double> sources,
                                   OutEdges&& out_edges) {
  std::vector<std::pair<double, std::size_t>> pending;
  for (std::size_t v = 0; v < n; ++v) {
    if (sources[v] < kInfinity) pending.emplace_back(sources[v], v);
  }
  std::vector<double> dist(n, kInfinity);
  if (pending.empty()) return dist;
  std::sort(pending.begin(), pending.end());

  std::vector<char> done(n, 0);
  std::deque<std::size_t> current;
  std::vector<std::size_t> next;
  std::size_t cursor = 0;
  double level = pending.front().first;
  while (true) {
    while (cursor < pending.size() && pending[cursor].first == level) {
      const std::size_t v = pending[cursor++].second;
      if (dist[v] > level) {
        dist[v] = level;
        current.push_back(v);
      }
    }
    while (!current.empty()) {
      const std::size_t v = current.front();
      current.pop_front();
      if (done[v] || dist[v] < level) continue;
      done[v] = 1;
      out_edges(v, [&](std::size_t u, double w) {
        if (done[u]) return;
        if (w == 0.0) {
          if (dist[u] > level) {
            dist[u] = level;
            current.push_front(u);
          }
        } else if (dist[u] > level + 1.0) {
          dist[u] = level + 1.0;
          next.push_back(u);
        }
      });
    }
    const bool more_sources = cursor < pending.size();
    if (next.empty() && !more_sources) break;
    const double next_level = next.empty() ? pending[cursor].first : level + 1.0;
    level = more_sources ? std::min(next_level, pending[cursor].first) : next_level;
    for (std::size_t u : next) {
      if (!done[u] && dist[u] == level) current.push_back(u);
    }
    next.clear();
  }
  return dist;
}

// ---------------------------------------------------------------------------
// Coupling of several independent models sharing one passage-time law.

struct ModelFamily {
  PassageSpec spec;
  std::vector<SourceTimes> sources;   // t_i per model
  std::vector<WeightTable> weights;   // W_i per model: the unrevealed cards
  // Independent draws used for the merged model's out-edges of vertices that
  // no model ever reaches.
  WeightTable reserve;
};

struct FamilySampling {
  std::uint64_t seed = 0;
  bool perturb = true;
  // Uniform(0, amplitude) added to finite source times and finite passage
  // times; defaults to 1/|V|.
  std::optional<double> amplitude;
};

ModelFamily sample_family(PassageSpec spec, std::vector<std::vector<double>> sources,
                          const FamilySampling& sampling);

enum class TiePolicy {
  kError,          // equal earliest labels abort the run
  kLexicographic,  // deterministic replay: (label, model, vertex)
};

class CouplingTieError : public std::runtime_error {
 public:
  CouplingTieError(double label, int model_a, int vertex_a, int model_b, int vertex_b);
  double label;
  int model_a, vertex_a, model_b, vertex_b;
};

struct Examination {
  int model = 0;
  int vertex = 0;
  double label = 0.0;
  bool first_for_vertex = false;
};

struct CoupledRun {
  std::vector<OccupationTimes> per_model;   // T_i
  std::vector<double> min_over_models;      // T~(x) = min_i T_i(x)
  std::vector<double> merged_sources;       // t(x) = min_i t_i(x)
  WeightTable merged_weights;               // W(x,y) = W_i(x,y), i first to examine x
  OccupationTimes merged;                   // T for merged sources and weights
  std::vector<int> first_model;             // -1 when no model reaches x
  std::vector<Examination> examinations;    // in examination order
  std::vector<std::pair<int, int>> revealed;  // (model, edge) in reveal order
};

CoupledRun couple_models(const ModelFamily& family,
                         TiePolicy ties = TiePolicy::kError);

// T~(x) <= T(x) at every vertex.
bool verify_pointwise_domination(const CoupledRun& run);

}  // namespace combperc
