#include "combperc/fpp.hpp"

#include <sstream>
#include <tuple>

#include "combperc/rng.hpp"

namespace combperc {

// ---------------------------------------------------------------------------
// Laws

PassageLaw PassageLaw::constant(double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("PassageLaw: negative constant");
  PassageLaw law;
  law.kind = Kind::kConstant;
  law.low = c;
  return law;
}

PassageLaw PassageLaw::infinite() { return PassageLaw{}; }

PassageLaw PassageLaw::two_point(double low, double high, double p_high) {
  if (!(low >= 0.0) || !(high >= 0.0)) {
    throw std::invalid_argument("PassageLaw: negative two-point value");
  }
  if (!(p_high >= 0.0 && p_high <= 1.0)) {
    throw std::invalid_argument("PassageLaw: probability outside [0,1]");
  }
  PassageLaw law;
  law.kind = Kind::kTwoPoint;
  law.low = low;
  law.high = high;
  law.p_high = p_high;
  return law;
}

PassageLaw PassageLaw::bernoulli(double p_open) { return two_point(0.0, 1.0, p_open); }

PassageLaw PassageLaw::perturbed_constant(double c, double epsilon) {
  if (!(c >= 0.0) || !(epsilon >= 0.0)) {
    throw std::invalid_argument("PassageLaw: negative perturbed constant");
  }
  PassageLaw law;
  law.kind = Kind::kPerturbedConstant;
  law.low = c;
  law.epsilon = epsilon;
  return law;
}

double PassageLaw::sample(double u, double v) const {
  switch (kind) {
    case Kind::kConstant:
      return low;
    case Kind::kInfinite:
      return kInfinity;
    case Kind::kTwoPoint:
      return u < p_high ? high : low;
    case Kind::kPerturbedConstant:
      return low + epsilon * v;
  }
  return kInfinity;
}

std::vector<std::pair<double, double>> PassageLaw::atoms() const {
  switch (kind) {
    case Kind::kConstant:
      return {{low, 1.0}};
    case Kind::kInfinite:
      return {{kInfinity, 1.0}};
    case Kind::kTwoPoint:
      if (low == high) return {{low, 1.0}};
      return {{low, 1.0 - p_high}, {high, p_high}};
    case Kind::kPerturbedConstant:
      return {};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Graph

PassageSpec::PassageSpec(std::size_t vertex_count, std::vector<std::string> names)
    : out_(vertex_count), names_(std::move(names)) {
  if (names_.empty()) {
    for (std::size_t v = 0; v < vertex_count; ++v) names_.push_back(std::to_string(v));
  }
  if (names_.size() != vertex_count) {
    throw std::invalid_argument("PassageSpec: name count does not match vertex count");
  }
}

int PassageSpec::add_edge(int from, int to, PassageLaw law) {
  const int n = static_cast<int>(vertex_count());
  if (from < 0 || from >= n || to < 0 || to >= n) {
    throw std::out_of_range("PassageSpec: edge endpoint out of range");
  }
  if (from == to) throw std::invalid_argument("PassageSpec: self-loop");
  if (find_edge(from, to)) throw std::invalid_argument("PassageSpec: duplicate edge");
  edges_.push_back({from, to, law});
  const int id = static_cast<int>(edges_.size()) - 1;
  out_[static_cast<std::size_t>(from)].push_back(id);
  return id;
}

std::optional<int> PassageSpec::find_edge(int from, int to) const {
  for (int id : out_edges(from)) {
    if (edges_[static_cast<std::size_t>(id)].to == to) return id;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Occupation times

namespace {

void validate_inputs(const PassageSpec& spec, const WeightTable& weights,
                     std::span<const double> sources) {
  if (weights.size() != spec.edge_count()) {
    throw std::invalid_argument("occupation_times: weight table size mismatch");
  }
  if (sources.size() != spec.vertex_count()) {
    throw std::invalid_argument("occupation_times: source table size mismatch");
  }
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("occupation_times: negative weight");
  }
  for (double t : sources) {
    if (std::isnan(t) || t == -kInfinity) {
      throw std::invalid_argument("occupation_times: source time must lie in (-inf, inf]");
    }
  }
}

}  // namespace

bool zero_one_eligible(const WeightTable& weights, std::span<const double> sources) {
  for (double w : weights) {
    if (w < kInfinity && w != 0.0 && w != 1.0) return false;
  }
  for (double t : sources) {
    if (t < kInfinity && t != std::floor(t)) return false;
  }
  return true;
}

OccupationTimes occupation_times(const PassageSpec& spec, const WeightTable& weights,
                                 std::span<const double> sources, PassageMethod method) {
  validate_inputs(spec, weights, sources);
  auto out = [&](std::size_t v, auto&& visit) {
    for (int id : spec.out_edges(static_cast<int>(v))) {
      const double w = weights[static_cast<std::size_t>(id)];
      if (w < kInfinity) visit(static_cast<std::size_t>(spec.edge(static_cast<std::size_t>(id)).to), w);
    }
  };
  const bool eligible = zero_one_eligible(weights, sources);
  if (method == PassageMethod::kZeroOne && !eligible) {
    throw std::invalid_argument("occupation_times: 0/1 kernel needs 0/1 weights and integer sources");
  }
  const bool use_zero_one =
      method == PassageMethod::kZeroOne || (method == PassageMethod::kAuto && eligible);
  OccupationTimes result;
  result.T = use_zero_one ? zero_one_times(spec.vertex_count(), sources, out)
                          : label_setting_times(spec.vertex_count(), sources, out);
  return result;
}

WeightTable sample_weights(const PassageSpec& spec, std::uint64_t seed) {
  WeightTable w(spec.edge_count());
  for (std::size_t e = 0; e < w.size(); ++e) {
    const double u = to_unit_interval(hash_words(seed, {e, 0}));
    const double v = to_unit_interval(hash_words(seed, {e, 1}));
    w[e] = spec.edge(e).law.sample(u, v);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Coupling

namespace {

constexpr std::uint64_t kWeightStream = 1;
constexpr std::uint64_t kSourceStream = 2;
constexpr std::uint64_t kReserveStream = 3;

WeightTable sample_model_weights(const PassageSpec& spec, std::uint64_t seed,
                                 std::uint64_t stream, std::uint64_t model,
                                 double amplitude) {
  WeightTable w(spec.edge_count());
  for (std::size_t e = 0; e < w.size(); ++e) {
    const double u = to_unit_interval(hash_words(seed, {stream, model, e, 0}));
    const double v = to_unit_interval(hash_words(seed, {stream, model, e, 1}));
    double value = spec.edge(e).law.sample(u, v);
    if (amplitude > 0.0 && value < kInfinity) {
      value += amplitude * to_unit_interval(hash_words(seed, {stream, model, e, 2}));
    }
    w[e] = value;
  }
  return w;
}

}  // namespace

ModelFamily sample_family(PassageSpec spec, std::vector<std::vector<double>> sources,
                          const FamilySampling& sampling) {
  const std::size_t n = spec.vertex_count();
  if (n == 0) throw std::invalid_argument("sample_family: empty vertex set");
  if (sources.empty()) throw std::invalid_argument("sample_family: no models");
  double amplitude = 0.0;
  if (sampling.perturb) {
    amplitude = sampling.amplitude.value_or(1.0 / static_cast<double>(n));
    if (!(amplitude > 0.0)) throw std::invalid_argument("sample_family: amplitude must be positive");
  }
  ModelFamily family;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i].size() != n) throw std::invalid_argument("sample_family: source size mismatch");
    SourceTimes st{sources[i], amplitude};
    if (amplitude > 0.0) {
      for (std::size_t x = 0; x < n; ++x) {
        if (st.t[x] < kInfinity) {
          st.t[x] += amplitude * to_unit_interval(hash_words(sampling.seed, {kSourceStream, i, x}));
        }
      }
    }
    family.sources.push_back(std::move(st));
    family.weights.push_back(sample_model_weights(spec, sampling.seed, kWeightStream, i, amplitude));
  }
  family.reserve = sample_model_weights(spec, sampling.seed, kReserveStream, 0, amplitude);
  family.spec = std::move(spec);
  return family;
}

namespace {

std::string tie_message(double label, int ma, int va, int mb, int vb) {
  std::ostringstream os;
  os << "coupling tie at label " << label << " between (model " << ma << ", vertex " << va
     << ") and (model " << mb << ", vertex " << vb << ")";
  return os.str();
}

}  // namespace

CouplingTieError::CouplingTieError(double l, int ma, int va, int mb, int vb)
    : std::runtime_error(tie_message(l, ma, va, mb, vb)),
      label(l), model_a(ma), vertex_a(va), model_b(mb), vertex_b(vb) {}

CoupledRun couple_models(const ModelFamily& family, TiePolicy ties) {
  const PassageSpec& spec = family.spec;
  const std::size_t n = spec.vertex_count();
  const std::size_t m = family.sources.size();
  if (m == 0 || family.weights.size() != m) {
    throw std::invalid_argument("couple_models: need one weight table per model");
  }
  for (std::size_t i = 0; i < m; ++i) {
    validate_inputs(spec, family.weights[i], family.sources[i].t);
  }
  if (family.reserve.size() != spec.edge_count()) {
    throw std::invalid_argument("couple_models: reserve table size mismatch");
  }

  CoupledRun run;
  std::vector<std::vector<double>> label(m);
  std::vector<std::vector<char>> examined(m, std::vector<char>(n, 0));
  using Entry = std::tuple<double, int, int>;  // (label, model, vertex)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (std::size_t i = 0; i < m; ++i) {
    label[i] = family.sources[i].t;
    for (std::size_t x = 0; x < n; ++x) {
      if (label[i][x] < kInfinity) heap.emplace(label[i][x], static_cast<int>(i), static_cast<int>(x));
    }
  }
  auto stale = [&](const Entry& e) {
    const auto [l, i, x] = e;
    const auto ui = static_cast<std::size_t>(i);
    const auto ux = static_cast<std::size_t>(x);
    return examined[ui][ux] || l > label[ui][ux];
  };

  run.first_model.assign(n, -1);
  run.merged_weights.assign(spec.edge_count(), kInfinity);
  while (!heap.empty()) {
    const Entry top = heap.top();
    heap.pop();
    if (stale(top)) continue;
    const auto [l, i, x] = top;
    if (ties == TiePolicy::kError) {
      while (!heap.empty() && stale(heap.top())) heap.pop();
      if (!heap.empty() && std::get<0>(heap.top()) == l) {
        throw CouplingTieError(l, i, x, std::get<1>(heap.top()), std::get<2>(heap.top()));
      }
    }
    const auto ui = static_cast<std::size_t>(i);
    const auto ux = static_cast<std::size_t>(x);
    examined[ui][ux] = 1;
    const bool first = run.first_model[ux] < 0;
    if (first) run.first_model[ux] = i;
    run.examinations.push_back({i, x, l, first});

    // Cards are turned over only now; the merged model's choice of source
    // for W(x, .) was fixed before any of them was seen.
    for (int id : spec.out_edges(x)) {
      const auto e = static_cast<std::size_t>(id);
      run.revealed.emplace_back(i, id);
      const double w = family.weights[ui][e];
      if (first) run.merged_weights[e] = w;
      const auto y = static_cast<std::size_t>(spec.edge(e).to);
      if (examined[ui][y]) continue;
      const double cand = l + w;
      if (cand < label[ui][y]) {
        label[ui][y] = cand;
        heap.emplace(cand, i, static_cast<int>(y));
      }
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (run.first_model[x] >= 0) continue;
    for (int id : spec.out_edges(static_cast<int>(x))) {
      run.merged_weights[static_cast<std::size_t>(id)] = family.reserve[static_cast<std::size_t>(id)];
    }
  }

  run.min_over_models.assign(n, kInfinity);
  run.merged_sources.assign(n, kInfinity);
  for (std::size_t i = 0; i < m; ++i) {
    OccupationTimes ti;
    ti.T = label[i];
    ti.model = static_cast<int>(i);
    for (std::size_t x = 0; x < n; ++x) {
      run.min_over_models[x] = std::min(run.min_over_models[x], ti.T[x]);
      run.merged_sources[x] = std::min(run.merged_sources[x], family.sources[i].t[x]);
    }
    run.per_model.push_back(std::move(ti));
  }
  run.merged = occupation_times(spec, run.merged_weights, run.merged_sources);
  run.merged.model = std::nullopt;
  return run;
}

bool verify_pointwise_domination(const CoupledRun& run) {
  if (run.min_over_models.size() != run.merged.T.size()) return false;
  for (std::size_t x = 0; x < run.merged.T.size(); ++x) {
    if (run.min_over_models[x] > run.merged.T[x]) return false;
  }
  return true;
}

}  // namespace combperc
