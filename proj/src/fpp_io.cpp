#include "combperc/fpp_io.hpp"

#include <cstdio>
#include <map>
#include <ostream>

namespace combperc {

namespace {

PassageLaw law_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") return PassageLaw::constant(j.at("value").get<double>());
  if (kind == "infinite") return PassageLaw::infinite();
  if (kind == "two_point") {
    return PassageLaw::two_point(j.at("low").get<double>(), j.at("high").get<double>(),
                                 j.at("p_high").get<double>());
  }
  if (kind == "bernoulli") return PassageLaw::bernoulli(j.at("p").get<double>());
  if (kind == "perturbed") {
    return PassageLaw::perturbed_constant(j.at("value").get<double>(),
                                          j.at("epsilon").get<double>());
  }
  throw std::invalid_argument("unknown passage law kind '" + kind + "'");
}

std::string format_time(double t) {
  if (t == kInfinity) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  return buf;
}

}  // namespace

nlohmann::json law_to_json(const PassageLaw& law) {
  switch (law.kind) {
    case PassageLaw::Kind::kConstant:
      return {{"kind", "constant"}, {"value", law.low}};
    case PassageLaw::Kind::kInfinite:
      return {{"kind", "infinite"}};
    case PassageLaw::Kind::kTwoPoint:
      return {{"kind", "two_point"}, {"low", law.low}, {"high", law.high}, {"p_high", law.p_high}};
    case PassageLaw::Kind::kPerturbedConstant:
      return {{"kind", "perturbed"}, {"value", law.low}, {"epsilon", law.epsilon}};
  }
  return {};
}

FppDocument parse_fpp_document(const nlohmann::json& doc) {
  std::vector<std::string> names;
  const auto& vertices = doc.at("vertices");
  if (vertices.is_number_integer()) {
    const int n = vertices.get<int>();
    if (n <= 0) throw std::invalid_argument("fpp document: vertex count must be positive");
    for (int v = 0; v < n; ++v) names.push_back(std::to_string(v));
  } else {
    names = vertices.get<std::vector<std::string>>();
  }
  std::map<std::string, int> index;
  for (std::size_t v = 0; v < names.size(); ++v) {
    if (!index.emplace(names[v], static_cast<int>(v)).second) {
      throw std::invalid_argument("fpp document: duplicate vertex name '" + names[v] + "'");
    }
  }
  auto vertex_ref = [&](const nlohmann::json& j) -> int {
    if (j.is_number_integer()) return j.get<int>();
    const auto it = index.find(j.get<std::string>());
    if (it == index.end()) throw std::invalid_argument("fpp document: unknown vertex");
    return it->second;
  };

  FppDocument out;
  out.spec = PassageSpec(names.size(), names);
  for (const auto& e : doc.value("edges", nlohmann::json::array())) {
    out.spec.add_edge(vertex_ref(e.at("from")), vertex_ref(e.at("to")), law_from_json(e.at("law")));
  }
  for (const auto& model : doc.at("models")) {
    std::vector<double> t(names.size(), kInfinity);
    const auto& src = model.at("sources");
    if (src.is_array()) {
      if (src.size() != names.size()) {
        throw std::invalid_argument("fpp document: source array length mismatch");
      }
      for (std::size_t v = 0; v < src.size(); ++v) {
        if (!src[v].is_null()) t[v] = src[v].get<double>();
      }
    } else {
      for (const auto& [name, value] : src.items()) {
        if (!value.is_null()) t[static_cast<std::size_t>(vertex_ref(name))] = value.get<double>();
      }
    }
    out.sources.push_back(std::move(t));
  }
  if (out.sources.empty()) throw std::invalid_argument("fpp document: no models");
  if (doc.contains("perturbation")) {
    const auto& pert = doc.at("perturbation");
    out.perturb = pert.value("enabled", true);
    if (pert.contains("amplitude") && !pert.at("amplitude").is_null()) {
      out.amplitude = pert.at("amplitude").get<double>();
    }
  }
  const std::string ties = doc.value("ties", std::string("error"));
  if (ties == "error") {
    out.ties = TiePolicy::kError;
  } else if (ties == "lexicographic") {
    out.ties = TiePolicy::kLexicographic;
  } else {
    throw std::invalid_argument("fpp document: ties must be 'error' or 'lexicographic'");
  }
  return out;
}

void write_occupation_csv(std::ostream& os, const PassageSpec& spec, const CoupledRun& run) {
  os << "vertex,T,T_tilde,first_model\n";
  for (std::size_t v = 0; v < spec.vertex_count(); ++v) {
    os << spec.name(static_cast<int>(v)) << ',' << format_time(run.merged.T[v]) << ','
       << format_time(run.min_over_models[v]) << ',' << run.first_model[v] << '\n';
  }
}

}  // namespace combperc
