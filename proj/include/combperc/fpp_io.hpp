#pragma once

// JSON graph documents and CSV occupation-time output for the FPP engine.
//
// {
//   "vertices": ["a", "b", "c"],            // or an integer count
//   "edges": [
//     {"from": "a", "to": "b", "law": {"kind": "constant", "value": 1}},
//     {"from": "b", "to": "c", "law": {"kind": "two_point", "low": 0, "high": 1, "p_high": 0.5}},
//     {"from": "c", "to": "a", "law": {"kind": "bernoulli", "p": 0.9}},
//     {"from": "a", "to": "c", "law": {"kind": "perturbed", "value": 1, "epsilon": 0.1}},
//     {"from": "c", "to": "b", "law": {"kind": "infinite"}}
//   ],
//   "models": [ {"sources": {"a": 0}}, {"sources": [null, 0.5, null]} ],
//   "perturbation": {"enabled": true, "amplitude": 0.25},   // optional
//   "ties": "error"                                          // or "lexicographic"
// }
//
// Missing or null source entries mean "never switched on".

#include <iosfwd>

#include "combperc/fpp.hpp"
#include "json.hpp"

namespace combperc {

struct FppDocument {
  PassageSpec spec;
  std::vector<std::vector<double>> sources;
  bool perturb = true;
  std::optional<double> amplitude;
  TiePolicy ties = TiePolicy::kError;
};

FppDocument parse_fpp_document(const nlohmann::json& doc);
nlohmann::json law_to_json(const PassageLaw& law);

// vertex,T,T_tilde,first_model  (inf for unreached, first_model -1 if none)
void write_occupation_csv(std::ostream& os, const PassageSpec& spec, const CoupledRun& run);

}  // namespace combperc
