// Copyright 2026 The mmdc Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// File formats (versioned JSON documents), instance generators, and the
// gadget dump with its independent auditor. Indices are 1-based in files
// and 0-based in the C++ API.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mmdc/gadget.hpp"
#include "mmdc/instance.hpp"
#include "mmdc/oracle.hpp"

namespace mmdc::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kInstanceFormat = "mmdc-instance/1";
inline constexpr const char* kSolutionFormat = "mmdc-solution/1";
inline constexpr const char* kGadgetFormat = "mmdc-gadget/1";
inline constexpr const char* kSolverName = "mmdc";
inline constexpr const char* kSolverVersion = "0.1.0";

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline json readJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void writeTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

/// An instance parsed from disk. Costs written as JSON integers select the
/// exact int64 pipeline; any fractional cost selects the double pipeline.
struct ParsedInstance {
  std::variant<MmdcInstance<std::int64_t>, MmdcInstance<double>> value;
  json metadata;  // echoed onto derived artifacts

  bool integral() const { return value.index() == 0; }
};

namespace detail {

inline IntVector parseBounds(const json& doc, const char* key, int expected) {
  if (!doc.contains(key) || !doc[key].is_array())
    throw ParseError(std::string(key) + " must be an array");
  const auto& arr = doc[key];
  if (static_cast<int>(arr.size()) != expected)
    throw ParseError(std::string(key) + " must have length " +
                     std::to_string(expected));
  IntVector out(expected);
  for (int k = 0; k < expected; ++k) {
    if (!arr[k].is_number_integer() && !arr[k].is_number_unsigned())
      throw ParseError(std::string(key) + "[" + std::to_string(k) +
                       "] must be an integer");
    out[k] = arr[k].get<int>();
    if (out[k] < 0)
      throw ParseError(std::string(key) + "[" + std::to_string(k) +
                       "] must be nonnegative");
  }
  return out;
}

template <class Scalar>
MmdcInstance<Scalar> assembleInstance(const json& doc, int s, int t) {
  MmdcInstance<Scalar> inst;
  inst.alpha = parseBounds(doc, "alpha", s);
  inst.alphaCap = parseBounds(doc, "alpha_cap", s);
  inst.beta = parseBounds(doc, "beta", t);
  inst.betaCap = parseBounds(doc, "beta_cap", t);
  inst.cost.resize(s, t);
  const auto& rows = doc["costs"];
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < t; ++j) inst.cost(i, j) = rows[i][j].get<Scalar>();
  return inst;
}

}  // namespace detail

inline ParsedInstance parseInstance(const json& doc) {
  if (!doc.is_object() || doc.value("format", "") != kInstanceFormat)
    throw ParseError(std::string("expected format \"") + kInstanceFormat + "\"");
  if (!doc.contains("s") || !doc.contains("t") || !doc["s"].is_number_integer() ||
      !doc["t"].is_number_integer())
    throw ParseError("s and t must be integers");
  const int s = doc["s"].get<int>();
  const int t = doc["t"].get<int>();
  if (s < 1 || t < 1) throw ParseError("s and t must be positive");

  if (!doc.contains("costs") || !doc["costs"].is_array() ||
      static_cast<int>(doc["costs"].size()) != s)
    throw ParseError("costs must be an array of s rows");
  bool integral = true;
  for (int i = 0; i < s; ++i) {
    const auto& row = doc["costs"][i];
    if (!row.is_array() || static_cast<int>(row.size()) != t)
      throw ParseError("costs[" + std::to_string(i) + "] must have length t");
    for (int j = 0; j < t; ++j) {
      const auto& cell = row[j];
      if (!cell.is_number())
        throw ParseError("costs[" + std::to_string(i) + "][" +
                         std::to_string(j) + "] must be a number");
      if (!cell.is_number_integer() && !cell.is_number_unsigned())
        integral = false;
    }
  }

  ParsedInstance out;
  out.metadata = doc.value("metadata", json());
  if (integral)
    out.value = detail::assembleInstance<std::int64_t>(doc, s, t);
  else
    out.value = detail::assembleInstance<double>(doc, s, t);
  return out;
}

inline ParsedInstance readInstanceFile(const std::string& path) {
  return parseInstance(readJsonFile(path));
}

namespace detail {

inline json boundsToJson(const IntVector& v) {
  json arr = json::array();
  for (int k = 0; k < v.size(); ++k) arr.push_back(v[k]);
  return arr;
}

}  // namespace detail

template <class Scalar>
json instanceToJson(const MmdcInstance<Scalar>& inst, json metadata = {}) {
  json doc;
  doc["format"] = kInstanceFormat;
  doc["s"] = inst.numA();
  doc["t"] = inst.numB();
  doc["alpha"] = detail::boundsToJson(inst.alpha);
  doc["alpha_cap"] = detail::boundsToJson(inst.alphaCap);
  doc["beta"] = detail::boundsToJson(inst.beta);
  doc["beta_cap"] = detail::boundsToJson(inst.betaCap);
  json rows = json::array();
  for (int i = 0; i < inst.numA(); ++i) {
    json row = json::array();
    for (int j = 0; j < inst.numB(); ++j) row.push_back(inst.cost(i, j));
    rows.push_back(std::move(row));
  }
  doc["costs"] = std::move(rows);
  if (!metadata.is_null()) doc["metadata"] = std::move(metadata);
  return doc;
}

template <class Scalar>
json solutionToJson(const MmdcSolution<Scalar>& sol, Scalar epsilon,
                    std::optional<double> solveMs = {},
                    const std::string& method = "gadget") {
  json doc;
  doc["format"] = kSolutionFormat;
  json pairs = json::array();
  for (const auto& [i, j] : sol.pairs) pairs.push_back(json::array({i + 1, j + 1}));
  doc["pairs"] = std::move(pairs);
  doc["cost"] = sol.cost;
  doc["degree_a"] = detail::boundsToJson(sol.degreeA);
  doc["degree_b"] = detail::boundsToJson(sol.degreeB);
  if (sol.certificate) {
    const auto& c = *sol.certificate;
    doc["certificate"] = {{"gadget_n", c.gadgetSize},
                          {"matching_weight", c.matchingWeight},
                          {"main_weight", c.mainWeight},
                          {"nonmain_weight", c.nonmainWeight},
                          {"gamma", c.gamma},
                          {"gamma_prime", c.gammaPrime},
                          {"gamma_double_prime", c.gammaDoublePrime}};
  }
  doc["solver"] = {{"name", kSolverName},
                   {"version", kSolverVersion},
                   {"method", method},
                   {"mode", std::is_integral_v<Scalar> ? "int" : "float"},
                   {"epsilon", epsilon}};
  if (solveMs) doc["timing"] = {{"solve_ms", *solveMs}};
  return doc;
}

template <class Scalar>
MmdcSolution<Scalar> parseSolution(const json& doc, int s, int t) {
  if (!doc.is_object() || doc.value("format", "") != kSolutionFormat)
    throw ParseError(std::string("expected format \"") + kSolutionFormat + "\"");
  MmdcSolution<Scalar> sol;
  if (!doc.contains("pairs") || !doc["pairs"].is_array())
    throw ParseError("pairs must be an array");
  for (const auto& p : doc["pairs"]) {
    if (!p.is_array() || p.size() != 2)
      throw ParseError("each pair must be a two-element array");
    sol.pairs.emplace_back(p[0].get<int>() - 1, p[1].get<int>() - 1);
  }
  if (!doc.contains("cost")) throw ParseError("cost is missing");
  sol.cost = doc["cost"].get<Scalar>();
  sol.degreeA = detail::parseBounds(doc, "degree_a", s);
  sol.degreeB = detail::parseBounds(doc, "degree_b", t);
  return sol;
}

// ---------------------------------------------------------------------------
// Generators. Draws use a fixed-order stream from one mt19937_64, with the
// bound/unit reductions written out so output depends only on the seed.

namespace detail {

inline std::uint64_t drawBounded(std::mt19937_64& rng, std::uint64_t count) {
  return count == 0 ? 0 : rng() % count;
}

inline double drawUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct BoundsDraw {
  IntVector alpha, alphaCap, beta, betaCap;
};

inline void checkGeneratorParams(int s, int t, int demandLo, int boundMax) {
  if (s < 1 || t < 1) throw GenerationError("s and t must be positive");
  if (demandLo < 0) throw GenerationError("demand floor must be nonnegative");
  if (demandLo > boundMax)
    throw GenerationError("demand floor exceeds the capacity ceiling");
  const std::int64_t needA = std::int64_t{s} * demandLo;
  const std::int64_t roomB = std::int64_t{t} * std::min(s, boundMax);
  const std::int64_t needB = std::int64_t{t} * demandLo;
  const std::int64_t roomA = std::int64_t{s} * std::min(t, boundMax);
  if (needA > roomB || needB > roomA)
    throw GenerationError(
        "demand floor cannot be met under the capacity ceiling for these sizes");
}

inline IntVector drawSide(std::mt19937_64& rng, int count, int demandLo,
                          int boundMax, IntVector& caps) {
  caps.resize(count);
  IntVector demands(count);
  for (int k = 0; k < count; ++k) {
    caps[k] = demandLo + static_cast<int>(drawBounded(rng, boundMax - demandLo + 1));
    demands[k] = demandLo + static_cast<int>(drawBounded(rng, caps[k] - demandLo + 1));
  }
  return demands;
}

template <class Scalar, class CostDraw>
MmdcInstance<Scalar> drawInstance(int s, int t, int demandLo, int boundMax,
                                  std::uint64_t seed, CostDraw&& drawCosts) {
  checkGeneratorParams(s, t, demandLo, boundMax);
  std::mt19937_64 rng(seed);
  constexpr int kMaxAttempts = 10000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    MmdcInstance<Scalar> inst;
    inst.alpha = drawSide(rng, s, demandLo, boundMax, inst.alphaCap);
    inst.beta = drawSide(rng, t, demandLo, boundMax, inst.betaCap);
    inst.cost = MatrixX<Scalar>::Zero(s, t);
    if (!validate(inst).feasible) continue;
    drawCosts(rng, inst);
    return inst;
  }
  throw GenerationError("no feasible instance found after 10000 draws");
}

}  // namespace detail

struct UniformGenParams {
  int s = 2, t = 2;
  int demandLo = 1;
  int boundMax = 3;
  std::int64_t costLo = 0, costHi = 9;
  std::uint64_t seed = 0;
};

inline std::pair<MmdcInstance<std::int64_t>, json> generateUniform(
    const UniformGenParams& p) {
  if (p.costLo < 0 || p.costHi < p.costLo)
    throw GenerationError("cost range must satisfy 0 <= lo <= hi");
  auto inst = detail::drawInstance<std::int64_t>(
      p.s, p.t, p.demandLo, p.boundMax, p.seed,
      [&](std::mt19937_64& rng, MmdcInstance<std::int64_t>& out) {
        for (int i = 0; i < p.s; ++i)
          for (int j = 0; j < p.t; ++j)
            out.cost(i, j) =
                p.costLo + static_cast<std::int64_t>(
                               detail::drawBounded(rng, p.costHi - p.costLo + 1));
      });
  json meta = {{"generator", "uniform"},   {"seed", p.seed},
               {"cost_lo", p.costLo},      {"cost_hi", p.costHi},
               {"demand_lo", p.demandLo},  {"bound_max", p.boundMax}};
  return {std::move(inst), std::move(meta)};
}

struct EuclideanGenParams {
  int s = 2, t = 2;
  int demandLo = 1;
  int boundMax = 3;
  double boxWidth = 100.0, boxHeight = 100.0;
  std::uint64_t seed = 0;
};

/// Costs are planar distances between seeded random point sets; the points
/// are recorded in the metadata and the distances stored at full precision.
inline std::pair<MmdcInstance<double>, json> generateEuclidean(
    const EuclideanGenParams& p) {
  if (p.boxWidth < 0 || p.boxHeight < 0)
    throw GenerationError("box dimensions must be nonnegative");
  std::vector<std::pair<double, double>> ptsA, ptsB;
  auto inst = detail::drawInstance<double>(
      p.s, p.t, p.demandLo, p.boundMax, p.seed,
      [&](std::mt19937_64& rng, MmdcInstance<double>& out) {
        ptsA.clear();
        ptsB.clear();
        for (int i = 0; i < p.s; ++i)
          ptsA.emplace_back(p.boxWidth * detail::drawUnit(rng),
                            p.boxHeight * detail::drawUnit(rng));
        for (int j = 0; j < p.t; ++j)
          ptsB.emplace_back(p.boxWidth * detail::drawUnit(rng),
                            p.boxHeight * detail::drawUnit(rng));
        for (int i = 0; i < p.s; ++i)
          for (int j = 0; j < p.t; ++j) {
            const double dx = ptsA[i].first - ptsB[j].first;
            const double dy = ptsA[i].second - ptsB[j].second;
            out.cost(i, j) = std::sqrt(dx * dx + dy * dy);
          }
      });
  json pa = json::array(), pb = json::array();
  for (const auto& [x, y] : ptsA) pa.push_back(json::array({x, y}));
  for (const auto& [x, y] : ptsB) pb.push_back(json::array({x, y}));
  json meta = {{"generator", "euclidean"},
               {"seed", p.seed},
               {"box", json::array({p.boxWidth, p.boxHeight})},
               {"demand_lo", p.demandLo},
               {"bound_max", p.boundMax},
               {"points_a", std::move(pa)},
               {"points_b", std::move(pb)}};
  return {std::move(inst), std::move(meta)};
}

// ---------------------------------------------------------------------------
// Gadget dump: the full weight matrix plus role tables and the normalized
// instance it was built from, so an auditor can recompute every invariant.

namespace detail {

inline json roleToJson(const VertexRole& role) {
  switch (role.kind) {
    case VertexKind::kDemandCopy:
      return {{"kind", "demand"}, {"element", role.element + 1}, {"slot", role.slot + 1}};
    case VertexKind::kExtraCopy:
      return {{"kind", "extra"}, {"element", role.element + 1}, {"slot", role.slot + 1}};
    case VertexKind::kQuotaDummy:
      return {{"kind", "quota"}, {"element", role.element + 1}, {"slot", role.slot + 1}};
    case VertexKind::kFillerDummy:
      return {{"kind", "filler"}, {"element", role.element + 1}, {"slot", role.slot + 1}};
    case VertexKind::kPartnerCopy:
      return {{"kind", "partner"},
              {"element", role.element + 1},
              {"reserved_for", role.slot + 1}};
    case VertexKind::kBalancer:
      return {{"kind", "balancer"}, {"slot", role.slot + 1}};
  }
  throw std::logic_error("unknown vertex kind");
}

inline VertexRole roleFromJson(const json& doc) {
  const std::string kind = doc.value("kind", "");
  if (kind == "balancer")
    return {VertexKind::kBalancer, kFree, doc.value("slot", 0) - 1};
  if (kind == "partner")
    return {VertexKind::kPartnerCopy, doc.value("element", 0) - 1,
            doc.value("reserved_for", 0) - 1};
  VertexKind k;
  if (kind == "demand")
    k = VertexKind::kDemandCopy;
  else if (kind == "extra")
    k = VertexKind::kExtraCopy;
  else if (kind == "quota")
    k = VertexKind::kQuotaDummy;
  else if (kind == "filler")
    k = VertexKind::kFillerDummy;
  else
    throw ParseError("unknown vertex kind \"" + kind + "\"");
  return {k, doc.value("element", 0) - 1, doc.value("slot", 0) - 1};
}

}  // namespace detail

template <class Scalar>
json gadgetToJson(const GadgetGraph<Scalar>& g) {
  json doc;
  doc["format"] = kGadgetFormat;
  doc["n"] = g.size();
  doc["gamma"] = g.gamma;
  doc["gamma_prime"] = g.gammaPrime;
  doc["gamma_double_prime"] = g.gammaDoublePrime;
  doc["forbidden"] = g.forbidden;
  doc["transposed"] = g.source.transposed;
  doc["instance"] = instanceToJson(g.source.instance);
  json rows = json::array(), cols = json::array();
  for (const auto& role : g.rowRole) rows.push_back(detail::roleToJson(role));
  for (const auto& role : g.colRole) cols.push_back(detail::roleToJson(role));
  doc["rows"] = std::move(rows);
  doc["cols"] = std::move(cols);
  json weights = json::array();
  for (int r = 0; r < g.size(); ++r) {
    json row = json::array();
    for (int c = 0; c < g.size(); ++c) row.push_back(g.weight(r, c));
    weights.push_back(std::move(row));
  }
  doc["weights"] = std::move(weights);
  return doc;
}

template <class Scalar>
GadgetGraph<Scalar> parseGadget(const json& doc, MmdcInstance<Scalar> instance) {
  GadgetGraph<Scalar> g;
  g.source.instance = std::move(instance);
  g.source.transposed = doc.value("transposed", false);
  g.gamma = doc.at("gamma").get<Scalar>();
  g.gammaPrime = doc.at("gamma_prime").get<Scalar>();
  g.gammaDoublePrime = doc.at("gamma_double_prime").get<Scalar>();
  g.forbidden = doc.at("forbidden").get<Scalar>();
  for (const auto& r : doc.at("rows")) g.rowRole.push_back(detail::roleFromJson(r));
  for (const auto& c : doc.at("cols")) g.colRole.push_back(detail::roleFromJson(c));
  const auto& weights = doc.at("weights");
  const int n = static_cast<int>(weights.size());
  g.weight.resize(n, n == 0 ? 0 : static_cast<int>(weights[0].size()));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < static_cast<int>(weights[r].size()); ++c)
      g.weight(r, c) = weights[r][c].get<Scalar>();
  return g;
}

struct GadgetAudit {
  bool pass = false;
  std::vector<std::string> problems;
};

/// Re-ingests a dump and recomputes every structural invariant from the
/// embedded instance, role tables, and weights.
inline GadgetAudit auditGadgetJson(const json& doc) {
  GadgetAudit audit;
  if (!doc.is_object() || doc.value("format", "") != kGadgetFormat) {
    audit.problems.push_back(std::string("expected format \"") + kGadgetFormat + "\"");
    return audit;
  }
  try {
    ParsedInstance parsed = parseInstance(doc.at("instance"));
    std::visit(
        [&](const auto& inst) {
          using Scalar = typename std::decay_t<decltype(inst.cost)>::Scalar;
          const GadgetGraph<Scalar> g = parseGadget<Scalar>(doc, inst);
          audit.problems = gadgetProblems(g);
          if (!doc.contains("n") || doc["n"].get<std::int64_t>() != g.size())
            audit.problems.push_back("declared n does not match the weight matrix");
        },
        parsed.value);
  } catch (const std::exception& e) {
    audit.problems.push_back(e.what());
  }
  audit.pass = audit.problems.empty();
  return audit;
}

}  // namespace mmdc::io
