#include "erw/distribution_json.hpp"

#include <string>

#include "erw/errors.hpp"

namespace erw {
namespace {

using nlohmann::json;

double number_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    throw InvalidDistribution(std::string("distribution descriptor: field '") +
                              key + "' missing or not a number");
  }
  return it->get<double>();
}

std::vector<double> number_array(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) {
    throw InvalidDistribution(std::string("distribution descriptor: field '") +
                              key + "' missing or not an array");
  }
  std::vector<double> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_number()) {
      throw InvalidDistribution(std::string("distribution descriptor: '") +
                                key + "' must contain only numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

StepDistribution distribution_from_json(const json& j) {
  if (!j.is_object()) {
    throw InvalidDistribution("distribution descriptor must be a JSON object");
  }
  auto kind_it = j.find("kind");
  if (kind_it == j.end() || !kind_it->is_string()) {
    throw InvalidDistribution("distribution descriptor: missing string 'kind'");
  }
  const auto kind = kind_it->get<std::string>();
  if (kind == "rademacher") return StepDistribution::rademacher();
  if (kind == "bernoulli") {
    return StepDistribution::bernoulli(number_field(j, "p"));
  }
  if (kind == "uniform") {
    return StepDistribution::uniform(number_field(j, "lo"), number_field(j, "hi"));
  }
  if (kind == "gaussian") {
    return StepDistribution::gaussian(number_field(j, "mean"),
                                      number_field(j, "stddev"));
  }
  if (kind == "discrete") {
    return StepDistribution::discrete(number_array(j, "points"),
                                      number_array(j, "weights"));
  }
  throw InvalidDistribution("distribution descriptor: unknown kind '" + kind + "'");
}

json distribution_to_json(const StepDistribution& dist) {
  using SD = StepDistribution;
  const auto& k = dist.kind();
  if (std::holds_alternative<SD::Rademacher>(k)) return {{"kind", "rademacher"}};
  if (const auto* b = std::get_if<SD::Bernoulli>(&k)) {
    return {{"kind", "bernoulli"}, {"p", b->p}};
  }
  if (const auto* u = std::get_if<SD::Uniform>(&k)) {
    return {{"kind", "uniform"}, {"lo", u->lo}, {"hi", u->hi}};
  }
  if (const auto* g = std::get_if<SD::Gaussian>(&k)) {
    return {{"kind", "gaussian"}, {"mean", g->mean}, {"stddev", g->stddev}};
  }
  const auto& d = std::get<SD::Discrete>(k);
  return {{"kind", "discrete"}, {"points", d.points}, {"weights", d.weights}};
}

json moment_set_to_json(const MomentSet& ms) {
  return {{"m1", ms.m1},   {"m2", ms.m2},   {"m3", ms.m3},   {"m4", ms.m4},
          {"M2", ms.M2},   {"M3", ms.M3},   {"M4", ms.M4},   {"M12", ms.M12},
          {"M13", ms.M13}, {"M22", ms.M22}, {"M112", ms.M112}};
}

MomentSet moment_set_from_json(const json& j) {
  auto get = [&](const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number()) {
      throw InvalidDistribution(std::string("moment set: field '") + key +
                                "' missing or not a number");
    }
    return it->get<double>();
  };
  MomentSet ms;
  ms.m1 = get("m1");
  ms.m2 = get("m2");
  ms.m3 = get("m3");
  ms.m4 = get("m4");
  ms.M2 = get("M2");
  ms.M3 = get("M3");
  ms.M4 = get("M4");
  ms.M12 = get("M12");
  ms.M13 = get("M13");
  ms.M22 = get("M22");
  ms.M112 = get("M112");
  return ms;
}

}  // namespace erw
