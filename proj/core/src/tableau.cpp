#include "rkopt/tableau.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "rkopt/errors.hpp"

namespace rkopt {

ButcherTableau::ButcherTableau(std::string name, std::vector<std::vector<double>> rows,
                               std::vector<double> b, int claimed_order)
    : name_(std::move(name)), rows_(std::move(rows)), b_(std::move(b)), claimed_order_(claimed_order) {
  if (b_.empty()) throw DomainError("tableau needs at least one stage");
  if (rows_.size() != b_.size()) {
    throw DomainError("tableau has " + std::to_string(rows_.size()) + " rows of a but " +
                      std::to_string(b_.size()) + " weights");
  }
  if (claimed_order_ < 1) throw DomainError("claimed order must be >= 1");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].size() != i) {
      throw ExplicitnessError("row " + std::to_string(i + 1) + " of a has " +
                              std::to_string(rows_[i].size()) + " entries, expected " +
                              std::to_string(i) + " strictly-lower entries");
    }
    for (double v : rows_[i]) {
      if (!std::isfinite(v)) throw DomainError("non-finite coefficient in a");
    }
  }
  for (double v : b_) {
    if (!std::isfinite(v)) throw DomainError("non-finite weight in b");
  }
  const double sum = std::accumulate(b_.begin(), b_.end(), 0.0);
  if (std::abs(sum - 1.0) > kConsistencyTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "weights sum to " << sum << ", expected 1";
    throw ConsistencyError(msg.str());
  }
}

double ButcherTableau::c(int i) const noexcept {
  return std::accumulate(rows_[i].begin(), rows_[i].end(), 0.0);
}

ButcherTableau euler_tableau() { return {"euler", {{}}, {1.0}, 1}; }

ButcherTableau midpoint_tableau() { return {"midpoint", {{}, {0.5}}, {0.0, 1.0}, 2}; }

ButcherTableau kutta3_tableau() {
  return {"kutta3", {{}, {0.5}, {-1.0, 2.0}}, {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, 3};
}

ButcherTableau rk4_classic_tableau() {
  return {"rk4",
          {{}, {0.5}, {0.0, 0.5}, {0.0, 0.0, 1.0}},
          {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0},
          4};
}

std::vector<ButcherTableau> builtin_tableaus() {
  return {euler_tableau(), midpoint_tableau(), kutta3_tableau(), rk4_classic_tableau()};
}

ButcherTableau builtin_tableau(int order) {
  switch (order) {
    case 1: return euler_tableau();
    case 2: return midpoint_tableau();
    case 3: return kutta3_tableau();
    case 4: return rk4_classic_tableau();
    default:
      throw DomainError("no built-in tableau of order " + std::to_string(order) +
                        " (available: 1, 2, 3, 4)");
  }
}

namespace {

using nlohmann::json;

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(key, "missing required field");
  return *it;
}

int read_positive_int(const json& doc, const char* key) {
  const json& v = require(doc, key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ParseError(key, "expected a positive integer");
  }
  return v.get<int>();
}

double read_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ParseError(field, "expected a decimal number");
  return v.get<double>();
}

}  // namespace

ButcherTableau parse_tableau(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("document", e.what());
  }
  if (!doc.is_object()) throw ParseError("document", "expected an object");

  const int stages = read_positive_int(doc, "stages");
  const int order = read_positive_int(doc, "order");

  std::string name = "custom";
  if (auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) throw ParseError("name", "expected a string");
    name = it->get<std::string>();
  }

  const json& a = require(doc, "a");
  if (!a.is_array()) throw ParseError("a", "expected an array of rows");
  if (static_cast<int>(a.size()) != stages) {
    throw ParseError("a", "expected " + std::to_string(stages) + " rows, found " +
                              std::to_string(a.size()));
  }
  std::vector<std::vector<double>> rows(stages);
  for (int i = 0; i < stages; ++i) {
    const std::string field = "a[" + std::to_string(i) + "]";
    const json& row = a[i];
    if (!row.is_array()) throw ParseError(field, "expected an array");
    const int len = static_cast<int>(row.size());
    if (len != i && len != stages) {
      throw ParseError(field, "expected " + std::to_string(i) + " strictly-lower entries or a full row of " +
                                  std::to_string(stages));
    }
    for (int j = 0; j < len; ++j) {
      const double v = read_number(row[j], field + "[" + std::to_string(j) + "]");
      if (j < i) {
        rows[i].push_back(v);
      } else if (v != 0.0) {
        throw ExplicitnessError("a(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                ") is on or above the diagonal; explicit methods require it to be zero");
      }
    }
  }

  const json& bj = require(doc, "b");
  if (!bj.is_array()) throw ParseError("b", "expected an array");
  if (static_cast<int>(bj.size()) != stages) {
    throw ParseError("b", "expected " + std::to_string(stages) + " weights, found " +
                              std::to_string(bj.size()));
  }
  std::vector<double> b;
  for (std::size_t i = 0; i < bj.size(); ++i) b.push_back(read_number(bj[i], "b[" + std::to_string(i) + "]"));

  return ButcherTableau(std::move(name), std::move(rows), std::move(b), order);
}

ButcherTableau load_tableau_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("document", "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_tableau(buffer.str());
}

std::string serialize_tableau(const ButcherTableau& tableau) {
  json doc;
  doc["name"] = tableau.name();
  doc["stages"] = tableau.stages();
  doc["order"] = tableau.claimed_order();
  json a = json::array();
  for (int i = 0; i < tableau.stages(); ++i) {
    json row = json::array();
    for (double v : tableau.row(i)) row.push_back(v);
    a.push_back(std::move(row));
  }
  doc["a"] = std::move(a);
  json b = json::array();
  for (double v : tableau.b()) b.push_back(v);
  doc["b"] = std::move(b);
  return doc.dump(2);
}

}  // namespace rkopt
