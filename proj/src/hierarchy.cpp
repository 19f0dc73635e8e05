#include "finadv/hierarchy.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <functional>
#include <sstream>
#include <string>

#include "finadv/errors.hpp"

namespace finadv {

namespace {

std::vector<DependencyEdge> standard_edges() {
  return {
      {Var::LT, Var::LCT, +1},     {Var::LT, Var::DLTT, +1},
      {Var::AT, Var::ACT, +1},     {Var::AT, Var::PPENT, +1},
      {Var::ACT, Var::RECT, +1},   {Var::ACT, Var::INVT, +1},
      {Var::PPENT, Var::PPEGT, +1},
      {Var::NI, Var::REVT, +1},    {Var::REVT, Var::SALE, +1},
      {Var::REVT, Var::OPRO, +1},  {Var::NI, Var::XOPR, -1},
      {Var::XOPR, Var::COGS, +1},  {Var::XOPR, Var::XSGA, +1},
      {Var::NI, Var::PVO, -1},     {Var::NI, Var::AM, -1},
      {Var::NI, Var::DP, -1},      {Var::NI, Var::XAGT, -1},
      {Var::XAGT, Var::XEQO, +1},
  };
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

Hierarchy::Hierarchy(std::vector<DependencyEdge> edges) : edges_(std::move(edges)) {
  std::array<std::optional<DependencyEdge>, kNumNodes> parent_of;
  for (const auto& e : edges_) {
    if (e.sign != 1 && e.sign != -1) {
      throw HierarchyError("edge sign must be +1 or -1");
    }
    if (e.parent == e.child) {
      throw HierarchyError("self edge on " + std::string(code(e.child)));
    }
    if (parent_of[index(e.child)]) {
      throw HierarchyError(std::string(code(e.child)) + " has more than one parent");
    }
    parent_of[index(e.child)] = e;
    children_[index(e.parent)].push_back(e);
  }

  // Walk up from every node; a walk longer than the node count means a cycle.
  for (std::size_t i = 0; i < kNumNodes; ++i) {
    int sign = 1;
    Var cur = var_at(i);
    std::size_t steps = 0;
    while (parent_of[index(cur)]) {
      const auto& e = *parent_of[index(cur)];
      sign *= e.sign;
      ancestors_[i].push_back({e.parent, sign});
      cur = e.parent;
      if (++steps > kNumNodes) {
        throw HierarchyError("dependency cycle through " + std::string(code(var_at(i))));
      }
    }
  }

  for (std::size_t i = 0; i < kNumNodes; ++i) {
    const Var v = var_at(i);
    atom_[i] = !is_placeholder(v) && children_[i].empty();
  }

  std::vector<std::pair<std::size_t, Var>> by_height;
  std::function<std::size_t(Var)> height = [&](Var v) -> std::size_t {
    std::size_t h = 0;
    for (const auto& e : children_[index(v)]) h = std::max(h, height(e.child) + 1);
    return h;
  };
  for (std::size_t i = 0; i < kNumNodes; ++i) {
    if (!children_[i].empty()) by_height.emplace_back(height(var_at(i)), var_at(i));
  }
  std::stable_sort(by_height.begin(), by_height.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [h, v] : by_height) bottom_up_.push_back(v);
}

std::shared_ptr<const Hierarchy> Hierarchy::standard() {
  static const auto instance = std::make_shared<const Hierarchy>(standard_edges());
  return instance;
}

std::vector<Var> Hierarchy::atoms() const {
  std::vector<Var> out;
  for (std::size_t i = 0; i < kNumNodes; ++i) {
    if (atom_[i]) out.push_back(var_at(i));
  }
  return out;
}

std::vector<DependencyEdge> parse_edge_catalog(std::istream& in) {
  std::vector<DependencyEdge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string parent, child, sign;
    std::getline(ss, parent, ',');
    std::getline(ss, child, ',');
    std::getline(ss, sign, ',');
    auto p = parse_code(trim(parent));
    auto c = parse_code(trim(child));
    sign = trim(sign);
    if (!p || !c || (sign != "+1" && sign != "-1" && sign != "1" && sign != "+" && sign != "-")) {
      throw HierarchyError("malformed edge on line " + std::to_string(lineno));
    }
    edges.push_back({*p, *c, sign.front() == '-' ? -1 : 1});
  }
  return edges;
}

}  // namespace finadv
