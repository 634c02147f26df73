// Copyright 2026 The gridsec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridsec/error.hpp"

namespace gridsec {

// Attribute universe W with its KDC ownership map. Ownership is a partition:
// an attribute is claimed by at most one KDC, and only owned attributes may
// appear in policies or keyrings.
class AttributeRegistry {
 public:
  AttributeRegistry() = default;

  // Six categories: energy source, consumer type, location, appliance type,
  // load class and user type. Nothing is owned yet.
  static AttributeRegistry seeded_default() {
    AttributeRegistry r;
    const std::pair<const char*, std::vector<const char*>> seed[] = {
        {"energy_source", {"fossil", "solar", "hydro", "wind"}},
        {"consumer_type", {"individual", "corporate", "phev"}},
        {"location", {"city", "region"}},
        {"appliance_type", {"essential", "low_priority"}},
        {"load_class", {"high_load", "low_load"}},
        {"user_type",
         {"electrical_engineer", "power_engineer", "environmentalist", "policy_maker", "researcher"}},
    };
    for (const auto& [category, names] : seed) {
      for (const char* n : names) r.add(n, category);
    }
    return r;
  }

  // Adds to W; re-adding an existing attribute is a no-op.
  void add(const std::string& attribute, const std::string& category = "custom") {
    if (attribute.empty()) throw InvalidArgument("empty attribute name");
    category_.emplace(attribute, category);
  }

  // Adds the attribute if needed, then records kdc as its owner.
  void claim(const std::string& attribute, const std::string& kdc) {
    add(attribute);
    auto [it, inserted] = owner_.emplace(attribute, kdc);
    if (!inserted && it->second != kdc) {
      throw InvalidArgument("attribute '" + attribute + "' already owned by KDC '" + it->second + "'");
    }
  }

  bool contains(const std::string& attribute) const { return category_.count(attribute) != 0; }

  std::optional<std::string> owner(const std::string& attribute) const {
    auto it = owner_.find(attribute);
    if (it == owner_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::string> category(const std::string& attribute) const {
    auto it = category_.find(attribute);
    if (it == category_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::string> owned_by(const std::string& kdc) const {
    std::vector<std::string> out;
    for (const auto& [a, k] : owner_) {
      if (k == kdc) out.push_back(a);
    }
    return out;
  }

  // w = |W|
  std::size_t universe_size() const { return category_.size(); }

 private:
  std::map<std::string, std::string> category_;
  std::map<std::string, std::string> owner_;
};

}  // namespace gridsec
