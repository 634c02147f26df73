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
#include <mutex>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "gridsec/abe.hpp"
#include "gridsec/error.hpp"

namespace gridsec {

// Honest-but-curious record store. It holds ciphertexts and relays
// revocation updates; no operation takes key material. Writes append a new
// version and never overwrite; reads may run concurrently.
class Repository {
 public:
  void store(const std::string& record_id, AbeCiphertext ct) {
    std::unique_lock lock(mu_);
    if (records_.count(record_id) != 0) throw InvalidArgument("record '" + record_id + "' already stored");
    records_[record_id].push_back(std::move(ct));
  }

  // Appends the post-revocation version of an existing record.
  void store_revision(const std::string& record_id, AbeCiphertext ct) {
    std::unique_lock lock(mu_);
    auto it = records_.find(record_id);
    if (it == records_.end()) throw InvalidArgument("unknown record '" + record_id + "'");
    it->second.push_back(std::move(ct));
  }

  AbeCiphertext fetch(const std::string& record_id) const {
    std::shared_lock lock(mu_);
    auto it = records_.find(record_id);
    if (it == records_.end()) throw InvalidArgument("unknown record '" + record_id + "'");
    return it->second.back();
  }

  bool contains(const std::string& record_id) const {
    std::shared_lock lock(mu_);
    return records_.count(record_id) != 0;
  }

  std::size_t versions(const std::string& record_id) const {
    std::shared_lock lock(mu_);
    auto it = records_.find(record_id);
    return it == records_.end() ? 0 : it->second.size();
  }

  std::vector<std::string> record_ids() const {
    std::shared_lock lock(mu_);
    std::vector<std::string> out;
    for (const auto& [id, v] : records_) out.push_back(id);
    return out;
  }

  // Out-of-band channel: newer row values replace older ones per row.
  void deliver(const std::string& record_id, const std::string& user_id, const RowUpdates& updates) {
    std::unique_lock lock(mu_);
    auto& slot = deliveries_[{record_id, user_id}];
    for (const auto& [row, c1] : updates) slot.insert_or_assign(row, c1);
  }

  RowUpdates updates_for(const std::string& record_id, const std::string& user_id) const {
    std::shared_lock lock(mu_);
    auto it = deliveries_.find({record_id, user_id});
    return it == deliveries_.end() ? RowUpdates{} : it->second;
  }

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, std::vector<AbeCiphertext>> records_;
  std::map<std::pair<std::string, std::string>, RowUpdates> deliveries_;
};

}  // namespace gridsec
