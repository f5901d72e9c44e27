// Copyright 2026 The rotorctl Authors
//
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

#pragma once

#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rotor/basis.hpp"
#include "rotor/lie.hpp"
#include "rotor/propagate.hpp"
#include "rotor/synthesis.hpp"

namespace rotor {

/// Order-preserving JSON tree with fixed floating-point formatting
/// (17 significant digits), so identical inputs dump byte-identically.
class JsonValue {
 public:
  using Array = std::vector<JsonValue>;
  using Object = std::vector<std::pair<std::string, JsonValue>>;

  JsonValue() : value_(nullptr) {}
  JsonValue(bool b) : value_(b) {}
  JsonValue(long long i) : value_(i) {}
  JsonValue(int i) : value_(static_cast<long long>(i)) {}
  JsonValue(double d);
  JsonValue(const char* s) : value_(std::string(s)) {}
  JsonValue(std::string s) : value_(std::move(s)) {}

  static JsonValue array() { return JsonValue(Array{}); }
  static JsonValue object() { return JsonValue(Object{}); }

  JsonValue& push_back(JsonValue v);
  JsonValue& set(const std::string& key, JsonValue v);

  void dump(std::ostream& out, int indent = 0) const;
  std::string dump() const;

 private:
  explicit JsonValue(Array a) : value_(std::move(a)) {}
  explicit JsonValue(Object o) : value_(std::move(o)) {}
  std::variant<std::nullptr_t, bool, long long, double, std::string, Array,
               Object>
      value_;
};

/// Fixed 17-significant-digit representation used everywhere.
std::string format_double(double value);

// --- file helpers (throw std::runtime_error with the path on failure) ---
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// --- operator sets ---
/// Sparse triplet export, 1-based indices, entries sorted row-major.
JsonValue operator_set_to_json(const OperatorSet& ops);

// --- control schedules ---
JsonValue schedule_to_json(const PiecewiseControl& ctrl);
PiecewiseControl schedule_from_json(const std::string& text);

// --- states ---
JsonValue state_to_json(const Amplitudes& amplitudes);
Amplitudes state_from_json(const std::string& text);
/// Steering input file: { "psi0": [[re,im],...], "psi1": [[re,im],...] }.
std::pair<Amplitudes, Amplitudes> steer_states_from_json(
    const std::string& text);

// --- reports ---
JsonValue closure_report_to_json(
    const ClosureReport& report,
    const std::map<std::string, double>& membership_residuals = {});
JsonValue gap_set_to_json(const SpectralGapSet& gaps);
JsonValue plan_to_json(const ControlPlan& plan);

// --- trajectory CSV ---
void write_trajectory_header(std::ostream& out, int dim);
void write_trajectory_row(std::ostream& out, double t,
                          const Amplitudes& amplitudes, double orientation);

}  // namespace rotor
