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

#include "rotor/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rotor {

JsonValue::JsonValue(double d) : value_(d) {
  if (!std::isfinite(d)) {
    throw std::invalid_argument("JsonValue: non-finite number");
  }
}

JsonValue& JsonValue::push_back(JsonValue v) {
  std::get<Array>(value_).push_back(std::move(v));
  return *this;
}

JsonValue& JsonValue::set(const std::string& key, JsonValue v) {
  std::get<Object>(value_).emplace_back(key, std::move(v));
  return *this;
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

void dump_string(std::ostream& out, const std::string& s) {
  out << '"';
  for (char c : s) {
    switch (c) {
      case '"':
        out << "\\\"";
        break;
      case '\\':
        out << "\\\\";
        break;
      case '\n':
        out << "\\n";
        break;
      case '\t':
        out << "\\t";
        break;
      default:
        out << c;
    }
  }
  out << '"';
}

}  // namespace

void JsonValue::dump(std::ostream& out, int indent) const {
  const std::string pad(indent, ' ');
  const std::string pad_in(indent + 2, ' ');
  if (std::holds_alternative<std::nullptr_t>(value_)) {
    out << "null";
  } else if (std::holds_alternative<bool>(value_)) {
    out << (std::get<bool>(value_) ? "true" : "false");
  } else if (std::holds_alternative<long long>(value_)) {
    out << std::get<long long>(value_);
  } else if (std::holds_alternative<double>(value_)) {
    out << format_double(std::get<double>(value_));
  } else if (std::holds_alternative<std::string>(value_)) {
    dump_string(out, std::get<std::string>(value_));
  } else if (std::holds_alternative<Array>(value_)) {
    const Array& arr = std::get<Array>(value_);
    if (arr.empty()) {
      out << "[]";
      return;
    }
    out << "[";
    for (size_t i = 0; i < arr.size(); ++i) {
      out << (i ? "," : "") << "\n" << pad_in;
      arr[i].dump(out, indent + 2);
    }
    out << "\n" << pad << "]";
  } else {
    const Object& obj = std::get<Object>(value_);
    if (obj.empty()) {
      out << "{}";
      return;
    }
    out << "{";
    for (size_t i = 0; i < obj.size(); ++i) {
      out << (i ? "," : "") << "\n" << pad_in;
      dump_string(out, obj[i].first);
      out << ": ";
      obj[i].second.dump(out, indent + 2);
    }
    out << "\n" << pad << "}";
  }
}

std::string JsonValue::dump() const {
  std::ostringstream out;
  dump(out, 0);
  out << "\n";
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << content;
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

namespace {

JsonValue triplets(const Matrix& m) {
  JsonValue rows = JsonValue::array();
  for (int j = 0; j < m.rows(); ++j) {
    for (int k = 0; k < m.cols(); ++k) {
      const Complex value = m(j, k);
      if (value == Complex(0.0, 0.0)) continue;
      JsonValue entry = JsonValue::array();
      entry.push_back(j + 1);
      entry.push_back(k + 1);
      entry.push_back(value.real());
      entry.push_back(value.imag());
      rows.push_back(std::move(entry));
    }
  }
  return rows;
}

JsonValue complex_pair(Complex z) {
  JsonValue pair = JsonValue::array();
  pair.push_back(z.real());
  pair.push_back(z.imag());
  return pair;
}

}  // namespace

JsonValue operator_set_to_json(const OperatorSet& ops) {
  JsonValue root = JsonValue::object();
  root.set("ell_max", ops.ell_max());
  root.set("dim", ops.dim());
  JsonValue lambda = JsonValue::array();
  for (int k = 0; k < ops.dim(); ++k) lambda.push_back(ops.lambda[k]);
  root.set("lambda", std::move(lambda));
  root.set("B1", triplets(ops.b1));
  root.set("B2", triplets(ops.b2));
  root.set("B3", triplets(ops.b3));
  return root;
}

JsonValue schedule_to_json(const PiecewiseControl& ctrl) {
  JsonValue root = JsonValue::object();
  root.set("bound", ctrl.bound);
  JsonValue pieces = JsonValue::array();
  for (const ControlPiece& piece : ctrl.pieces) {
    JsonValue row = JsonValue::array();
    row.push_back(piece.duration);
    row.push_back(piece.u[0]);
    row.push_back(piece.u[1]);
    row.push_back(piece.u[2]);
    pieces.push_back(std::move(row));
  }
  root.set("pieces", std::move(pieces));
  return root;
}

PiecewiseControl schedule_from_json(const std::string& text) {
  const nlohmann::json parsed = nlohmann::json::parse(text);
  PiecewiseControl ctrl;
  ctrl.bound = parsed.at("bound").get<double>();
  for (const auto& row : parsed.at("pieces")) {
    if (!row.is_array() || row.size() != 4) {
      throw std::runtime_error("schedule: each piece must be [dt,u1,u2,u3]");
    }
    ControlPiece piece;
    piece.duration = row[0].get<double>();
    piece.u = {row[1].get<double>(), row[2].get<double>(),
               row[3].get<double>()};
    ctrl.pieces.push_back(piece);
  }
  ctrl.validate();
  return ctrl;
}

JsonValue state_to_json(const Amplitudes& amplitudes) {
  JsonValue root = JsonValue::object();
  root.set("dim", static_cast<int>(amplitudes.size()));
  JsonValue amps = JsonValue::array();
  for (int k = 0; k < amplitudes.size(); ++k) {
    amps.push_back(complex_pair(amplitudes[k]));
  }
  root.set("amplitudes", std::move(amps));
  return root;
}

namespace {

Amplitudes amplitudes_from(const nlohmann::json& node) {
  Amplitudes out(node.size());
  for (size_t k = 0; k < node.size(); ++k) {
    const auto& entry = node[k];
    if (!entry.is_array() || entry.size() != 2) {
      throw std::runtime_error("state: amplitudes must be [re,im] pairs");
    }
    out[static_cast<int>(k)] =
        Complex(entry[0].get<double>(), entry[1].get<double>());
  }
  return out;
}

}  // namespace

Amplitudes state_from_json(const std::string& text) {
  const nlohmann::json parsed = nlohmann::json::parse(text);
  return amplitudes_from(parsed.at("amplitudes"));
}

std::pair<Amplitudes, Amplitudes> steer_states_from_json(
    const std::string& text) {
  const nlohmann::json parsed = nlohmann::json::parse(text);
  return {amplitudes_from(parsed.at("psi0")),
          amplitudes_from(parsed.at("psi1"))};
}

JsonValue closure_report_to_json(
    const ClosureReport& report,
    const std::map<std::string, double>& membership_residuals) {
  JsonValue root = JsonValue::object();
  root.set("dim", report.dim);
  root.set("dimension_found", report.dimension_found);
  root.set("dimension_full", report.dimension_full);
  root.set("is_full_rank", report.is_full_rank);
  root.set("depth", report.depth);
  JsonValue residuals = JsonValue::object();
  for (const auto& [label, value] : membership_residuals) {
    residuals.set(label, value);
  }
  root.set("membership_residuals", std::move(residuals));
  return root;
}

JsonValue gap_set_to_json(const SpectralGapSet& gaps) {
  JsonValue root = JsonValue::object();
  root.set("N", gaps.truncation);
  JsonValue list = JsonValue::array();
  for (size_t g = 0; g < gaps.gaps.size(); ++g) {
    JsonValue entry = JsonValue::object();
    entry.set("sigma", gaps.gaps[g]);
    JsonValue pairs = JsonValue::array();
    for (const auto& [j, k] : gaps.pairs[g]) {
      JsonValue pair = JsonValue::array();
      pair.push_back(j + 1);
      pair.push_back(k + 1);
      pairs.push_back(std::move(pair));
    }
    entry.set("pairs", std::move(pairs));
    list.push_back(std::move(entry));
  }
  root.set("gaps", std::move(list));
  return root;
}

JsonValue plan_to_json(const ControlPlan& plan) {
  JsonValue root = JsonValue::object();
  root.set("n", plan.n);
  JsonValue target = JsonValue::array();
  for (int j = 0; j < plan.target.rows(); ++j) {
    for (int k = 0; k < plan.target.cols(); ++k) {
      target.push_back(complex_pair(plan.target(j, k)));
    }
  }
  root.set("target", std::move(target));
  JsonValue segments = JsonValue::array();
  for (const PlanSegment& seg : plan.segments) {
    JsonValue entry = JsonValue::object();
    entry.set("kind",
              seg.kind == SegmentKind::Drift ? "drift" : "gap");
    entry.set("sigma", seg.sigma);
    JsonValue v = JsonValue::array();
    v.push_back(seg.v[0]);
    v.push_back(seg.v[1]);
    v.push_back(seg.v[2]);
    entry.set("v", std::move(v));
    entry.set("angle", seg.angle);
    entry.set("xi", complex_pair(seg.xi));
    entry.set("duration", seg.duration);
    segments.push_back(std::move(entry));
  }
  root.set("segments", std::move(segments));
  root.set("residual", plan.predicted_error);
  return root;
}

void write_trajectory_header(std::ostream& out, int dim) {
  out << "t";
  for (int k = 1; k <= dim; ++k) {
    out << ",re_c" << k << ",im_c" << k;
  }
  out << ",norm,orientation\n";
}

void write_trajectory_row(std::ostream& out, double t,
                          const Amplitudes& amplitudes, double orientation) {
  out << format_double(t);
  for (int k = 0; k < amplitudes.size(); ++k) {
    out << "," << format_double(amplitudes[k].real()) << ","
        << format_double(amplitudes[k].imag());
  }
  out << "," << format_double(amplitudes.norm()) << ","
      << format_double(orientation) << "\n";
}

}  // namespace rotor
