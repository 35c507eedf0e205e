#pragma once

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ghzforge/trainer.hpp"

namespace ghzforge {

inline constexpr int kRecordSchemaVersion = 1;

// On-disk representation of a trained (or shipped) unitary. test_results keeps
// insertion order so files serialize stably.
struct RecordFile {
  int schema_version = kRecordSchemaVersion;
  int mode_k = 1;
  std::uint64_t seed = 0;
  std::string ansatz_convention_tag = kAnsatzConventionTag;
  ParamVector theta{};
  std::vector<FidelitySample> fidelity_history;
  std::vector<std::pair<std::string, double>> test_results;
};

inline bool operator==(const RecordFile& a, const RecordFile& b) {
  if (a.schema_version != b.schema_version || a.mode_k != b.mode_k || a.seed != b.seed ||
      a.ansatz_convention_tag != b.ansatz_convention_tag)
    return false;
  for (int i = 0; i < 16; ++i)
    if (a.theta.theta[i] != b.theta.theta[i]) return false;
  if (a.fidelity_history.size() != b.fidelity_history.size()) return false;
  for (std::size_t i = 0; i < a.fidelity_history.size(); ++i) {
    const auto& x = a.fidelity_history[i];
    const auto& y = b.fidelity_history[i];
    if (x.cycle != y.cycle || x.lambda != y.lambda || x.cost != y.cost) return false;
  }
  return a.test_results == b.test_results;
}

namespace detail {

// 17 significant digits round-trip any double exactly through parse.
inline std::string json_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

}  // namespace detail

// Key order is fixed and doubles are emitted at full precision, so
// save(load(save(r))) reproduces save(r) byte for byte.
inline std::string serialize_record(const RecordFile& record) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"schema_version\": " << record.schema_version << ",\n";
  out << "  \"mode_k\": " << record.mode_k << ",\n";
  out << "  \"seed\": " << record.seed << ",\n";
  out << "  \"ansatz_convention_tag\": " << detail::json_string(record.ansatz_convention_tag)
      << ",\n";
  out << "  \"theta\": [";
  for (int i = 0; i < 16; ++i) {
    if (i) out << ", ";
    out << detail::json_double(record.theta.theta[i]);
  }
  out << "],\n";
  out << "  \"fidelity_history\": [";
  for (std::size_t i = 0; i < record.fidelity_history.size(); ++i) {
    const auto& s = record.fidelity_history[i];
    out << (i ? ",\n    " : "\n    ");
    out << "{\"cycle\": " << s.cycle << ", \"lambda\": " << detail::json_double(s.lambda)
        << ", \"cost\": " << detail::json_double(s.cost) << "}";
  }
  if (!record.fidelity_history.empty()) out << "\n  ";
  out << "]";
  if (!record.test_results.empty()) {
    out << ",\n  \"test_results\": {";
    for (std::size_t i = 0; i < record.test_results.size(); ++i) {
      out << (i ? ",\n    " : "\n    ");
      out << detail::json_string(record.test_results[i].first) << ": "
          << detail::json_double(record.test_results[i].second);
    }
    out << "\n  }";
  }
  out << "\n}\n";
  return out.str();
}

inline void save_record(const RecordFile& record, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << serialize_record(record);
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline RecordFile parse_record(const std::string& text, const std::string& origin) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("malformed record file " + origin + ": " + e.what());
  }
  try {
    if (!j.contains("schema_version"))
      throw std::runtime_error("missing key \"schema_version\"");
    const int version = j.at("schema_version").get<int>();
    if (version != kRecordSchemaVersion)
      throw std::runtime_error("schema version mismatch: expected " +
                               std::to_string(kRecordSchemaVersion) + ", found " +
                               std::to_string(version));
    RecordFile record;
    record.schema_version = version;
    record.mode_k = j.at("mode_k").get<int>();
    record.seed = j.at("seed").get<std::uint64_t>();
    record.ansatz_convention_tag = j.at("ansatz_convention_tag").get<std::string>();
    const auto& theta = j.at("theta");
    if (!theta.is_array() || theta.size() != 16)
      throw std::runtime_error("\"theta\" must hold exactly 16 numbers");
    for (int i = 0; i < 16; ++i) record.theta.theta[i] = theta.at(i).get<double>();
    if (!record.theta.all_finite()) throw std::runtime_error("non-finite angle in \"theta\"");
    for (const auto& row : j.at("fidelity_history")) {
      record.fidelity_history.push_back({row.at("cycle").get<int>(),
                                         row.at("lambda").get<double>(),
                                         row.at("cost").get<double>()});
    }
    if (j.contains("test_results")) {
      for (const auto& [key, value] : j.at("test_results").items())
        record.test_results.emplace_back(key, value.get<double>());
    }
    return record;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed record file " + origin + ": " + e.what());
  }
}

inline RecordFile load_record(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open record file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_record(buffer.str(), path);
}

// Bundled pre-trained records. The tag marks that these angle sets were
// published without an authoritative gate layout, so their evaluation under
// this ansatz wiring is diagnostic only.
inline const std::vector<std::string>& list_fixtures() {
  static const std::vector<std::string> names = {"U1s", "U2s", "U3s", "U1d", "U2d", "U3d"};
  return names;
}

inline RecordFile fixture_record(const std::string& name) {
  struct Entry {
    const char* name;
    int mode_k;
    std::array<double, 16> theta;
  };
  static const std::vector<Entry> entries = {
      {"U1s", 1, {1.59, 0.29, 2.69, 2.77, 0.05, 2.63, 2.72, 0.11,
                  1.65, 0.54, 1.25, 1.24, 3.14, 3.03, 1.87, 3.14}},
      {"U2s", 1, {0.07, 1.46, 0.58, 1.27, 0.88, 1.90, 0.56, 0.19,
                  0.09, 3.03, 2.81, 0.64, 2.25, 2.40, 0.41, 2.95}},
      {"U3s", 1, {2.97, 1.92, 3.03, 1.50, 3.13, 1.28, 1.60, 2.26,
                  0.16, 1.04, 0.11, 0.02, 0.00, 2.95, 1.61, 3.02}},
      {"U1d", 2, {3.10, 1.83, 0.00, 1.13, 0.56, 1.67, 3.05, 1.56,
                  3.14, 2.37, 3.04, 2.49, 1.81, 2.90, 0.20, 3.11}},
      {"U2d", 2, {3.05, 1.87, 3.10, 1.84, 2.53, 0.93, 3.10, 1.95,
                  0.03, 3.03, 1.54, 1.55, 1.25, 0.61, 1.60, 3.09}},
      {"U3d", 2, {1.49, 0.87, 3.07, 1.21, 1.56, 1.56, 2.28, 1.50,
                  3.14, 0.77, 2.37, 1.63, 2.08, 1.51, 2.46, 2.97}},
      // Convenience fixture: all angles zero makes the ansatz a SWAP, which
      // turns the protocol into the identity map on its input.
      {"swap", 1, {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}},
  };
  for (const Entry& e : entries) {
    if (name == e.name) {
      RecordFile record;
      record.mode_k = e.mode_k;
      record.ansatz_convention_tag =
          name == "swap" ? kAnsatzConventionTag : "paper-tables-unverified-layout";
      record.theta.theta = e.theta;
      return record;
    }
  }
  throw std::invalid_argument("unknown fixture: " + name);
}

// CLI-facing resolver: fixture names take precedence, anything else is a path.
inline RecordFile resolve_record(const std::string& name_or_path) {
  for (const std::string& name : list_fixtures())
    if (name_or_path == name) return fixture_record(name_or_path);
  if (name_or_path == "swap") return fixture_record("swap");
  return load_record(name_or_path);
}

}  // namespace ghzforge
