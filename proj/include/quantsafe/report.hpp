#pragma once

#include <string>

#include <json.hpp>

#include "quantsafe/automaton.hpp"
#include "quantsafe/decide.hpp"

namespace quantsafe {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "quantsafe-report/1";

// FNV-1a over the raw input bytes; hex string.
inline std::string input_digest(const std::string& bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

inline nlohmann::json lasso_json(const LassoWord& w, const std::vector<std::string>& alphabet) {
  nlohmann::json j;
  j["prefix"] = nlohmann::json::array();
  for (int s : w.prefix) j["prefix"].push_back(alphabet[s]);
  j["loop"] = nlohmann::json::array();
  for (int s : w.loop) j["loop"].push_back(alphabet[s]);
  return j;
}

inline nlohmann::json verdict_json(const Verdict& v, const std::vector<std::string>& alphabet) {
  nlohmann::json j;
  j["question"] = question_name(v.question);
  j["answer"] = v.answer;
  if (v.value) j["value"] = v.value->str();
  if (v.lasso_witness) {
    j["witness"] = lasso_json(*v.lasso_witness, alphabet);
  } else if (v.prefix_witness) {
    nlohmann::json w = nlohmann::json::array();
    for (int s : *v.prefix_witness) w.push_back(alphabet[s]);
    j["witness"] = {{"prefix", std::move(w)}};
  }
  j["method"] = v.method;
  return j;
}

inline nlohmann::json make_report(const std::string& question, const std::string& input_bytes,
                                  nlohmann::json body, double elapsed_ms) {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["tool_version"] = kToolVersion;
  j["question"] = question;
  j["input_digest"] = input_digest(input_bytes);
  j["result"] = std::move(body);
  j["timing_ms"] = elapsed_ms;
  return j;
}

}  // namespace quantsafe
