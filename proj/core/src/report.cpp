#include "hlab/report.hpp"

#include <cstdio>
#include <stdexcept>

namespace hlab {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::inconclusive: return "inconclusive";
    case Status::pass_vacuous: return "pass-vacuous";
    case Status::measured: return "measured";
  }
  return "unknown";
}

DiagnosticReport& DiagnosticReport::measure(std::string name, double value) {
  measurements.push_back({std::move(name), value});
  return *this;
}

DiagnosticReport& DiagnosticReport::tolerance(std::string name, double value) {
  tolerances.push_back({std::move(name), value});
  return *this;
}

DiagnosticReport& DiagnosticReport::note(std::string text) {
  notes.push_back(std::move(text));
  return *this;
}

std::optional<double> DiagnosticReport::get(std::string_view name) const {
  for (const auto& m : measurements) {
    if (m.name == name) return m.value;
  }
  return std::nullopt;
}

double DiagnosticReport::at(std::string_view name) const {
  if (auto v = get(name)) return *v;
  throw std::out_of_range("report '" + id + "' has no measurement '" + std::string(name) + "'");
}

void ReportSet::append(const ReportSet& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

bool ReportSet::conforming() const {
  for (const auto& e : entries) {
    if (e.status == Status::fail || e.status == Status::inconclusive) return false;
  }
  return true;
}

bool ReportSet::any_failure() const {
  for (const auto& e : entries) {
    if (is_failure(e.status)) return true;
  }
  return false;
}

const DiagnosticReport* ReportSet::find(std::string_view id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

namespace {

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string to_line(const DiagnosticReport& r) {
  std::string line = r.id;
  line += ' ';
  line += to_string(r.status);
  if (r.horizon > 0) line += " horizon=" + std::to_string(r.horizon);
  for (const auto& m : r.measurements) line += " " + m.name + "=" + format_value(m.value);
  for (const auto& t : r.tolerances) line += " tol." + t.name + "=" + format_value(t.value);
  for (const auto& n : r.notes) line += " note=\"" + n + "\"";
  return line;
}

}  // namespace hlab
