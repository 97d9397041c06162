#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hlab {

enum class Status {
  pass,
  fail,
  inconclusive,   // a hypothesis of the checked claim was not met by the input
  pass_vacuous,   // the claim holds trivially on this input
  measured,       // measurement only, no pass/fail semantics
};

std::string_view to_string(Status s);

/// True for the statuses a batch run should treat as a failure.
inline bool is_failure(Status s) { return s == Status::fail; }

struct Measurement {
  std::string name;
  double value;
};

/// One record per check: id, verdict, named measurements and the tolerances it
/// was judged against. Finite-horizon evidence only.
struct DiagnosticReport {
  std::string id;
  Status status = Status::inconclusive;
  std::vector<Measurement> measurements;
  std::vector<Measurement> tolerances;
  std::vector<std::string> notes;
  std::size_t horizon = 0;

  DiagnosticReport() = default;
  explicit DiagnosticReport(std::string check_id) : id(std::move(check_id)) {}

  DiagnosticReport& measure(std::string name, double value);
  DiagnosticReport& tolerance(std::string name, double value);
  DiagnosticReport& note(std::string text);

  std::optional<double> get(std::string_view name) const;
  /// Like get(), but throws std::out_of_range for a missing measurement.
  double at(std::string_view name) const;
};

/// A batch of reports, e.g. one per validated assumption.
struct ReportSet {
  std::vector<DiagnosticReport> entries;

  void add(DiagnosticReport r) { entries.push_back(std::move(r)); }
  void append(const ReportSet& other);

  /// Every entry passed (or passed vacuously, or is a pure measurement).
  bool conforming() const;
  bool any_failure() const;
  const DiagnosticReport* find(std::string_view id) const;
};

/// Line-oriented form: `check_id status key=value ...`.
std::string to_line(const DiagnosticReport& r);

}  // namespace hlab
