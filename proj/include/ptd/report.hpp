#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "ptd/comparators.hpp"
#include "ptd/deviation.hpp"
#include "ptd/design.hpp"
#include "ptd/simulator.hpp"
#include "ptd/size_analytics.hpp"

namespace ptd {

using Json = nlohmann::ordered_json;

/// x rounded to 6 significant digits, as text.
std::string fmt6(double x);
/// C99 hex-float text of x ("%a"); exact round trip.
std::string hexfloat(double x);
double parse_hexfloat(const std::string& s);

/// {"value": 6 significant digits, "hex": exact}.
Json num(double x);
Json nums(const std::vector<double>& xs);
/// Reads the exact value back from num() output.
double num_value(const Json& j);

/// Columns padded to their widest cell; numbers right-aligned.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header);
  void add(std::vector<std::string> row);
  std::string str() const;

 private:
  std::vector<std::vector<std::string>> rows_;
};

Json spec_json(const DesignSpec& spec);
Json design_json(const CalibratedDesign& design);
/// Inverse of design_json; throws ConfigError.
CalibratedDesign design_from_json(const Json& j);
std::string design_table(const CalibratedDesign& design);

struct PwerCheck {
  std::vector<double> markov;
  std::vector<double> mvn;
};

Json operating_json(const OperatingChars& oc, const PwerCheck& check);
std::string operating_table(const CalibratedDesign& design, const OperatingChars& oc);
/// Tidy PMF/CDF series: scenario, series (total, arm_k, control), n, prob, cdf.
std::string pmf_csv(const OperatingChars& oc);

Json sim_json(const SimReport& r, const std::string& label);
std::string sim_table(const std::vector<std::pair<std::string, SimReport>>& reports);
/// scenario, metric, estimate, se, replicates, seed, estimate_hex, se_hex.
std::string sim_csv(const std::vector<std::pair<std::string, SimReport>>& reports);

/// add_point, approach, theta_label, metric, estimate, se, replicates, seed,
/// then estimate_hex, se_hex, error.
std::string deviation_csv(const std::vector<DeviationRow>& rows);

Json comparator_json(const ComparatorResult& r);
std::string comparator_table(const std::vector<ComparatorResult>& rows);
std::string comparator_csv(const std::vector<ComparatorResult>& rows);

}  // namespace ptd
