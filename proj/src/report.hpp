#pragma once

#include <string>
#include <variant>
#include <vector>

#include "cisim/feasibility.hpp"
#include "cisim/interferometry.hpp"
#include "cisim/protocol.hpp"

namespace cisim {

/// 17 significant digits, scientific notation; round-trips exactly.
std::string format_double(double v);

struct Field {
  std::string key;
  std::variant<double, bool, std::string> value;
};

/// Ordered flat record rendered as JSON, key=value text or a CSV row.
using Record = std::vector<Field>;

std::string to_json(const Record& r);
std::string to_key_value_text(const Record& r);
std::string csv_header(const Record& r);
std::string csv_row(const Record& r);

std::string pattern_csv(const FringePattern& p);
Record pattern_meta(const FringePattern& p);

Record budget_record(const Budget& b);
Record falsification_record(const FalsificationWindow& w);
Record protocol_summary(const ProtocolTrace& t);
std::string trace_csv(const ProtocolTrace& t);

}  // namespace cisim
