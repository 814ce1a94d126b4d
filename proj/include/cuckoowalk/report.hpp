#pragma once

#include <string>

#include "cuckoowalk/analysis.hpp"
#include "cuckoowalk/graph.hpp"

namespace cuckoowalk {

// Plain-text reports: one key=value per line, keys always in the same order.

std::string to_report(const BadSetReport& report);
std::string to_report(const ExpansionCertificate& certificate);
std::string to_report(const CycleCount& cycles);
std::string to_report(const FailingSetScan& scan);

}  // namespace cuckoowalk
