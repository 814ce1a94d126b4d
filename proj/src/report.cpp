#include "cuckoowalk/report.hpp"

#include <cstddef>
#include <sstream>

#include "cuckoowalk/experiment.hpp"

namespace cuckoowalk {

namespace {

template <class Range>
std::string join(const Range& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ' ';
    out += std::to_string(v);
  }
  return out;
}

std::string_view mode_name(ScanMode mode) { return mode == ScanMode::Exhaustive ? "exhaustive" : "sampled"; }

}  // namespace

std::string to_report(const BadSetReport& report) {
  std::ostringstream out;
  out << "d=" << report.d << '\n'
      << "m=" << report.m << '\n'
      << "n=" << report.n() << '\n'
      << "c0=" << format_double(report.c0) << '\n'
      << "exponent=" << format_double(report.exponent) << '\n'
      << "alpha=" << format_double(report.alpha) << '\n'
      << "alpha_satisfied=" << (report.alpha_satisfied ? "true" : "false") << '\n'
      << "radius=" << report.radius << '\n'
      << "i_max=" << report.i_max << '\n'
      << "g_size=" << report.g_size() << '\n';
  for (std::size_t i = 1; i <= report.i_max && i < report.in_g.size(); ++i) {
    std::size_t size = 0;
    for (const char in : report.in_g[i]) size += in;
    out << "g." << i << ".size=" << size << '\n';
    out << "g." << i << ".threshold=" << format_double(report.g_threshold(i)) << '\n';
  }
  for (std::size_t i = 0; i < report.b_sizes.size(); ++i) out << "b." << i << ".size=" << report.b_sizes[i] << '\n';
  return out.str();
}

std::string to_report(const ExpansionCertificate& certificate) {
  std::ostringstream out;
  out << "d=" << certificate.d << '\n'
      << "n=" << certificate.n << '\n'
      << "mode=" << mode_name(certificate.mode) << '\n'
      << "variant=" << (certificate.variant == PsVariant::SmallSetCutoff ? "small-set" : "log-log") << '\n'
      << "a_d=" << format_double(certificate.a_d) << '\n'
      << "cutoff=" << format_double(certificate.cutoff) << '\n'
      << "size_limit=" << certificate.size_limit << '\n'
      << "sets_examined=" << certificate.sets_examined << '\n'
      << "is_proof=" << (certificate.is_proof ? "true" : "false") << '\n'
      << "violations=" << certificate.violations.size() << '\n';
  for (std::size_t k = 0; k < certificate.violations.size(); ++k) {
    const auto& v = certificate.violations[k];
    out << "violation." << k << ".set=" << join(v.set) << '\n'
        << "violation." << k << ".neighbors=" << v.neighbor_count << '\n'
        << "violation." << k << ".bound=" << format_double(v.bound) << '\n';
  }
  return out.str();
}

std::string to_report(const CycleCount& cycles) {
  std::ostringstream out;
  out << "total=" << cycles.total << '\n';
  for (const auto& [len, count] : cycles.by_length) out << "length." << len << '=' << count << '\n';
  out << "left_on_cycles=" << cycles.left_on_cycles.size() << '\n' << "expansions=" << cycles.expansions << '\n';
  return out.str();
}

std::string to_report(const FailingSetScan& scan) {
  std::ostringstream out;
  out << "mode=" << mode_name(scan.mode) << '\n'
      << "failing=" << scan.failing_sets.size() << '\n'
      << "minimal=" << scan.minimal_sets.size() << '\n';
  for (const auto& [size, counts] : scan.per_size) {
    out << "size." << size << ".examined=" << counts.examined << '\n'
        << "size." << size << ".failing=" << counts.failing << '\n'
        << "size." << size << ".minimal=" << counts.minimal << '\n'
        << "size." << size << ".minimality_unknown=" << counts.minimality_unknown << '\n';
  }
  return out.str();
}

}  // namespace cuckoowalk
