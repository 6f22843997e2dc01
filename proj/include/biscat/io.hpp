#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "biscat/appendix.hpp"
#include "biscat/kernel_l.hpp"
#include "biscat/lp_scan.hpp"
#include "biscat/operators.hpp"
#include "biscat/threshold.hpp"
#include "biscat/waveop.hpp"

namespace biscat {

using Json = nlohmann::ordered_json;

// Field file: "BSF1", uint32 N, float64 R, uint64 N*N, then N*N complex64
// pairs (float32 re, im), all little-endian, row-major in (i1, i2).
void write_field(const std::string& path, const Field& u);
Field read_field(const std::string& path);
// x1,x2,re,im
void write_field_csv(const std::string& path, const Field& u);

// Operator dump: "BSO1", uint32 n, float64 lambda (NaN if none), uint32 label
// length, label bytes, then n*n complex128 pairs row-major.
void write_operator(const std::string& path, const DiscreteOperator& op);
DiscreteOperator read_operator(const std::string& path);

// Rows "z,r,re,im".
struct KernelSample {
  cplx z;
  double r = 0.0;
  cplx value;
};
std::string kernel_csv(const std::vector<KernelSample>& rows);

// Non-finite numbers are written as null.
Json number(double v);
Json complex_json(cplx v);

Json to_json(const LpScanReport& r);
Json to_json(const LBoundReport& r, bool with_samples = false);
Json to_json(const HomogeneousBoundReport& r);
Json to_json(const FourierDecayReport& r);
Json to_json(const WaveMetrics& m);
Json to_json(const ClassificationReport& r);

// Table rendering for --csv: header row, then one row per entry.
std::string lp_scan_csv(const LpScanReport& r);
std::string l_bound_csv(const LBoundReport& r);

}  // namespace biscat
