#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hermit/datagen.hpp"

namespace hermit {

// Seeded replication harness for the synthetic benchmark suites.  Metrics are
// keyed "<method>.<name>"; each method group carrying a "<method>.valid_ll"
// entry is ranked by it when the best-fraction aggregate is taken.
struct ProtocolOptions {
  int replications = 20;
  double keep_fraction = 0.2;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::vector<double> lambda_grid;   // empty: protocol default
  std::vector<double> lambda2_grid;  // empty: protocol default
};

struct ProtocolRun {
  std::map<std::string, double> metrics;
};

struct ProtocolResult {
  std::string name;
  std::vector<ProtocolRun> runs;
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
  int count = 0;
};

// Mean and standard deviation per metric over the kept runs of its method
// group.  ceil-free keep count: max(1, floor(keep_fraction * R)).
std::map<std::string, Aggregate> aggregate_best(const ProtocolResult& result,
                                                double keep_fraction);

// Known protocols: table1, fig1, table4, table2-scores, table3-clusters,
// table5-moe, scaling.
ProtocolResult run_protocol(const std::string& name, const ProtocolOptions& options);

std::vector<std::string> protocol_names();

// Shared experiment recipes (paper-configuration generators).
SynthSpec spec_low_dim(double missing_rate, std::uint64_t seed);   // n=100, d=15
SynthSpec spec_mid_dim(int k_true, bool with_poisson, std::uint64_t seed);  // n=1000, d=32
std::vector<SynthSpec> specs_anomaly_tasks(std::uint64_t seed);    // m=30, 6 groups
std::vector<SynthSpec> specs_task_groups(std::uint64_t seed);      // m=60, 4 groups

}  // namespace hermit
