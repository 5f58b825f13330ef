#pragma once

#include <map>
#include <string>
#include <vector>

#include "sbst/iss.hpp"

namespace sbst {

enum class FaultStatus { Detected, UndetectedAtHalt, UndetectedAtLimit };

// Bus mode is the real observation point (memory-bus divergence).
// UnitOutput is an approximate fast mode that detects at the netlist
// outputs without requiring propagation to a store.
enum class DetectMode { Bus, UnitOutput };

struct SimOptions {
    int max_cycles = kDefaultMaxCycles;
    DetectMode mode = DetectMode::Bus;
    int workers = 1;
};

struct FaultSimReport {
    int total_faults = 0;
    // fault id -> first detection cc; absent means undetected.
    std::map<int, int> detections;
    // cc -> number of faults first detected at that cycle.
    std::map<int, int> per_cycle;
    // Parallel to the fault sequence passed to simulate_all.
    std::vector<FaultStatus> status;
    // Full-program fault simulations performed by the enclosing workflow;
    // simulate_all itself reports 1 (or mirrors the caller's counter).
    int fault_sim_invocations = 1;
};

struct FaultSimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dual-run serial fault simulation with early exit at the first bus
// divergence (address, data, write flag, or event presence). Faults are
// dropped at first detection. `golden` may be supplied to reuse an
// existing trace; it must come from run(p, n) with the same max_cycles
// horizon. `invocation_counter`, when given, is incremented once.
FaultSimReport simulate_all(const Program& p, const Netlist& n,
                            const std::vector<Fault>& faults,
                            const SimOptions& opt = {},
                            const TraceReport* golden = nullptr,
                            int* invocation_counter = nullptr);

// detected / total x 100. Throws FaultSimError when total_faults == 0.
double fault_coverage(const FaultSimReport& r);

std::string fsr_to_json(const FaultSimReport& r, const Netlist& n,
                        const std::vector<Fault>& faults);
std::string fsr_to_csv(const FaultSimReport& r, const Netlist& n,
                       const std::vector<Fault>& faults);

}  // namespace sbst
