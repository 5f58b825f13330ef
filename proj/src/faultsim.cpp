#include "sbst/faultsim.hpp"

#include <json.hpp>

#include <sstream>
#include <thread>

namespace sbst {

namespace {

struct PerFault {
    FaultStatus status = FaultStatus::UndetectedAtHalt;
    int detect_cc = 0;  // valid when status == Detected
};

// One faulty run against the golden bus-event stream. Detection cycles are
// clamped to the golden duration so every reported cc has a golden trace
// row (a faulty machine outliving the golden HALT is charged to that HALT
// cycle, whose block is never removable).
PerFault run_one_bus(Machine& m, const Fault& f, const TraceReport& golden,
                     int max_cycles) {
    const int golden_dur = golden.duration_cc();
    m.reset();
    for (int cc = 1; cc <= max_cycles; ++cc) {
        bool f_has = false;
        BusEvent f_ev;
        if (!m.halted()) {
            StepResult sr = m.step(&f);
            if (sr.bus_event) {
                f_has = true;
                f_ev = *sr.bus_event;
            }
        }
        bool g_has = false;
        const BusEvent* g_ev = nullptr;
        if (cc <= golden_dur) {
            const auto& ev = golden.records[cc - 1].bus_event;
            if (ev) {
                g_has = true;
                g_ev = &*ev;
            }
        }
        if (f_has != g_has || (f_has && !(f_ev == *g_ev)))
            return {FaultStatus::Detected, std::min(cc, golden_dur)};
        if (m.halted() && cc >= golden_dur)
            return {FaultStatus::UndetectedAtHalt, 0};
    }
    return {FaultStatus::UndetectedAtLimit, 0};
}

// Approximate mode: compare netlist outputs on every cycle that exercised
// the unit, using the golden trace's captured input patterns.
PerFault run_one_unit(Evaluator& ev, const Netlist& n, const Fault& f,
                      const TraceReport& golden) {
    std::vector<std::uint8_t> g_out;
    for (const TraceRecord& rec : golden.records) {
        if (rec.pattern.empty()) continue;
        auto g = ev.eval(n, rec.pattern, nullptr);
        g_out.assign(g.begin(), g.end());
        auto fy = ev.eval(n, rec.pattern, &f);
        for (size_t i = 0; i < g_out.size(); ++i)
            if (g_out[i] != fy[i]) return {FaultStatus::Detected, rec.cc};
    }
    return {FaultStatus::UndetectedAtHalt, 0};
}

void simulate_range(const Program& p, const Netlist& n,
                    const std::vector<Fault>& faults, size_t lo, size_t hi,
                    const SimOptions& opt, const TraceReport& golden,
                    std::vector<PerFault>& out) {
    if (opt.mode == DetectMode::Bus) {
        Machine m(p, n);
        for (size_t i = lo; i < hi; ++i)
            out[i] = run_one_bus(m, faults[i], golden, opt.max_cycles);
    } else {
        Evaluator ev;
        for (size_t i = lo; i < hi; ++i)
            out[i] = run_one_unit(ev, n, faults[i], golden);
    }
}

}  // namespace

FaultSimReport simulate_all(const Program& p, const Netlist& n,
                            const std::vector<Fault>& faults,
                            const SimOptions& opt, const TraceReport* golden,
                            int* invocation_counter) {
    if (opt.max_cycles < 1)
        throw FaultSimError("max_cycles must be positive");
    if (opt.workers < 1) throw FaultSimError("workers must be positive");

    TraceReport local;
    if (!golden) {
        local = run(p, n, nullptr, opt.max_cycles);
        golden = &local;
    }
    if (golden->terminated != Termination::Halt)
        throw FaultSimError("golden run did not halt within the cycle limit");

    std::vector<PerFault> results(faults.size());
    const size_t nf = faults.size();
    const size_t nw = std::min<size_t>(opt.workers, std::max<size_t>(nf, 1));
    if (nw <= 1) {
        simulate_range(p, n, faults, 0, nf, opt, *golden, results);
    } else {
        std::vector<std::thread> pool;
        for (size_t w = 0; w < nw; ++w) {
            size_t lo = nf * w / nw, hi = nf * (w + 1) / nw;
            pool.emplace_back([&, lo, hi] {
                simulate_range(p, n, faults, lo, hi, opt, *golden, results);
            });
        }
        for (auto& t : pool) t.join();
    }

    FaultSimReport rep;
    rep.total_faults = static_cast<int>(faults.size());
    rep.status.resize(faults.size(), FaultStatus::UndetectedAtHalt);
    for (size_t i = 0; i < faults.size(); ++i) {
        rep.status[i] = results[i].status;
        if (results[i].status == FaultStatus::Detected) {
            rep.detections[faults[i].id] = results[i].detect_cc;
            ++rep.per_cycle[results[i].detect_cc];
        }
    }
    if (invocation_counter) rep.fault_sim_invocations = ++*invocation_counter;
    return rep;
}

double fault_coverage(const FaultSimReport& r) {
    if (r.total_faults == 0)
        throw FaultSimError("fault coverage undefined for an empty universe");
    return 100.0 * static_cast<double>(r.detections.size()) /
           static_cast<double>(r.total_faults);
}

std::string fsr_to_json(const FaultSimReport& r, const Netlist& n,
                        const std::vector<Fault>& faults) {
    nlohmann::ordered_json j;
    j["total_faults"] = r.total_faults;
    auto dets = nlohmann::ordered_json::array();
    for (const Fault& f : faults) {
        auto it = r.detections.find(f.id);
        if (it == r.detections.end()) continue;
        dets.push_back({{"fault_id", f.id},
                        {"site", fault_site(n, f)},
                        {"polarity", polarity_name(f.polarity)},
                        {"cc", it->second}});
    }
    j["detections"] = std::move(dets);
    auto pc = nlohmann::ordered_json::array();
    for (const auto& [cc, count] : r.per_cycle)
        pc.push_back({{"cc", cc}, {"count", count}});
    j["per_cycle"] = std::move(pc);
    return j.dump(2) + "\n";
}

std::string fsr_to_csv(const FaultSimReport& r, const Netlist& n,
                       const std::vector<Fault>& faults) {
    std::ostringstream out;
    out << "fault_id,site,polarity,detect_cc\n";
    for (const Fault& f : faults) {
        out << f.id << ',' << fault_site(n, f) << ','
            << polarity_name(f.polarity) << ',';
        auto it = r.detections.find(f.id);
        if (it != r.detections.end()) out << it->second;
        out << '\n';
    }
    return out.str();
}

}  // namespace sbst
