#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "papm/metrics.hpp"
#include "papm/pid.hpp"
#include "papm/plant.hpp"
#include "papm/policy.hpp"
#include "papm/scenario.hpp"

namespace papm {

/// Same-tick priority: completions actuate before the reference moves,
/// releases sample after both, trace samples observe the settled state.
enum class EventKind : int {
    JobCompletion = 0,
    ReferenceStep = 1,
    JobRelease = 2,
    TraceSample = 3,
};

const char* to_string(EventKind kind);

struct SimEvent {
    SimTime time = 0;
    EventKind kind = EventKind::TraceSample;
    int task = -1;
    std::uint64_t seq = 0;

    auto operator<=>(const SimEvent&) const = default;
};

/// Min-queue over the total event order.
class EventQueue {
public:
    void push(SimEvent ev);
    SimEvent pop();
    const SimEvent& top() const { return heap_.top(); }
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    std::uint64_t next_seq() { return seq_++; }

private:
    std::priority_queue<SimEvent, std::vector<SimEvent>, std::greater<>> heap_;
    std::uint64_t seq_ = 0;
};

/// One released instance of a control task.
struct Job {
    int task = 0;
    std::int64_t k = 0;
    SimTime release = 0;
    SimTime deadline = 0;
    double remaining = 0.0;  ///< nominal work left, microseconds at alpha = 1
    double output = 0.0;     ///< controller output, applied on completion
    std::size_t record = 0;  ///< index into SimResult::jobs
    bool miss_flagged = false;
    bool sampled = false;    ///< controller output already computed
    double h_s = 0.0;        ///< sampling period handed to the controller
};

/// Index of the EDF choice among `ready`: earliest deadline, then earliest
/// release, then lowest task id. Empty when nothing is ready.
std::optional<std::size_t> edf_select(std::span<const Job> ready);

/// Consumes `dt` ticks of CPU time at speed `alpha`; returns true once the
/// job's nominal work is used up.
bool advance(Job& job, SimTime dt, double alpha);

struct CpuState {
    CpuLevels levels;
    double alpha = 1.0;
    SimTime switch_overhead = 0;
    SimTime blocked_until = 0;
};

struct EventRecord {
    SimTime time = 0;
    EventKind kind = EventKind::TraceSample;
    int task = -1;
    double alpha = 0.0;
};

/// Maximal interval with a fixed CPU occupant. task = -1 is idle,
/// task = -2 a speed switch.
struct ScheduleSegment {
    SimTime start = 0;
    SimTime end = 0;
    int task = -1;
    std::int64_t k = -1;
    double alpha = 0.0;
};

struct JobRecord {
    int task = 0;
    std::int64_t k = 0;
    SimTime release = 0;
    SimTime completion = -1;
    double work = 0.0;
    SimTime deadline = 0;
    SimTime period = 0;  ///< decided effective period in ticks, before any widening
    double alpha_at_release = 0.0;
    bool missed = false;
};

struct MissRecord {
    int task = 0;
    std::int64_t k = 0;
    SimTime deadline = 0;
    SimTime detected = 0;
};

struct SimResult {
    SimTime duration = 0;
    std::vector<EventRecord> events;
    std::vector<ScheduleSegment> schedule;
    std::vector<JobRecord> jobs;
    std::vector<MissRecord> misses;
    std::vector<TraceRow> trace;
    std::vector<std::pair<SimTime, double>> utilization;  ///< after each decision
    IaeAccumulator iae;
    EnergyAccumulator energy;
};

struct SimOptions {
    /// Admit task sets with sum(c_nom / h0) > 1. Overloaded decisions run at
    /// full speed without reclaiming; misses are recorded, never fatal.
    bool allow_overload = false;
};

/// Discrete-event co-simulation of the plants, the EDF-scheduled control
/// jobs and the power manager. Single-threaded and deterministic.
class Simulator {
public:
    explicit Simulator(const Scenario& scenario, SimOptions options = {});

    SimResult run();

private:
    struct LoopRuntime {
        TaskSpec spec;
        StateSpacePlant plant;
        PidController pid;
        double c_current = 0.0;  ///< execution demand of the latest job
        double base_period = 0.0;
        SimTime window = 0;      ///< length of the live release window
        SimTime last_release = -1;
        SimTime next_release = 0;
        std::uint64_t release_seq = 0;
        std::int64_t k = 0;
    };

    void advance_world(SimTime to);
    void integrate_plants(SimTime from, SimTime to);
    void handle(const SimEvent& ev);
    void release_job(int task);
    void complete_job(std::size_t ready_index);
    void check_deadlines();
    void sample_for(Job& job);
    PolicyDecision decide(int task, double error, std::span<const double> demand,
                          std::span<const double> base) const;
    std::pair<double, SimTime> guarded_speed(int task, double work, double alpha,
                                             double period) const;
    void set_speed(double alpha);
    void schedule_release(int task, SimTime at);
    void record_trace();
    void record_segment(SimTime from, SimTime to, int task, std::int64_t k);
    std::optional<SimTime> completion_time() const;
    double pending_credit() const;

    Scenario scenario_;
    SimOptions options_;
    std::vector<TaskSpec> specs_;
    std::vector<LoopRuntime> loops_;
    ReferenceSignal reference_;
    CpuState cpu_;
    EventQueue queue_;
    std::vector<Job> ready_;
    std::mt19937_64 rng_;
    SimTime now_ = 0;
    double credit_ = 0.0;  ///< unused work of the tick in which a job completed
    SimTime credit_time_ = -1;
    SimResult result_;
};

/// Rounds a period in microseconds up to whole ticks (at least one).
SimTime period_to_ticks(double period_us);

}  // namespace papm
