#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "routesim/dispatch.hpp"
#include "routesim/failover.hpp"
#include "routesim/hash.hpp"
#include "routesim/protocol.hpp"

namespace routesim {

enum class EventKind { arrival, frame_delivery, executor_done, monitor_tick, crash, heal };
const char* to_string(EventKind kind);

enum class FrameKind { job, file, status, updates };
const char* to_string(FrameKind kind);

struct ArrivalData {
    std::string job_id;
};

struct FrameData {
    FrameKind frame = FrameKind::job;
    std::string job_id;
    std::string network;
    std::string server;
    std::uint32_t attempt = 0;
    std::size_t log_index = 0;
    bool dropped = false;
    std::string bytes;  // encoded frame as it travels the wire
};

struct ExecDoneData {
    std::string job_id;
    std::string network;
    std::string server;
    std::uint32_t attempt = 0;
    std::size_t log_index = 0;
};

struct MonitorData {};

struct CrashData {
    std::string network;
    std::string server;
};

struct HealData {
    std::string network;
    std::string server;
    bool from_plan = false;
};

using EventData =
    std::variant<ArrivalData, FrameData, ExecDoneData, MonitorData, CrashData, HealData>;

struct Event {
    std::uint64_t time = 0;
    std::uint64_t seq = 0;  // assigned by schedule(); (time, seq) totally orders events
    EventKind kind = EventKind::arrival;
    EventData data;
};

struct CrashSpec {
    std::string network;
    std::string server;
    std::uint64_t time = 0;
};

struct FaultPlan {
    std::vector<CrashSpec> crashes;
    std::vector<CrashSpec> heals;
    double frame_drop_rate = 0.0;  // in [0, 1), applies to job-protocol frames
    std::uint64_t rng_seed = 0;
};

FaultPlan load_fault_plan(std::string_view json_text);
std::vector<JobRequest> load_workload(std::string_view json_text);

struct SimParams {
    std::uint64_t timeout_ticks = 1000;
    std::uint64_t monitor_interval = 250;
    std::uint64_t hop_latency = 1;
    std::uint64_t exec_ticks = 10;
    std::uint64_t heal_after = 0;  // 0 = 2 * timeout_ticks
    std::uint64_t max_ticks = 10'000'000;
    std::optional<std::uint64_t> seed_override;  // wins over FaultPlan.rng_seed
    std::filesystem::path out_dir;  // empty = no files written (trace/metrics kept in memory)
};

struct Metrics {
    std::uint64_t jobs_submitted = 0;
    std::uint64_t jobs_completed = 0;
    std::uint64_t jobs_unschedulable = 0;
    std::uint64_t jobs_incomplete = 0;  // still in flight when max_ticks cut the run
    std::uint64_t rejected_at_submission = 0;
    std::uint64_t failovers = 0;
    std::uint64_t frames_sent = 0;
    std::uint64_t frames_dropped = 0;
    std::uint64_t propagation_rounds = 0;
    std::vector<std::pair<std::string, std::uint64_t>> completions;  // (job_id, tick)
};

struct ConsistencyReport {
    bool consistent = true;
    std::string detail;  // names the first diverging server
};

// Single-threaded discrete-event loop binding the catalog, dispatcher,
// protocol and monitor. Fully deterministic: identical inputs produce a
// bit-identical trace.
class Simulation {
public:
    Simulation(NsMap map, SimParams params, std::string trace_header = {});
    ~Simulation();
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    void submit_workload(const std::vector<JobRequest>& jobs);
    void inject_faults(const FaultPlan& plan);  // throws Errc::unknown_server

    void schedule(Event ev);
    std::optional<Event> step();  // fires the minimum (time, seq) event; nullopt = quiescent
    void run();                   // to quiescence or max_ticks

    std::uint64_t clock() const { return clock_; }
    const NsMap& map() const { return map_; }
    NsMap& map_mut() { return map_; }
    const Metrics& metrics() const { return metrics_; }
    const Log& log() const { return log_; }
    const ActiveList& active() const { return active_; }
    const AccessFrequencyTable& frequency_table() const { return table_; }
    const ReplicaStore& replicas() const { return replicas_; }
    ReplicaStore& replicas_mut() { return replicas_; }

    std::uint64_t busy_servers() const;

    // Verifies every update reached exactly its related-network closure with
    // identical bytes, and that each replica's frequency counts fold from the
    // updates it holds. Call at quiescence.
    ConsistencyReport replica_consistency() const;

    std::string trace_text() const;
    std::string metrics_text() const;

private:
    struct JobState {
        JobRequest req;
        std::uint32_t attempts = 0;
        std::size_t log_index = 0;  // row of the current attempt
        bool completed = false;
        bool unschedulable = false;
    };

    struct EventOrder {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    void fire(const Event& ev, bool late);
    void on_arrival(const Event& ev, std::string& line);
    void on_frame(const Event& ev, std::string& line);
    void on_exec_done(const Event& ev, std::string& line);
    void on_monitor(const Event& ev, std::string& line);
    void on_crash(const Event& ev, std::string& line);
    void on_heal(const Event& ev, std::string& line);

    void start_attempt(JobState& job, const DispatchResult& res, std::string& line);
    void drain_update_queue(std::string& line);
    void complete_job(JobState& job);
    bool decide_drop();
    void send_frame(FrameData data);
    void schedule_monitor();
    std::set<std::string> crashed_ips() const;
    bool worth_monitoring() const;

    NsMap map_;
    SimParams params_;
    std::string trace_;
    AccessFrequencyTable table_;
    TransmissionQueue queue_;
    ReplicaStore replicas_;
    Log log_;
    ActiveList active_;
    Metrics metrics_;
    std::map<std::string, JobState> jobs_;
    std::map<std::string, JobRequest> requests_;
    std::map<std::string, ExclusionSet> exclusions_;
    std::map<std::string, ServerKey> assignment_;  // job -> serving pair
    std::set<ServerKey> crashed_;
    std::priority_queue<Event, std::vector<Event>, EventOrder> events_;
    std::uint64_t clock_ = 0;
    std::uint64_t next_seq_ = 1;
    std::uint64_t pending_real_events_ = 0;  // everything but monitor ticks
    std::optional<Rng> drop_rng_;
    double drop_rate_ = 0.0;
    bool update_burst_pending_ = false;
    bool monitor_scheduled_ = false;
    std::filesystem::path scratch_base_;
    std::vector<std::pair<std::string, UpdateMessage>> update_history_;  // (origin net, msg)
};

struct RunInputs {
    std::string topology_text;
    std::string workload_text;
    std::string plan_text;  // empty = no fault plan
};

struct RunResult {
    Metrics metrics;
    std::string trace_text;
    std::string metrics_text;
    std::string log_text;
    std::string trace_header;
};

// End-to-end scenario run. When params.out_dir is set, writes trace.txt,
// metrics.txt, log.txt and the per-IP output files under it.
RunResult run_scenario(const RunInputs& inputs, const SimParams& params);

std::string make_trace_header(const RunInputs& inputs, const SimParams& params,
                              const FaultPlan& plan);

}  // namespace routesim
