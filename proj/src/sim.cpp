#include "routesim/sim.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "routesim/error.hpp"
#include "routesim/hash.hpp"

namespace fs = std::filesystem;

namespace routesim {

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::arrival: return "arrival";
        case EventKind::frame_delivery: return "frame_delivery";
        case EventKind::executor_done: return "executor_done";
        case EventKind::monitor_tick: return "monitor_tick";
        case EventKind::crash: return "crash";
        case EventKind::heal: return "heal";
    }
    return "?";
}

const char* to_string(FrameKind kind) {
    switch (kind) {
        case FrameKind::job: return "job";
        case FrameKind::file: return "file";
        case FrameKind::status: return "status";
        case FrameKind::updates: return "updates";
    }
    return "?";
}

namespace {

using nlohmann::json;

[[noreturn]] void doc_fail(const std::string& msg) { throw Error(Errc::parse_error, msg); }

json parse_doc(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        doc_fail(std::string("invalid ") + what + " JSON: " + e.what());
    }
}

void check_fields(const json& obj, const std::set<std::string>& allowed, const char* where) {
    if (!obj.is_object()) doc_fail(std::string(where) + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.contains(key)) doc_fail("unknown field '" + key + "' in " + where);
    }
}

std::string doc_string(const json& obj, const char* key, const char* where) {
    if (!obj.contains(key) || !obj[key].is_string())
        doc_fail(std::string(where) + " needs string field '" + key + "'");
    return obj[key].get<std::string>();
}

std::uint64_t doc_uint(const json& obj, const char* key, const char* where) {
    if (!obj.contains(key) || !obj[key].is_number_unsigned())
        doc_fail(std::string(where) + " needs non-negative integer field '" + key + "'");
    return obj[key].get<std::uint64_t>();
}

std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

}  // namespace

std::vector<JobRequest> load_workload(std::string_view json_text) {
    const json doc = parse_doc(json_text, "workload");
    check_fields(doc, {"jobs"}, "workload document");
    if (!doc.contains("jobs") || !doc["jobs"].is_array())
        doc_fail("workload document needs a 'jobs' array");
    std::vector<JobRequest> jobs;
    std::set<std::string> seen;
    for (const json& jj : doc["jobs"]) {
        check_fields(jj, {"job_id", "user_id", "external_ip", "app", "n_files", "arrival_time", "payload"},
                     "job");
        JobRequest req;
        req.job_id = doc_string(jj, "job_id", "job");
        req.user_id = doc_string(jj, "user_id", "job");
        req.external_ip = doc_string(jj, "external_ip", "job");
        req.app = doc_string(jj, "app", "job");
        req.n_files = doc_uint(jj, "n_files", "job");
        req.arrival_time = doc_uint(jj, "arrival_time", "job");
        req.payload = doc_string(jj, "payload", "job");
        if (!is_valid_token(req.job_id))
            throw Error(Errc::validation_error, "job_id '" + req.job_id + "' is not a token");
        if (!seen.insert(req.job_id).second)
            throw Error(Errc::validation_error, "duplicate job_id '" + req.job_id + "'");
        if (!is_valid_token(req.user_id))
            throw Error(Errc::validation_error, "user_id '" + req.user_id + "' is not a token");
        if (!is_valid_token(req.app))
            throw Error(Errc::validation_error, "app '" + req.app + "' is not a token");
        if (!is_valid_ipv4(req.external_ip))
            throw Error(Errc::validation_error, "external_ip '" + req.external_ip + "' is malformed");
        if (req.n_files == 0) throw Error(Errc::validation_error, "n_files must be positive");
        jobs.push_back(std::move(req));
    }
    return jobs;
}

FaultPlan load_fault_plan(std::string_view json_text) {
    const json doc = parse_doc(json_text, "fault plan");
    check_fields(doc, {"crashes", "heals", "frame_drop_rate", "rng_seed"}, "fault plan");
    FaultPlan plan;
    auto read_specs = [&](const char* key, std::vector<CrashSpec>& out) {
        if (!doc.contains(key)) return;
        if (!doc[key].is_array()) doc_fail(std::string("'") + key + "' must be an array");
        for (const json& jc : doc[key]) {
            check_fields(jc, {"network", "server", "time"}, key);
            CrashSpec spec;
            spec.network = doc_string(jc, "network", key);
            spec.server = doc_string(jc, "server", key);
            spec.time = doc_uint(jc, "time", key);
            out.push_back(std::move(spec));
        }
    };
    read_specs("crashes", plan.crashes);
    read_specs("heals", plan.heals);
    if (doc.contains("frame_drop_rate")) {
        if (!doc["frame_drop_rate"].is_number()) doc_fail("'frame_drop_rate' must be a number");
        plan.frame_drop_rate = doc["frame_drop_rate"].get<double>();
        if (!(plan.frame_drop_rate >= 0.0 && plan.frame_drop_rate < 1.0))
            throw Error(Errc::validation_error, "frame_drop_rate must be in [0,1)");
    }
    if (doc.contains("rng_seed")) plan.rng_seed = doc_uint(doc, "rng_seed", "fault plan");
    return plan;
}

std::string make_trace_header(const RunInputs& inputs, const SimParams& params,
                              const FaultPlan& plan) {
    const std::uint64_t seed = params.seed_override.value_or(plan.rng_seed);
    const std::uint64_t heal =
        params.heal_after ? params.heal_after : 2 * params.timeout_ticks;
    char drop[64];
    std::snprintf(drop, sizeof drop, "%.17g", plan.frame_drop_rate);
    std::string header = "# routesim trace v1 rng=xorshift64s";
    header += " topology=" + hex16(fnv1a64(inputs.topology_text));
    header += " workload=" + hex16(fnv1a64(inputs.workload_text));
    header += inputs.plan_text.empty() ? std::string(" plan=-")
                                       : " plan=" + hex16(fnv1a64(inputs.plan_text));
    header += " seed=" + std::to_string(seed);
    header += " timeout_t=" + std::to_string(params.timeout_ticks);
    header += " interval2=" + std::to_string(params.monitor_interval);
    header += " hop=" + std::to_string(params.hop_latency);
    header += " exec=" + std::to_string(params.exec_ticks);
    header += " heal=" + std::to_string(heal);
    header += " max_ticks=" + std::to_string(params.max_ticks);
    header += std::string(" drop=") + drop;
    header += "\n";
    return header;
}

Simulation::Simulation(NsMap map, SimParams params, std::string trace_header)
    : map_(std::move(map)), params_(std::move(params)), trace_(std::move(trace_header)) {
    if (params_.timeout_ticks == 0) throw Error(Errc::config_error, "timeout_t must be positive");
    if (params_.monitor_interval == 0) throw Error(Errc::config_error, "interval2 must be positive");
    if (params_.heal_after == 0) params_.heal_after = 2 * params_.timeout_ticks;
    scratch_base_ = params_.out_dir.empty()
                        ? fs::temp_directory_path() /
                              ("routesim-scratch-" + hex16(reinterpret_cast<std::uintptr_t>(this)))
                        : params_.out_dir / "scratch";
}

Simulation::~Simulation() {
    std::error_code ec;
    fs::remove_all(scratch_base_, ec);
}

void Simulation::submit_workload(const std::vector<JobRequest>& jobs) {
    for (const auto& req : jobs) {
        if (jobs_.contains(req.job_id))
            throw Error(Errc::config_error, "duplicate job_id '" + req.job_id + "'");
        JobState state;
        state.req = req;
        jobs_.emplace(req.job_id, std::move(state));
        requests_.emplace(req.job_id, req);
        ++metrics_.jobs_submitted;
        Event ev;
        ev.time = req.arrival_time;
        ev.kind = EventKind::arrival;
        ev.data = ArrivalData{req.job_id};
        schedule(std::move(ev));
    }
}

void Simulation::inject_faults(const FaultPlan& plan) {
    for (const auto& spec : plan.crashes)
        if (!map_.find_server(spec.network, spec.server))
            throw Error(Errc::unknown_server,
                        "fault plan names unknown server " + spec.network + "/" + spec.server);
    for (const auto& spec : plan.heals)
        if (!map_.find_server(spec.network, spec.server))
            throw Error(Errc::unknown_server,
                        "fault plan names unknown server " + spec.network + "/" + spec.server);
    for (const auto& spec : plan.crashes) {
        Event ev;
        ev.time = spec.time;
        ev.kind = EventKind::crash;
        ev.data = CrashData{spec.network, spec.server};
        schedule(std::move(ev));
    }
    for (const auto& spec : plan.heals) {
        Event ev;
        ev.time = spec.time;
        ev.kind = EventKind::heal;
        ev.data = HealData{spec.network, spec.server, true};
        schedule(std::move(ev));
    }
    drop_rate_ = plan.frame_drop_rate;
    drop_rng_.emplace(params_.seed_override.value_or(plan.rng_seed));
}

void Simulation::schedule(Event ev) {
    ev.seq = next_seq_++;
    if (ev.kind != EventKind::monitor_tick) ++pending_real_events_;
    events_.push(std::move(ev));
}

std::optional<Event> Simulation::step() {
    if (events_.empty()) return std::nullopt;
    Event ev = events_.top();
    events_.pop();
    if (ev.kind != EventKind::monitor_tick) --pending_real_events_;
    const bool late = ev.time < clock_;
    clock_ = std::max(clock_, ev.time);
    fire(ev, late);
    return ev;
}

void Simulation::run() {
    while (!events_.empty()) {
        if (events_.top().time > params_.max_ticks) break;
        step();
    }
    for (auto& [id, job] : jobs_)
        if (!job.completed && !job.unschedulable) ++metrics_.jobs_incomplete;
}

void Simulation::fire(const Event& ev, bool late) {
    std::string line = "t=" + std::to_string(clock_) + " seq=" + std::to_string(ev.seq) +
                       " kind=" + to_string(ev.kind);
    switch (ev.kind) {
        case EventKind::arrival: on_arrival(ev, line); break;
        case EventKind::frame_delivery: on_frame(ev, line); break;
        case EventKind::executor_done: on_exec_done(ev, line); break;
        case EventKind::monitor_tick: on_monitor(ev, line); break;
        case EventKind::crash: on_crash(ev, line); break;
        case EventKind::heal: on_heal(ev, line); break;
    }
    if (late) line += " late=1";
    trace_ += line;
    trace_ += '\n';
}

void Simulation::on_arrival(const Event& ev, std::string& line) {
    const auto& data = std::get<ArrivalData>(ev.data);
    JobState& job = jobs_.at(data.job_id);
    line += " job=" + data.job_id + " app=" + job.req.app;
    auto res = dispatch(map_, job.req, table_, clock_, exclusions_[data.job_id]);
    if (!res) {
        job.unschedulable = true;
        ++metrics_.jobs_unschedulable;
        ++metrics_.rejected_at_submission;
        line += " outcome=no_capacity";
        return;
    }
    line += " outcome=dispatched";
    start_attempt(job, *res, line);
}

void Simulation::start_attempt(JobState& job, const DispatchResult& res, std::string& line) {
    const std::string& net = res.decision.network;
    const std::string& srv = res.decision.server;
    ++job.attempts;
    assignment_[job.req.job_id] = {net, srv};

    LogRecord rec;
    rec.external_ip = job.req.external_ip;
    rec.app = job.req.app;
    rec.internal_ip = map_.find_server(net, srv)->internal_ip;
    rec.n_files_expected = job.req.n_files;
    rec.n_files_received = 0;
    rec.dispatched_at = clock_;
    append_log(log_, rec);
    job.log_index = log_.size() - 1;
    active_.entries.push_back({job.req.job_id, job.log_index});

    queue_.enqueue(res.update);
    if (!update_burst_pending_) {
        update_burst_pending_ = true;
        Event burst;
        burst.time = clock_ + params_.hop_latency;
        burst.kind = EventKind::frame_delivery;
        FrameData fd;
        fd.frame = FrameKind::updates;
        burst.data = std::move(fd);
        schedule(std::move(burst));
    }

    JobEnvelope env{job.req.job_id, job.req.external_ip, job.req.app,
                    net,            srv,                 job.req.n_files,
                    job.req.payload};
    FrameData fd;
    fd.frame = FrameKind::job;
    fd.job_id = job.req.job_id;
    fd.network = net;
    fd.server = srv;
    fd.attempt = job.attempts;
    fd.log_index = job.log_index;
    fd.bytes = encode_job(env);
    send_frame(std::move(fd));

    line += " net=" + net + " srv=" + srv + " score=" + res.decision.score.str() +
            " tie=" + (res.decision.tie_broken ? "1" : "0") +
            " freq=" + res.update.frequency_at_send.str() +
            " attempt=" + std::to_string(job.attempts);
    schedule_monitor();
}

bool Simulation::decide_drop() {
    if (!drop_rng_ || drop_rate_ <= 0.0) return false;
    return drop_rng_->next_unit() < drop_rate_;
}

void Simulation::send_frame(FrameData data) {
    data.dropped = decide_drop();
    ++metrics_.frames_sent;
    Event ev;
    ev.time = clock_ + params_.hop_latency;
    ev.kind = EventKind::frame_delivery;
    ev.data = std::move(data);
    schedule(std::move(ev));
}

void Simulation::on_frame(const Event& ev, std::string& line) {
    const auto& data = std::get<FrameData>(ev.data);
    line += std::string(" frame=") + to_string(data.frame);
    if (data.frame == FrameKind::updates) {
        drain_update_queue(line);
        return;
    }
    line += " job=" + data.job_id;
    if (data.dropped) {
        ++metrics_.frames_dropped;
        line += " dropped=1";
        return;
    }
    switch (data.frame) {
        case FrameKind::job: {
            const JobEnvelope env = decode_job(data.bytes);
            line += " net=" + env.network + " srv=" + env.server +
                    " bytes=" + std::to_string(data.bytes.size());
            if (crashed_.contains({env.network, env.server})) {
                line += " dead=1";  // delivered to a crashed host, job will time out
                return;
            }
            Event done;
            done.time = clock_ + params_.exec_ticks;
            done.kind = EventKind::executor_done;
            done.data = ExecDoneData{env.job_id, env.network, env.server, data.attempt,
                                     data.log_index};
            schedule(std::move(done));
            break;
        }
        case FrameKind::file: {
            const FileTransfer f = decode_file_frame(data.bytes);
            line += " name=" + f.name + " bytes=" + std::to_string(data.bytes.size());
            if (!params_.out_dir.empty())
                store_outputs(params_.out_dir, jobs_.at(data.job_id).req.external_ip, {f});
            LogRecord& rec = log_.at(data.log_index);
            if (rec.n_files_received < rec.n_files_expected) ++rec.n_files_received;
            break;
        }
        case FrameKind::status: {
            const StatusLine status = decode_end_frame(data.bytes);
            line += " net=" + status.network + " srv=" + status.server +
                    " bytes=" + std::to_string(data.bytes.size());
            auto it = assignment_.find(data.job_id);
            const ServerKey key{status.network, status.server};
            if (it != assignment_.end() && it->second == key) {
                release_server(map_, status);
                assignment_.erase(it);
                line += " released=1";
            } else {
                line += " released=0";
            }
            JobState& job = jobs_.at(data.job_id);
            const LogRecord& rec = log_.at(data.log_index);
            if (!job.completed && data.log_index == job.log_index &&
                rec.n_files_received == rec.n_files_expected) {
                complete_job(job);
                line += " completed=1";
            }
            break;
        }
        case FrameKind::updates: break;
    }
}

void Simulation::on_exec_done(const Event& ev, std::string& line) {
    const auto& data = std::get<ExecDoneData>(ev.data);
    line += " job=" + data.job_id + " net=" + data.network + " srv=" + data.server;
    if (crashed_.contains({data.network, data.server})) {
        line += " skipped=1";  // host died before results went out
        return;
    }
    const JobState& job = jobs_.at(data.job_id);
    auto it = assignment_.find(data.job_id);
    if (it == assignment_.end() || it->second != ServerKey{data.network, data.server} ||
        data.attempt != job.attempts) {
        line += " stale=1";
        return;
    }

    JobEnvelope env{job.req.job_id, job.req.external_ip, job.req.app,
                    data.network,   data.server,          job.req.n_files,
                    job.req.payload};
    const fs::path scratch =
        scratch_base_ / (data.job_id + "_" + std::to_string(data.attempt));
    const auto files = run_job(
        env, [&](const JobEnvelope& e) { return stub_execute(e.job_id, e.app, e.payload, e.n_files); },
        scratch);
    for (const auto& f : files) {
        FrameData fd;
        fd.frame = FrameKind::file;
        fd.job_id = data.job_id;
        fd.network = data.network;
        fd.server = data.server;
        fd.attempt = data.attempt;
        fd.log_index = data.log_index;
        fd.bytes = encode_file_frame(f);
        send_frame(std::move(fd));
    }
    FrameData fd;
    fd.frame = FrameKind::status;
    fd.job_id = data.job_id;
    fd.network = data.network;
    fd.server = data.server;
    fd.attempt = data.attempt;
    fd.log_index = data.log_index;
    fd.bytes = encode_end_frame(StatusLine{job.req.app, data.network, data.server});
    send_frame(std::move(fd));
    std::error_code ec;
    fs::remove_all(scratch, ec);  // staging area emptied once results are on the wire
    line += " files=" + std::to_string(files.size());
}

void Simulation::drain_update_queue(std::string& line) {
    update_burst_pending_ = false;
    ++metrics_.propagation_rounds;
    line += " count=" + std::to_string(queue_.size());
    std::string pops;
    while (auto u = queue_.pop()) {
        if (!pops.empty()) pops += ",";
        pops += u->job_id + "@" + u->frequency_at_send.str() + "@" + std::to_string(u->created_at);
        propagate_intra(map_, u->serving_network, *u, replicas_);
        propagate_inter(map_, u->serving_network, *u, replicas_);
        update_history_.emplace_back(u->serving_network, *u);
    }
    line += " pops=" + pops;
}

void Simulation::schedule_monitor() {
    if (monitor_scheduled_) return;
    monitor_scheduled_ = true;
    Event ev;
    ev.time = (clock_ / params_.monitor_interval + 1) * params_.monitor_interval;
    ev.kind = EventKind::monitor_tick;
    ev.data = MonitorData{};
    schedule(std::move(ev));
}

void Simulation::on_monitor(const Event&, std::string& line) {
    monitor_scheduled_ = false;
    auto scan = find_missing_links(active_, log_, clock_, params_.timeout_ticks, crashed_ips());
    line += " active=" + std::to_string(active_.entries.size()) +
            " completed=" + std::to_string(scan.completed.size()) +
            " missing=" + std::to_string(scan.missing.size());

    for (const auto& job_id : scan.completed) {
        JobState& job = jobs_.at(job_id);
        if (job.completed) continue;
        // release signal lost in flight: reclaim the slot here
        auto it = assignment_.find(job_id);
        if (it != assignment_.end()) {
            try_release_server(map_, it->second.first, it->second.second);
            assignment_.erase(it);
            line += " reclaimed=" + job_id;
        }
        job.completed = true;
        ++metrics_.jobs_completed;
        metrics_.completions.emplace_back(job_id, clock_);
    }

    if (!scan.missing.empty()) {
        ShiftContext ctx{requests_, exclusions_, assignment_, clock_};
        auto outcomes = emergency_load_shift(map_, scan.missing, table_, ctx);
        for (const auto& out : outcomes) {
            JobState& job = jobs_.at(out.job_id);
            line += " shift=" + out.job_id + ":" + out.failed.first + "/" + out.failed.second + "->";
            Event heal;
            heal.time = clock_ + params_.heal_after;
            heal.kind = EventKind::heal;
            heal.data = HealData{out.failed.first, out.failed.second, false};
            schedule(std::move(heal));
            if (out.redispatch) {
                ++metrics_.failovers;
                line += out.redispatch->decision.network + "/" + out.redispatch->decision.server;
                start_attempt(job, *out.redispatch, line);
            } else {
                job.unschedulable = true;
                ++metrics_.jobs_unschedulable;
                line += "none";
            }
        }
    }
    if (worth_monitoring()) schedule_monitor();
}

void Simulation::on_crash(const Event& ev, std::string& line) {
    const auto& data = std::get<CrashData>(ev.data);
    crashed_.insert({data.network, data.server});
    if (ServerRecord* srv = map_.find_server(data.network, data.server)) srv->active = false;
    line += " net=" + data.network + " srv=" + data.server;
}

void Simulation::on_heal(const Event& ev, std::string& line) {
    const auto& data = std::get<HealData>(ev.data);
    line += " net=" + data.network + " srv=" + data.server +
            " plan=" + (data.from_plan ? "1" : "0");
    ServerRecord* srv = map_.find_server(data.network, data.server);
    const ServerKey key{data.network, data.server};
    if (data.from_plan) {
        crashed_.erase(key);
        if (srv) srv->active = true;
        line += " applied=1";
    } else if (!crashed_.contains(key)) {
        if (srv) srv->active = true;
        line += " applied=1";
    } else {
        line += " applied=0";  // still crashed, only a plan heal revives it
    }
}

void Simulation::complete_job(JobState& job) {
    job.completed = true;
    ++metrics_.jobs_completed;
    metrics_.completions.emplace_back(job.req.job_id, clock_);
    active_.remove(job.req.job_id);
}

std::set<std::string> Simulation::crashed_ips() const {
    std::set<std::string> out;
    for (const auto& key : crashed_)
        if (const ServerRecord* srv = map_.find_server(key.first, key.second))
            out.insert(srv->internal_ip);
    return out;
}

bool Simulation::worth_monitoring() const {
    return !active_.entries.empty() || pending_real_events_ > 0;
}

std::uint64_t Simulation::busy_servers() const {
    std::uint64_t n = 0;
    for (const auto& net : map_.networks)
        for (const auto& srv : net.servers)
            if (srv.busy) ++n;
    return n;
}

ConsistencyReport Simulation::replica_consistency() const {
    ReplicaStore expected;
    for (const auto& [origin, update] : update_history_) {
        propagate_intra(map_, origin, update, expected);
        propagate_inter(map_, origin, update, expected);
    }
    static const ReplicaState kEmpty{};
    for (const auto& net : map_.networks) {
        for (const auto& srv : net.servers) {
            const ServerKey key{net.id, srv.id};
            auto want_it = expected.find(key);
            auto have_it = replicas_.find(key);
            const ReplicaState& want = want_it == expected.end() ? kEmpty : want_it->second;
            const ReplicaState& have = have_it == replicas_.end() ? kEmpty : have_it->second;
            if (!(want == have))
                return {false, "replica divergence at " + net.id + "/" + srv.id};
        }
    }
    return {true, ""};
}

std::string Simulation::trace_text() const { return trace_; }

std::string Simulation::metrics_text() const {
    std::string out;
    out += "jobs_submitted=" + std::to_string(metrics_.jobs_submitted) + "\n";
    out += "jobs_completed=" + std::to_string(metrics_.jobs_completed) + "\n";
    out += "jobs_unschedulable=" + std::to_string(metrics_.jobs_unschedulable) + "\n";
    out += "jobs_incomplete=" + std::to_string(metrics_.jobs_incomplete) + "\n";
    out += "rejected_at_submission=" + std::to_string(metrics_.rejected_at_submission) + "\n";
    out += "failovers=" + std::to_string(metrics_.failovers) + "\n";
    out += "frames_sent=" + std::to_string(metrics_.frames_sent) + "\n";
    out += "frames_dropped=" + std::to_string(metrics_.frames_dropped) + "\n";
    out += "propagation_rounds=" + std::to_string(metrics_.propagation_rounds) + "\n";
    out += "job_id,completion_time\n";
    for (const auto& [job_id, tick] : metrics_.completions)
        out += job_id + "," + std::to_string(tick) + "\n";
    return out;
}

namespace {

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
}

}  // namespace

RunResult run_scenario(const RunInputs& inputs, const SimParams& params) {
    NsMap map = load_topology(inputs.topology_text);
    const auto jobs = load_workload(inputs.workload_text);
    const FaultPlan plan =
        inputs.plan_text.empty() ? FaultPlan{} : load_fault_plan(inputs.plan_text);

    if (!params.out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(params.out_dir, ec);
        if (ec)
            throw Error(Errc::io_error, "cannot create " + params.out_dir.string() + ": " + ec.message());
    }

    RunResult result;
    result.trace_header = make_trace_header(inputs, params, plan);
    Simulation sim(std::move(map), params, result.trace_header);
    sim.inject_faults(plan);
    sim.submit_workload(jobs);
    sim.run();

    result.metrics = sim.metrics();
    result.trace_text = sim.trace_text();
    result.metrics_text = sim.metrics_text();
    result.log_text = serialize_log(sim.log());

    if (!params.out_dir.empty()) {
        write_file(params.out_dir / "trace.txt", result.trace_text);
        write_file(params.out_dir / "metrics.txt", result.metrics_text);
        write_file(params.out_dir / "log.txt", result.log_text);
        std::error_code ec;
        fs::remove_all(params.out_dir / "scratch", ec);
    }
    return result;
}

}  // namespace routesim
