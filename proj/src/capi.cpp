#include "routesim.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "routesim/catalog.hpp"
#include "routesim/error.hpp"
#include "routesim/failover.hpp"
#include "routesim/sim.hpp"

using namespace routesim;

struct rs_topology {
    NsMap map;
};

namespace {

thread_local std::string g_last_error;

rs_status status_of(Errc code) {
    switch (code) {
        case Errc::parse_error:
        case Errc::frame_error:
        case Errc::truncated_frame:
        case Errc::length_mismatch:
            return RS_ERR_PARSE;
        case Errc::validation_error:
        case Errc::empty_table:
        case Errc::malformed_ip:
            return RS_ERR_VALIDATION;
        case Errc::unknown_network:
        case Errc::unknown_server:
            return RS_ERR_UNKNOWN_ID;
        case Errc::io_error:
            return RS_ERR_IO;
        case Errc::config_error:
            return RS_ERR_CONFIG;
        case Errc::not_busy:
        case Errc::executor_failure:
            return RS_ERR_INTERNAL;
    }
    return RS_ERR_INTERNAL;
}

rs_status fail(rs_status status, const std::string& msg) {
    g_last_error = msg;
    return status;
}

template <typename Fn>
rs_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const Error& e) {
        return fail(status_of(e.code()), e.what());
    } catch (const std::exception& e) {
        return fail(RS_ERR_INTERNAL, e.what());
    }
}

std::string read_file(const char* path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::config_error, std::string("cannot read ") + (path ? path : "(null)"));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

SimParams params_from(const rs_run_params* params) {
    SimParams out;
    if (!params) return out;
    if (params->timeout_ticks) out.timeout_ticks = params->timeout_ticks;
    if (params->monitor_interval) out.monitor_interval = params->monitor_interval;
    if (params->max_ticks) out.max_ticks = params->max_ticks;
    if (params->seed_set) out.seed_override = params->seed;
    return out;
}

std::optional<std::string> header_value(const std::string& header, const std::string& key) {
    const std::string needle = " " + key + "=";
    const std::size_t pos = header.find(needle);
    if (pos == std::string::npos) return std::nullopt;
    const std::size_t start = pos + needle.size();
    std::size_t end = header.find_first_of(" \n", start);
    if (end == std::string::npos) end = header.size();
    return header.substr(start, end - start);
}

std::uint64_t header_u64(const std::string& header, const std::string& key) {
    auto value = header_value(header, key);
    if (!value) throw Error(Errc::parse_error, "trace header misses '" + key + "'");
    return std::strtoull(value->c_str(), nullptr, 10);
}

}  // namespace

extern "C" {

const char* rs_status_name(rs_status status) {
    switch (status) {
        case RS_OK: return "ok";
        case RS_ERR_PARSE: return "parse error";
        case RS_ERR_VALIDATION: return "validation error";
        case RS_ERR_UNKNOWN_ID: return "unknown id";
        case RS_ERR_IO: return "io error";
        case RS_ERR_CONFIG: return "config error";
        case RS_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* rs_last_error(void) { return g_last_error.c_str(); }

rs_status rs_topology_load_text(const char* text, size_t len, rs_topology** out) {
    return guarded([&]() -> rs_status {
        if (!text || !out) return fail(RS_ERR_CONFIG, "null argument");
        auto handle = new rs_topology{load_topology(std::string_view(text, len))};
        *out = handle;
        return RS_OK;
    });
}

rs_status rs_topology_load_file(const char* path, rs_topology** out) {
    return guarded([&]() -> rs_status {
        if (!path || !out) return fail(RS_ERR_CONFIG, "null argument");
        const std::string text = read_file(path);
        *out = new rs_topology{load_topology(text)};
        return RS_OK;
    });
}

void rs_topology_free(rs_topology* topology) { delete topology; }

rs_status rs_similarity_networks(const rs_topology* topology, const char* net_a,
                                 const char* net_b, rs_ratio* out) {
    return guarded([&]() -> rs_status {
        if (!topology || !net_a || !net_b || !out) return fail(RS_ERR_CONFIG, "null argument");
        const Ratio r = similarity_networks(network_app_set(topology->map, net_a),
                                            network_app_set(topology->map, net_b));
        *out = rs_ratio{r.num, r.den};
        return RS_OK;
    });
}

rs_status rs_similarity_servers(const rs_topology* topology, const char* net_a, const char* srv_a,
                                const char* net_b, const char* srv_b, rs_ratio* out) {
    return guarded([&]() -> rs_status {
        if (!topology || !net_a || !srv_a || !net_b || !srv_b || !out)
            return fail(RS_ERR_CONFIG, "null argument");
        const Ratio r = similarity_servers(server_app_set(topology->map, net_a, srv_a),
                                           server_app_set(topology->map, net_b, srv_b));
        *out = rs_ratio{r.num, r.den};
        return RS_OK;
    });
}

rs_status rs_run_scenario(const char* topology_path, const char* workload_path,
                          const char* fault_plan_path, const rs_run_params* params,
                          const char* out_dir, rs_run_report* report) {
    return guarded([&]() -> rs_status {
        if (!topology_path || !workload_path || !out_dir)
            return fail(RS_ERR_CONFIG, "null argument");
        RunInputs inputs;
        inputs.topology_text = read_file(topology_path);
        inputs.workload_text = read_file(workload_path);
        if (fault_plan_path) inputs.plan_text = read_file(fault_plan_path);
        SimParams sim_params = params_from(params);
        sim_params.out_dir = out_dir;
        const RunResult result = run_scenario(inputs, sim_params);
        if (report) {
            *report = rs_run_report{result.metrics.jobs_submitted,
                                    result.metrics.jobs_completed,
                                    result.metrics.jobs_unschedulable,
                                    result.metrics.jobs_incomplete,
                                    result.metrics.rejected_at_submission,
                                    result.metrics.failovers,
                                    result.metrics.frames_sent,
                                    result.metrics.frames_dropped,
                                    result.metrics.propagation_rounds};
        }
        return RS_OK;
    });
}

rs_status rs_log_scan_file(const char* log_path, uint64_t now, uint64_t timeout_ticks,
                           char** out_lines, uint64_t* out_missing_count) {
    return guarded([&]() -> rs_status {
        if (!log_path || !out_lines || !out_missing_count)
            return fail(RS_ERR_CONFIG, "null argument");
        if (timeout_ticks == 0) return fail(RS_ERR_CONFIG, "timeout must be positive");
        const Log log = parse_log(read_file(log_path));
        std::string lines;
        uint64_t missing = 0;
        for (const auto& rec : log) {
            if (rec.n_files_received == rec.n_files_expected) continue;
            const uint64_t elapsed = now > rec.dispatched_at ? now - rec.dispatched_at : 0;
            if (elapsed < timeout_ticks) continue;
            lines += "MISSING " + rec.external_ip + " " + rec.app + " " + rec.internal_ip + " " +
                     std::to_string(rec.n_files_received) + "/" +
                     std::to_string(rec.n_files_expected) + "\n";
            ++missing;
        }
        char* buffer = static_cast<char*>(std::malloc(lines.size() + 1));
        if (!buffer) return fail(RS_ERR_INTERNAL, "out of memory");
        std::memcpy(buffer, lines.c_str(), lines.size() + 1);
        *out_lines = buffer;
        *out_missing_count = missing;
        return RS_OK;
    });
}

void rs_string_free(char* text) { std::free(text); }

rs_status rs_replay_verify(const char* topology_path, const char* workload_path,
                           const char* fault_plan_path, const char* trace_path,
                           int* out_identical) {
    return guarded([&]() -> rs_status {
        if (!topology_path || !workload_path || !trace_path || !out_identical)
            return fail(RS_ERR_CONFIG, "null argument");
        const std::string recorded = read_file(trace_path);
        const std::size_t nl = recorded.find('\n');
        if (nl == std::string::npos || recorded.rfind("# routesim trace v1 ", 0) != 0)
            return fail(RS_ERR_PARSE, "not a routesim trace file");
        const std::string header = recorded.substr(0, nl);

        RunInputs inputs;
        inputs.topology_text = read_file(topology_path);
        inputs.workload_text = read_file(workload_path);
        if (fault_plan_path) inputs.plan_text = read_file(fault_plan_path);

        auto check_digest = [&](const char* key, const std::string& text, bool present) {
            auto want = header_value(header, key);
            if (!want) throw Error(Errc::parse_error, std::string("trace header misses '") + key + "'");
            char buf[17];
            std::snprintf(buf, sizeof buf, "%016llx",
                          static_cast<unsigned long long>(fnv1a64(text)));
            const std::string got = present ? std::string(buf) : std::string("-");
            if (*want != got)
                throw Error(Errc::config_error,
                            std::string(key) + " does not match the trace header");
        };
        check_digest("topology", inputs.topology_text, true);
        check_digest("workload", inputs.workload_text, true);
        check_digest("plan", inputs.plan_text, !inputs.plan_text.empty());

        SimParams params;
        params.timeout_ticks = header_u64(header, "timeout_t");
        params.monitor_interval = header_u64(header, "interval2");
        params.hop_latency = header_u64(header, "hop");
        params.exec_ticks = header_u64(header, "exec");
        params.heal_after = header_u64(header, "heal");
        params.max_ticks = header_u64(header, "max_ticks");
        params.seed_override = header_u64(header, "seed");

        const RunResult result = run_scenario(inputs, params);
        *out_identical = result.trace_text == recorded ? 1 : 0;
        return RS_OK;
    });
}

}  // extern "C"
