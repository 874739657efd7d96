// Command-line front end over the routesim shared library. Everything goes
// through the C API in routesim.h.
//
// Exit codes:
//   0  success
//   1  usage error
//   2  invalid config (unreadable/malformed inputs, unknown ids)
//   3  run: every job was rejected at submission (no capacity)
//   4  run: some job unschedulable or incomplete; log-scan: missing links
//      found; replay: trace mismatch

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "routesim.h"

namespace {

int config_error(const char* what) {
    std::fprintf(stderr, "routesim: %s: %s\n", what, rs_last_error());
    return 2;
}

int cmd_run(const std::string& topology, const std::string& workload,
            const std::string& fault_plan, const rs_run_params& params, const std::string& out) {
    rs_run_report report{};
    const rs_status status =
        rs_run_scenario(topology.c_str(), workload.c_str(),
                        fault_plan.empty() ? nullptr : fault_plan.c_str(), &params, out.c_str(),
                        &report);
    if (status != RS_OK) return config_error("run failed");
    std::printf("jobs=%" PRIu64 " completed=%" PRIu64 " unschedulable=%" PRIu64
                " incomplete=%" PRIu64 " failovers=%" PRIu64 "\n",
                report.jobs_submitted, report.jobs_completed, report.jobs_unschedulable,
                report.jobs_incomplete, report.failovers);
    if (report.jobs_submitted > 0 && report.rejected_at_submission == report.jobs_submitted)
        return 3;
    if (report.jobs_completed < report.jobs_submitted) return 4;
    return 0;
}

bool split_pair(const std::string& selector, std::string& first, std::string& second) {
    const std::size_t comma = selector.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 >= selector.size()) return false;
    first = selector.substr(0, comma);
    second = selector.substr(comma + 1);
    return true;
}

int cmd_similarity(const std::string& topology_path, const std::string& networks,
                   const std::string& servers) {
    rs_topology* topology = nullptr;
    if (rs_topology_load_file(topology_path.c_str(), &topology) != RS_OK)
        return config_error("cannot load topology");

    rs_ratio ratio{};
    rs_status status = RS_ERR_CONFIG;
    if (!networks.empty()) {
        std::string a, b;
        if (!split_pair(networks, a, b)) {
            std::fprintf(stderr, "routesim: --networks wants 'idA,idB'\n");
            rs_topology_free(topology);
            return 1;
        }
        status = rs_similarity_networks(topology, a.c_str(), b.c_str(), &ratio);
    } else {
        // "n1:s1,s2" compares two servers of n1; "n1:s1,n2:s3" names both.
        std::string a, b;
        if (!split_pair(servers, a, b)) {
            std::fprintf(stderr, "routesim: --servers wants 'net:srv,[net:]srv'\n");
            rs_topology_free(topology);
            return 1;
        }
        const std::size_t colon_a = a.find(':');
        if (colon_a == std::string::npos || colon_a == 0 || colon_a + 1 >= a.size()) {
            std::fprintf(stderr, "routesim: --servers wants 'net:srv,[net:]srv'\n");
            rs_topology_free(topology);
            return 1;
        }
        const std::string net_a = a.substr(0, colon_a);
        const std::string srv_a = a.substr(colon_a + 1);
        std::string net_b = net_a, srv_b = b;
        const std::size_t colon_b = b.find(':');
        if (colon_b != std::string::npos) {
            net_b = b.substr(0, colon_b);
            srv_b = b.substr(colon_b + 1);
        }
        status = rs_similarity_servers(topology, net_a.c_str(), srv_a.c_str(), net_b.c_str(),
                                       srv_b.c_str(), &ratio);
    }
    rs_topology_free(topology);
    if (status != RS_OK) return config_error("similarity failed");
    std::printf("%" PRIu64 "/%" PRIu64 " %.6f\n", ratio.num, ratio.den,
                static_cast<double>(ratio.num) / static_cast<double>(ratio.den));
    return 0;
}

int cmd_log_scan(const std::string& log_path, std::uint64_t now, std::uint64_t timeout_ticks) {
    char* lines = nullptr;
    std::uint64_t missing = 0;
    if (rs_log_scan_file(log_path.c_str(), now, timeout_ticks, &lines, &missing) != RS_OK)
        return config_error("log-scan failed");
    std::fputs(lines, stdout);
    rs_string_free(lines);
    return missing ? 4 : 0;
}

int cmd_replay(const std::string& topology, const std::string& workload,
               const std::string& fault_plan, const std::string& trace) {
    int identical = 0;
    const rs_status status =
        rs_replay_verify(topology.c_str(), workload.c_str(),
                         fault_plan.empty() ? nullptr : fault_plan.c_str(), trace.c_str(),
                         &identical);
    if (status != RS_OK) return config_error("replay failed");
    if (identical) {
        std::printf("trace verified: %s\n", trace.c_str());
        return 0;
    }
    std::printf("trace mismatch: %s\n", trace.c_str());
    return 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"similarity-routed cloud dispatch simulator"};
    app.require_subcommand(1);

    std::string topology, workload, fault_plan, out_dir;
    rs_run_params params{};
    params.timeout_ticks = 1000;
    params.monitor_interval = 250;

    auto* run = app.add_subcommand("run", "dispatch a workload and simulate it to quiescence");
    run->add_option("--topology", topology)->required();
    run->add_option("--workload", workload)->required();
    run->add_option("--fault-plan", fault_plan);
    auto* seed_opt = run->add_option("--seed", params.seed);
    run->add_option("--timeout-t", params.timeout_ticks);
    run->add_option("--interval2", params.monitor_interval);
    run->add_option("--out", out_dir)->required();

    std::string networks, servers;
    auto* similarity = app.add_subcommand("similarity", "print the catalog similarity of two nodes");
    similarity->add_option("--topology", topology)->required();
    auto* networks_opt = similarity->add_option("--networks", networks);
    auto* servers_opt = similarity->add_option("--servers", servers);
    networks_opt->excludes(servers_opt);

    std::string log_path;
    std::uint64_t now = 0;
    std::uint64_t scan_timeout = 1000;
    auto* log_scan = app.add_subcommand("log-scan", "report missing links in a log file");
    log_scan->add_option("log", log_path)->required();
    log_scan->add_option("now", now)->required();
    log_scan->add_option("--timeout-t", scan_timeout);

    std::string trace_path;
    auto* replay = app.add_subcommand("replay", "re-run a recorded trace and verify it byte-for-byte");
    replay->add_option("--topology", topology)->required();
    replay->add_option("--workload", workload)->required();
    replay->add_option("--fault-plan", fault_plan);
    replay->add_option("trace", trace_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (run->parsed()) {
        params.seed_set = seed_opt->count() > 0 ? 1 : 0;
        return cmd_run(topology, workload, fault_plan, params, out_dir);
    }
    if (similarity->parsed()) {
        if (networks.empty() && servers.empty()) {
            std::fprintf(stderr, "routesim: similarity wants --networks or --servers\n");
            return 1;
        }
        return cmd_similarity(topology, networks, servers);
    }
    if (log_scan->parsed()) return cmd_log_scan(log_path, now, scan_timeout);
    if (replay->parsed()) return cmd_replay(topology, workload, fault_plan, trace_path);
    return 1;
}
