#include "routesim/failover.hpp"

#include "doctest.h"
#include "routesim/error.hpp"
#include "routesim/hash.hpp"
#include "table1_fixture.hpp"

using namespace routesim;

namespace {

LogRecord record(const std::string& ip, const std::string& app, const std::string& internal,
                 std::uint64_t expected, std::uint64_t received, std::uint64_t at) {
    return LogRecord{ip, app, internal, expected, received, at};
}

}  // namespace

TEST_CASE("append_log keeps arrival order") {
    Log log;
    append_log(log, record("10.20.30.40", "App1", "192.168.10.50", 4, 4, 120));
    CHECK(log.size() == 1);
    append_log(log, record("10.20.30.41", "App2", "192.168.10.80", 6, 2, 130));
    REQUIRE(log.size() == 2);
    CHECK(log[0].app == "App1");
    CHECK(log[1].app == "App2");
}

TEST_CASE("serialize_log emits the canonical byte layout") {
    Log log;
    append_log(log, record("10.20.30.40", "App1", "192.168.10.50", 4, 4, 120));
    append_log(log, record("10.20.30.41", "App2", "192.168.10.80", 6, 2, 130));
    const std::string want =
        "LOG FILE\n"
        "External IP\tApplication\tInternal IP\tNo. of Files\tReceived\tDispatchedAt\n"
        "10.20.30.40\tApp1\t192.168.10.50\t4\t4\t120\n"
        "10.20.30.41\tApp2\t192.168.10.80\t6\t2\t130\n";
    CHECK(serialize_log(log) == want);
    CHECK(parse_log(want) == log);
}

TEST_CASE("empty log round-trips as header lines only") {
    const Log empty;
    const std::string bytes = serialize_log(empty);
    CHECK(bytes ==
          "LOG FILE\nExternal IP\tApplication\tInternal IP\tNo. of Files\tReceived\tDispatchedAt\n");
    CHECK(parse_log(bytes).empty());
}

TEST_CASE("log round-trip holds for random contents") {
    Rng rng(0x106);
    for (int i = 0; i < 100; ++i) {
        Log log;
        const std::size_t rows = rng.next_below(6);
        for (std::size_t r = 0; r < rows; ++r) {
            const std::uint64_t expected = 1 + rng.next_below(9);
            log.push_back(record("10.0." + std::to_string(rng.next_below(200)) + ".1",
                                 "App" + std::to_string(rng.next_below(4) + 1),
                                 "192.168.0." + std::to_string(rng.next_below(200)),
                                 expected, rng.next_below(expected + 1),
                                 rng.next_below(10000)));
        }
        const std::string bytes = serialize_log(log);
        CHECK(parse_log(bytes) == log);
        CHECK(serialize_log(parse_log(bytes)) == bytes);
    }
}

TEST_CASE("parse_log rejects malformed rows with a line number") {
    const std::string header =
        "LOG FILE\nExternal IP\tApplication\tInternal IP\tNo. of Files\tReceived\tDispatchedAt\n";
    CHECK_THROWS_WITH_AS(parse_log("nonsense\n"), doctest::Contains("line 1"), Error);
    CHECK_THROWS_WITH_AS(parse_log("LOG FILE\nwrong header\n"), doctest::Contains("line 2"), Error);
    CHECK_THROWS_WITH_AS(parse_log(header + "10.0.0.1\tApp1\t192.168.0.1\t4\t4\n"),
                         doctest::Contains("line 3"), Error);
    CHECK_THROWS_WITH_AS(parse_log(header + "10.0.0.1\tApp1\t192.168.0.1\t4\tx\t9\n"),
                         doctest::Contains("line 3"), Error);
    // received greater than expected violates the record invariant
    CHECK_THROWS_WITH_AS(parse_log(header + "10.0.0.1\tApp1\t192.168.0.1\t4\t5\t9\n"),
                         doctest::Contains("exceeds"), Error);
}

TEST_CASE("find_missing_links deletes complete entries and reports timeouts") {
    Log log;
    append_log(log, record("10.0.0.1", "App1", "192.168.10.50", 4, 4, 0));    // complete
    append_log(log, record("10.0.0.2", "App2", "192.168.10.60", 6, 2, 0));    // timed out
    append_log(log, record("10.0.0.3", "App3", "192.168.10.70", 6, 2, 900));  // still young
    ActiveList active;
    active.entries = {{"j1", 0}, {"j2", 1}, {"j3", 2}};

    auto scan = find_missing_links(active, log, 1000, 1000);
    CHECK(scan.completed == std::vector<std::string>{"j1"});
    REQUIRE(scan.missing.size() == 1);
    CHECK(scan.missing[0].job_id == "j2");
    CHECK(scan.missing[0].reason == MissReason::timeout);
    CHECK(scan.missing[0].record.n_files_received == 2);
    REQUIRE(active.entries.size() == 1);
    CHECK(active.entries[0].job_id == "j3");
}

TEST_CASE("find_missing_links scans in list order and refines crash reasons") {
    Log log;
    append_log(log, record("10.0.0.1", "App1", "192.168.10.50", 4, 0, 0));
    append_log(log, record("10.0.0.2", "App1", "192.168.10.60", 4, 0, 0));
    ActiveList active;
    active.entries = {{"jb", 1}, {"ja", 0}};  // deliberate non-id order
    auto scan = find_missing_links(active, log, 2000, 1000, {"192.168.10.60"});
    REQUIRE(scan.missing.size() == 2);
    CHECK(scan.missing[0].job_id == "jb");  // list order preserved
    CHECK(scan.missing[0].reason == MissReason::server_crash);
    CHECK(scan.missing[1].job_id == "ja");
    CHECK(scan.missing[1].reason == MissReason::timeout);
    CHECK(active.entries.empty());
}

TEST_CASE("young incomplete entries stay active") {
    Log log;
    append_log(log, record("10.0.0.1", "App1", "192.168.10.50", 6, 2, 500));
    ActiveList active;
    active.entries = {{"j1", 0}};
    auto scan = find_missing_links(active, log, 900, 1000);
    CHECK(scan.missing.empty());
    CHECK(scan.completed.empty());
    CHECK(active.entries.size() == 1);
}

TEST_CASE("emergency_load_shift re-dispatches onto a sibling server") {
    NsMap map = table1();
    AccessFrequencyTable table;

    // j1 was running App4 on n4/s2 when it went missing
    ServerRecord* s2 = map.find_server("n4", "s2");
    s2->busy = true;
    s2->current_load = 1;
    map.find_network("n4")->current_load = 1;

    std::map<std::string, JobRequest> jobs;
    JobRequest req;
    req.job_id = "j1";
    req.user_id = "u1";
    req.external_ip = "10.20.30.40";
    req.app = "App4";
    req.n_files = 4;
    jobs.emplace("j1", req);

    std::map<std::string, ExclusionSet> exclusions;
    std::map<std::string, ServerKey> assignment{{"j1", {"n4", "s2"}}};

    MissingLink link;
    link.job_id = "j1";
    link.record = record("10.20.30.40", "App4", "192.168.40.60", 4, 0, 0);
    link.reason = MissReason::server_crash;

    auto outcomes = emergency_load_shift(map, {link}, table,
                                         ShiftContext{jobs, exclusions, assignment, 1000});
    REQUIRE(outcomes.size() == 1);
    CHECK(outcomes[0].failed == ServerKey{"n4", "s2"});
    REQUIRE(outcomes[0].redispatch);
    CHECK(outcomes[0].redispatch->decision.network == "n4");
    CHECK(outcomes[0].redispatch->decision.server == "s3");  // next nearest sibling
    CHECK(outcomes[0].redispatch->update.created_at == 1000);

    CHECK_FALSE(s2->busy);          // slot reclaimed
    CHECK_FALSE(s2->active);        // out of rotation until healed
    CHECK(exclusions["j1"].contains({"n4", "s2"}));
    CHECK(assignment["j1"] == ServerKey{"n4", "s3"});
    CHECK(map.find_server("n4", "s3")->busy);
    CHECK(map.find_network("n4")->current_load == 1);
}

TEST_CASE("emergency_load_shift reports no capacity when hosts are exhausted") {
    NsMap map = load_topology(R"({"networks":[
      {"id":"n1","threshold_load":2,"servers":[
        {"id":"s1","internal_ip":"192.168.0.1","threshold_load":1,"apps":["App1"]}]}]})");
    AccessFrequencyTable table;
    std::map<std::string, JobRequest> jobs;
    JobRequest req;
    req.job_id = "j1";
    req.user_id = "u1";
    req.external_ip = "10.0.0.1";
    req.app = "App1";
    jobs.emplace("j1", req);
    std::map<std::string, ExclusionSet> exclusions;
    std::map<std::string, ServerKey> assignment{{"j1", {"n1", "s1"}}};
    map.find_server("n1", "s1")->busy = true;
    map.find_server("n1", "s1")->current_load = 1;
    map.find_network("n1")->current_load = 1;

    MissingLink link;
    link.job_id = "j1";
    link.record = record("10.0.0.1", "App1", "192.168.0.1", 4, 0, 0);
    auto outcomes = emergency_load_shift(map, {link}, table,
                                         ShiftContext{jobs, exclusions, assignment, 500});
    REQUIRE(outcomes.size() == 1);
    CHECK_FALSE(outcomes[0].redispatch);  // only host is now excluded
    CHECK(assignment.find("j1") == assignment.end());
}

TEST_CASE("two missing jobs shift independently") {
    NsMap map = table1();
    AccessFrequencyTable table;
    std::map<std::string, JobRequest> jobs;
    for (const char* id : {"j1", "j2"}) {
        JobRequest req;
        req.job_id = id;
        req.user_id = std::string("u_") + id;
        req.external_ip = "10.20.30.40";
        req.app = "App1";
        req.n_files = 2;
        jobs.emplace(id, req);
    }
    std::map<std::string, ExclusionSet> exclusions;
    std::map<std::string, ServerKey> assignment{{"j1", {"n2", "s1"}}, {"j2", {"n3", "s1"}}};
    for (const auto& [job, key] : assignment) {
        (void)job;
        ServerRecord* srv = map.find_server(key.first, key.second);
        srv->busy = true;
        srv->current_load = 1;
        map.find_network(key.first)->current_load += 1;
    }
    std::vector<MissingLink> missing;
    missing.push_back({"j1", record("10.20.30.40", "App1", "192.168.20.50", 2, 1, 0),
                       MissReason::timeout});
    missing.push_back({"j2", record("10.20.30.40", "App1", "192.168.30.50", 2, 0, 0),
                       MissReason::timeout});
    auto outcomes = emergency_load_shift(map, missing, table,
                                         ShiftContext{jobs, exclusions, assignment, 1000});
    REQUIRE(outcomes.size() == 2);
    CHECK(outcomes[0].redispatch);
    CHECK(outcomes[1].redispatch);
    CHECK(exclusions["j1"] == ExclusionSet{{"n2", "s1"}});
    CHECK(exclusions["j2"] == ExclusionSet{{"n3", "s1"}});
}
