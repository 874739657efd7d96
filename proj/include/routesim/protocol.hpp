#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "routesim/catalog.hpp"

namespace routesim {

// One job delivery from the interface to a server. Header fields must be
// whitespace-free; the payload is opaque bytes (length-prefixed on the wire).
struct JobEnvelope {
    std::string job_id;
    std::string external_ip;
    std::string app;
    std::string network;
    std::string server;
    std::uint64_t n_files = 1;
    std::string payload;

    friend bool operator==(const JobEnvelope&, const JobEnvelope&) = default;
};

struct FileTransfer {
    std::string name;  // no path separators
    std::uint64_t length = 0;
    std::string content;

    friend bool operator==(const FileTransfer&, const FileTransfer&) = default;
};

struct StatusLine {
    std::string app;
    std::string network;
    std::string server;

    friend bool operator==(const StatusLine&, const StatusLine&) = default;
};

// Wire format, normative byte-for-byte:
//   job frame:    "JOB <job_id> <ip> <app> <net> <srv> <n_files> <payload_len>" LF payload
//   file frame:   "FILE <name> <length>" LF content
//   end frame:    "EXIT" LF "STATUS <app> <net> <srv>" LF
// A result stream is zero or more file frames followed by the end frame.
std::string encode_job(const JobEnvelope& e);
JobEnvelope decode_job(std::string_view bytes);

std::string encode_file_frame(const FileTransfer& f);
FileTransfer decode_file_frame(std::string_view bytes);

std::string encode_end_frame(const StatusLine& status);
StatusLine decode_end_frame(std::string_view bytes);

std::string encode_results(const std::vector<FileTransfer>& files, const StatusLine& status);
std::pair<std::vector<FileTransfer>, StatusLine> decode_results(std::string_view bytes);

using Executor = std::function<std::vector<FileTransfer>(const JobEnvelope&)>;

// Deterministic stand-in for the real solvers: file i of n is named
// "<app>_out<i>.dat" and holds the 16-hex-char FNV-1a digest of
// "<job_id>:<app>:<i>".
std::vector<FileTransfer> stub_execute(const std::string& job_id, const std::string& app,
                                       std::string_view payload, std::uint64_t n_files);

// Runs the executor for a decoded envelope, staging outputs in `scratch_dir`
// (the caller deletes it after the results are sent). Throws
// Errc::executor_failure on a crash or a wrong file count.
std::vector<FileTransfer> run_job(const JobEnvelope& e, const Executor& exec,
                                  const std::filesystem::path& scratch_dir);

// Writes each file at <root>/<external_ip>/<name>, overwriting earlier
// content (re-execution replaces). Validates every name before any write.
std::vector<std::filesystem::path> store_outputs(const std::filesystem::path& root,
                                                 const std::string& external_ip,
                                                 const std::vector<FileTransfer>& files);

// Frees the serving slot named by the status line: busy=false, server and
// network loads decremented. Throws Errc::not_busy / unknown_*.
void release_server(NsMap& map, const StatusLine& status);

// Non-throwing release used by the monitor when reclaiming a slot; returns
// false when the server was not busy.
bool try_release_server(NsMap& map, const std::string& net, const std::string& srv);

}  // namespace routesim
