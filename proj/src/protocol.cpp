#include "routesim/protocol.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "routesim/error.hpp"
#include "routesim/hash.hpp"

namespace fs = std::filesystem;

namespace routesim {

namespace {

bool header_field_ok(std::string_view text) {
    if (text.empty()) return false;
    for (char c : text)
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f') return false;
    return true;
}

bool file_name_ok(std::string_view name) {
    if (!header_field_ok(name)) return false;
    if (name == "." || name == "..") return false;
    return name.find_first_of("/\\") == std::string_view::npos;
}

void require_field(std::string_view text, const char* what) {
    if (!header_field_ok(text))
        throw Error(Errc::frame_error, std::string("bad ") + what + " '" + std::string(text) + "'");
}

std::uint64_t parse_u64_field(std::string_view text, const char* what) {
    std::uint64_t value = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || p != text.data() + text.size())
        throw Error(Errc::frame_error, std::string("non-numeric ") + what);
    return value;
}

// Reads one LF-terminated header line starting at pos; advances past the LF.
std::string_view take_line(std::string_view bytes, std::size_t& pos) {
    const std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos)
        throw Error(Errc::truncated_frame, "header line without line feed");
    std::string_view line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t sp = line.find(' ', start);
        if (sp == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, sp - start));
        start = sp + 1;
    }
}

FileTransfer parse_file_at(std::string_view bytes, std::size_t& pos) {
    const auto fields = split_fields(take_line(bytes, pos));
    if (fields.size() != 3 || fields[0] != "FILE")
        throw Error(Errc::frame_error, "expected FILE header");
    if (!file_name_ok(fields[1]))
        throw Error(Errc::frame_error, "bad file name '" + std::string(fields[1]) + "'");
    const std::uint64_t length = parse_u64_field(fields[2], "file length");
    if (bytes.size() - pos < length)
        throw Error(Errc::length_mismatch, "declared " + std::to_string(length) +
                                               " bytes, only " + std::to_string(bytes.size() - pos) +
                                               " delivered");
    FileTransfer f;
    f.name = std::string(fields[1]);
    f.length = length;
    f.content = std::string(bytes.substr(pos, length));
    pos += length;
    return f;
}

StatusLine parse_status_at(std::string_view bytes, std::size_t& pos) {
    const auto fields = split_fields(take_line(bytes, pos));
    if (fields.size() != 4 || fields[0] != "STATUS")
        throw Error(Errc::frame_error, "expected STATUS header");
    for (int i = 1; i < 4; ++i) require_field(fields[i], "status field");
    return StatusLine{std::string(fields[1]), std::string(fields[2]), std::string(fields[3])};
}

}  // namespace

std::string encode_job(const JobEnvelope& e) {
    require_field(e.job_id, "job_id");
    require_field(e.external_ip, "external_ip");
    require_field(e.app, "app");
    require_field(e.network, "network");
    require_field(e.server, "server");
    if (e.n_files == 0) throw Error(Errc::frame_error, "n_files must be positive");
    std::string out = "JOB " + e.job_id + " " + e.external_ip + " " + e.app + " " + e.network +
                      " " + e.server + " " + std::to_string(e.n_files) + " " +
                      std::to_string(e.payload.size()) + "\n";
    out += e.payload;
    return out;
}

JobEnvelope decode_job(std::string_view bytes) {
    std::size_t pos = 0;
    const auto fields = split_fields(take_line(bytes, pos));
    if (fields.size() != 8 || fields[0] != "JOB")
        throw Error(Errc::frame_error, "expected JOB header");
    for (int i = 1; i < 6; ++i) require_field(fields[i], "job header field");
    JobEnvelope e;
    e.job_id = std::string(fields[1]);
    e.external_ip = std::string(fields[2]);
    e.app = std::string(fields[3]);
    e.network = std::string(fields[4]);
    e.server = std::string(fields[5]);
    e.n_files = parse_u64_field(fields[6], "n_files");
    if (e.n_files == 0) throw Error(Errc::frame_error, "n_files must be positive");
    const std::uint64_t payload_len = parse_u64_field(fields[7], "payload length");
    const std::size_t remaining = bytes.size() - pos;
    if (remaining < payload_len) throw Error(Errc::truncated_frame, "payload cut short");
    if (remaining > payload_len) throw Error(Errc::frame_error, "trailing bytes after payload");
    e.payload = std::string(bytes.substr(pos, payload_len));
    return e;
}

std::string encode_file_frame(const FileTransfer& f) {
    if (!file_name_ok(f.name))
        throw Error(Errc::frame_error, "bad file name '" + f.name + "'");
    if (f.length != f.content.size())
        throw Error(Errc::length_mismatch, "length field does not match content size");
    return "FILE " + f.name + " " + std::to_string(f.length) + "\n" + f.content;
}

FileTransfer decode_file_frame(std::string_view bytes) {
    std::size_t pos = 0;
    FileTransfer f = parse_file_at(bytes, pos);
    if (pos != bytes.size()) throw Error(Errc::frame_error, "trailing bytes after file content");
    return f;
}

std::string encode_end_frame(const StatusLine& status) {
    require_field(status.app, "status app");
    require_field(status.network, "status network");
    require_field(status.server, "status server");
    return "EXIT\nSTATUS " + status.app + " " + status.network + " " + status.server + "\n";
}

StatusLine decode_end_frame(std::string_view bytes) {
    std::size_t pos = 0;
    if (take_line(bytes, pos) != "EXIT") throw Error(Errc::frame_error, "expected EXIT");
    StatusLine status = parse_status_at(bytes, pos);
    if (pos != bytes.size()) throw Error(Errc::frame_error, "trailing bytes after status");
    return status;
}

std::string encode_results(const std::vector<FileTransfer>& files, const StatusLine& status) {
    std::string out;
    for (const auto& f : files) out += encode_file_frame(f);
    out += encode_end_frame(status);
    return out;
}

std::pair<std::vector<FileTransfer>, StatusLine> decode_results(std::string_view bytes) {
    std::vector<FileTransfer> files;
    std::size_t pos = 0;
    while (true) {
        if (pos >= bytes.size()) throw Error(Errc::truncated_frame, "missing EXIT");
        std::size_t peek = pos;
        std::string_view line = take_line(bytes, peek);
        if (line == "EXIT") {
            pos = peek;
            StatusLine status = parse_status_at(bytes, pos);
            if (pos != bytes.size())
                throw Error(Errc::frame_error, "trailing bytes after status");
            return {std::move(files), std::move(status)};
        }
        files.push_back(parse_file_at(bytes, pos));
    }
}

std::vector<FileTransfer> stub_execute(const std::string& job_id, const std::string& app,
                                       std::string_view /*payload*/, std::uint64_t n_files) {
    static const char* hex = "0123456789abcdef";
    std::vector<FileTransfer> out;
    out.reserve(n_files);
    for (std::uint64_t i = 1; i <= n_files; ++i) {
        const std::uint64_t digest = fnv1a64(job_id + ":" + app + ":" + std::to_string(i));
        std::string content(16, '0');
        for (int nibble = 0; nibble < 16; ++nibble)
            content[nibble] = hex[(digest >> (60 - 4 * nibble)) & 0xF];
        FileTransfer f;
        f.name = app + "_out" + std::to_string(i) + ".dat";
        f.length = content.size();
        f.content = std::move(content);
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<FileTransfer> run_job(const JobEnvelope& e, const Executor& exec,
                                  const fs::path& scratch_dir) {
    std::vector<FileTransfer> files;
    try {
        files = exec(e);
    } catch (const std::exception& ex) {
        throw Error(Errc::executor_failure, ex.what());
    }
    if (files.size() != e.n_files)
        throw Error(Errc::executor_failure, "executor produced " + std::to_string(files.size()) +
                                                " of " + std::to_string(e.n_files) + " files");
    std::error_code ec;
    fs::create_directories(scratch_dir, ec);
    if (ec) throw Error(Errc::io_error, "cannot create scratch area: " + ec.message());
    for (auto& f : files) {
        if (!file_name_ok(f.name)) throw Error(Errc::executor_failure, "bad output name '" + f.name + "'");
        f.length = f.content.size();
        std::ofstream stage(scratch_dir / f.name, std::ios::binary | std::ios::trunc);
        stage.write(f.content.data(), static_cast<std::streamsize>(f.content.size()));
        if (!stage) throw Error(Errc::io_error, "cannot stage '" + f.name + "'");
    }
    return files;
}

std::vector<fs::path> store_outputs(const fs::path& root, const std::string& external_ip,
                                    const std::vector<FileTransfer>& files) {
    for (const auto& f : files)
        if (!file_name_ok(f.name))
            throw Error(Errc::io_error, "refusing to store '" + f.name + "'");
    std::vector<fs::path> stored;
    if (files.empty()) return stored;
    const fs::path dir = root / external_ip;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::io_error, "cannot create " + dir.string() + ": " + ec.message());
    for (const auto& f : files) {
        const fs::path target = dir / f.name;
        std::ofstream out(target, std::ios::binary | std::ios::trunc);
        out.write(f.content.data(), static_cast<std::streamsize>(f.content.size()));
        if (!out) throw Error(Errc::io_error, "cannot write " + target.string());
        stored.push_back(target);
    }
    return stored;
}

void release_server(NsMap& map, const StatusLine& status) {
    NetworkRecord* net = map.find_network(status.network);
    if (!net) throw Error(Errc::unknown_network, "no network '" + status.network + "'");
    ServerRecord* srv = map.find_server(status.network, status.server);
    if (!srv) throw Error(Errc::unknown_server, "no server '" + status.server + "' in network '" +
                                                    status.network + "'");
    if (!srv->busy)
        throw Error(Errc::not_busy, "server '" + status.server + "' of '" + status.network +
                                        "' is not busy");
    srv->busy = false;
    if (srv->current_load > 0) --srv->current_load;
    if (net->current_load > 0) --net->current_load;
}

bool try_release_server(NsMap& map, const std::string& net_id, const std::string& srv_id) {
    ServerRecord* srv = map.find_server(net_id, srv_id);
    if (!srv || !srv->busy) return false;
    release_server(map, StatusLine{"", net_id, srv_id});
    return true;
}

}  // namespace routesim
