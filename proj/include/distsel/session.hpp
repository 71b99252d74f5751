#pragma once

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "distsel/error.hpp"
#include "distsel/pipeline.hpp"

namespace distsel {

class UnknownSession : public Error {
public:
    explicit UnknownSession(const std::string& id) : Error("unknown session '" + id + "'") {}
};

// Writes to a temporary file in the same directory, then renames it over the target.
void atomic_write(const std::filesystem::path& path, const std::string& content);

bool valid_session_id(const std::string& id);

// One JSON file per session in a directory. Updates of the same session are
// serialised; the last write wins.
class SessionStore {
public:
    explicit SessionStore(std::filesystem::path dir);

    const std::filesystem::path& dir() const noexcept { return dir_; }

    SessionState create();
    bool exists(const std::string& id) const;
    // Throws UnknownSession.
    SessionState load(const std::string& id) const;
    void save(const SessionState& session);

    // Loads, applies fn under the session lock, persists, and returns fn's result.
    Json update(const std::string& id, const std::function<Json(SessionState&)>& fn);
    // Read-only access under the session lock.
    Json read(const std::string& id, const std::function<Json(const SessionState&)>& fn);

private:
    std::filesystem::path path_for(const std::string& id) const;
    std::shared_ptr<std::mutex> lock_for(const std::string& id);

    std::filesystem::path dir_;
    std::mutex locks_mutex_;
    std::map<std::string, std::shared_ptr<std::mutex>> locks_;
};

enum class JobStatus { pending, running, done, failed };
std::string job_status_name(JobStatus status);

// Background jobs, each on its own thread, polled by id.
class JobTable {
public:
    JobTable() = default;
    JobTable(const JobTable&) = delete;
    JobTable& operator=(const JobTable&) = delete;
    ~JobTable();

    std::string submit(std::string kind, std::string session, std::function<Json()> work);
    // Null when the id is unknown.
    std::optional<Json> status(const std::string& id) const;
    // Blocks until the job finishes; for tests and synchronous requests.
    std::optional<Json> wait(const std::string& id) const;

private:
    struct Job {
        std::string id;
        std::string kind;
        std::string session;
        JobStatus status = JobStatus::pending;
        Json result;
        std::string error;
        int error_code = 0;  // HTTP-style classification of the failure
    };
    Json describe(const Job& job) const;

    mutable std::mutex mutex_;
    mutable std::condition_variable changed_;
    std::map<std::string, Job> jobs_;
    std::vector<std::thread> threads_;
    std::size_t counter_ = 0;
};

} // namespace distsel
