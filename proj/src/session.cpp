#include "distsel/session.hpp"

#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace distsel {

namespace fs = std::filesystem;

void atomic_write(const fs::path& path, const std::string& content) {
    static std::atomic<unsigned long> counter{0};
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(counter.fetch_add(1));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out) {
            throw Error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot replace " + path.string() + ": " + ec.message());
    }
}

bool valid_session_id(const std::string& id) {
    if (id.empty() || id.size() > 64) {
        return false;
    }
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
        if (!ok) {
            return false;
        }
    }
    return true;
}

SessionStore::SessionStore(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

fs::path SessionStore::path_for(const std::string& id) const { return dir_ / (id + ".json"); }

std::shared_ptr<std::mutex> SessionStore::lock_for(const std::string& id) {
    std::lock_guard guard(locks_mutex_);
    auto& m = locks_[id];
    if (!m) {
        m = std::make_shared<std::mutex>();
    }
    return m;
}

SessionState SessionStore::create() {
    static std::mt19937_64 rng{std::random_device{}()};
    static std::mutex rng_mutex;
    SessionState s;
    do {
        std::uint64_t v;
        {
            std::lock_guard guard(rng_mutex);
            v = rng();
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
        s.id = buf;
    } while (exists(s.id));
    save(s);
    return s;
}

bool SessionStore::exists(const std::string& id) const { return valid_session_id(id) && fs::exists(path_for(id)); }

SessionState SessionStore::load(const std::string& id) const {
    if (!exists(id)) {
        throw UnknownSession(id);
    }
    std::ifstream in(path_for(id), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return session_from_json(Json::parse(buf.str()));
}

void SessionStore::save(const SessionState& session) {
    if (!valid_session_id(session.id)) {
        throw InvalidArgument("invalid session id '" + session.id + "'");
    }
    atomic_write(path_for(session.id), to_json(session).dump());
}

Json SessionStore::update(const std::string& id, const std::function<Json(SessionState&)>& fn) {
    if (!exists(id)) {
        throw UnknownSession(id);
    }
    auto lock = lock_for(id);
    std::lock_guard guard(*lock);
    auto s = load(id);
    auto result = fn(s);
    save(s);
    return result;
}

Json SessionStore::read(const std::string& id, const std::function<Json(const SessionState&)>& fn) {
    if (!exists(id)) {
        throw UnknownSession(id);
    }
    auto lock = lock_for(id);
    std::lock_guard guard(*lock);
    return fn(load(id));
}

std::string job_status_name(JobStatus status) {
    switch (status) {
    case JobStatus::pending:
        return "pending";
    case JobStatus::running:
        return "running";
    case JobStatus::done:
        return "done";
    case JobStatus::failed:
        return "failed";
    }
    return "unknown";
}

JobTable::~JobTable() {
    for (auto& t : threads_) {
        if (t.joinable()) {
            t.join();
        }
    }
}

std::string JobTable::submit(std::string kind, std::string session, std::function<Json()> work) {
    std::lock_guard guard(mutex_);
    const std::string id = "job-" + std::to_string(++counter_);
    jobs_[id] = Job{id, std::move(kind), std::move(session), JobStatus::pending, nullptr, "", 0};
    threads_.emplace_back([this, id, work = std::move(work)] {
        {
            std::lock_guard g(mutex_);
            jobs_[id].status = JobStatus::running;
        }
        Json result;
        std::string error;
        int code = 0;
        try {
            result = work();
        } catch (const UnknownSession& ex) {
            error = ex.what();
            code = 404;
        } catch (const InvalidArgument& ex) {
            error = ex.what();
            code = 400;
        } catch (const std::exception& ex) {
            error = ex.what();
            code = 500;
        }
        {
            std::lock_guard g(mutex_);
            auto& job = jobs_[id];
            job.status = code == 0 ? JobStatus::done : JobStatus::failed;
            job.result = std::move(result);
            job.error = std::move(error);
            job.error_code = code;
        }
        changed_.notify_all();
    });
    return id;
}

Json JobTable::describe(const Job& job) const {
    Json j = {{"job", job.id}, {"kind", job.kind}, {"session", job.session}, {"status", job_status_name(job.status)}};
    if (job.status == JobStatus::done) {
        j["result"] = job.result;
    } else if (job.status == JobStatus::failed) {
        j["error"] = job.error;
        j["error_code"] = job.error_code;
    }
    return j;
}

std::optional<Json> JobTable::status(const std::string& id) const {
    std::lock_guard guard(mutex_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) {
        return std::nullopt;
    }
    return describe(it->second);
}

std::optional<Json> JobTable::wait(const std::string& id) const {
    std::unique_lock lock(mutex_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) {
        return std::nullopt;
    }
    changed_.wait(lock, [&] {
        const auto s = jobs_.at(id).status;
        return s == JobStatus::done || s == JobStatus::failed;
    });
    return describe(jobs_.at(id));
}

} // namespace distsel
