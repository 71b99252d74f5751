#include <doctest.h>

#include <httplib.h>

#include <filesystem>
#include <random>
#include <thread>

#include "distsel/pipeline.hpp"
#include "distsel/server.hpp"
#include "distsel/session.hpp"

using namespace distsel;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& tag) {
    std::random_device rd;
    auto dir = fs::temp_directory_path() / ("distsel-" + tag + "-" + std::to_string(rd()));
    fs::create_directories(dir);
    return dir;
}

class RunningServer {
public:
    explicit RunningServer(const fs::path& dir) : server_(ServerConfig{"127.0.0.1", 0, dir, 7}) {
        port_ = server_.bind();
        thread_ = std::thread([this] { server_.run(); });
    }
    ~RunningServer() {
        server_.stop();
        thread_.join();
    }
    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port_);
        c.set_read_timeout(120, 0);
        return c;
    }

private:
    ApiServer server_;
    int port_ = 0;
    std::thread thread_;
};

Json post(httplib::Client& c, const std::string& path, const Json& body, int expect) {
    auto r = c.Post(path, body.dump(), "application/json");
    REQUIRE(r);
    CAPTURE(r->body);
    CHECK(r->status == expect);
    return Json::parse(r->body);
}

Json get(httplib::Client& c, const std::string& path, int expect) {
    auto r = c.Get(path);
    REQUIRE(r);
    CAPTURE(r->body);
    CHECK(r->status == expect);
    return Json::parse(r->body);
}

} // namespace

TEST_CASE("session store writes atomically and validates ids") {
    const auto dir = scratch_dir("store");
    SessionStore store(dir);
    auto s = store.create();
    CHECK(valid_session_id(s.id));
    CHECK_FALSE(valid_session_id("../etc"));
    CHECK_FALSE(valid_session_id(""));
    s.seed = 42;
    store.save(s);
    CHECK(store.load(s.id).seed == 42);
    CHECK_THROWS_AS(store.load("nothere"), UnknownSession);
    for (const auto& entry : fs::directory_iterator(dir)) {
        CHECK(entry.path().extension() == ".json");
    }
    fs::remove_all(dir);
}

TEST_CASE("job table runs work and reports failures") {
    JobTable jobs;
    const auto ok = jobs.submit("t", "s", [] { return Json{{"x", 1}}; });
    const auto bad = jobs.submit("t", "s", []() -> Json { throw InvalidArgument("nope"); });
    CHECK(jobs.wait(ok)->at("status") == "done");
    CHECK(jobs.wait(ok)->at("result").at("x") == 1);
    const auto failed = *jobs.wait(bad);
    CHECK(failed.at("status") == "failed");
    CHECK(failed.at("error_code") == 400);
    CHECK_FALSE(jobs.status("job-999"));
}

TEST_CASE("HTTP workflow") {
    const auto dir = scratch_dir("http");
    std::string id;
    {
        RunningServer server(dir);
        auto c = server.client();

        // Asynchronous scan, polled by job id.
        const Json scan_req = {{"generate", {{"kind", "atom"}, {"n", 150}, {"seed", 3}}},
                               {"metrics", {"euclidean", "spherical_radius"}},
                               {"seed", 3},
                               {"n_boot", 100}};
        auto accepted = post(c, "/scan", scan_req, 202);
        CHECK(accepted.at("schema") == 1);
        id = accepted.at("session").get<std::string>();
        const auto job = accepted.at("job").get<std::string>();
        Json polled;
        for (int i = 0; i < 600; ++i) {
            polled = get(c, "/jobs/" + job, 200);
            if (polled.at("status") == "done" || polled.at("status") == "failed") {
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
        REQUIRE(polled.at("status") == "done");

        // The served scan is the library scan.
        const auto g = generate_dataset("atom", 150, 3);
        ScanConfig cfg;
        cfg.dip = {100, 3};
        const auto direct = to_json(run_scan(g.data, {Metric::euclidean(), Metric::parse("spherical_radius")}, cfg));
        CHECK(polled.at("result").at("scan").dump() == direct.dump());
        const auto served = get(c, "/scan?session=" + id, 200);
        CHECK(served.at("scan").dump() == direct.dump());

        const auto density = get(c, "/density/radius?session=" + id, 200);
        CHECK(density.at("metric") == "spherical_radius");
        CHECK(density.at("density").at("kernel_points").size() == kDefaultGridSize);
        get(c, "/density/chord?session=" + id, 404);

        const auto fit = post(c, "/gmm/fit",
                              {{"session", id}, {"metric", "spherical_radius"}, {"components", 2}, {"seed", 3}, {"wait", true}},
                              200);
        const auto& model = fit.at("result").at("model");
        CHECK(model.at("weights").size() == 2);
        CHECK(fit.at("result").at("bd").is_number());

        // Weights must sum to one within 1e-6.
        auto r = c.Put("/gmm/params",
                       Json{{"session", id}, {"weights", {0.5, 0.4}}, {"means", {1, 20}}, {"sds", {1, 1}}}.dump(),
                       "application/json");
        REQUIRE(r);
        CHECK(r->status == 400);
        r = c.Put("/gmm/params",
                  Json{{"session", id}, {"weights", {0.2, 0.8000000001}}, {"means", {1, 30}}, {"sds", {0.5, 1.5}}}.dump(),
                  "application/json");
        REQUIRE(r);
        CHECK(r->status == 200);
        const auto edited = Json::parse(r->body);
        CHECK(edited.at("fit").is_null());
        CHECK(edited.at("bd").is_number());

        const auto eval = post(c, "/evaluate",
                               {{"session", id},
                                {"partitions", {{{"name", "ward"}, {"algorithm", "ward"}, {"k", 2}},
                                                {{"name", "kmeans"}, {"algorithm", "kmeans"}, {"k", 2}, {"seed", 1}}}}},
                               200);
        CHECK(eval.at("reports").size() == 2);
        CHECK(eval.at("reports")[0].at("accuracy") == 1.0);

        const auto report = get(c, "/report?session=" + id, 200);
        CHECK(report.at("schema") == 1);
        CHECK(report.at("eq5_table").get<std::string>().find("ward") != std::string::npos);

        // Unknown sessions and malformed requests.
        get(c, "/scan?session=doesnotexist", 404);
        get(c, "/report?session=doesnotexist", 404);
        post(c, "/gmm/fit", {{"session", "doesnotexist"}, {"components", 2}}, 404);
        post(c, "/evaluate", {{"session", "doesnotexist"}, {"partitions", Json::array()}}, 404);
        r = c.Put("/gmm/params", Json{{"session", "doesnotexist"}, {"weights", {1.0}}, {"means", {0}}, {"sds", {1}}}.dump(),
                  "application/json");
        REQUIRE(r);
        CHECK(r->status == 404);
        get(c, "/jobs/job-12345", 404);
        post(c, "/scan", {{"generate", {{"kind", "nope"}, {"n", 10}}}}, 400);
        auto raw = c.Post("/scan", "{not json", "application/json");
        REQUIRE(raw);
        CHECK(raw->status == 400);
        post(c, "/evaluate", {{"session", id}, {"partitions", {{{"name", "x"}, {"labels", {1, 2, 1}}}}}}, 400);
    }

    // Sessions survive a restart.
    {
        RunningServer server(dir);
        auto c = server.client();
        const auto report = get(c, "/report?session=" + id, 200);
        CHECK(report.at("model").at("weights")[0] == doctest::Approx(0.2));
        const auto params = get(c, "/gmm/params?session=" + id, 200);
        CHECK(params.at("model") == report.at("model"));
    }
    fs::remove_all(dir);
}

TEST_CASE("HTTP scan of ingested distances") {
    const auto dir = scratch_dir("ingest");
    {
        RunningServer server(dir);
        auto c = server.client();
        const auto g = generate_dataset("two_gaussians", 30, 1, 0.3);
        const auto df = extract_distance_feature(compute_distance_matrix(g.data, Metric::euclidean()));
        const auto res = post(c, "/scan",
                              {{"distances", {{"n", 60}, {"upper", df.values}}}, {"n_boot", 100}, {"wait", true}}, 200);
        const auto& entries = res.at("result").at("scan").at("entries");
        REQUIRE(entries.size() == 1);
        CHECK(entries[0].at("metric") == "ingested");
        post(c, "/scan", {{"distances", {{"n", 5}, {"upper", {1, 2}}}}}, 400);
    }
    fs::remove_all(dir);
}
