#include "distsel/server.hpp"

#include <httplib.h>

#include <iostream>

#include "distsel/pipeline.hpp"
#include "distsel/session.hpp"

namespace distsel {

namespace {

struct HttpError : Error {
    int status;
    HttpError(int s, const std::string& what) : Error(what), status(s) {}
};

void reply(httplib::Response& res, int status, Json body) {
    res.status = status;
    res.set_content(with_schema(std::move(body)).dump(), "application/json");
}

Json parse_body(const httplib::Request& req) {
    if (req.body.empty()) {
        return Json::object();
    }
    Json j = Json::parse(req.body);
    if (!j.is_object()) {
        throw InvalidArgument("request body must be a JSON object");
    }
    return j;
}

std::string session_of(const httplib::Request& req, const Json& body) {
    if (body.contains("session") && body.at("session").is_string()) {
        return body.at("session").get<std::string>();
    }
    if (req.has_param("session")) {
        return req.get_param_value("session");
    }
    throw InvalidArgument("missing 'session'");
}

// Dataset from a request: inline values, a generator spec, or ingested distances.
void apply_dataset(SessionState& s, const Json& body) {
    const bool has_data = body.contains("data");
    const bool has_gen = body.contains("generate");
    const bool has_dist = body.contains("distances");
    if (int(has_data) + int(has_gen) + int(has_dist) > 1) {
        throw InvalidArgument("give only one of 'data', 'generate' or 'distances'");
    }
    if (!has_data && !has_gen && !has_dist) {
        if (!s.data && !s.ingested) {
            throw InvalidArgument("session has no dataset; send 'data', 'generate' or 'distances'");
        }
        return;
    }
    SessionState fresh;
    fresh.id = s.id;
    fresh.seed = s.seed;
    fresh.n_boot = s.n_boot;
    if (has_data) {
        fresh.data = data_matrix_from_json(body.at("data"));
        if (body.contains("labels")) {
            fresh.truth = labels_from_json(body.at("labels"));
        }
    } else if (has_gen) {
        const auto& g = body.at("generate");
        auto generated = generate_dataset(g.at("kind").get<std::string>(), g.at("n").get<std::size_t>(),
                                          g.value("seed", std::uint64_t{0}), g.value("shift", 0.2),
                                          g.value("variance", 0.01));
        fresh.data = std::move(generated.data);
        fresh.truth = std::move(generated.labels);
    } else {
        const auto& d = body.at("distances");
        DistanceMatrix m;
        if (d.contains("matrix")) {
            std::ostringstream csv;
            for (const auto& row : d.at("matrix")) {
                bool first = true;
                for (const auto& v : row) {
                    csv << (first ? "" : ",") << v.dump();
                    first = false;
                }
                csv << '\n';
            }
            std::istringstream in(csv.str());
            m = parse_distance_matrix(in);
        } else {
            const auto n = d.at("n").get<std::size_t>();
            const auto upper = d.at("upper").get<std::vector<double>>();
            if (n < 2 || n * (n - 1) / 2 != upper.size()) {
                throw InvalidArgument("'upper' must hold n(n-1)/2 distances");
            }
            m = DistanceMatrix(n);
            std::size_t k = 0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j, ++k) {
                    if (!(upper[k] >= 0.0)) {
                        throw InvalidArgument("distances must be nonnegative");
                    }
                    m(i, j) = m(j, i) = upper[k];
                }
            }
        }
        fresh.ingested = extract_distance_feature(m, "ingested");
        fresh.metric = "ingested";
        if (body.contains("labels")) {
            fresh.truth = labels_from_json(body.at("labels"));
        }
    }
    s = std::move(fresh);
}

FitConfig fit_config_of(const Json& body, std::uint64_t default_seed) {
    FitConfig c;
    c.seed = body.value("seed", default_seed);
    c.restarts = body.value("restarts", c.restarts);
    c.max_iter = body.value("max_iter", c.max_iter);
    c.tol = body.value("tol", c.tol);
    return c;
}

} // namespace

struct ApiServer::Impl {
    ServerConfig config;
    SessionStore store;
    JobTable jobs;
    httplib::Server http;

    explicit Impl(ServerConfig c) : config(std::move(c)), store(config.session_dir) { routes(); }

    template <typename Fn>
    httplib::Server::Handler guarded(Fn fn) {
        return [fn](const httplib::Request& req, httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const HttpError& ex) {
                reply(res, ex.status, {{"error", ex.what()}});
            } catch (const UnknownSession& ex) {
                reply(res, 404, {{"error", ex.what()}});
            } catch (const InvalidArgument& ex) {
                reply(res, 400, {{"error", ex.what()}});
            } catch (const ParseError& ex) {
                reply(res, 400, {{"error", ex.what()}});
            } catch (const Json::exception& ex) {
                reply(res, 400, {{"error", std::string("malformed JSON: ") + ex.what()}});
            } catch (const std::exception& ex) {
                reply(res, 500, {{"error", ex.what()}});
            }
        };
    }

    // Runs a job; with "wait": true the finished job is returned directly.
    void submit(httplib::Response& res, const Json& body, const std::string& kind, const std::string& session,
                std::function<Json()> work) {
        const auto id = jobs.submit(kind, session, std::move(work));
        if (body.value("wait", false)) {
            auto done = *jobs.wait(id);
            if (done.at("status") == "failed") {
                reply(res, done.at("error_code").get<int>(), {{"error", done.at("error")}, {"job", id}});
                return;
            }
            reply(res, 200, std::move(done));
            return;
        }
        reply(res, 202, *jobs.status(id));
    }

    void routes() {
        http.Post("/scan", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const Json body = parse_body(req);
            std::string id;
            if (body.contains("session") || req.has_param("session")) {
                id = session_of(req, body);
                if (!store.exists(id)) {
                    throw UnknownSession(id);
                }
            } else {
                auto created = store.create();
                created.seed = config.default_seed;
                store.save(created);
                id = created.id;
            }
            std::vector<Metric> metrics;
            for (const auto& m : body.value("metrics", Json::array({"euclidean"}))) {
                metrics.push_back(Metric::parse(m.get<std::string>()));
            }
            // Validate the dataset synchronously so malformed input is a 400, not a failed job.
            store.update(id, [&](SessionState& s) {
                s.seed = body.value("seed", s.seed);
                s.n_boot = body.value("n_boot", s.n_boot);
                apply_dataset(s, body);
                return Json();
            });
            const double alpha = body.value("alpha", 0.05);
            submit(res, body, "scan", id, [this, id, metrics, alpha] {
                return store.update(id, [&](SessionState& s) {
                    ScanConfig config;
                    config.dip = DipTestConfig{s.n_boot, s.seed};
                    config.alpha = alpha;
                    s.scan = s.ingested ? scan_distances(*s.ingested, config) : run_scan(*s.data, metrics, config);
                    return Json{{"session", s.id}, {"scan", to_json(*s.scan)}};
                });
            });
        }));

        http.Get("/scan", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto id = session_of(req, Json::object());
            reply(res, 200, store.read(id, [](const SessionState& s) {
                if (!s.scan) {
                    throw HttpError(409, "session has no scan yet");
                }
                return Json{{"session", s.id}, {"scan", to_json(*s.scan)}};
            }));
        }));

        http.Get(R"(/density/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto id = session_of(req, Json::object());
            std::string metric = req.matches[1];
            if (metric != "ingested") {
                metric = Metric::parse(metric).name();
            }
            reply(res, 200, store.read(id, [&](const SessionState& s) {
                if (!s.scan) {
                    throw HttpError(409, "session has no scan yet");
                }
                for (const auto& e : s.scan->entries) {
                    if (e.metric != metric) {
                        continue;
                    }
                    if (!e.ok) {
                        throw HttpError(422, "metric '" + metric + "' failed: " + e.error);
                    }
                    Json j = {{"session", s.id},
                              {"metric", e.metric},
                              {"dip", to_json(e.dip)},
                              {"df", {{"size", e.size}, {"min", e.min}, {"median", e.median}, {"max", e.max}}},
                              {"density", to_json(e.density)}};
                    if (!e.note.empty()) {
                        j["note"] = e.note;
                    }
                    return j;
                }
                throw HttpError(404, "metric '" + metric + "' was not scanned");
            }));
        }));

        http.Post("/gmm/fit", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const Json body = parse_body(req);
            const auto id = session_of(req, body);
            if (!store.exists(id)) {
                throw UnknownSession(id);
            }
            const auto components = body.value("components", std::size_t{2});
            if (components < 1) {
                throw InvalidArgument("components must be at least 1");
            }
            std::optional<std::string> metric;
            if (body.contains("metric")) {
                metric = body.at("metric").get<std::string>();
            }
            submit(res, body, "fit", id, [this, id, body, components, metric] {
                return store.update(id, [&](SessionState& s) {
                    if (metric) {
                        select_metric(s, *metric);
                    }
                    run_model(s, components, fit_config_of(body, s.seed));
                    Json j = model_payload(s);
                    j["session"] = s.id;
                    return j;
                });
            });
        }));

        const auto put_params = guarded([this](const httplib::Request& req, httplib::Response& res) {
            const Json body = parse_body(req);
            const auto id = session_of(req, body);
            if (!store.exists(id)) {
                throw UnknownSession(id);
            }
            auto model = gmm_model_from_json(body);
            reply(res, 200, store.update(id, [&](SessionState& s) {
                set_model(s, std::move(model));
                Json j = model_payload(s);
                j["session"] = s.id;
                return j;
            }));
        });
        http.Put("/gmm/params", put_params);

        http.Get("/gmm/params", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto id = session_of(req, Json::object());
            reply(res, 200, store.read(id, [](const SessionState& s) {
                Json j = model_payload(s);
                j["session"] = s.id;
                return j;
            }));
        }));

        http.Post("/evaluate", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const Json body = parse_body(req);
            const auto id = session_of(req, body);
            reply(res, 200, store.update(id, [&](SessionState& s) {
                std::vector<NamedPartition> parts;
                for (const auto& p : body.value("partitions", Json::array())) {
                    if (p.contains("labels")) {
                        parts.push_back({p.value("name", "ingested"), Partition{labels_from_json(p.at("labels")), "ingested"}});
                    } else {
                        const auto algorithm = p.at("algorithm").get<std::string>();
                        const auto k = p.at("k").get<std::size_t>();
                        auto part = build_partition(s, algorithm, k, p.value("seed", s.seed));
                        parts.push_back({p.value("name", algorithm), std::move(part)});
                    }
                }
                if (parts.empty()) {
                    throw InvalidArgument("no partitions to evaluate");
                }
                Json j = to_json(run_evaluate(s, parts));
                j["session"] = s.id;
                return j;
            }));
        }));

        http.Get("/report", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto id = session_of(req, Json::object());
            reply(res, 200, store.read(id, [](const SessionState& s) {
                Json j = to_json(s);
                std::vector<std::pair<std::string, Eq5Report>> named;
                for (std::size_t i = 0; i < s.reports.size(); ++i) {
                    const auto name = i < s.partitions.size() ? s.partitions[i].name : s.reports[i].source;
                    named.emplace_back(name, s.reports[i]);
                }
                j["eq5_table"] = named.empty() ? Json(nullptr) : Json(render_eq5_table(named));
                return j;
            }));
        }));

        http.Get(R"(/jobs/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            auto status = jobs.status(req.matches[1]);
            if (!status) {
                throw HttpError(404, "unknown job '" + std::string(req.matches[1]) + "'");
            }
            reply(res, 200, std::move(*status));
        }));
    }
};

ApiServer::ApiServer(ServerConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind() {
    auto& c = impl_->config;
    if (c.port == 0) {
        c.port = impl_->http.bind_to_any_port(c.host);
        if (c.port < 0) {
            throw Error("cannot bind " + c.host);
        }
    } else if (!impl_->http.bind_to_port(c.host, c.port)) {
        throw Error("cannot bind " + c.host + ":" + std::to_string(c.port));
    }
    return c.port;
}

void ApiServer::run() { impl_->http.listen_after_bind(); }

void ApiServer::stop() {
    if (impl_) {
        impl_->http.stop();
    }
}

void serve(const ServerConfig& config) {
    ApiServer server(config);
    const int port = server.bind();
    std::cerr << "serving on http://" << config.host << ":" << port << " (sessions in " << config.session_dir.string()
              << ")\n";
    server.run();
}

} // namespace distsel
