#include "ffp/service.hpp"

#include <httplib.h>

#include <atomic>
#include <condition_variable>
#include <list>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <thread>

#include "json.hpp"

#include "ffp/distance_io.hpp"
#include "ffp/error.hpp"
#include "ffp/image_io.hpp"
#include "ffp/seeds_io.hpp"
#include "ffp/segmentation.hpp"

namespace ffp {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

enum class Status { Idle, Running, Done, Failed };

const char* status_name(Status s) {
  switch (s) {
    case Status::Idle: return "idle";
    case Status::Running: return "running";
    case Status::Done: return "done";
    case Status::Failed: return "failed";
  }
  return "idle";
}

struct RunOutputs {
  std::vector<std::uint8_t> label_png;
  std::string contours_json;
  std::vector<std::uint8_t> distance_bin;
  std::string stats_json;
};

struct Session {
  std::mutex m;
  ImageBuffer image;
  std::optional<SeedSets> seeds;
  CostParams params;
  Status status = Status::Idle;
  std::string error;
  int run_counter = 0;
  std::atomic<std::size_t> accepted{0};
  std::atomic<std::size_t> total{0};
  std::shared_ptr<const RunOutputs> outputs;
  Clock::time_point last_access = Clock::now();
};

struct RunRequest {
  bool tube = false;
  CostParams params;
  SegmentOptions options;
  std::size_t n_th = 0;
};

// Throws ConfigError on anything malformed.
RunRequest parse_run_request(const std::string& body) {
  json doc = body.empty() ? json::object() : json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw ConfigError("run request must be a JSON object");
  RunRequest r;
  const std::string mode = doc.value("mode", std::string("fb"));
  if (mode == "tube") {
    r.tube = true;
  } else if (mode != "fb") {
    throw ConfigError("mode must be \"fb\" or \"tube\"");
  }
  const json p = doc.value("params", json::object());
  if (!p.is_object()) throw ConfigError("params must be an object");
  auto num = [&](const char* key, double& dst) {
    if (!p.contains(key)) return;
    if (!p[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
    dst = p[key].get<double>();
  };
  num("alpha_f", r.params.alpha_f);
  num("alpha_b", r.params.alpha_b);
  num("beta_s", r.params.beta_s);
  num("beta_d", r.params.beta_d);
  num("sigma", r.params.sigma);
  num("epsilon", r.params.epsilon);
  if (p.contains("mu") && !(p["mu"].is_string() && p["mu"] == "auto")) {
    if (!p["mu"].is_number()) throw ConfigError("mu must be a number or \"auto\"");
    r.params.mu = p["mu"].get<double>();
  }
  if (p.contains("colorspace")) {
    const json& cs = p["colorspace"];
    if (cs == "lab") {
      r.options.colorspace = ColorSpace::Lab;
    } else if (cs != "rgb") {
      throw ConfigError("colorspace must be \"rgb\" or \"lab\"");
    }
  }
  r.params.validate();
  if (r.tube) {
    if (!doc.contains("n_th") || !doc["n_th"].is_number_integer() || doc["n_th"].get<long long>() < 1) {
      throw ConfigError("tube mode needs a positive integer n_th");
    }
    r.n_th = doc["n_th"].get<std::size_t>();
    if (doc.contains("t_h") && !(doc["t_h"].is_string() && doc["t_h"] == "auto")) {
      if (!doc["t_h"].is_number()) throw ConfigError("t_h must be a number or \"auto\"");
      r.options.t_h = doc["t_h"].get<double>();
    }
  }
  return r;
}

std::string random_id() {
  static std::mutex m;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(m);
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return buf;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& msg) {
  send_json(res, status, json{{"error", msg}});
}

}  // namespace

struct SegmentationService::Impl {
  ServiceConfig config;
  httplib::Server server;
  mutable std::mutex sessions_mutex;
  std::map<std::string, std::shared_ptr<Session>> sessions;

  std::mutex runs_mutex;
  std::condition_variable runs_cv;
  struct Worker {
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> finished;
  };
  std::list<Worker> runs;
  std::size_t active_runs = 0;

  explicit Impl(ServiceConfig c) : config(std::move(c)) { routes(); }

  ~Impl() {
    server.stop();
    join_runs();
  }

  void join_runs() {
    std::list<Worker> all;
    {
      std::lock_guard lock(runs_mutex);
      all.swap(runs);
    }
    for (auto& w : all) {
      if (w.thread.joinable()) w.thread.join();
    }
  }

  void expire_idle() {
    const auto now = Clock::now();
    std::lock_guard lock(sessions_mutex);
    for (auto it = sessions.begin(); it != sessions.end();) {
      Session& s = *it->second;
      std::unique_lock sl(s.m, std::try_to_lock);
      if (sl.owns_lock() && s.status != Status::Running && now - s.last_access > config.idle_timeout) {
        sl.unlock();
        it = sessions.erase(it);
      } else {
        ++it;
      }
    }
  }

  std::shared_ptr<Session> find(const std::string& id) {
    expire_idle();
    std::lock_guard lock(sessions_mutex);
    auto it = sessions.find(id);
    if (it == sessions.end()) return nullptr;
    std::lock_guard sl(it->second->m);
    it->second->last_access = Clock::now();
    return it->second;
  }

  void start_run(std::shared_ptr<Session> s, ImageBuffer image, SeedSets seeds, RunRequest req) {
    std::lock_guard lock(runs_mutex);
    for (auto it = runs.begin(); it != runs.end();) {
      if (*it->finished) {
        it->thread.join();
        it = runs.erase(it);
      } else {
        ++it;
      }
    }
    ++active_runs;
    auto finished = std::make_shared<std::atomic<bool>>(false);
    std::thread t([this, finished, s = std::move(s), image = std::move(image), seeds = std::move(seeds),
                       req = std::move(req)]() mutable {
      req.options.progress = [&s](std::size_t accepted, std::size_t) { s->accepted = accepted; };
      std::shared_ptr<RunOutputs> out;
      std::string error;
      try {
        const SegmentationResult r = req.tube ? segment_tube(image, seeds, req.params, req.n_th, req.options)
                                              : segment_fb(image, seeds, req.params, req.options);
        out = std::make_shared<RunOutputs>();
        out->label_png = encode_label_png(r.label_map);
        out->contours_json = contours_to_json(r.contours);
        out->distance_bin = encode_distance_map(r.distance_map);
        out->stats_json = stats_to_json(r.stats);
        s->accepted = r.stats.accepted_count;
      } catch (const std::exception& e) {
        error = e.what();
      }
      {
        std::lock_guard sl(s->m);
        if (out) {
          s->outputs = std::move(out);
          s->status = Status::Done;
          s->error.clear();
        } else {
          s->status = Status::Failed;
          s->error = error;
        }
        s->last_access = Clock::now();
      }
      std::lock_guard rl(runs_mutex);
      --active_runs;
      *finished = true;
      runs_cv.notify_all();
    });
    runs.push_back({std::move(t), std::move(finished)});
  }

  void routes() {
    server.set_payload_max_length(config.max_upload_bytes);
    if (!config.static_dir.empty()) server.set_mount_point("/", config.static_dir);

    server.Post("/api/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      expire_idle();
      std::string bytes;
      if (req.is_multipart_form_data()) {
        if (req.has_file("image")) {
          bytes = req.get_file_value("image").content;
        } else if (!req.files.empty()) {
          bytes = req.files.begin()->second.content;
        }
      } else {
        bytes = req.body;
      }
      if (bytes.empty()) return send_error(res, 422, "missing image upload");
      auto s = std::make_shared<Session>();
      try {
        s->image = decode_image(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(bytes.data()),
                                                              bytes.size()));
      } catch (const std::exception& e) {
        return send_error(res, 422, e.what());
      }
      const std::string id = random_id();
      const int w = s->image.width(), h = s->image.height();
      {
        std::lock_guard lock(sessions_mutex);
        sessions[id] = s;
      }
      send_json(res, 201, json{{"id", id}, {"width", w}, {"height", h}});
    });

    server.Put(R"(/api/sessions/([0-9a-f]+)/seeds)", [this](const httplib::Request& req, httplib::Response& res) {
      auto s = find(req.matches[1]);
      if (!s) return send_error(res, 404, "unknown session");
      std::lock_guard sl(s->m);
      try {
        s->seeds = parse_seeds(req.body, s->image.grid());
      } catch (const std::exception& e) {
        return send_error(res, 422, e.what());
      }
      res.status = 204;
    });

    server.Get(R"(/api/sessions/([0-9a-f]+)/seeds)", [this](const httplib::Request& req, httplib::Response& res) {
      auto s = find(req.matches[1]);
      if (!s) return send_error(res, 404, "unknown session");
      std::lock_guard sl(s->m);
      res.set_content(s->seeds ? seeds_to_json(*s->seeds) : std::string(R"({"sets":[]})"), "application/json");
    });

    server.Post(R"(/api/sessions/([0-9a-f]+)/run)", [this](const httplib::Request& req, httplib::Response& res) {
      auto s = find(req.matches[1]);
      if (!s) return send_error(res, 404, "unknown session");
      RunRequest run;
      try {
        run = parse_run_request(req.body);
      } catch (const std::exception& e) {
        return send_error(res, 422, e.what());
      }
      std::unique_lock sl(s->m);
      if (s->status == Status::Running) return send_error(res, 409, "a run is already in flight");
      if (!s->seeds || s->seeds->empty()) return send_error(res, 422, "no seeds uploaded");
      if (run.tube && s->seeds->set_count() != 1) return send_error(res, 422, "tube mode needs exactly one seed set");
      if (!run.tube && s->seeds->set_count() < 2) return send_error(res, 422, "fb mode needs at least two seed sets");
      if (run.tube && run.n_th < s->seeds->point_count()) {
        return send_error(res, 422, "n_th is smaller than the number of seed points");
      }
      s->status = Status::Running;
      s->params = run.params;
      s->accepted = 0;
      const std::size_t n = s->image.grid().size();
      s->total = run.tube ? std::min(run.n_th, n) : n;
      const int run_id = ++s->run_counter;
      ImageBuffer image = s->image;
      SeedSets seeds = *s->seeds;
      sl.unlock();
      start_run(s, std::move(image), std::move(seeds), std::move(run));
      send_json(res, 202, json{{"run_id", run_id}});
    });

    server.Get(R"(/api/sessions/([0-9a-f]+)/progress)", [this](const httplib::Request& req, httplib::Response& res) {
      auto s = find(req.matches[1]);
      if (!s) return send_error(res, 404, "unknown session");
      std::lock_guard sl(s->m);
      json body{{"status", status_name(s->status)}, {"accepted_count", s->accepted.load()}, {"total", s->total.load()}};
      if (s->status == Status::Failed) body["error"] = s->error;
      send_json(res, 200, body);
    });

    auto result_route = [this](const char* pattern, auto pick, const char* mime) {
      server.Get(pattern, [this, pick, mime](const httplib::Request& req, httplib::Response& res) {
        auto s = find(req.matches[1]);
        if (!s) return send_error(res, 404, "unknown session");
        std::shared_ptr<const RunOutputs> out;
        {
          std::lock_guard sl(s->m);
          out = s->outputs;
        }
        if (!out) return send_error(res, 404, "no finished run");
        pick(*out, res, mime);
      });
    };
    result_route(R"(/api/sessions/([0-9a-f]+)/label\.png)", [](const RunOutputs& o, httplib::Response& res, const char* mime) {
      res.set_content(reinterpret_cast<const char*>(o.label_png.data()), o.label_png.size(), mime);
    }, "image/png");
    result_route(R"(/api/sessions/([0-9a-f]+)/contours\.json)", [](const RunOutputs& o, httplib::Response& res, const char* mime) {
      res.set_content(o.contours_json, mime);
    }, "application/json");
    result_route(R"(/api/sessions/([0-9a-f]+)/distance\.bin)", [](const RunOutputs& o, httplib::Response& res, const char* mime) {
      res.set_content(reinterpret_cast<const char*>(o.distance_bin.data()), o.distance_bin.size(), mime);
    }, "application/octet-stream");
    result_route(R"(/api/sessions/([0-9a-f]+)/stats\.json)", [](const RunOutputs& o, httplib::Response& res, const char* mime) {
      res.set_content(o.stats_json, mime);
    }, "application/json");

    server.Delete(R"(/api/sessions/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(sessions_mutex);
      auto it = sessions.find(req.matches[1]);
      if (it == sessions.end()) return send_error(res, 404, "unknown session");
      sessions.erase(it);
      res.status = 204;
    });
  }
};

SegmentationService::SegmentationService(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

SegmentationService::~SegmentationService() = default;

int SegmentationService::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool SegmentationService::listen() { return impl_->server.listen_after_bind(); }

void SegmentationService::stop() { impl_->server.stop(); }

void SegmentationService::wait_for_runs() {
  std::unique_lock lock(impl_->runs_mutex);
  impl_->runs_cv.wait(lock, [this] { return impl_->active_runs == 0; });
}

std::size_t SegmentationService::session_count() const {
  std::lock_guard lock(impl_->sessions_mutex);
  return impl_->sessions.size();
}

}  // namespace ffp
