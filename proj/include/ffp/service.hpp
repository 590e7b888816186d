#pragma once

// JSON-over-HTTP session service: upload an image, put seeds, run a
// segmentation in the background, poll progress, fetch results.

#include <chrono>
#include <memory>
#include <string>

namespace ffp {

struct ServiceConfig {
  std::string static_dir;  // served at "/" when non-empty
  std::chrono::seconds idle_timeout{3600};
  std::size_t max_upload_bytes = 64u << 20;
};

class SegmentationService {
 public:
  explicit SegmentationService(ServiceConfig config = {});
  ~SegmentationService();
  SegmentationService(const SegmentationService&) = delete;
  SegmentationService& operator=(const SegmentationService&) = delete;

  /// Binds the listening socket; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  bool listen();
  void stop();
  /// Blocks until every background run has finished.
  void wait_for_runs();

  std::size_t session_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ffp
