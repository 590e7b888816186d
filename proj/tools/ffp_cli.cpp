#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "ffp/distance_io.hpp"
#include "ffp/error.hpp"
#include "ffp/fixtures.hpp"
#include "ffp/image_io.hpp"
#include "ffp/metric.hpp"
#include "ffp/seeds_io.hpp"
#include "ffp/segmentation.hpp"
#include "ffp/service.hpp"

namespace {

using nlohmann::json;

struct CommonFlags {
  ffp::CostParams params;
  std::string image;
  std::string colorspace = "rgb";
};

void add_param_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--image", f.image, "Input image (PNG, PGM or PPM)")->required();
  cmd->add_option("--alpha-f", f.params.alpha_f, "Forward cost exponent")->capture_default_str();
  cmd->add_option("--alpha-b", f.params.alpha_b, "Backward cost exponent")->capture_default_str();
  cmd->add_option("--beta-s", f.params.beta_s, "Static potential weight")->capture_default_str();
  cmd->add_option("--beta-d", f.params.beta_d, "Dynamic potential weight")->capture_default_str();
  cmd->add_option("--sigma", f.params.sigma, "Gaussian scale of the edge saliency")->capture_default_str();
  cmd->add_option("--epsilon", f.params.epsilon, "GVF smoothness weight")->capture_default_str();
  cmd->add_option("--colorspace", f.colorspace, "Color space of the edge saliency")
      ->check(CLI::IsMember({"rgb", "lab"}))
      ->capture_default_str();
}

struct OutputFlags {
  std::string seeds, out_label, out_dist, out_contours, out_stats;
};

void add_output_flags(CLI::App* cmd, OutputFlags& o) {
  cmd->add_option("--seeds", o.seeds, "Seed JSON file")->required();
  cmd->add_option("--out-label", o.out_label, "Label map PNG");
  cmd->add_option("--out-dist", o.out_dist, "Distance map (FFD1)");
  cmd->add_option("--out-contours", o.out_contours, "Contours JSON");
  cmd->add_option("--out-stats", o.out_stats, "Run statistics JSON");
}

std::optional<double> parse_auto(const std::string& text, const char* name) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(name);
    return v;
  } catch (const std::logic_error&) {
    throw ffp::ConfigError(std::string(name) + " must be a number or \"auto\"");
  }
}

void write_outputs(const ffp::SegmentationResult& r, const OutputFlags& o) {
  if (!o.out_label.empty()) ffp::write_label_png(r.label_map, o.out_label);
  if (!o.out_dist.empty()) ffp::write_distance_map(r.distance_map, o.out_dist);
  if (!o.out_contours.empty()) ffp::write_file(o.out_contours, ffp::contours_to_json(r.contours));
  if (!o.out_stats.empty()) ffp::write_file(o.out_stats, ffp::stats_to_json(r.stats));
  for (const auto& w : r.stats.warnings) std::cerr << "warning: " << w << "\n";
}

ffp::SegmentOptions options_for(const CommonFlags& f) {
  ffp::SegmentOptions opt;
  opt.colorspace = f.colorspace == "lab" ? ffp::ColorSpace::Lab : ffp::ColorSpace::Rgb;
  return opt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randers geodesic fronts propagation: segmentation and metric inspection"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  CommonFlags fb_flags;
  OutputFlags fb_out;
  std::string feature_map;
  auto* fb = app.add_subcommand("segment-fb", "Foreground/background segmentation by geodesic Voronoi regions");
  add_param_flags(fb, fb_flags);
  add_output_flags(fb, fb_out);
  fb->add_option("--feature-map", feature_map, "Gray image used as feature map instead of the colors");

  CommonFlags tube_flags;
  OutputFlags tube_out;
  std::size_t n_th = 0;
  std::string mu_text = "auto", t_h_text = "auto";
  auto* tube = app.add_subcommand("segment-tube", "Tubular structure segmentation by a truncated front");
  add_param_flags(tube, tube_flags);
  add_output_flags(tube, tube_out);
  tube->add_option("--n-th", n_th, "Number of points to accept")->required()->check(CLI::PositiveNumber);
  tube->add_option("--mu", mu_text, "Tube tensor enhancement, number or auto")->capture_default_str();
  tube->add_option("--t-h", t_h_text, "Contour distance level, number or auto")->capture_default_str();

  CommonFlags info_flags;
  std::string point_text, info_out, info_mode = "fb", info_mu = "auto";
  int samples = 72;
  auto* info = app.add_subcommand("metric-info", "Control set, anisotropy and directional costs at one pixel");
  add_param_flags(info, info_flags);
  info->add_option("--point", point_text, "Pixel as X,Y")->required();
  info->add_option("--samples", samples, "Number of directions")->capture_default_str()->check(CLI::Range(8, 100000));
  info->add_option("--out", info_out, "Output JSON (stdout when omitted)");
  info->add_option("--mode", info_mode, "Metric flavour")->check(CLI::IsMember({"fb", "tube"}))->capture_default_str();
  info->add_option("--mu", info_mu, "Tube tensor enhancement, number or auto")->capture_default_str();

  CommonFlags gvf_flags;
  std::string gvf_out;
  auto* gvf_cmd = app.add_subcommand("gvf", "Dump the gradient vector flow field (FFV1)");
  add_param_flags(gvf_cmd, gvf_flags);
  gvf_cmd->add_option("--out", gvf_out, "Output file")->required();

  int port = 8080;
  if (const char* env = std::getenv("FFP_PORT")) {
    try {
      port = std::stoi(env);
    } catch (const std::exception&) {
      std::cerr << "error: FFP_PORT is not a number\n";
      return 1;
    }
  }
  std::string static_dir, host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  serve->add_option("--port", port, "Port (overrides FFP_PORT)")->check(CLI::Range(0, 65535))->capture_default_str();
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--static", static_dir, "Directory of static UI assets")->check(CLI::ExistingDirectory);

  std::string fixture_kind, fixture_image, fixture_seeds, fixture_truth;
  auto* fixture = app.add_subcommand("fixture", "Write a synthetic test image with seeds");
  fixture->add_option("--kind", fixture_kind, "disk, bar or spiral")
      ->required()
      ->check(CLI::IsMember({"disk", "bar", "spiral"}));
  fixture->add_option("--out-image", fixture_image, "Image (PGM)")->required();
  fixture->add_option("--out-seeds", fixture_seeds, "Seed JSON")->required();
  fixture->add_option("--out-truth", fixture_truth, "Ground-truth mask as label PNG");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*fb) {
      const ffp::ImageBuffer img = ffp::load_image(fb_flags.image);
      const ffp::SeedSets seeds = ffp::parse_seeds(ffp::load_text(fb_out.seeds), img.grid());
      ffp::SegmentOptions opt = options_for(fb_flags);
      if (!feature_map.empty()) {
        const ffp::ImageBuffer fm = ffp::load_image(feature_map);
        if (!(fm.grid() == img.grid())) throw ffp::DataError("feature map size differs from the image");
        opt.feature_map = fm.gray();
      }
      write_outputs(ffp::segment_fb(img, seeds, fb_flags.params, opt), fb_out);
    } else if (*tube) {
      tube_flags.params.mu = parse_auto(mu_text, "--mu");
      ffp::SegmentOptions opt = options_for(tube_flags);
      opt.t_h = parse_auto(t_h_text, "--t-h");
      const ffp::ImageBuffer img = ffp::load_image(tube_flags.image);
      const ffp::SeedSets seeds = ffp::parse_seeds(ffp::load_text(tube_out.seeds), img.grid());
      write_outputs(ffp::segment_tube(img, seeds, tube_flags.params, n_th, opt), tube_out);
    } else if (*info) {
      int px = 0, py = 0;
      char comma = 0;
      std::istringstream ps(point_text);
      if (!(ps >> px >> comma >> py) || comma != ',' || !ps.eof()) throw ffp::ConfigError("--point must be X,Y");
      info_flags.params.mu = parse_auto(info_mu, "--mu");
      const ffp::ImageBuffer img = ffp::load_image(info_flags.image);
      if (!img.grid().contains({px, py})) throw ffp::DataError("--point lies outside the image");
      const ffp::ColorSpace cs = options_for(info_flags).colorspace;
      const ffp::EdgeFeatures ef = ffp::compute_edge_features(img, info_flags.params, cs);
      const ffp::RandersMetricField metric =
          info_mode == "tube" ? ffp::build_tube_metric(ef.rho, ffp::normalized_gray(img), ef.g.field, info_flags.params)
                              : ffp::build_fb_metric(ef.rho, ef.g.field, info_flags.params);
      const std::size_t i = img.grid().index({px, py});
      json records = json::array();
      for (const auto& d : ffp::directional_costs(metric, {px, py}, samples)) {
        records.push_back({{"angle", d.angle}, {"cost", d.cost}, {"ball_point", {d.ball_point.x, d.ball_point.y}}});
      }
      json control = json::array();
      for (const auto& b : ffp::control_set(metric, {px, py}, samples)) control.push_back({b.x, b.y});
      const ffp::Vec2 g = metric.sources->g[i];
      const json doc{{"point", {px, py}},
                     {"g", {g.x, g.y}},
                     {"psi_f", metric.sources->psi_f[i]},
                     {"psi_b", metric.sources->psi_b[i]},
                     {"potential", metric.potential(i)},
                     {"kappa_local", ffp::local_anisotropy(metric, i)},
                     {"kappa", ffp::anisotropy_ratio(metric)},
                     {"control_set", control},
                     {"directional_costs", records}};
      if (info_out.empty()) {
        std::cout << doc.dump(2) << "\n";
      } else {
        ffp::write_file(info_out, doc.dump(2) + "\n");
      }
    } else if (*gvf_cmd) {
      const ffp::ImageBuffer img = ffp::load_image(gvf_flags.image);
      const ffp::EdgeFeatures ef =
          ffp::compute_edge_features(img, gvf_flags.params, options_for(gvf_flags).colorspace);
      if (!ef.gvf.converged) std::cerr << "warning: gradient vector flow did not reach its tolerance\n";
      ffp::write_file(gvf_out, ffp::encode_vector_field(ef.gvf.field));
    } else if (*serve) {
      ffp::ServiceConfig cfg;
      cfg.static_dir = static_dir;
      ffp::SegmentationService service(cfg);
      const int bound = service.bind(host, port);
      if (bound < 0) throw ffp::DataError("cannot bind " + host + ":" + std::to_string(port));
      std::cerr << "listening on http://" << host << ":" << bound << "\n";
      service.listen();
    } else if (*fixture) {
      const ffp::Fixture f = fixture_kind == "disk"  ? ffp::disk_fixture()
                             : fixture_kind == "bar" ? ffp::bar_fixture()
                                                     : ffp::spiral_fixture();
      ffp::write_file(fixture_image, ffp::encode_pnm(f.image));
      ffp::write_file(fixture_seeds, ffp::seeds_to_json(f.seed_sets()) + "\n");
      if (!fixture_truth.empty()) {
        ffp::Field<int> labels(f.truth.grid());
        for (std::size_t k = 0; k < labels.size(); ++k) labels[k] = f.truth[k];
        ffp::write_label_png(labels, fixture_truth);
      }
      std::cout << "n_th " << f.n_th << "\n";
    }
  } catch (const ffp::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ffp::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
