// adaptifont command-line interface.
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "adaptifont/analysis/report.hpp"
#include "adaptifont/error.hpp"
#include "adaptifont/fontgen/svg.hpp"
#include "adaptifont/fontspace/basis.hpp"
#include "adaptifont/fontspace/cross_validation.hpp"
#include "adaptifont/fontspace/synthetic_corpus.hpp"
#include "adaptifont/service/api.hpp"
#include "adaptifont/session/replay.hpp"
#include "adaptifont/session/simulate.hpp"

// after Eigen: <resolv.h> defines _res
#include <httplib.h>

namespace fs = std::filesystem;
using namespace adaptifont;

namespace {

void write_lines(const fs::path& path, const std::vector<Json>& docs) {
  std::string text;
  for (const auto& d : docs) text += d.dump() + "\n";
  write_text_file(path, text);
}

void emit(const std::string& out, const Json& doc) {
  if (out.empty() || out == "-") {
    std::cout << doc.dump(2) << "\n";
  } else {
    write_json_file(out, doc, 2);
  }
}

fontspace::CorpusMatrix load_matrix(const std::string& dir, double alignment_scale) {
  return fontspace::assemble_matrix(fontspace::ingest_corpus_dir(dir), alignment_scale);
}

session::SessionConfig load_session_config(const std::string& config_path, const std::string& corpus_path,
                                           std::uint64_t seed, int n_trials) {
  Json doc = Json::object();
  fs::path base;
  if (!config_path.empty()) {
    doc = read_json_file(config_path);
    base = fs::path(config_path).parent_path();
  }
  session::SessionConfig cfg = session::session_config_from_json(doc, base);
  if (!corpus_path.empty()) cfg.texts = session::load_corpus(corpus_path);
  if (cfg.texts.empty()) cfg.texts = session::demo_corpus(std::max(95, n_trials > 0 ? n_trials : cfg.n_trials), 0);
  cfg.seed = seed;
  if (n_trials > 0) cfg.n_trials = n_trials;
  return cfg;
}

std::shared_ptr<const fontspace::FontBasis> maybe_basis(const std::string& path) {
  if (path.empty()) return nullptr;
  return std::make_shared<const fontspace::FontBasis>(fontspace::load_basis(path));
}

httplib::Server* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptifont: learned font space, font synthesis and reading-speed optimization"};
  app.require_subcommand(1);

  // demo-corpus
  auto* demo = app.add_subcommand("demo-corpus", "Write a synthetic atlas corpus and a text corpus");
  std::string demo_out;
  std::uint64_t demo_seed = 1;
  int demo_fonts = 25, demo_texts = 95;
  demo->add_option("--out", demo_out, "Output directory")->required();
  demo->add_option("--seed", demo_seed, "Style seed");
  demo->add_option("--fonts", demo_fonts, "Number of fonts");
  demo->add_option("--texts", demo_texts, "Number of texts");

  // learn
  auto* learn = app.add_subcommand("learn", "Learn a font space from an atlas directory");
  std::string learn_atlases, learn_out;
  int learn_k = 3, learn_iter = 5000;
  double learn_tol = 1e-6, learn_scale = 0, learn_mean = 4.5;
  std::uint64_t learn_seed = 0;
  learn->add_option("--atlases", learn_atlases, "Directory of .pgm + .json atlases")->required();
  learn->add_option("--out", learn_out, "Basis JSON")->required();
  learn->add_option("--k", learn_k, "Components");
  learn->add_option("--max-iter", learn_iter, "NMF iteration cap");
  learn->add_option("--tol", learn_tol, "Relative objective change to stop");
  learn->add_option("--seed", learn_seed, "Initialization seed");
  learn->add_option("--alignment-scale", learn_scale, "Divisor for metrics (default units per em)");
  learn->add_option("--coordinate-mean", learn_mean, "Mean training coordinate per component (<= 0 keeps raw)");

  // cv
  auto* cv = app.add_subcommand("cv", "Cross-validate the number of components");
  std::string cv_atlases, cv_out;
  int cv_kmin = 1, cv_kmax = 5, cv_holdouts = 10, cv_iter = 5000;
  double cv_tol = 1e-6;
  std::uint64_t cv_seed = 0;
  cv->add_option("--atlases", cv_atlases, "Directory of atlases")->required();
  cv->add_option("--out", cv_out, "Report JSON (default stdout)");
  cv->add_option("--k-min", cv_kmin);
  cv->add_option("--k-max", cv_kmax);
  cv->add_option("--holdouts", cv_holdouts);
  cv->add_option("--max-iter", cv_iter);
  cv->add_option("--tol", cv_tol);
  cv->add_option("--seed", cv_seed);

  // synth
  auto* synth = app.add_subcommand("synth", "Build an SVG font at given coordinates");
  std::string synth_coords, synth_basis, synth_out, synth_name;
  bool synth_force = false;
  double synth_threshold = 0.5;
  synth->add_option("--coords", synth_coords, "a,b,c")->required();
  synth->add_option("--basis", synth_basis, "Basis JSON")->required();
  synth->add_option("--out", synth_out, "SVG output")->required();
  synth->add_option("--name", synth_name, "Font name");
  synth->add_option("--threshold", synth_threshold, "Binarization threshold");
  synth->add_flag("--force", synth_force, "Allow coordinates outside the feasible region");

  // interpolate
  auto* interp = app.add_subcommand("interpolate", "Fonts along the segment between two coordinates");
  std::string interp_from, interp_to, interp_basis, interp_dir;
  int interp_steps = 5;
  interp->add_option("--from", interp_from, "a,b,c")->required();
  interp->add_option("--to", interp_to, "a,b,c")->required();
  interp->add_option("--steps", interp_steps, "Number of points including both ends");
  interp->add_option("--basis", interp_basis, "Basis JSON; with --out-dir writes one SVG per step");
  interp->add_option("--out-dir", interp_dir, "Directory for SVG fonts");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  int serve_port = 8080;
  std::string serve_host = "127.0.0.1", serve_basis, serve_corpus, serve_config, serve_data;
  std::uint64_t serve_seed = 0;
  serve->add_option("--port", serve_port, "TCP port");
  serve->add_option("--host", serve_host, "Bind address");
  serve->add_option("--basis", serve_basis, "Basis JSON")->required();
  serve->add_option("--corpus", serve_corpus, "Text corpus JSON");
  serve->add_option("--config", serve_config, "Session config template JSON");
  serve->add_option("--data-dir", serve_data, "Persistence root (default $ADAPTIFONT_DATA_DIR)");
  serve->add_option("--seed", serve_seed, "Seed for session ids and default session seeds");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a full session against a simulated reader");
  std::uint64_t sim_seed = 0;
  std::string sim_corpus, sim_config, sim_oracle, sim_basis, sim_out;
  int sim_trials = 0;
  sim->add_option("--seed", sim_seed, "Session seed");
  sim->add_option("--corpus", sim_corpus, "Text corpus JSON (default: demo corpus)");
  sim->add_option("--config", sim_config, "Session config JSON");
  sim->add_option("--oracle", sim_oracle, "Oracle config JSON");
  sim->add_option("--basis", sim_basis, "Basis JSON; fonts are built for every trial when given");
  sim->add_option("--n-trials", sim_trials, "Override n_trials");
  sim->add_option("--out", sim_out, "Trial log (JSON lines)")->required();

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Cluster a trial log and report the best fonts");
  std::vector<std::string> an_logs;
  std::string an_out, an_basis, an_fonts;
  int an_minpts = 5;
  double an_xi = 0.05, an_maxeps = analysis::kInf;
  bool an_raw = false, an_resets = false, an_leaf = false;
  analyze->add_option("--log", an_logs, "Trial log(s)")->required();
  analyze->add_option("--out", an_out, "Report JSON (default stdout)");
  analyze->add_option("--basis", an_basis, "Basis JSON for centroid fonts");
  analyze->add_option("--fonts-dir", an_fonts, "Where centroid fonts are written");
  analyze->add_option("--min-pts", an_minpts);
  analyze->add_option("--xi", an_xi);
  analyze->add_option("--max-eps", an_maxeps);
  analyze->add_flag("--raw", an_raw, "Cluster in raw units instead of z-scores");
  analyze->add_flag("--include-resets", an_resets, "Include 0-wpm reset records");
  analyze->add_flag("--leaf-labels", an_leaf, "Label leaf clusters first (scikit-learn style)");

  // trace
  auto* trace = app.add_subcommand("trace", "Replay the optimizer over a trial log");
  std::string trace_log, trace_out;
  trace->add_option("--log", trace_log, "Trial log")->required();
  trace->add_option("--out", trace_out, "Optimizer trace (JSON lines)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*demo) {
      fontspace::SyntheticCorpusOptions o;
      o.seed = demo_seed;
      o.n_fonts = demo_fonts;
      const fs::path dir = demo_out;
      fs::create_directories(dir / "atlases");
      const auto atlases = fontspace::synthetic_corpus(o);
      for (std::size_t i = 0; i < atlases.size(); ++i) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "font%02zu", i);
        fontspace::write_atlas(dir / "atlases", stem, atlases[i]);
      }
      write_json_file(dir / "corpus.json", session::corpus_to_json(session::demo_corpus(demo_texts, demo_seed)), 2);
      std::cout << "wrote " << atlases.size() << " atlases and " << demo_texts << " texts to " << dir << "\n";
    } else if (*learn) {
      const auto corpus = load_matrix(learn_atlases, learn_scale);
      fontspace::LearnOptions o;
      o.k = learn_k;
      o.nmf.max_iter = learn_iter;
      o.nmf.tol = learn_tol;
      o.nmf.seed = learn_seed;
      o.coordinate_mean = learn_mean;
      const auto basis = fontspace::learn_font_space(corpus, o);
      fontspace::save_basis(learn_out, basis);
      std::cout << "fonts " << corpus.X.rows() << ", D " << corpus.X.cols() << ", k " << basis.k() << "\n";
      for (Eigen::Index i = 0; i < basis.coords.rows(); ++i) {
        std::cout << basis.font_names[static_cast<std::size_t>(i)] << " "
                  << fontgen::format_coordinates(fontgen::FontCoordinates(basis.coords.row(i).transpose().eval()))
                  << "\n";
      }
    } else if (*cv) {
      const auto corpus = load_matrix(cv_atlases, 0);
      fontspace::CvOptions o;
      o.k_min = cv_kmin;
      o.k_max = cv_kmax;
      o.n_holdouts = cv_holdouts;
      o.seed = cv_seed;
      o.nmf.max_iter = cv_iter;
      o.nmf.tol = cv_tol;
      const auto rep = fontspace::cross_validate(corpus.X, o);
      emit(cv_out, fontspace::cv_report_to_json(rep));
      if (!cv_out.empty()) std::cout << "best k " << rep.best_k() << "\n";
    } else if (*synth) {
      const auto c = fontgen::parse_coordinates(synth_coords);
      fontgen::BuildOptions o;
      o.force = synth_force;
      o.threshold = synth_threshold;
      o.name = synth_name;
      if (!o.region.contains(c) && !synth_force) {
        std::cerr << "error: coordinates " << fontgen::format_coordinates(c)
                  << " are outside the feasible region (0 <= c_i <= 13, 7 <= sum <= 20); use --force\n";
        return 3;
      }
      const auto basis = fontspace::load_basis(synth_basis);
      write_text_file(synth_out, fontgen::emit_svg_font(fontgen::build_font(c, basis, o)));
    } else if (*interp) {
      if (interp_steps < 2) throw Error(ErrorCode::kInvalidArgument, "--steps must be >= 2");
      const auto a = fontgen::parse_coordinates(interp_from);
      const auto b = fontgen::parse_coordinates(interp_to);
      std::optional<fontspace::FontBasis> basis;
      if (!interp_basis.empty() && !interp_dir.empty()) {
        basis = fontspace::load_basis(interp_basis);
        fs::create_directories(interp_dir);
      }
      for (int i = 0; i < interp_steps; ++i) {
        const double t = static_cast<double>(i) / (interp_steps - 1);
        const auto c = fontgen::interpolate(a, b, t);
        std::cout << t << " " << fontgen::format_coordinates(c) << "\n";
        if (basis) {
          fontgen::BuildOptions o;
          o.force = true;
          char name[32];
          std::snprintf(name, sizeof name, "step%02d.svg", i);
          write_text_file(fs::path(interp_dir) / name, fontgen::emit_svg_font(fontgen::build_font(c, *basis, o)));
        }
      }
    } else if (*serve) {
      service::ServiceConfig sc;
      if (serve_data.empty()) {
        if (const char* env = std::getenv("ADAPTIFONT_DATA_DIR")) serve_data = env;
      }
      sc.data_dir = serve_data;
      sc.seed = serve_seed;
      sc.basis = maybe_basis(serve_basis);
      sc.default_config = serve_config.empty() ? Json::object() : read_json_file(serve_config);
      if (!serve_corpus.empty()) {
        sc.default_config["texts"] = session::corpus_to_json(session::load_corpus(serve_corpus));
      } else if (!sc.default_config.contains("texts") && !sc.default_config.contains("corpus")) {
        sc.default_config["texts"] = session::corpus_to_json(session::demo_corpus(95, serve_seed));
      }
      service::Api api(sc);
      const int recovered = api.recover_sessions();
      httplib::Server server;
      api.bind(server);
      if (!server.bind_to_port(serve_host, serve_port)) {
        std::cerr << "error: cannot bind " << serve_host << ":" << serve_port << "\n";
        return 4;
      }
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "listening on " << serve_host << ":" << serve_port << " (" << recovered
                << " sessions recovered)" << std::endl;
      server.listen_after_bind();
    } else if (*sim) {
      auto cfg = load_session_config(sim_config, sim_corpus, sim_seed, sim_trials);
      session::OracleConfig oracle;
      if (!sim_oracle.empty()) oracle = session::oracle_config_from_json(read_json_file(sim_oracle));
      const auto res = session::simulate_session(cfg, oracle, maybe_basis(sim_basis));
      write_lines(sim_out, res.events);
      double best = 0;
      for (const auto& r : res.results) best = std::max(best, r.wpm);
      std::cout << "trials " << res.results.size() << ", resets " << res.resets << ", best wpm " << best << "\n";
    } else if (*analyze) {
      analysis::ClusterOptions o;
      o.min_pts = an_minpts;
      o.xi = an_xi;
      o.max_eps = an_maxeps;
      o.standardize = !an_raw;
      o.significant_cut = !an_leaf;
      std::shared_ptr<const fontspace::FontBasis> basis = maybe_basis(an_basis);
      Json out = Json::object();
      Json per_log = Json::array();
      std::vector<fontgen::FontCoordinates> best_centroids;
      for (std::size_t li = 0; li < an_logs.size(); ++li) {
        const auto points = analysis::points_from_log(read_json_lines(an_logs[li]), an_resets);
        Json rep = analysis::analysis_report(points, o);
        rep["log"] = an_logs[li];
        if (!rep["best"].is_null()) {
          const auto clusters = analysis::extract_clusters(points, o);
          const auto& best = clusters[rep["best"].get<std::size_t>()];
          best_centroids.emplace_back(best.centroid.head<3>().eval());
          if (basis && !an_fonts.empty()) {
            fs::create_directories(an_fonts);
            const auto cf = analysis::centroid_font(best, *basis);
            const auto file = fs::path(an_fonts) / ("best_" + std::to_string(li) + ".svg");
            write_text_file(file, fontgen::emit_svg_font(cf.font));
            rep["best_font"] = {{"path", file.string()}, {"forced", cf.forced}};
          }
        }
        per_log.push_back(std::move(rep));
      }
      if (an_logs.size() == 1) {
        out = per_log[0];
      } else {
        out["logs"] = per_log;
        out["best_centroid_distances"] = best_centroids.size() >= 2
                                             ? analysis::distance_report_to_json(analysis::distance_report(best_centroids))
                                             : Json(nullptr);
      }
      emit(an_out, out);
    } else if (*trace) {
      const auto rep = session::replay_log(read_json_lines(trace_log));
      if (!trace_out.empty()) write_lines(trace_out, rep.trace);
      std::cout << "proposals checked " << rep.proposals_checked << ", observations " << rep.observations
                << ", mismatches " << rep.mismatches.size() << "\n";
      for (const auto& m : rep.mismatches) std::cerr << "mismatch: " << m << "\n";
      return rep.ok() ? 0 : 5;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
