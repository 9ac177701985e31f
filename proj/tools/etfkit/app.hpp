#pragma once

// etfkit command-line front end. Exit codes: 0 success, 1 I/O or parse
// failure, 2 mathematical precondition failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "etf/document.hpp"
#include "etf/etf.hpp"
#include "svg.hpp"

namespace etfkit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitMath = 2;

struct GlobalOptions {
  etf::ToleranceConfig tol;
  std::uint64_t seed = 0;
  std::string out;
  std::string plot;
};

namespace detail {

class Reporter {
 public:
  explicit Reporter(std::ostream& os) : os_(os) { os_.precision(17); }

  template <class T>
  Reporter& kv(std::string_view key, const T& value) {
    os_ << key << ": " << value << '\n';
    return *this;
  }
  Reporter& flag(std::string_view key, bool value) { return kv(key, value ? "true" : "false"); }

  std::ostream& stream() { return os_; }

 private:
  std::ostream& os_;
};

inline void emit(const GlobalOptions& g, etf::io::Document doc, std::ostream& out) {
  if (g.out.empty()) return;
  doc.meta.tolerances = g.tol;
  if (g.out == "-") {
    out << etf::io::dump(doc);
  } else {
    etf::io::write_document(g.out, doc);
  }
}

inline void plot(const GlobalOptions& g, const etf::Frame& f, const std::optional<etf::Ellipsoid>& e, std::ostream& err) {
  if (g.plot.empty()) return;
  if (f.dim > 3) {
    err << "warning: --plot supports dimension <= 3, skipped\n";
    return;
  }
  std::ofstream os(g.plot);
  if (!os) throw etf::io::DocumentError("cannot write " + g.plot);
  os << render_svg(f, e);
}

inline etf::Ellipsoid load_ellipsoid(const std::string& path, const etf::ToleranceConfig& tol) {
  const etf::io::Document doc = etf::io::read_document(path, tol);
  if (doc.kind == etf::io::DocKind::Axes) return etf::io::to_ellipsoid(doc.axes(), tol);
  return etf::Ellipsoid::from_operator(doc.matrix(), tol);
}

inline double coefficient_sum(const etf::Ellipsoid& e, const etf::ToleranceConfig& tol) {
  return etf::to_axes(e, tol).as_axes().coeffs.sum();
}

inline etf::Vector to_vector(const std::vector<double>& v) {
  return etf::Vector(Eigen::Map<const etf::Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
}

}  // namespace detail

inline int cmd_decompose(const GlobalOptions& g, const std::string& file, std::optional<std::size_t> k_opt,
                         std::ostream& out, std::ostream& err) {
  detail::Reporter rep(g.out == "-" ? err : out);
  const etf::io::Document doc = etf::io::read_document(file, g.tol);
  const etf::SymmetricOperator& a = doc.matrix();
  const etf::DecomposabilityReport check = etf::check_decomposable(a, g.tol);
  rep.kv("dim", a.dim()).kv("trace", check.trace).kv("rank", check.rank).kv("norm", check.norm);
  rep.flag("is_projection", check.is_projection).kv("verdict", etf::to_string(check.verdict));
  if (!check.ok()) {
    rep.kv("reason", etf::to_string(check.verdict));
    return kExitMath;
  }
  const std::size_t k = k_opt ? *k_opt : static_cast<std::size_t>(check.k);
  const etf::ProjectionDecomposition dec = etf::decompose_rank_one(a, k, g.tol);
  rep.kv("factors", dec.factors.size());
  rep.kv("reconstruction_residual", dec.residual());
  rep.kv("max_norm_error", dec.max_norm_error());
  detail::emit(g, etf::io::decomposition_document(etf::Frame{dec.dim, dec.factors, "decomposition"}), out);
  return kExitOk;
}

inline int cmd_etf(const GlobalOptions& g, const std::vector<double>& axes, const std::string& operator_file,
                   std::size_t length, const std::string& method, std::ostream& out, std::ostream& err) {
  detail::Reporter rep(g.out == "-" ? err : out);
  if (axes.empty() && operator_file.empty()) throw etf::io::DocumentError("one of --axes or --operator is required");
  const etf::Ellipsoid e = axes.empty() ? detail::load_ellipsoid(operator_file, g.tol)
                                        : etf::Ellipsoid::from_axes(detail::to_vector(axes));
  const double r = detail::coefficient_sum(e, g.tol);
  const bool degenerate = e.is_axes() && (e.as_axes().coeffs.array() <= 0.0).any();

  etf::Frame frame;
  if (method == "decomposition") {
    if (degenerate) {
      rep.kv("error", "method decomposition needs a non-degenerate ellipsoid; use --method rotation");
      return kExitMath;
    }
    frame = etf::etf_synthesize(e, length, g.tol).frame;
  } else {
    frame = etf::tight_frame_on_ellipsoid(e, length, g.tol);
  }

  const double k_over_r = static_cast<double>(length) / r;
  const etf::FrameReport fr = etf::frame_bounds(frame, g.tol);
  rep.kv("method", method).kv("dim", frame.dim).kv("length", frame.size());
  rep.flag("tight", fr.tight);
  rep.kv("frame_bound", fr.frame_bound ? *fr.frame_bound : 0.5 * (fr.lower_bound + fr.upper_bound));
  rep.kv("k_over_r", k_over_r);
  if (!degenerate) {
    const etf::SymmetricOperator t = etf::to_operator(e, g.tol).as_operator().shape;
    const etf::SymmetricOperator t_inv = etf::inv_pd(t, g.tol);
    rep.kv("formula_bound", static_cast<double>(length) / (t_inv.matrix() * t_inv.matrix()).trace());
  }
  rep.kv("max_membership_residual", etf::max_membership(e, frame));
  rep.kv("tightness_residual", etf::tightness_residual(frame, k_over_r));
  detail::emit(g, etf::io::frame_document(frame), out);
  detail::plot(g, frame, e, err);
  return kExitOk;
}

inline int cmd_onb(const GlobalOptions& g, const std::vector<double>& axes, std::ostream& out, std::ostream& err) {
  detail::Reporter rep(g.out == "-" ? err : out);
  const etf::Vector a = detail::to_vector(axes);
  const etf::Frame frame = etf::onb_on_ellipsoid(a, g.tol);
  etf::Matrix v(a.size(), a.size());
  for (Eigen::Index c = 0; c < a.size(); ++c) v.col(c) = frame.vectors[static_cast<std::size_t>(c)];
  const etf::Ellipsoid e = etf::Ellipsoid::from_axes(a);
  rep.kv("dim", frame.dim);
  rep.kv("gram_residual", (v.transpose() * v - etf::Matrix::Identity(a.size(), a.size())).norm());
  rep.kv("max_membership_residual", etf::max_membership(e, frame));
  detail::emit(g, etf::io::frame_document(frame), out);
  detail::plot(g, frame, e, err);
  return kExitOk;
}

inline int cmd_analyze(const GlobalOptions& g, const std::string& file, const std::string& ellipsoid_file,
                       std::ostream& out, std::ostream& err) {
  detail::Reporter rep(out);
  const etf::io::Document doc = etf::io::read_document(file, g.tol);
  const etf::Frame& frame = doc.frame();
  const etf::FrameReport fr = etf::frame_bounds(frame, g.tol);
  rep.kv("dim", frame.dim).kv("length", frame.size());
  rep.kv("lower_bound", fr.lower_bound).kv("upper_bound", fr.upper_bound);
  rep.flag("tight", fr.tight);
  if (fr.frame_bound) rep.kv("frame_bound", *fr.frame_bound);
  rep.flag("parseval", fr.parseval).flag("complete", fr.complete);
  std::optional<etf::Ellipsoid> e;
  if (!ellipsoid_file.empty()) {
    e = detail::load_ellipsoid(ellipsoid_file, g.tol);
    double worst = 0.0;
    for (std::size_t i = 0; i < frame.size(); ++i) {
      const double m = etf::membership(*e, frame.vectors[i]);
      worst = std::max(worst, m);
      rep.kv("membership[" + std::to_string(i) + "]", m);
    }
    rep.kv("max_membership_residual", worst);
  }
  detail::plot(g, frame, e, err);
  return kExitOk;
}

inline int cmd_parseval(const GlobalOptions& g, const std::string& file, std::ostream& out, std::ostream& err) {
  detail::Reporter rep(g.out == "-" ? err : out);
  const etf::io::Document doc = etf::io::read_document(file, g.tol);
  const etf::Frame& frame = doc.frame();
  const etf::FrameReport fr = etf::frame_bounds(frame, g.tol);
  rep.flag("complete", fr.complete);
  if (!fr.complete) {
    rep.kv("error", "frame is not complete; its frame operator is singular");
    return kExitMath;
  }
  const etf::Frame p = etf::parsevalize(frame, g.tol);
  rep.kv("parseval_residual", etf::tightness_residual(p, 1.0));
  detail::emit(g, etf::io::frame_document(p), out);
  detail::plot(g, p, std::nullopt, err);
  return kExitOk;
}

inline int cmd_spherical(const GlobalOptions& g, const std::string& file, std::size_t length, std::ostream& out,
                         std::ostream& err) {
  detail::Reporter rep(g.out == "-" ? err : out);
  const etf::io::Document doc = etf::io::read_document(file, g.tol);
  const etf::SymmetricOperator& s = doc.matrix();
  const etf::SphericalResult res = etf::spherical_frame(s, length, g.tol);
  double radius_err = 0.0;
  for (const etf::Vector& v : res.frame.vectors) radius_err = std::max(radius_err, std::abs(v.norm() - res.radius));
  rep.kv("dim", s.dim()).kv("length", res.frame.size()).kv("radius", res.radius);
  rep.kv("max_radius_error", radius_err);
  rep.kv("frame_operator_residual", (etf::frame_operator(res.frame).matrix() - s.matrix()).norm());
  detail::emit(g, etf::io::frame_document(res.frame), out);
  if (s.dim() <= 3) {
    const etf::Vector radii = etf::Vector::Constant(static_cast<Eigen::Index>(s.dim()), 1.0 / (res.radius * res.radius));
    detail::plot(g, res.frame, etf::Ellipsoid::from_axes(radii), err);
  } else {
    detail::plot(g, res.frame, std::nullopt, err);
  }
  return kExitOk;
}

inline int cmd_diagstream(const GlobalOptions& g, const std::string& file, std::optional<double> alpha,
                          std::size_t blocks, std::optional<std::size_t> k_override, std::ostream& out,
                          std::ostream& err) {
  detail::Reporter rep(g.out == "-" ? err : out);
  etf::DiagSpec spec = etf::io::read_document(file, g.tol).diag();
  if (alpha) spec.alpha = *alpha;
  if (std::isnan(spec.alpha)) throw etf::io::DocumentError("alpha missing: set it in the file or pass --alpha");

  etf::StreamResult res;
  try {
    res = etf::run_prefix(spec, blocks, g.tol, k_override);
  } catch (const etf::InfeasiblePrefixError& e) {
    rep.kv("error", "InfeasiblePrefix").kv("max_feasible_prefix", e.max_prefix());
    return kExitMath;
  }
  rep.kv("k", res.state.k).kv("blocks", res.state.emitted.size());
  std::ostringstream carries;
  carries.precision(17);
  for (std::size_t j = 0; j < res.state.emitted.size(); ++j) {
    const etf::StreamBlock& b = res.state.emitted[j];
    std::ostringstream slots;
    for (std::size_t s = 0; s < b.support.size(); ++s) slots << (s ? "," : "") << b.support[s];
    rep.kv("block[" + std::to_string(j) + "].slots", slots.str());
    rep.kv("block[" + std::to_string(j) + "].trace", b.trace);
    rep.kv("block[" + std::to_string(j) + "].L", b.cut);
    rep.kv("block[" + std::to_string(j) + "].carry", b.carry);
    carries << (j ? "," : "") << b.carry;
  }
  rep.kv("carry_trajectory", carries.str());
  rep.kv("projections", res.decomposition.factors.size());
  rep.kv("reconstruction_residual", res.decomposition.residual());
  if (res.residual.carry_slot) rep.kv("carry_slot", *res.residual.carry_slot);
  rep.kv("tail_entries", res.residual.tail_slots.size());
  if (!res.decomposition.factors.empty()) {
    detail::emit(g, etf::io::decomposition_document(etf::Frame{res.decomposition.dim, res.decomposition.factors, "diagstream"}), out);
  }
  return kExitOk;
}

/// Randomized end-to-end checks driven by --seed.
inline int cmd_selftest(const GlobalOptions& g, std::size_t trials, std::ostream& out) {
  detail::Reporter rep(out);
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::uniform_int_distribution<int> dim_dist(1, 6);
  double worst_dec = 0.0;
  double worst_frame = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const int n = dim_dist(rng);
    etf::Vector spectrum(n);
    for (int i = 0; i < n; ++i) spectrum[i] = unit(rng);
    const std::size_t k = static_cast<std::size_t>(n) + static_cast<std::size_t>(t % 4);
    spectrum *= static_cast<double>(k) / spectrum.sum();
    const etf::Matrix q = Eigen::HouseholderQR<etf::Matrix>(etf::Matrix::NullaryExpr(n, n, [&] { return unit(rng) - 0.5; })).householderQ();
    const etf::SymmetricOperator a(q * spectrum.asDiagonal() * q.transpose());
    const auto dec = etf::decompose_rank_one(a, k, g.tol);
    worst_dec = std::max(worst_dec, dec.residual() / std::max(1.0, etf::frobenius(a)));

    const etf::Frame f = etf::tight_frame_on_ellipsoid(spectrum, k, g.tol);
    worst_frame = std::max(worst_frame, etf::tightness_residual(f, static_cast<double>(k) / spectrum.sum()));
  }
  rep.kv("seed", g.seed).kv("trials", trials);
  rep.kv("max_decomposition_residual", worst_dec).kv("max_tightness_residual", worst_frame);
  const bool ok = worst_dec <= g.tol.tol_recon && worst_frame <= g.tol.tol_recon;
  rep.kv("status", ok ? "pass" : "fail");
  return ok ? kExitOk : kExitMath;
}

/// Entry point; args exclude the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tight frames on ellipsoids and projection decompositions", "etfkit"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--tol-rank", g.tol.tol_rank, "relative rank threshold");
  app.add_option("--tol-psd", g.tol.tol_psd, "PSD threshold");
  app.add_option("--tol-recon", g.tol.tol_recon, "reconstruction tolerance");
  app.add_option("--tol-orth", g.tol.tol_orth, "orthonormality tolerance");
  app.add_option("--tol-bisect", g.tol.tol_bisect, "bisection tolerance on the angle");
  app.add_option("--seed", g.seed, "seed for randomized self-tests");
  app.add_option("--out", g.out, "output document path ('-' for stdout)");
  app.add_option("--plot", g.plot, "write an SVG sketch (dimension <= 3)");

  std::string file;
  std::string aux_file;
  std::vector<double> axes;
  std::size_t length = 0;
  std::string method = "rotation";
  std::optional<std::size_t> k_opt;
  std::optional<double> alpha;
  std::size_t blocks = 0;
  std::size_t trials = 20;

  auto* decompose = app.add_subcommand("decompose", "split a PSD matrix into rank-one projections");
  decompose->add_option("matrix", file, "matrix document")->required();
  decompose->add_option("--k", k_opt, "number of projections (default: rounded trace)");

  auto* etf_cmd = app.add_subcommand("etf", "tight frame of a given length on an ellipsoid");
  auto* axes_opt = etf_cmd->add_option("--axes", axes, "axis coefficients a_1,...,a_n")->delimiter(',');
  etf_cmd->add_option("--operator", aux_file, "matrix document holding T")->excludes(axes_opt);
  etf_cmd->add_option("--length", length, "frame length k")->required();
  etf_cmd->add_option("--method", method, "rotation | decomposition")
      ->check(CLI::IsMember({"rotation", "decomposition"}));

  auto* onb = app.add_subcommand("onb", "orthonormal basis on an ellipsoid with coefficient sum n");
  onb->add_option("--axes", axes, "axis coefficients")->delimiter(',')->required();

  auto* analyze = app.add_subcommand("analyze", "frame bounds, tightness and membership");
  analyze->add_option("frame", file, "frame document")->required();
  analyze->add_option("--ellipsoid", aux_file, "axes or matrix document");

  auto* parseval = app.add_subcommand("parseval", "canonical Parseval frame S^{-1/2} x_j");
  parseval->add_option("frame", file, "frame document")->required();

  auto* spherical = app.add_subcommand("spherical", "equal-norm frame with a prescribed frame operator");
  spherical->add_option("operator", file, "matrix document holding S")->required();
  spherical->add_option("--length", length, "frame length k")->required();

  auto* diagstream = app.add_subcommand("diagstream", "block-and-carry decomposition of a diagonal prefix");
  diagstream->add_option("diag", file, "diag document")->required();
  diagstream->add_option("--alpha", alpha, "override the document's alpha");
  diagstream->add_option("--blocks", blocks, "number of blocks")->required();
  diagstream->add_option("--k", k_opt, "override the block parameter");

  auto* selftest = app.add_subcommand("selftest", "randomized consistency checks");
  selftest->add_option("--trials", trials, "number of random instances");

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("etfkit");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitIo;
  }

  try {
    g.tol.validate();
  } catch (const etf::Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }

  try {
    if (decompose->parsed()) return cmd_decompose(g, file, k_opt, out, err);
    if (etf_cmd->parsed()) return cmd_etf(g, axes, aux_file, length, method, out, err);
    if (onb->parsed()) return cmd_onb(g, axes, out, err);
    if (analyze->parsed()) return cmd_analyze(g, file, aux_file, out, err);
    if (parseval->parsed()) return cmd_parseval(g, file, out, err);
    if (spherical->parsed()) return cmd_spherical(g, file, length, out, err);
    if (diagstream->parsed()) return cmd_diagstream(g, file, alpha, blocks, k_opt, out, err);
    if (selftest->parsed()) return cmd_selftest(g, trials, out);
  } catch (const etf::io::DocumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const etf::Error& e) {
    err << "error: " << e.what() << '\n';
    out << "error: " << etf::to_string(e.kind()) << '\n' << "reason: " << e.reason() << '\n';
    return kExitMath;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitIo;
}

}  // namespace etfkit
