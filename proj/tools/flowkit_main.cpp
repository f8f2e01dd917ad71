#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "flowkit/checks.hpp"
#include "flowkit/flow_io.hpp"
#include "flowkit/image_ops.hpp"
#include "flowkit/metrics.hpp"
#include "flowkit/png_io.hpp"
#include "flowkit/solver.hpp"
#include "flowkit/synth.hpp"
#include "flowkit/visualize.hpp"

namespace {

using namespace flowkit;

int round_to_multiple(int value, int multiple) {
  const int rounded = ((value + multiple / 2) / multiple) * multiple;
  return std::max(rounded, multiple);
}

struct EstimateArgs {
  std::string img1, img2, out;
  std::string loss = "census";
  std::string occlusion = "range";
  int smooth_order = 1;
  double lambda = 150.0;
  int levels = 4;
  int iters = 300;
  bool selfsup = false;
  unsigned long seed = 0;
  std::string viz;
  std::string format = "flo";
};

int run_estimate(const EstimateArgs& args) {
  Image im1 = load_image(args.img1);
  Image im2 = load_image(args.img2);
  if (!im1.same_shape(im2))
    throw std::invalid_argument("images differ in shape: " +
                                shape_string(im1) + " vs " + shape_string(im2));

  ObjectiveConfig objective = make_objective(
      photometric_kind_from_string(args.loss), args.smooth_order);
  objective.smoothness.lambda = args.lambda;
  objective.occlusion.method = occlusion_method_from_string(args.occlusion);
  objective.selfsup_enabled = args.selfsup;

  SolverConfig solver;
  solver.levels = args.levels;
  solver.iterations_per_level = args.iters;
  solver.seed = args.seed;

  // inference happens on dimensions divisible by 2^levels; the output flow
  // is resized back with its values rescaled
  const int orig_h = im1.height, orig_w = im1.width;
  const int mult = 1 << args.levels;
  const int run_h = round_to_multiple(orig_h, mult);
  const int run_w = round_to_multiple(orig_w, mult);
  if (run_h != orig_h || run_w != orig_w) {
    im1 = resize_bilinear(im1, run_h, run_w);
    im2 = resize_bilinear(im2, run_h, run_w);
  }

  FlowEstimate est = estimate_flow(im1, im2, objective, solver);
  FlowField flow = est.forward;
  if (run_h != orig_h || run_w != orig_w)
    flow = resize_bilinear(flow, orig_h, orig_w, true);

  if (flow_format_from_string(args.format) == FlowFormat::Middlebury)
    write_flo(args.out, flow);
  else
    write_kitti16(args.out, flow);

  if (!args.viz.empty()) write_image_png(args.viz, flow_to_color(flow));

  std::printf("final_loss=%.9g\n", est.final_loss);
  std::printf("loss_photo=%.9g\n", est.per_term_losses.photo);
  std::printf("loss_smooth=%.9g\n", est.per_term_losses.smooth);
  std::printf("loss_self=%.9g\n", est.per_term_losses.self);
  return 0;
}

struct EvalArgs {
  std::string pred, gt, valid, noc;
};

FlowField load_flow_any(const std::string& path, Mask* valid_out) {
  const auto dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".png") {
    Kitti16Flow k = read_kitti16(path);
    if (valid_out) *valid_out = k.valid;
    return k.flow;
  }
  return read_flo(path);
}

int run_eval(const EvalArgs& args) {
  Mask gt_valid;
  const FlowField gt = load_flow_any(args.gt, &gt_valid);
  const FlowField pred = load_flow_any(args.pred, nullptr);
  if (!pred.same_shape(gt))
    throw std::invalid_argument("prediction shape " + shape_string(pred) +
                                " does not match ground truth " +
                                shape_string(gt));

  Mask valid = gt_valid.size() ? gt_valid : Mask(gt.height, gt.width, 1, 1.0);
  if (!args.valid.empty()) {
    const Mask extra = load_mask(args.valid);
    require_same_spatial_shape(valid, extra, "eval: --valid");
    for (std::size_t i = 0; i < valid.size(); ++i)
      valid.data[i] *= extra.data[i];
  }
  Mask noc;
  const Mask* noc_ptr = nullptr;
  if (!args.noc.empty()) {
    noc = load_mask(args.noc);
    noc_ptr = &noc;
  }

  const EvalResult r = evaluate_flow(pred, gt, valid, noc_ptr);
  std::printf("          %10s %10s\n", "EPE", "ER");
  std::printf("  all     %10.4f %9.2f%%\n", r.epe_all, 100.0 * r.er_all);
  std::printf("  noc     %10.4f %9.2f%%\n", r.epe_noc, 100.0 * r.er_noc);
  std::printf("  pixels  %10ld\n", r.pixel_count);
  std::printf("epe_all=%.9g\n", r.epe_all);
  std::printf("er_all=%.9g\n", r.er_all);
  std::printf("epe_noc=%.9g\n", r.epe_noc);
  std::printf("er_noc=%.9g\n", r.er_noc);
  std::printf("pixel_count=%ld\n", r.pixel_count);
  return 0;
}

struct SynthArgs {
  std::string motion = "translation";
  std::string shape = "128x128";
  unsigned long seed = 0;
  std::string out_dir;
};

int run_synth(const SynthArgs& args) {
  const auto x = args.shape.find('x');
  if (x == std::string::npos)
    throw std::invalid_argument("--shape must be HxW, got " + args.shape);
  const int h = std::stoi(args.shape.substr(0, x));
  const int w = std::stoi(args.shape.substr(x + 1));

  const SyntheticPair pair =
      synth_pair(args.seed, motion_kind_from_string(args.motion), h, w);

  const std::filesystem::path dir(args.out_dir);
  std::filesystem::create_directories(dir);
  write_image_png((dir / "image1.png").string(), pair.image1);
  write_image_png((dir / "image2.png").string(), pair.image2);
  write_flo((dir / "flow_gt.flo").string(), pair.true_flow);
  write_mask_png((dir / "occlusion_gt.png").string(), pair.true_occlusion);
  write_image_png((dir / "flow_gt_color.png").string(),
                  flow_to_color(pair.true_flow));
  std::printf("wrote synthetic %s pair (seed %lu) to %s\n",
              args.motion.c_str(), args.seed, args.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"per-pair unsupervised optical flow toolkit"};
  app.require_subcommand(1);

  EstimateArgs est;
  CLI::App* estimate = app.add_subcommand(
      "estimate", "estimate flow for an image pair by direct optimization");
  estimate->set_config("--config");
  estimate->add_option("--img1", est.img1, "first frame (png)")->required();
  estimate->add_option("--img2", est.img2, "second frame (png)")->required();
  estimate->add_option("--out", est.out, "output flow file")->required();
  estimate->add_option("--loss", est.loss, "census|ssim|charbonnier|l1");
  estimate->add_option("--occlusion", est.occlusion, "range|fb|none");
  estimate->add_option("--smooth-order", est.smooth_order, "1|2");
  estimate->add_option("--lambda", est.lambda, "smoothness edge weight");
  estimate->add_option("--levels", est.levels, "pyramid depth");
  estimate->add_option("--iters", est.iters, "iterations per level");
  estimate->add_flag("--selfsup", est.selfsup, "enable self-supervision stage");
  estimate->add_option("--seed", est.seed, "solver seed");
  estimate->add_option("--viz", est.viz, "write color-wheel png");
  estimate->add_option("--format", est.format, "flo|kitti16");

  EvalArgs ev;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "evaluate a flow prediction (EPE / ER)");
  eval_cmd->set_config("--config");
  eval_cmd->add_option("--pred", ev.pred, "predicted flow (.flo or .png)")
      ->required();
  eval_cmd->add_option("--gt", ev.gt, "ground-truth flow (.flo or .png)")
      ->required();
  eval_cmd->add_option("--valid", ev.valid, "validity mask png");
  eval_cmd->add_option("--noc-mask", ev.noc, "non-occluded mask png");

  SynthArgs sy;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic pair with ground truth");
  synth_cmd->set_config("--config");
  synth_cmd->add_option("--motion", sy.motion, "translation|affine|two_layer");
  synth_cmd->add_option("--shape", sy.shape, "HxW");
  synth_cmd->add_option("--seed", sy.seed, "generator seed");
  synth_cmd->add_option("--out-dir", sy.out_dir, "output directory")->required();

  std::string gc_module = "all";
  double gc_tol = 1e-4;
  CLI::App* gradcheck_cmd = app.add_subcommand(
      "gradcheck", "finite-difference checks of the analytic gradients");
  gradcheck_cmd->set_config("--config");
  gradcheck_cmd->add_option("--module", gc_module,
                            "all|photometric|smoothness|occlusion|solver");
  gradcheck_cmd->add_option("--tol", gc_tol, "max relative error");

  CLI::App* selfcheck_cmd =
      app.add_subcommand("selfcheck", "run the oracle and invariant suite");
  selfcheck_cmd->set_config("--config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (estimate->parsed()) return run_estimate(est);
    if (eval_cmd->parsed()) return run_eval(ev);
    if (synth_cmd->parsed()) return run_synth(sy);
    if (gradcheck_cmd->parsed())
      return flowkit::checks::run_gradcheck(gc_module, gc_tol, std::cout) == 0
                 ? 0
                 : 1;
    if (selfcheck_cmd->parsed())
      return flowkit::checks::run_selfcheck(std::cout) == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
