#include "flowkit/metrics.hpp"

#include <cmath>
#include <vector>

namespace flowkit {

namespace {

void check_inputs(const FlowField& pred, const FlowField& truth,
                  const Mask& valid, const char* what) {
  require_flow(pred, what);
  require_flow(truth, what);
  require_mask(valid, what);
  require_same_shape(pred, truth, what);
  require_same_spatial_shape(pred, valid, what);
}

}  // namespace

Grid endpoint_error(const FlowField& pred, const FlowField& truth,
                    const Mask& valid, double* mean) {
  check_inputs(pred, truth, valid, "endpoint_error");
  const int h = pred.height, w = pred.width;
  Grid epe(h, w, 1, 0.0);
  std::vector<double> row_num(h, 0.0), row_den(h, 0.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    double num = 0.0, den = 0.0;
    for (int x = 0; x < w; ++x) {
      const double du = pred.at(y, x, 0) - truth.at(y, x, 0);
      const double dv = pred.at(y, x, 1) - truth.at(y, x, 1);
      const double e = std::sqrt(du * du + dv * dv);
      epe.at(y, x, 0) = e;
      num += e * valid.at(y, x, 0);
      den += valid.at(y, x, 0);
    }
    row_num[y] = num;
    row_den[y] = den;
  }
  double num = 0.0, den = 0.0;
  for (int y = 0; y < h; ++y) {
    num += row_num[y];
    den += row_den[y];
  }
  if (den == 0.0)
    throw std::invalid_argument("endpoint_error: empty valid set");
  if (mean) *mean = num / den;
  return epe;
}

double error_rate(const FlowField& pred, const FlowField& truth,
                  const Mask& valid) {
  check_inputs(pred, truth, valid, "error_rate");
  const int h = pred.height, w = pred.width;
  std::vector<double> row_bad(h, 0.0), row_den(h, 0.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    double bad = 0.0, den = 0.0;
    for (int x = 0; x < w; ++x) {
      const double m = valid.at(y, x, 0);
      if (m == 0.0) continue;
      const double du = pred.at(y, x, 0) - truth.at(y, x, 0);
      const double dv = pred.at(y, x, 1) - truth.at(y, x, 1);
      const double e = std::sqrt(du * du + dv * dv);
      const double tu = truth.at(y, x, 0), tv = truth.at(y, x, 1);
      if (e > 3.0 && e > 0.05 * std::sqrt(tu * tu + tv * tv)) bad += m;
      den += m;
    }
    row_bad[y] = bad;
    row_den[y] = den;
  }
  double bad = 0.0, den = 0.0;
  for (int y = 0; y < h; ++y) {
    bad += row_bad[y];
    den += row_den[y];
  }
  if (den == 0.0) throw std::invalid_argument("error_rate: empty valid set");
  return bad / den;
}

EvalResult evaluate_flow(const FlowField& pred, const FlowField& truth,
                         const Mask& valid, const Mask* noc) {
  EvalResult r;
  endpoint_error(pred, truth, valid, &r.epe_all);
  r.er_all = error_rate(pred, truth, valid);
  long count = 0;
  for (double m : valid.data)
    if (m != 0.0) ++count;
  r.pixel_count = count;
  if (noc) {
    Mask both = valid;
    require_same_spatial_shape(valid, *noc, "evaluate_flow: noc");
    for (std::size_t i = 0; i < both.size(); ++i) both.data[i] *= noc->data[i];
    endpoint_error(pred, truth, both, &r.epe_noc);
    r.er_noc = error_rate(pred, truth, both);
  } else {
    r.epe_noc = r.epe_all;
    r.er_noc = r.er_all;
  }
  return r;
}

}  // namespace flowkit
