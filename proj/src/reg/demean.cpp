#include "cohortlab/demean.hpp"

#include <algorithm>
#include <cmath>

#include "cohortlab/errors.hpp"
#include "cohortlab/kernels.hpp"

namespace cohortlab {

FeDimension FeDimension::intercepts(std::string name, std::vector<std::int32_t> group,
                                    std::int32_t n_groups) {
  FeDimension d;
  d.name = std::move(name);
  d.kind = Kind::intercept;
  d.group = std::move(group);
  d.n_groups = n_groups;
  return d;
}

FeDimension FeDimension::slopes(std::string name, std::vector<std::int32_t> group,
                                std::int32_t n_groups, std::vector<double> t) {
  FeDimension d;
  d.name = std::move(name);
  d.kind = Kind::slope;
  d.group = std::move(group);
  d.n_groups = n_groups;
  d.slope_t = std::move(t);
  return d;
}

std::vector<std::int32_t> compact_groups(const std::vector<std::int32_t>& labels,
                                         std::int32_t* n_groups_out) {
  std::vector<std::int32_t> uniq = labels;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<std::int32_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = static_cast<std::int32_t>(
        std::lower_bound(uniq.begin(), uniq.end(), labels[i]) - uniq.begin());
  }
  if (n_groups_out != nullptr) *n_groups_out = static_cast<std::int32_t>(uniq.size());
  return out;
}

namespace {

struct DimState {
  FeDimension* dim;
  std::vector<double> denom;     // per group: sum of weights (intercept) or sum w*t~^2 (slope)
  std::vector<double> scratch;   // per group accumulator
  double t_max_abs = 0.0;
};

}  // namespace

DemeanResult demean_columns(const std::vector<double*>& columns, std::size_t n_rows,
                            std::vector<FeDimension>& dims, const double* weights, double tol,
                            int max_sweeps) {
  DemeanResult res;
  if (columns.empty() || dims.empty() || n_rows == 0) {
    res.converged = true;
    return res;
  }
  for (const auto& d : dims) {
    if (d.group.size() != n_rows) throw DomainError("FE dimension rows mismatch: " + d.name);
    if (d.kind == FeDimension::Kind::slope && d.slope_t.size() != n_rows) {
      throw DomainError("slope dimension missing its variable: " + d.name);
    }
  }

  std::vector<DimState> states;
  states.reserve(dims.size());
  for (auto& d : dims) {
    DimState st;
    st.dim = &d;
    st.denom.assign(d.n_groups, 0.0);
    st.scratch.assign(d.n_groups, 0.0);
    if (d.kind == FeDimension::Kind::intercept) {
      if (weights == nullptr) {
        for (std::size_t i = 0; i < n_rows; ++i) st.denom[d.group[i]] += 1.0;
      } else {
        kernels::scatter_add(weights, d.group.data(), st.denom.data(), n_rows);
      }
    } else {
      // center t within group (weighted), then cache sum w * t~^2
      std::vector<double> tsum(d.n_groups, 0.0);
      std::vector<double> wsum(d.n_groups, 0.0);
      if (weights == nullptr) {
        kernels::scatter_add(d.slope_t.data(), d.group.data(), tsum.data(), n_rows);
        for (std::size_t i = 0; i < n_rows; ++i) wsum[d.group[i]] += 1.0;
      } else {
        kernels::scatter_add_mul(d.slope_t.data(), weights, d.group.data(), tsum.data(), n_rows);
        kernels::scatter_add(weights, d.group.data(), wsum.data(), n_rows);
      }
      for (std::int32_t g = 0; g < d.n_groups; ++g) {
        tsum[g] = wsum[g] > 0.0 ? tsum[g] / wsum[g] : 0.0;
      }
      kernels::gather_subtract(d.slope_t.data(), d.group.data(), tsum.data(), n_rows);
      for (std::size_t i = 0; i < n_rows; ++i) {
        const double w = weights == nullptr ? 1.0 : weights[i];
        st.denom[d.group[i]] += w * d.slope_t[i] * d.slope_t[i];
        st.t_max_abs = std::max(st.t_max_abs, std::fabs(d.slope_t[i]));
      }
    }
    for (auto& v : st.denom) {
      if (v <= 0.0) v = 1.0;  // empty or degenerate group: projector is a no-op
    }
    states.push_back(std::move(st));
  }

  // single intercept dimension: one pass is exact
  const int sweeps_needed =
      (dims.size() == 1 && dims[0].kind == FeDimension::Kind::intercept) ? 1 : max_sweeps;

  for (int sweep = 1; sweep <= sweeps_needed; ++sweep) {
    double delta = 0.0;
    for (auto& st : states) {
      const auto& d = *st.dim;
      for (double* col : columns) {
        std::fill(st.scratch.begin(), st.scratch.end(), 0.0);
        if (d.kind == FeDimension::Kind::intercept) {
          if (weights == nullptr) {
            kernels::scatter_add(col, d.group.data(), st.scratch.data(), n_rows);
          } else {
            kernels::scatter_add_mul(col, weights, d.group.data(), st.scratch.data(), n_rows);
          }
          for (std::int32_t g = 0; g < d.n_groups; ++g) st.scratch[g] /= st.denom[g];
          const double change =
              kernels::gather_subtract(col, d.group.data(), st.scratch.data(), n_rows);
          delta = std::max(delta, change);
        } else {
          if (weights == nullptr) {
            kernels::scatter_add_mul(col, d.slope_t.data(), d.group.data(), st.scratch.data(),
                                     n_rows);
          } else {
            for (std::size_t i = 0; i < n_rows; ++i) {
              st.scratch[d.group[i]] += weights[i] * col[i] * d.slope_t[i];
            }
          }
          double coef_max = 0.0;
          for (std::int32_t g = 0; g < d.n_groups; ++g) {
            st.scratch[g] /= st.denom[g];
            coef_max = std::max(coef_max, std::fabs(st.scratch[g]));
          }
          kernels::gather_subtract_mul(col, d.group.data(), st.scratch.data(), d.slope_t.data(),
                                       n_rows);
          delta = std::max(delta, coef_max * st.t_max_abs);
        }
      }
    }
    res.sweeps = sweep;
    res.final_delta = delta;
    if (delta < tol || sweeps_needed == 1) {
      res.converged = true;
      return res;
    }
  }
  return res;  // converged stays false
}

}  // namespace cohortlab
