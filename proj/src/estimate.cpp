#include "repath/estimate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace repath {

namespace {
constexpr double kOneGuard = 1e-6;  // t or r this close to 1 uses the >=1 branch
}

double EstimateState::size_of(OccId o) const {
  auto it = size.find(o);
  if (it == size.end())
    throw MissingUpstreamError("MissingUpstream: size'(" + std::to_string(o) + ") not estimated");
  return it->second;
}

double EstimateState::link_of(OccId a, OccId b) const {
  auto it = link.find({a, b});
  return it == link.end() ? 0.0 : it->second;
}

std::vector<LabelId> bind_occ_labels(const LabeledGraph& g, const OccTable& occs) {
  std::vector<LabelId> out(occs.size());
  for (OccId o = 0; o < occs.size(); ++o)
    out[o] = occs.wildcard(o) ? kWildcardLabel : g.find_label(occs.symbol(o));
  return out;
}

namespace {

// expression-forward endpoints of a Neighbor op
std::pair<const std::vector<OccId>*, const std::vector<OccId>*> neighbor_exp_sides(
    const PhysicalOp& op) {
  if (op.dir == Direction::Forward) return {&op.a, &op.b};
  return {&op.b, &op.a};
}

}  // namespace

double Estimator::load_cost(const PhysicalOp& op) const {
  double c = 0;
  for (OccId o : op.a) c += stats_->num(label(o));
  return c;
}

double Estimator::est_cost(const PhysicalOp& op, const EstimateState& e) const {
  const StatsCatalog& s = *stats_;
  switch (op.kind) {
    case PhysicalOp::Kind::Load:
      return load_cost(op);
    case PhysicalOp::Kind::SelfLink: {
      double c = 0;
      for (OccId o : op.a) c += e.has_size(o) ? e.size_of(o) : s.num(label(o));
      return c;
    }
    case PhysicalOp::Kind::Neighbor: {
      // expansion side pays size'(a) * Neighbor(L(a))
      double c = 0;
      for (OccId o : op.a) c += e.size_of(o) * s.neighbor_avg(label(o), op.dir);
      return c;
    }
    case PhysicalOp::Kind::SingleLink: {
      double c = 0;
      for (OccId a : op.a)
        for (OccId b : op.b)
          for (OccId cc : op.c)
            c += e.size_of(a) * e.link_of(a, b) * (1.0 + e.link_of(b, cc));
      return c;
    }
    case PhysicalOp::Kind::DoubleLink: {
      double c = 0;
      for (OccId a : op.a)
        for (OccId b : op.b)
          for (OccId cc : op.c)
            for (OccId d : op.d)
              c += e.size_of(a) * e.link_of(a, b) *
                   (1.0 + e.link_of(b, cc) * (1.0 + e.link_of(cc, d)));
      return c;
    }
    case PhysicalOp::Kind::ClosureLink: {
      if (op.a.size() > 1 || op.b.size() > 1)
        return est_closure_matrix(op.a, op.b, *this, e, r_trunc_).cost;
      // backward execution walks the transposed relation with head/tail
      // roles swapped; the cost row mirrors accordingly
      bool fwd = op.dir == Direction::Forward;
      OccId a = fwd ? op.a[0] : op.b[0];
      OccId b = fwd ? op.b[0] : op.a[0];
      Direction sd = op.dir;
      LabelId la = label(a), lb = label(b);
      double size_a = seeded_size(a, e), size_b = seeded_size(b, e);
      double r = s.pro(lb, la, sd) * (s.num(la) > 0 ? size_a / s.num(la) : 0.0);
      if (r > 1.0 - kOneGuard)
        return s.num(la) * s.neighbor_avg(la, sd) + s.num(lb) * s.neighbor_avg(lb, sd);
      double l0 = fwd ? seeded_link(a, b, e) : seeded_link(b, a, e);
      return size_a * l0 + (size_b * size_b / std::max(size_a, 1e-12)) * (1.0 / (1.0 - r)) * l0 +
             size_b * s.t_neighbor(lb, la, sd);
    }
  }
  return 0;
}

// pre-closure link value; an Edge-shape closure has no prior a-b links, so
// the first alternation step is estimated like a Neighbor expansion
double Estimator::seeded_link(OccId a, OccId b, const EstimateState& e) const {
  double l = e.link_of(a, b);
  if (l > 0) return l;
  return stats_->pro(label(a), label(b), Direction::Forward) *
         stats_->neighbor_avg(label(b), Direction::Forward);
}

double Estimator::seeded_size(OccId o, const EstimateState& e) const {
  if (e.has_size(o)) return e.size_of(o);
  return stats_->num(label(o));
}

void Estimator::est_size_link(const PhysicalOp& op, EstimateState& e) const {
  const StatsCatalog& s = *stats_;
  switch (op.kind) {
    case PhysicalOp::Kind::Load: {
      for (OccId o : op.a)
        if (!e.has_size(o)) e.size[o] = s.num(label(o));
      break;
    }
    case PhysicalOp::Kind::SelfLink: {
      double src = 0;
      for (OccId o : op.a) src += e.has_size(o) ? e.size_of(o) : s.num(label(o));
      double share = op.b.empty() ? src : src / static_cast<double>(op.b.size());
      for (OccId h : op.b) e.size[h] = share;
      for (OccId t : op.c) e.size[t] = share;
      for (OccId h : op.b)
        for (OccId t : op.c)
          if (label(h) == label(t)) e.link[{h, t}] = 1.0;  // per-node self link
      break;
    }
    case PhysicalOp::Kind::Neighbor: {
      auto [xs, ys] = neighbor_exp_sides(op);
      for (OccId x : *xs)
        for (OccId y : *ys)
          e.link[{x, y}] = s.pro(label(x), label(y), Direction::Forward) *
                           s.neighbor_avg(label(y), Direction::Forward);
      for (OccId x : *xs) {
        double f = 0;
        for (OccId y : *ys) f += s.pro(label(x), label(y), Direction::Forward);
        f = std::min(1.0, f);
        e.size[x] = (e.has_size(x) ? e.size_of(x) : s.num(label(x))) * f;
      }
      for (OccId y : *ys) {
        double f = 0;
        for (OccId x : *xs) f += s.pro(label(y), label(x), Direction::Backward);
        f = std::min(1.0, f);
        e.size[y] = (e.has_size(y) ? e.size_of(y) : s.num(label(y))) * f;
      }
      break;
    }
    case PhysicalOp::Kind::SingleLink: {
      bool singleton = op.a.size() == 1 && op.b.size() == 1 && op.c.size() == 1;
      for (OccId a : op.a) {
        for (OccId cc : op.c) {
          double acc = 0;
          for (OccId b : op.b) {
            double term = e.link_of(a, b) * s.pro(label(b), label(cc), Direction::Forward) *
                          e.link_of(b, cc);
            if (!singleton) {
              double nl = s.num(label(cc));
              term *= nl > 0 ? e.size_of(cc) / nl : 0.0;
            }
            acc += term;
          }
          e.link[{a, cc}] = acc;
        }
      }
      for (OccId a : op.a) {
        double f = 0;
        for (OccId b : op.b)
          for (OccId cc : op.c) f += s.pro(label(b), label(cc), Direction::Forward);
        e.size[a] = e.size_of(a) * std::min(1.0, f);
      }
      for (OccId cc : op.c) {
        double f = 0;
        for (OccId b : op.b)
          for (OccId a : op.a) f += s.pro(label(b), label(a), Direction::Backward);
        e.size[cc] = e.size_of(cc) * std::min(1.0, f);
      }
      break;
    }
    case PhysicalOp::Kind::DoubleLink: {
      for (OccId a : op.a) {
        for (OccId d : op.d) {
          double acc = 0;
          for (OccId b : op.b)
            for (OccId cc : op.c)
              acc += e.link_of(a, b) * s.pro(label(b), label(cc), Direction::Forward) *
                     e.link_of(b, cc) * s.pro(label(cc), label(d), Direction::Forward) *
                     e.link_of(cc, d);
          e.link[{a, d}] = acc;
        }
      }
      for (OccId a : op.a) {
        double f = 0;
        for (OccId b : op.b)
          for (OccId cc : op.c)
            for (OccId d : op.d)
              f += s.pro(label(b), label(cc), Direction::Forward) *
                   s.pro(label(cc), label(d), Direction::Forward);
        e.size[a] = e.size_of(a) * std::min(1.0, f);
      }
      for (OccId d : op.d) {
        double f = 0;
        for (OccId cc : op.c)
          for (OccId b : op.b)
            for (OccId a : op.a)
              f += s.pro(label(cc), label(b), Direction::Backward) *
                   s.pro(label(b), label(a), Direction::Backward);
        e.size[d] = e.size_of(d) * std::min(1.0, f);
      }
      break;
    }
    case PhysicalOp::Kind::ClosureLink: {
      for (OccId o : op.a)
        if (!e.has_size(o)) e.size[o] = s.num(label(o));
      for (OccId o : op.b)
        if (!e.has_size(o)) e.size[o] = s.num(label(o));
      if (op.a.size() > 1 || op.b.size() > 1) {
        auto m = est_closure_matrix(op.a, op.b, *this, e, r_trunc_);
        for (std::size_t i = 0; i < op.a.size(); ++i)
          for (std::size_t j = 0; j < op.b.size(); ++j)
            e.link[{op.a[i], op.b[j]}] = std::max(0.0, m.links[i][j]);
        break;
      }
      OccId a = op.a[0], b = op.b[0];
      LabelId la = label(a), lb = label(b);
      double l0 = seeded_link(a, b, e);
      double t = s.pro(lb, la, Direction::Forward) *
                 std::max(0.0, s.t_neighbor(lb, la, Direction::Forward) - 1.0) *
                 s.pro(la, lb, Direction::Forward) * std::max(0.0, l0 - 1.0);
      double after = t < 1.0 - kOneGuard ? l0 / (1.0 - t) : e.size_of(b);
      e.link[{a, b}] = after;
      break;  // sizes unchanged by closure
    }
  }
}

double Estimator::apply(const PhysicalOp& op, EstimateState& e) const {
  double c = est_cost(op, e);
  est_size_link(op, e);
  return c;
}

double Estimator::apply_all(const std::vector<PhysicalOp>& ops, EstimateState& e) const {
  double c = 0;
  for (const auto& op : ops) c += apply(op, e);
  return c;
}

ClosureMatrixEstimate est_closure_matrix(const std::vector<OccId>& a_occs,
                                         const std::vector<OccId>& b_occs, const Estimator& est,
                                         const EstimateState& e, int r_trunc) {
  const StatsCatalog& s = est.stats();
  const auto m = static_cast<Eigen::Index>(a_occs.size());
  const auto n = static_cast<Eigen::Index>(b_occs.size());

  auto size_or_num = [&](OccId o) {
    return e.has_size(o) ? e.size_of(o) : s.num(est.label(o));
  };

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m), B = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < m; ++i) A(i, i) = size_or_num(a_occs[i]);
  for (Eigen::Index i = 0; i < n; ++i) B(i, i) = size_or_num(b_occs[i]);

  Eigen::MatrixXd P(n, m), R(m, n), L(m, n), T1(n, m), T2(m, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      LabelId lb = est.label(b_occs[i]), la = est.label(a_occs[j]);
      double nm = s.num(la);
      P(i, j) = s.pro(lb, la, Direction::Forward) * (nm > 0 ? size_or_num(a_occs[j]) / nm : 0.0);
      T1(i, j) = s.pro(lb, la, Direction::Forward) *
                 std::max(0.0, s.t_neighbor(lb, la, Direction::Forward) - 1.0);
    }
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double sa = size_or_num(a_occs[i]);
      R(i, j) = sa > 0 ? size_or_num(b_occs[j]) / sa : 0.0;
      double l0 = e.link_of(a_occs[i], b_occs[j]);
      if (l0 <= 0)
        l0 = s.pro(est.label(a_occs[i]), est.label(b_occs[j]), Direction::Forward) *
             s.neighbor_avg(est.label(b_occs[j]), Direction::Forward);
      L(i, j) = l0;
      T2(i, j) = s.pro(est.label(a_occs[i]), est.label(b_occs[j]), Direction::Forward) *
                 std::max(0.0, l0 - 1.0);
    }

  ClosureMatrixEstimate out;
  Eigen::MatrixXd F = A * L;
  out.cost = F.sum();
  // E = BPL + BP(RP)L + BP(RP)^2 L + ...
  Eigen::MatrixXd BP = B * P;
  Eigen::MatrixXd RP = R * P;
  Eigen::MatrixXd term = BP;
  for (int k = 0; k < r_trunc; ++k) {
    out.cost += (term * L).sum();
    term = term * RP;
  }
  // N = L + L(T1T2) + L(T1T2)^2 + ...
  Eigen::MatrixXd T12 = T1 * T2;
  Eigen::MatrixXd nterm = L;
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(m, n);
  for (int k = 0; k < r_trunc; ++k) {
    N += nterm;
    nterm = nterm * T12;
  }
  out.links.assign(m, std::vector<double>(n));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out.links[i][j] = N(i, j);
  return out;
}

}  // namespace repath
