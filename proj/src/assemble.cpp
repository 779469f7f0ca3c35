#include <cmath>

#include "carleman/discrete.hpp"

namespace carleman {

namespace {

using Triplet = Eigen::Triplet<cplx>;
const cplx I(0.0, 1.0);

struct SideSymbols {
  double a_nn, s, m;
};

SideSymbols side_symbols(const MatrixXd& a, const VectorXd& xi) {
  const ReducedCoefficients red = reduce_coefficients(a);
  return {red.a_nn, tangential_shift(red, xi), tangential_symbol(red, xi)};
}

// Global node indices on one side, ordered by x.
std::vector<int> side_nodes(const Grid1D& g, bool plus) {
  std::vector<int> nodes;
  if (plus) {
    for (int i = g.interface_index; i < g.n; ++i) nodes.push_back(i);
  } else {
    for (int i = 0; i <= g.interface_index; ++i) nodes.push_back(i);
  }
  return nodes;
}

// -i d/dx on consecutive nodes: centred inside, one-sided second order at the ends.
SparseMatrixc derivative(int size, double h) {
  std::vector<Triplet> t;
  const cplx c = -I / (2.0 * h);
  t.emplace_back(0, 0, -3.0 * c);
  t.emplace_back(0, 1, 4.0 * c);
  t.emplace_back(0, 2, -1.0 * c);
  for (int l = 1; l + 1 < size; ++l) {
    t.emplace_back(l, l - 1, -c);
    t.emplace_back(l, l + 1, c);
  }
  t.emplace_back(size - 1, size - 1, 3.0 * c);
  t.emplace_back(size - 1, size - 2, -4.0 * c);
  t.emplace_back(size - 1, size - 3, c);
  SparseMatrixc d(size, size);
  d.setFromTriplets(t.begin(), t.end());
  return d;
}

// Interior rows of one side in local numbering (rows 1..S-2 of an S x S operator).
SparseMatrixc side_operator(const Grid1D& g, const std::vector<int>& nodes, const SideSymbols& sym,
                            const WeightSpec& w, double tau, bool plus, AssemblyMode mode) {
  const int size = static_cast<int>(nodes.size());
  const double h = g.h;
  if (mode == AssemblyMode::Direct) {
    std::vector<Triplet> t;
    for (int l = 1; l + 1 < size; ++l) {
      const double x = g.x(nodes[l]);
      const double p = tau * w.slope(plus, x);
      const cplx b1 = 2.0 * p - 2.0 * I * sym.s;
      const cplx c0 = tau * w.beta + sym.s * sym.s + 2.0 * I * sym.s * p - p * p + sym.m * sym.m;
      t.emplace_back(l, l - 1, sym.a_nn * (-1.0 / (h * h) - b1 / (2.0 * h)));
      t.emplace_back(l, l, sym.a_nn * (2.0 / (h * h) + c0));
      t.emplace_back(l, l + 1, sym.a_nn * (-1.0 / (h * h) + b1 / (2.0 * h)));
    }
    SparseMatrixc op(size, size);
    op.setFromTriplets(t.begin(), t.end());
    return op;
  }
  const SparseMatrixc d = derivative(size, h);
  std::vector<Triplet> te, tf;
  for (int l = 0; l < size; ++l) {
    const double p = tau * w.slope(plus, g.x(nodes[l]));
    te.emplace_back(l, l, sym.s + I * (p + sym.m));
    tf.emplace_back(l, l, sym.s + I * (p - sym.m));
  }
  SparseMatrixc pe(size, size), pf(size, size);
  pe.setFromTriplets(te.begin(), te.end());
  pf.setFromTriplets(tf.begin(), tf.end());
  pe += d;
  pf += d;
  SparseMatrixc op = plus ? SparseMatrixc(pe * pf) : SparseMatrixc(pf * pe);
  op *= sym.a_nn;
  // Zero the end rows; only interior rows are kept.
  for (int k = 0; k < op.outerSize(); ++k) {
    for (SparseMatrixc::InnerIterator it(op, k); it; ++it) {
      if (it.row() == 0 || it.row() == size - 1) it.valueRef() = 0.0;
    }
  }
  op.prune(cplx(0.0));
  return op;
}

}  // namespace

cplx FluxRow::apply(const InterfaceFunction& v) const {
  const Eigen::Index im = v.minus.size() - 1;
  cplx out = 0;
  for (int k = 0; k < 3; ++k) out += plus[k] * v.plus(k) + minus[k] * v.minus(im - k);
  return out;
}

FluxRow flux_row(const ModelCoefficients& coeffs, const WeightSpec& w,
                 const TangentialFrequency& freq, const Grid1D& grid) {
  const SideSymbols sp = side_symbols(coeffs.a_plus, freq.xi);
  const SideSymbols sm = side_symbols(coeffs.a_minus, freq.xi);
  const double h = grid.h;
  const cplx c = I / (2.0 * h);
  FluxRow row;
  // D v_+(0) = -i(-3 v0 + 4 v1 - v2) / 2h
  row.plus = {sp.a_nn * (3.0 * c + sp.s + I * freq.tau * w.alpha_plus), sp.a_nn * (-4.0 * c),
              sp.a_nn * c};
  // D v_-(0) = -i(3 v0 - 4 v_-1 + v_-2) / 2h, entering with a minus sign
  row.minus = {-sm.a_nn * (-3.0 * c + sm.s + I * freq.tau * w.alpha_minus), -sm.a_nn * (4.0 * c),
               -sm.a_nn * (-c)};
  return row;
}

AssembledOperator assemble(const ModelCoefficients& coeffs, const WeightSpec& w,
                           const TangentialFrequency& freq, const Grid1D& grid, AssemblyMode mode,
                           OuterBoundary boundary) {
  coeffs.validate();
  w.validate();
  if (!(freq.tau >= 0.0) || !std::isfinite(freq.tau)) throw ValidationError("tau", "must be finite and >= 0");
  if (!freq.xi.allFinite()) throw ValidationError("xi", "non-finite component");
  if (freq.xi.size() != coeffs.dimension() - 1) {
    throw ValidationError("xi", "tangential frequency has the wrong dimension");
  }
  AssembledOperator op;
  op.grid = grid;
  op.mode = mode;
  op.boundary = boundary;
  op.freq = freq;
  op.flux = flux_row(coeffs, w, freq, grid);

  const int i0 = grid.interface_index;
  std::vector<Triplet> rows;
  int row = 0;
  for (bool plus : {false, true}) {
    const std::vector<int> nodes = side_nodes(grid, plus);
    const SideSymbols sym = side_symbols(plus ? coeffs.a_plus : coeffs.a_minus, freq.xi);
    const SparseMatrixc local = side_operator(grid, nodes, sym, w, freq.tau, plus, mode);
    const int size = static_cast<int>(nodes.size());
    auto dof = [&](int l) { return plus ? grid.plus_dof(nodes[l]) : grid.minus_dof(nodes[l]); };
    for (int l = 1; l + 1 < size; ++l) op.row_dof.push_back(dof(l));
    for (int k = 0; k < local.outerSize(); ++k) {
      for (SparseMatrixc::InnerIterator it(local, k); it; ++it) {
        rows.emplace_back(row + static_cast<int>(it.row()) - 1, dof(static_cast<int>(it.col())),
                          it.value());
      }
    }
    row += size - 2;
  }
  op.full.resize(row, grid.dof());
  op.full.setFromTriplets(rows.begin(), rows.end());

  // Free unknowns: interior nodes of each side, minus the clamped layer.
  const int skip = boundary == OuterBoundary::Clamped ? 2 : 1;
  for (int i = skip; i < i0; ++i) op.free_dof.push_back(grid.minus_dof(i));
  for (int i = i0 + 1; i <= grid.n - 1 - skip; ++i) op.free_dof.push_back(grid.plus_dof(i));

  const cplx elim = op.flux.plus[0] + op.flux.minus[0];
  double scale = 0;
  for (int k = 0; k < 3; ++k) scale += std::abs(op.flux.plus[k]) + std::abs(op.flux.minus[k]);
  if (std::abs(elim) <= 1e-12 * scale) {
    throw ValidationError("grid", "interface traces cannot be eliminated at this frequency");
  }
  std::vector<Triplet> emb;
  const int mtrace = grid.minus_dof(i0), ptrace = grid.plus_dof(i0);
  for (std::size_t j = 0; j < op.free_dof.size(); ++j) {
    const int d = op.free_dof[j];
    const int col = static_cast<int>(j);
    emb.emplace_back(d, col, 1.0);
    cplx coef = 0;
    for (int k = 1; k < 3; ++k) {
      if (d == grid.plus_dof(i0 + k)) coef = op.flux.plus[k];
      if (d == grid.minus_dof(i0 - k)) coef = op.flux.minus[k];
    }
    if (coef != 0.0) {
      emb.emplace_back(mtrace, col, -coef / elim);
      emb.emplace_back(ptrace, col, -coef / elim);
    }
  }
  op.embedding.resize(grid.dof(), static_cast<Eigen::Index>(op.free_dof.size()));
  op.embedding.setFromTriplets(emb.begin(), emb.end());
  op.reduced = op.full * op.embedding;
  op.reduced.makeCompressed();
  return op;
}

VectorXc AssembledOperator::lift(const VectorXc& free, const TransmissionData& data) const {
  if (free.size() != reduced.cols()) throw ValidationError("v", "wrong number of free unknowns");
  VectorXc full = embedding * free;
  const cplx elim = flux.plus[0] + flux.minus[0];
  const cplx m0 = (data.Theta - flux.plus[0] * data.theta) / elim;
  full(grid.minus_dof(grid.interface_index)) += m0;
  full(grid.plus_dof(grid.interface_index)) += m0 + data.theta;
  return full;
}

}  // namespace carleman
