#pragma once

#include <array>

#include "carleman/symbols.hpp"

namespace carleman {

/// Uniform grid x_i = x_min + i h, i = 0..n-1, with x = 0 a node.
struct Grid1D {
  double x_min = -1;
  double x_max = 1;
  int n = 0;
  double h = 0;
  int interface_index = 0;

  double x(int i) const { return x_min + i * h; }
  int minus_nodes() const { return interface_index + 1; }    // x_min .. 0
  int plus_nodes() const { return n - interface_index; }     // 0 .. x_max
  /// Degrees of freedom of a two-sided function: 0 is stored twice.
  int dof() const { return n + 1; }
  /// Full index of minus node i (i <= interface_index) and plus node i (i >= interface_index).
  int minus_dof(int i) const { return i; }
  int plus_dof(int i) const { return i + 1; }
};

/// Throws ValidationError unless x_min < 0 < x_max, n >= 16 and x = 0 lies
/// on the grid within 1e-9 h. Each side needs at least 4 intervals.
Grid1D make_grid(double x_min, double x_max, int n);

/// Grid function with separate traces v(0-) and v(0+).
struct InterfaceFunction {
  VectorXc minus;  // nodes x_min .. 0, last entry is v(0-)
  VectorXc plus;   // nodes 0 .. x_max, first entry is v(0+)

  VectorXc stacked() const;
  static InterfaceFunction from_stacked(const Grid1D& g, const VectorXc& full);
};

/// Inhomogeneous interface data: v_+ - v_- = theta and flux jump = Theta.
struct TransmissionData {
  cplx theta{0.0};
  cplx Theta{0.0};
};

enum class AssemblyMode { Direct, Factored };
enum class OuterBoundary { Clamped, Dirichlet };

const char* to_string(AssemblyMode mode);

/// Discrete conormal flux at x_n = 0:
/// a^+ (D + s_+ + i tau alpha_+) v_+(0) - a^- (D + s_- + i tau alpha_-) v_-(0),
/// with second-order one-sided differences. `plus[k]` multiplies v_+(k h),
/// `minus[k]` multiplies v_-(-k h).
struct FluxRow {
  std::array<cplx, 3> plus{};
  std::array<cplx, 3> minus{};

  cplx apply(const InterfaceFunction& v) const;
};

FluxRow flux_row(const ModelCoefficients& coeffs, const WeightSpec& w,
                 const TangentialFrequency& freq, const Grid1D& grid);

/// Interior rows of the conjugated operator on one grid. `full` acts on
/// stacked two-sided vectors (Grid1D::dof entries). `reduced = full * embedding`
/// acts on the free unknowns after the homogeneous transmission conditions
/// and the outer boundary conditions are eliminated.
struct AssembledOperator {
  Grid1D grid;
  AssemblyMode mode = AssemblyMode::Direct;
  OuterBoundary boundary = OuterBoundary::Clamped;
  TangentialFrequency freq;
  FluxRow flux;
  SparseMatrixc full;
  SparseMatrixc embedding;
  SparseMatrixc reduced;
  std::vector<int> row_dof;   // full index of the node each row belongs to
  std::vector<int> free_dof;  // full index of each free unknown

  /// Full vector satisfying the inhomogeneous conditions with all free
  /// unknowns set to `free` (size reduced.cols()).
  VectorXc lift(const VectorXc& free, const TransmissionData& data = {}) const;
};

AssembledOperator assemble(const ModelCoefficients& coeffs, const WeightSpec& w,
                           const TangentialFrequency& freq, const Grid1D& grid,
                           AssemblyMode mode = AssemblyMode::Direct,
                           OuterBoundary boundary = OuterBoundary::Clamped);

}  // namespace carleman
