#include "roakit/builder.hpp"

#include <cmath>
#include <stdexcept>

namespace roakit {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475;
}

VarRef ProgramBuilder::add_free() {
  kind_.push_back(Kind::Free);
  free_vars_.push_back(next_id_);
  return VarRef{next_id_++};
}

std::vector<VarRef> ProgramBuilder::add_free(int count) {
  std::vector<VarRef> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(add_free());
  return out;
}

VarRef ProgramBuilder::add_nonneg() {
  kind_.push_back(Kind::Nonneg);
  nonneg_vars_.push_back(next_id_);
  return VarRef{next_id_++};
}

PsdBlock ProgramBuilder::add_psd_block(int size) {
  if (size < 1) throw std::invalid_argument("add_psd_block: size must be >= 1");
  PsdBlock blk;
  blk.index = static_cast<int>(psd_block_sizes_.size());
  blk.size = size;
  blk.first_var = next_id_;
  psd_block_sizes_.push_back(size);
  psd_first_var_.push_back(next_id_);
  for (int k = 0; k < svec_len(size); ++k) {
    kind_.push_back(Kind::Psd);
    ++next_id_;
  }
  return blk;
}

VarRef ProgramBuilder::psd_var(const PsdBlock& blk, int r, int c) const {
  if (c > r) std::swap(r, c);
  if (r >= blk.size || c < 0) throw std::out_of_range("psd_var: index out of range");
  // svec layout: columns in order, diagonal first within each column.
  const int col_off = c * blk.size - c * (c - 1) / 2;
  return VarRef{blk.first_var + col_off + (r - c)};
}

LinExpr ProgramBuilder::psd_entry(const PsdBlock& blk, int r, int c) const {
  return LinExpr(psd_var(blk, r, c), r == c ? 1.0 : kInvSqrt2);
}

int ProgramBuilder::add_row(const LinExpr& expr, double rhs) {
  std::vector<std::pair<int, double>> row;
  row.reserve(expr.terms.size());
  for (const auto& [v, coeff] : expr.terms) {
    if (!v.valid() || v.id >= next_id_) throw std::out_of_range("add_row: unknown variable");
    if (coeff != 0.0) row.push_back({v.id, coeff});
  }
  rows_.push_back(std::move(row));
  rhs_.push_back(rhs - expr.constant);
  return static_cast<int>(rhs_.size()) - 1;
}

void ProgramBuilder::add_objective(VarRef v, double coeff) {
  if (!v.valid() || v.id >= next_id_) throw std::out_of_range("add_objective: unknown variable");
  objective_[v.id] += coeff;
}

void ProgramBuilder::add_objective(const LinExpr& e, double scale) {
  for (const auto& [v, c] : e.terms) add_objective(v, c * scale);
}

ConicProgram ProgramBuilder::build() {
  flat_.assign(static_cast<std::size_t>(next_id_), -1);
  int idx = 0;
  for (std::size_t bidx = 0; bidx < psd_block_sizes_.size(); ++bidx) {
    const int first = psd_first_var_[bidx];
    for (int k = 0; k < svec_len(psd_block_sizes_[bidx]); ++k) {
      flat_[static_cast<std::size_t>(first + k)] = idx++;
    }
  }
  for (int v : nonneg_vars_) flat_[static_cast<std::size_t>(v)] = idx++;
  for (int v : free_vars_) flat_[static_cast<std::size_t>(v)] = idx++;
  built_ = true;

  ConicProgram prog;
  prog.cone.psd_sizes = psd_block_sizes_;
  prog.cone.nonneg = static_cast<int>(nonneg_vars_.size());
  prog.cone.free_count = static_cast<int>(free_vars_.size());
  const int N = prog.cone.dim();
  prog.c = Eigen::VectorXd::Zero(N);
  for (const auto& [v, coeff] : objective_) prog.c(flat_[static_cast<std::size_t>(v)]) += coeff;
  prog.b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rhs_.size()));
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    prog.b(static_cast<Eigen::Index>(r)) = rhs_[r];
    // Duplicate variable references within a row are summed on insertion.
    for (const auto& [v, coeff] : rows_[r]) {
      trips.emplace_back(static_cast<int>(r), flat_[static_cast<std::size_t>(v)], coeff);
    }
  }
  prog.A.resize(static_cast<Eigen::Index>(rows_.size()), N);
  prog.A.setFromTriplets(trips.begin(), trips.end());
  return prog;
}

int ProgramBuilder::flat_index(VarRef v) const {
  if (!built_) throw std::logic_error("flat_index: call build() first");
  if (!v.valid() || v.id >= next_id_) throw std::out_of_range("flat_index: unknown variable");
  return flat_[static_cast<std::size_t>(v.id)];
}

}  // namespace roakit
