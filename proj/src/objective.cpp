#include "spdsd/objective.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "spdsd/error.hpp"

namespace spdsd {

namespace {

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

void unit_partials(const GArgs& a, GPartials& out) {
  out.d1.assign(a.f1.size(), 1.0);
  out.d2.assign(a.f2.size(), 1.0);
}

GArgs args_of(const ObjectiveState& st) { return GArgs{st.f1, st.f2, st.logdet}; }

void update_partials(const ObjectiveSpec& spec, ObjectiveState& st) { spec.g->partials(args_of(st), st.partials); }

kernels::Block m2_block(const kernels::Block& f) { return f; }

// T = f^-T, so that T^T M T = f^-1 M f^-T.
kernels::Block m1_block(const kernels::Block& finv) {
  kernels::Block t = finv;
  if (t.p != t.q) {
    t.pq = finv.qp;
    t.qp = 0.0;
  }
  return t;
}

void congruence_kernel(Matrix& m, std::span<const kernels::Block> blocks, const Exec& ex) {
  if (ex.backend == Backend::parallel) {
    kernels::omp::congruence(m, blocks);
  } else {
    kernels::serial::congruence(m, blocks);
  }
}

// Applies the congruence and patches the running trace from the touched diagonal.
void congruence_with_trace(SymMatrix& m, double& trace, std::span<const kernels::Block> blocks, const Exec& ex) {
  Matrix& raw = m.raw();
  double before = 0.0;
  for (const kernels::Block& b : blocks) {
    before += raw(b.p, b.p);
    if (b.p != b.q) before += raw(b.q, b.q);
  }
  congruence_kernel(raw, blocks, ex);
  double after = 0.0;
  for (const kernels::Block& b : blocks) {
    after += raw(b.p, b.p);
    if (b.p != b.q) after += raw(b.q, b.q);
  }
  trace += after - before;
}

std::uint64_t congruence_cost(std::span<const kernels::Block> blocks, std::size_t n) {
  std::uint64_t c = 0;
  for (const kernels::Block& b : blocks) c += (b.p == b.q ? 2 : 8) * static_cast<std::uint64_t>(n);
  return c;
}

// Dense scalar arguments from the point alone.
struct DenseArgs {
  std::vector<double> f1, f2;
  double f3 = 0.0;
  Matrix xinv;
};

DenseArgs dense_args(const ObjectiveSpec& spec, const CholeskyPoint& at, const Exec& ex) {
  const std::size_t n = at.n();
  DenseArgs a;
  const Matrix binv = tri_solve_lower(at.factor(), Matrix::identity(n), SolveSide::left, ex);
  a.xinv = multiply_at_b(binv, binv, ex);
  const SymMatrix x = at.matrix(ex);
  for (const SymMatrix& c : spec.c) a.f1.push_back(trace(multiply(c.matrix(), a.xinv, ex)));
  for (const SymMatrix& d : spec.d) a.f2.push_back(trace(multiply(d.matrix(), x.matrix(), ex)));
  a.f3 = at.log_det();
  return a;
}

}  // namespace

double QuadLogDet::value(const GArgs& a) const { return sum(a.f1) + sum(a.f2) + k_ * a.f3; }

void QuadLogDet::partials(const GArgs& a, GPartials& out) const {
  unit_partials(a, out);
  out.d3 = k_;
}

LogDetComposite::LogDetComposite(double a, double b1, double b2, double c) : a_(a), b1_(b1), b2_(b2), c_(c) {
  if (!(a > 0 && b1 > 0 && b2 > 0 && c > 0)) throw std::invalid_argument("LogDetComposite: a, b1, b2, c must be positive");
}

double LogDetComposite::value(const GArgs& a) const {
  const double z = b1_ * a.f3;
  // log(e^z + b2) without overflow for large z.
  const double lse = z > 0 ? z + std::log1p(b2_ * std::exp(-z)) : std::log(std::exp(z) + b2_);
  return a_ * lse - c_ * a.f3 + sum(a.f1) + sum(a.f2);
}

void LogDetComposite::partials(const GArgs& a, GPartials& out) const {
  unit_partials(a, out);
  const double z = b1_ * a.f3;
  // e^z / (e^z + b2), written to stay finite at both extremes.
  const double sig = z > 0 ? 1.0 / (1.0 + b2_ * std::exp(-z)) : std::exp(z) / (std::exp(z) + b2_);
  out.d3 = a_ * b1_ * sig - c_;
}

FiniteSum::FiniteSum(std::shared_ptr<const OuterFunction> h, std::size_t samples) : h_(std::move(h)), samples_(samples) {
  if (!h_) throw std::invalid_argument("FiniteSum: missing per-sample function");
  if (samples_ == 0) throw std::invalid_argument("FiniteSum: needs at least one sample");
}

double FiniteSum::value(const GArgs& a) const {
  double v = 0.0;
  for (std::size_t s = 0; s < samples_; ++s) v += h_->value(GArgs{a.f1.subspan(s, 1), a.f2.subspan(s, 1), a.f3});
  return v;
}

void FiniteSum::partials(const GArgs& a, GPartials& out) const {
  out.d1.assign(samples_, 0.0);
  out.d2.assign(samples_, 0.0);
  out.d3 = 0.0;
  GPartials one;
  for (std::size_t s = 0; s < samples_; ++s) {
    h_->partials(GArgs{a.f1.subspan(s, 1), a.f2.subspan(s, 1), a.f3}, one);
    out.d1[s] = one.d1[0];
    out.d2[s] = one.d2[0];
    out.d3 += one.d3;
  }
}

std::size_t ObjectiveSpec::n() const {
  if (!c.empty()) return c.front().n();
  if (!d.empty()) return d.front().n();
  return 0;
}

void ObjectiveSpec::validate() const {
  if (!g) throw DimensionMismatch("objective: no outer function");
  const std::size_t dim = n();
  for (const SymMatrix& m : c)
    if (m.n() != dim) throw DimensionMismatch("objective: C matrices differ in size");
  for (const SymMatrix& m : d)
    if (m.n() != dim) throw DimensionMismatch("objective: D matrices differ in size");
  if (g->samples() > 0 && (c.size() != g->samples() || d.size() != g->samples()))
    throw DimensionMismatch("objective: finite sum needs one C and one D per sample");
}

ObjectiveSpec ObjectiveSpec::sample(std::size_t s) const {
  if (g->samples() == 0) throw std::invalid_argument("objective: not a finite sum");
  if (s >= g->samples()) throw std::out_of_range("objective: sample index out of range");
  return ObjectiveSpec{{c[s]}, {d[s]}, g->per_sample()};
}

ObjectiveSpec quad_logdet_spec(SymMatrix c, SymMatrix d, double k) {
  return ObjectiveSpec{{std::move(c)}, {std::move(d)}, std::make_shared<QuadLogDet>(k)};
}

ObjectiveState init_state(const ObjectiveSpec& spec, const CholeskyPoint& at, const Exec& ex) {
  spec.validate();
  if (spec.n() != 0 && spec.n() != at.n()) throw DimensionMismatch("init_state: point and objective differ in size");
  ObjectiveState st;
  st.n = at.n();
  for (const SymMatrix& c : spec.c) {
    st.m1.push_back(inverse_congruence(at.factor(), c, ex));
    st.f1.push_back(trace(st.m1.back().matrix()));
  }
  for (const SymMatrix& d : spec.d) {
    // B^T D B
    const Matrix btd = tri_multiply(at.factor(), true, d.matrix(), kernels::Side::left, ex);
    st.m2.push_back(SymMatrix::symmetrize(tri_multiply(at.factor(), false, btd, kernels::Side::right, ex)));
    st.f2.push_back(trace(st.m2.back().matrix()));
  }
  st.logdet = at.log_det();
  update_partials(spec, st);
  return st;
}

double value(const ObjectiveSpec& spec, const ObjectiveState& st) { return spec.g->value(args_of(st)); }

double f_entry(const ObjectiveState& st, BasisIndex idx, const Exec& ex) {
  double s = idx.diagonal() ? st.partials.d3 : 0.0;
  for (std::size_t p = 0; p < st.m1.size(); ++p) s -= st.partials.d1[p] * st.m1[p](idx.i, idx.j);
  for (std::size_t q = 0; q < st.m2.size(); ++q) s += st.partials.d2[q] * st.m2[q](idx.i, idx.j);
  ex.charge(st.m1.size() + st.m2.size() + 1);
  if (ex.ledger) ex.ledger->add_f_entries(1);
  return s;
}

double beta_coeff(const ObjectiveState& st, BasisIndex idx, const Exec& ex) {
  return beta_from_F(f_entry(st, idx, ex), idx.i, idx.j);
}

SymMatrix full_F(const ObjectiveState& st, const Exec& ex) {
  std::vector<const Matrix*> mats;
  std::vector<double> w;
  for (std::size_t p = 0; p < st.m1.size(); ++p) {
    mats.push_back(&st.m1[p].matrix());
    w.push_back(-st.partials.d1[p]);
  }
  for (std::size_t q = 0; q < st.m2.size(); ++q) {
    mats.push_back(&st.m2[q].matrix());
    w.push_back(st.partials.d2[q]);
  }
  const std::size_t n = st.n;
  SymMatrix f(n);
  if (mats.empty()) {
    for (std::size_t k = 0; k < n; ++k) f.set(k, k, st.partials.d3);
  } else {
    f.raw() = ex.backend == Backend::parallel ? kernels::omp::combine(mats, w, st.partials.d3)
                                              : kernels::serial::combine(mats, w, st.partials.d3);
  }
  const std::uint64_t d = n * (n + 1) / 2;
  ex.charge(d * (mats.size() + 1));
  if (ex.ledger) ex.ledger->add_f_entries(d);
  return f;
}

std::vector<double> lower_F(const ObjectiveState& st, const Exec& ex) {
  const SymMatrix f = full_F(st, ex);
  const std::size_t n = f.n();
  std::vector<double> packed(n * (n + 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) packed[packed_index(i, j)] = f(i, j);
  return packed;
}

double grad_norm_sq(std::span<const double> packed_F, std::size_t n) {
  if (packed_F.size() != n * (n + 1) / 2) throw DimensionMismatch("grad_norm_sq: table size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = packed_F[packed_index(i, j)];
      s += (i == j ? 1.0 : 2.0) * v * v;
    }
  return s;
}

void advance_state(const ObjectiveSpec& spec, ObjectiveState& st, const UpdateFactor& f, const CholeskyPoint& at,
                   const Exec& ex) {
  if (f.blocks().empty()) return;
  const std::size_t n = f.n();
  if (!st.m1.empty()) {
    const UpdateFactor finv = invert_update_factor(f);
    std::vector<kernels::Block> t1;
    t1.reserve(finv.blocks().size());
    for (const kernels::Block& b : finv.blocks()) t1.push_back(m1_block(b));
    for (std::size_t p = 0; p < st.m1.size(); ++p) {
      congruence_with_trace(st.m1[p], st.f1[p], t1, ex);
      ex.charge(congruence_cost(t1, n));
    }
  }
  if (!st.m2.empty()) {
    std::vector<kernels::Block> t2;
    t2.reserve(f.blocks().size());
    for (const kernels::Block& b : f.blocks()) t2.push_back(m2_block(b));
    for (std::size_t q = 0; q < st.m2.size(); ++q) {
      congruence_with_trace(st.m2[q], st.f2[q], t2, ex);
      ex.charge(congruence_cost(t2, n));
    }
  }
  st.logdet += 2.0 * f.log_det();
  if (++st.advances_since_refresh >= kRefreshInterval) {
    refresh_scalars(spec, st, at);
    ex.charge(n * (st.m1.size() + st.m2.size() + 1));
  }
  update_partials(spec, st);
  ex.charge(st.m1.size() + st.m2.size() + 1);
}

void refresh_scalars(const ObjectiveSpec& spec, ObjectiveState& st, const CholeskyPoint& at) {
  for (std::size_t p = 0; p < st.m1.size(); ++p) st.f1[p] = trace(st.m1[p].matrix());
  for (std::size_t q = 0; q < st.m2.size(); ++q) st.f2[q] = trace(st.m2[q].matrix());
  st.logdet = at.log_det();
  st.advances_since_refresh = 0;
  update_partials(spec, st);
}

SymMatrix euclidean_grad(const ObjectiveSpec& spec, const CholeskyPoint& at, const Exec& ex) {
  spec.validate();
  const DenseArgs a = dense_args(spec, at, ex);
  GPartials g;
  spec.g->partials(GArgs{a.f1, a.f2, a.f3}, g);
  Matrix out = g.d3 * a.xinv;
  for (std::size_t p = 0; p < spec.c.size(); ++p) {
    const Matrix xcx = multiply(multiply(a.xinv, spec.c[p].matrix(), ex), a.xinv, ex);
    out -= g.d1[p] * xcx;
  }
  for (std::size_t q = 0; q < spec.d.size(); ++q) out += g.d2[q] * spec.d[q].matrix();
  return SymMatrix::symmetrize(out);
}

double dense_value(const ObjectiveSpec& spec, const CholeskyPoint& at, const Exec& ex) {
  spec.validate();
  const DenseArgs a = dense_args(spec, at, ex);
  return spec.g->value(GArgs{a.f1, a.f2, a.f3});
}

}  // namespace spdsd
