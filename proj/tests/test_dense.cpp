#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "spdsd/dense.hpp"
#include "spdsd/error.hpp"

using namespace spdsd;
using spdsd::testing::naive_product;
using spdsd::testing::random_spd;
using spdsd::testing::random_sym;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

// Truncated Taylor series, the independent oracle for exp.
Matrix taylor_exp(const Matrix& w, int terms) {
  const std::size_t n = w.n();
  Matrix sum = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int k = 1; k < terms; ++k) {
    term = (1.0 / k) * naive_product(term, w);
    sum += term;
  }
  return sum;
}

const Exec kBackends[] = {Exec{Backend::serial, nullptr}, Exec{Backend::parallel, nullptr}};

}  // namespace

TEST(Cholesky, IdentityAndTwoByTwo) {
  for (const Exec& ex : kBackends) {
    EXPECT_EQ(cholesky(SymMatrix::identity(5), ex).matrix(), Matrix::identity(5));
    const LowerTriangular r = cholesky(SymMatrix(from_rows({{4, 2}, {2, 3}})), ex);
    EXPECT_DOUBLE_EQ(r(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(r(1, 0), 1.0);
    EXPECT_DOUBLE_EQ(r(1, 1), std::sqrt(2.0));
    EXPECT_EQ(r(0, 1), 0.0);
    EXPECT_THROW(cholesky(SymMatrix(from_rows({{1, 2}, {2, 1}})), ex), NotPositiveDefinite);
  }
}

TEST(Cholesky, ReconstructsRandomSpd) {
  Rng rng(1);
  for (std::size_t n : {3, 10, 60}) {
    const SymMatrix a = random_spd(n, rng);
    const LowerTriangular r = cholesky(a);
    EXPECT_TRUE(r.has_positive_diagonal());
    EXPECT_LE(frobenius_norm(naive_product(r.matrix(), r.matrix().transposed()) - a.matrix()),
              1e-12 * frobenius_norm(a.matrix()));
  }
}

TEST(TriSolve, Examples) {
  const LowerTriangular l(from_rows({{2, 0}, {1, 1}}));
  const Matrix x = tri_solve_lower(l, Matrix::identity(2), SolveSide::left);
  EXPECT_DOUBLE_EQ(x(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(x(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(x(1, 0), -0.5);
  EXPECT_DOUBLE_EQ(x(1, 1), 1.0);

  Rng rng(2);
  const Matrix a = random_sym(4, rng).matrix();
  EXPECT_EQ(tri_solve_lower(LowerTriangular::identity(4), a, SolveSide::left), a);
  EXPECT_EQ(tri_solve_lower(LowerTriangular::identity(4), a, SolveSide::right_transposed), a);

  LowerTriangular singular = LowerTriangular::identity(3);
  singular.at(1, 1) = 0.0;
  EXPECT_THROW(tri_solve_lower(singular, Matrix::identity(3), SolveSide::left), SingularFactor);
}

TEST(TriSolve, RightTransposedResidual) {
  Rng rng(3);
  const LowerTriangular l = spdsd::testing::random_factor(12, rng, 0.2);
  const Matrix rhs = random_sym(12, rng).matrix();
  const Matrix x = tri_solve_lower(l, rhs, SolveSide::right_transposed);
  EXPECT_LE(frobenius_norm(naive_product(x, l.matrix().transposed()) - rhs), 1e-12 * frobenius_norm(rhs) * 10);
}

TEST(SymEig, Examples) {
  for (const Exec& ex : kBackends) {
    const EigenDecomposition e = sym_eig(SymMatrix(from_rows({{3, 0, 0}, {0, 1, 0}, {0, 0, 2}})), ex);
    EXPECT_EQ(e.values, (std::vector<double>{1, 2, 3}));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) EXPECT_TRUE(e.vectors(i, j) == 0.0 || std::abs(e.vectors(i, j)) == 1.0);

    const EigenDecomposition f = sym_eig(SymMatrix(from_rows({{2, 1}, {1, 2}})), ex);
    EXPECT_NEAR(f.values[0], 1.0, 1e-14);
    EXPECT_NEAR(f.values[1], 3.0, 1e-14);
  }
}

TEST(SymEig, ReconstructionAndOrthogonality) {
  Rng rng(4);
  for (const Exec& ex : kBackends) {
    for (std::size_t n : {5, 30, 70}) {
      const SymMatrix a = random_sym(n, rng);
      const EigenDecomposition e = sym_eig(a, ex);
      for (std::size_t k = 1; k < n; ++k) EXPECT_LE(e.values[k - 1], e.values[k]);
      Matrix rec(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k) rec(i, j) += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
      EXPECT_LE(frobenius_norm(rec - a.matrix()), 1e-10 * std::max(1.0, frobenius_norm(a.matrix())));
      const Matrix utu = naive_product(e.vectors.transposed(), e.vectors);
      EXPECT_LE(max_abs_diff(utu, Matrix::identity(n)), 1e-12 * n);
    }
  }
}

TEST(SymEig, SpdHasPositiveSpectrum) {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const EigenDecomposition e = sym_eig(random_spd(8, rng, 0.01));
    EXPECT_GT(e.values.front(), 0.0);
  }
}

TEST(SymEig, SweepBudgetRaises) {
  Rng rng(6);
  EXPECT_THROW(sym_eig(random_sym(20, rng), {}, 1), NoConvergence);
}

TEST(SymMatFn, Examples) {
  EXPECT_LT(max_abs_diff(sym_matfn(SymMatrix(3), MatFn::exp).matrix(), Matrix::identity(3)), 1e-15);
  const SymMatrix four(4.0 * Matrix::identity(3));
  EXPECT_LT(max_abs_diff(sym_matfn(four, MatFn::sqrt).matrix(), 2.0 * Matrix::identity(3)), 1e-15);
  EXPECT_LT(max_abs_diff(sym_matfn(four, MatFn::inv_sqrt).matrix(), 0.5 * Matrix::identity(3)), 1e-15);
  EXPECT_LT(max_abs_diff(sym_matfn(four, MatFn::power, {}, 1.5).matrix(), 8.0 * Matrix::identity(3)), 1e-13);
}

TEST(SymMatFn, ExpMatchesTaylorSeries) {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix w = random_sym(3, rng).matrix();
    w *= 1.0 / frobenius_norm(w);  // spectral norm <= 1
    const Matrix ref = taylor_exp(w, 20);
    for (const Exec& ex : kBackends)
      EXPECT_LT(max_abs_diff(sym_matfn(SymMatrix(w), MatFn::exp, ex).matrix(), ref), 1e-12);
  }
}

TEST(SymMatFn, ExpLogRoundTrip) {
  Rng rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix a = random_sym(6, rng).matrix();
    a *= 10.0 / frobenius_norm(a);
    const SymMatrix e = sym_matfn(SymMatrix(a), MatFn::exp);
    EXPECT_LT(max_abs_diff(sym_matfn(e, MatFn::log).matrix(), a), 1e-8);
  }
}

TEST(SymMatFn, DomainErrors) {
  const SymMatrix indef(from_rows({{1, 2}, {2, 1}}));
  for (MatFn fn : {MatFn::log, MatFn::sqrt, MatFn::inv, MatFn::inv_sqrt})
    EXPECT_THROW(sym_matfn(indef, fn), DomainError);
  EXPECT_THROW(sym_matfn(indef, MatFn::power, {}, 0.5), DomainError);
  EXPECT_NO_THROW(sym_matfn(indef, MatFn::power, {}, 2.0));
}

TEST(FlopLedger, EveryKernelChargesItsCount) {
  FlopLedger ledger;
  const Exec ex{Backend::serial, &ledger};
  Rng rng(9);
  const std::uint64_t n = 9;
  const SymMatrix a = random_spd(n, rng);

  std::uint64_t before = ledger.count();
  const LowerTriangular l = cholesky(a, ex);
  EXPECT_EQ(ledger.count() - before, (n * n * n + 2) / 3);

  before = ledger.count();
  tri_solve_lower(l, a.matrix(), SolveSide::left, ex);
  EXPECT_EQ(ledger.count() - before, (n * n * n + 1) / 2);

  before = ledger.count();
  multiply(a.matrix(), a.matrix(), ex);
  EXPECT_EQ(ledger.count() - before, n * n * n);

  before = ledger.count();
  sym_eig(a, ex);
  EXPECT_GT(ledger.count(), before);

  // Even a 1x1 call moves the ledger.
  before = ledger.count();
  cholesky(SymMatrix::identity(1), ex);
  EXPECT_GT(ledger.count(), before);
}

TEST(FlopLedger, CountsDoNotDependOnBackend) {
  Rng rng(10);
  const SymMatrix a = random_spd(12, rng);
  FlopLedger s, p;
  const LowerTriangular ls = cholesky(a, {Backend::serial, &s});
  const LowerTriangular lp = cholesky(a, {Backend::parallel, &p});
  inverse_congruence(ls, a, {Backend::serial, &s});
  inverse_congruence(lp, a, {Backend::parallel, &p});
  EXPECT_EQ(s.count(), p.count());
}

TEST(Congruence, MatchesDense) {
  Rng rng(11);
  const LowerTriangular b = spdsd::testing::random_factor(7, rng);
  const SymMatrix s = random_sym(7, rng);
  const Matrix ref = naive_product(naive_product(b.matrix(), s.matrix()), b.matrix().transposed());
  EXPECT_LT(max_abs_diff(congruence(b, s).matrix(), ref), 1e-12);
  const SymMatrix back = inverse_congruence(b, congruence(b, s));
  EXPECT_LT(max_abs_diff(back.matrix(), s.matrix()), 1e-10);
}
