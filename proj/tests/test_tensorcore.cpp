#include <gtest/gtest.h>

#include "hermlab/tensorcore.hpp"

using namespace hermlab;
using K = IndexKind;

namespace {

MatC sample_metric() {
  MatC a(2, 2);
  a << cplx(2, 0), cplx(0.3, -0.4), cplx(0.3, 0.4), cplx(1.5, 0);
  return a;
}

}  // namespace

TEST(TensorCore, MatrixRoundTrip) {
  MatC m = sample_metric();
  auto t = ComplexTensor::from_matrix(m, K::hol_lower, K::antihol_lower);
  EXPECT_EQ(t.rank(), 2);
  EXPECT_EQ(max_abs(MatC(t.to_matrix() - m)), 0.0);
}

TEST(TensorCore, InverseMetricContractsToIdentity) {
  HermitianMatrix H(sample_metric());
  auto up = inverse_metric_tensor(H);  // h^{i jbar}
  auto low = H.as_metric_tensor();     // h_{k jbar}
  // sum over jbar: h^{i jbar} h_{k jbar} = delta^i_k
  auto d = contract(up, low, {{1, 1}});
  MatC I = d.to_matrix();
  EXPECT_LT(max_abs(MatC(I - MatC::Identity(2, 2))), 1e-14);
  EXPECT_EQ(d.kinds()[0], K::hol_upper);
  EXPECT_EQ(d.kinds()[1], K::hol_lower);
}

TEST(TensorCore, IllegalContractionsThrow) {
  HermitianMatrix H(sample_metric());
  auto low = H.as_metric_tensor();
  // two lower indices
  EXPECT_THROW(contract(low, low, {{0, 0}}), IndexError);
  // holomorphic against antiholomorphic
  auto up = inverse_metric_tensor(H);
  EXPECT_THROW(contract(up, low, {{0, 1}}), IndexError);
  // extent mismatch
  ComplexTensor big({3, 3}, {K::hol_upper, K::antihol_upper});
  EXPECT_THROW(contract(big, low, {{0, 0}}), IndexError);
  // index used twice
  EXPECT_THROW(contract(up, low, {{1, 1}, {1, 0}}), IndexError);
}

TEST(TensorCore, ConstructionValidatesShape) {
  EXPECT_THROW(ComplexTensor({2, 2}, {K::hol_lower}), IndexError);
  EXPECT_THROW(ComplexTensor({2}, {K::hol_lower}, std::vector<cplx>(3)), IndexError);
}

TEST(TensorCore, ArithmeticAndConjugation) {
  ComplexTensor a({2}, {K::hol_lower}, {cplx(1, 2), cplx(3, -1)});
  ComplexTensor b({2}, {K::hol_lower}, {cplx(0, 1), cplx(1, 1)});
  auto s = a + b, d = a - b, m = cplx(0, 1) * a;
  EXPECT_EQ(s(0), cplx(1, 3));
  EXPECT_EQ(d(1), cplx(2, -2));
  EXPECT_EQ(m(0), cplx(-2, 1));
  auto c = a.conj();
  EXPECT_EQ(c(0), cplx(1, -2));
  EXPECT_EQ(c.kinds()[0], K::antihol_lower);
  ComplexTensor other({2}, {K::hol_upper});
  EXPECT_THROW(a + other, IndexError);
}

TEST(TensorCore, HermitianValidation) {
  MatC bad = sample_metric();
  bad(0, 1) += 0.1;
  EXPECT_THROW(HermitianMatrix{bad}, Error);
  MatC rect(2, 3);
  EXPECT_THROW(HermitianMatrix{rect}, Error);
}

TEST(TensorCore, SingularAndIndefiniteMetricsAreRejected) {
  MatC sing(2, 2);
  sing << 1, 1, 1, 1;
  EXPECT_THROW(hermitian_inverse(HermitianMatrix(sing)), SingularMetricError);
  MatC indef(2, 2);
  indef << 1, 0, 0, -1;
  EXPECT_THROW(hermitian_inverse(HermitianMatrix(indef)), SingularMetricError);
  MatC tiny = MatC::Identity(2, 2);
  tiny(1, 1) = 1e-40;
  EXPECT_THROW(hermitian_inverse(HermitianMatrix(tiny)), SingularMetricError);
}

TEST(TensorCore, InverseIsHermitian) {
  auto R = hermitian_inverse(HermitianMatrix(sample_metric())).entries();
  EXPECT_LT(max_abs(MatC(R - R.adjoint())), 1e-15);
  EXPECT_LT(max_abs(MatC(R * sample_metric() - MatC::Identity(2, 2))), 1e-14);
}

TEST(TensorCore, FullContractionGivesScalar) {
  HermitianMatrix H(sample_metric());
  auto up = inverse_metric_tensor(H);
  auto low = H.as_metric_tensor();
  // h^{i jbar} h_{i jbar} = n
  auto s = contract(up, low, {{0, 0}, {1, 1}});
  EXPECT_EQ(s.rank(), 0);
  EXPECT_NEAR(std::abs(s.data()[0] - cplx(2)), 0, 1e-14);
}
