#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opdyn/exact.hpp"
#include "opdyn/hamiltonians.hpp"
#include "oracles.hpp"

using namespace opdyn;

namespace {

// Embeds bond term `term` at (site, site+1) into the full 2^n space.
Eigen::MatrixXcd embed_bond(const Eigen::Matrix4cd& term, Eigen::Index site,
                            Eigen::Index n) {
  const Eigen::Index left = Eigen::Index(1) << site;
  const Eigen::Index right = Eigen::Index(1) << (n - 2 - site);
  return kron(kron(Eigen::MatrixXcd::Identity(left, left), term),
              Eigen::MatrixXcd::Identity(right, right));
}

Eigen::MatrixXcd assemble(const ModelSpec& spec) {
  const BondTermList terms = build_bond_terms(spec);
  const Eigen::Index dim = Eigen::Index(1) << spec.n_sites;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t i = 0; i < terms.size(); ++i)
    h += embed_bond(terms[i], static_cast<Eigen::Index>(i), spec.n_sites);
  return h;
}

}  // namespace

TEST_CASE("ising two-site bond with no field") {
  BondTermList terms = build_bond_terms({Model::ising, 2, 1.0, 0.0, 0.0});
  REQUIRE(terms.size() == 1);
  Eigen::Matrix4cd expected = Eigen::Vector4cd(-1, 1, 1, -1).asDiagonal();
  CHECK(max_abs(terms[0] - expected) == 0.0);
}

TEST_CASE("ising three-site embedded sum equals the dense hamiltonian exactly") {
  ModelSpec spec{Model::ising, 3, 1.0, 1.0, 0.0};
  CHECK(max_abs(assemble(spec) - dense_hamiltonian(spec)) == 0.0);
}

TEST_CASE("xxz two-site bond carries full boundary field weights") {
  BondTermList terms = build_bond_terms({Model::xxz, 2, 1.0, 0.5, 0.5});
  REQUIRE(terms.size() == 1);
  Eigen::Matrix4cd expected;
  expected << -0.5, -0.5, -0.5, 0.0,
              -0.5, 0.5, -2.0, -0.5,
              -0.5, -2.0, 0.5, -0.5,
               0.0, -0.5, -0.5, -0.5;
  CHECK(max_abs(terms[0] - expected) <= 1e-15);
}

TEST_CASE("reassembly: embedded bond terms match the dense hamiltonian") {
  auto gen = oracles::rng(31);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (Eigen::Index n : {2, 3, 5, 8}) {
    for (Model model : {Model::ising, Model::xxz}) {
      ModelSpec spec{model, n, dist(gen), dist(gen), dist(gen)};
      CHECK(max_abs(assemble(spec) - dense_hamiltonian(spec)) <= 1e-13);
    }
  }
}

TEST_CASE("every bond term is Hermitian") {
  auto gen = oracles::rng(37);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (Model model : {Model::ising, Model::xxz}) {
    ModelSpec spec{model, 7, dist(gen), dist(gen), dist(gen)};
    for (const auto& term : build_bond_terms(spec))
      CHECK(max_abs(term - term.adjoint()) <= 1e-13);
  }
}

TEST_CASE("ising bond terms are diagonal at zero field") {
  for (const auto& term : build_bond_terms({Model::ising, 6, 1.3, 0.0, 0.0})) {
    Eigen::Matrix4cd off = term;
    off.diagonal().setZero();
    CHECK(max_abs(off) == 0.0);
  }
}

TEST_CASE("model parsing and validation") {
  CHECK(model_from_string("ising") == Model::ising);
  CHECK(model_from_string("xxz") == Model::xxz);
  CHECK(to_string(Model::xxz) == "xxz");
  CHECK_THROWS_AS(model_from_string("heisenberg"), std::invalid_argument);
  CHECK_THROWS_AS(build_bond_terms({Model::ising, 1, 1.0, 0.0, 0.0}),
                  std::invalid_argument);
  ModelSpec bad{Model::ising, 4, std::nan(""), 0.0, 0.0};
  CHECK_THROWS_AS(build_bond_terms(bad), std::invalid_argument);
}
