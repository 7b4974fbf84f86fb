#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "superkrylov/types.hpp"

namespace superkrylov::pauli {

/// Tensor-factor convention: qubit 0 is the leftmost Kronecker factor, so
/// qubit q acts on bit (n - 1 - q) of a computational-basis index.
inline constexpr int kMaxDenseQubits = 12;

struct PauliString {
  std::string label;  // one of I, X, Y, Z per qubit
  double coefficient = 0.0;
};

enum class HamiltonianClass {
  Class1KnownTop,   // highest energy known in closed form
  Class2Symmetric,  // spectrum symmetric about zero
  Generic,
};

std::string to_string(HamiltonianClass c);

using Edge = std::pair<int, int>;
using EdgeWeights = std::map<Edge, double>;

class PauliHamiltonian {
 public:
  PauliHamiltonian(int n_qubits, std::vector<PauliString> terms, HamiltonianClass class_tag,
                   std::optional<double> top_energy = std::nullopt);

  int n_qubits() const { return n_qubits_; }
  const std::vector<PauliString>& terms() const { return terms_; }
  HamiltonianClass class_tag() const { return class_tag_; }
  /// Highest eigenvalue, present only for class-1 Hamiltonians.
  std::optional<double> top_energy() const { return top_energy_; }

 private:
  int n_qubits_;
  std::vector<PauliString> terms_;
  HamiltonianClass class_tag_;
  std::optional<double> top_energy_;
};

/// Dense Hermitian matrix. Construction checks Hermiticity and stores the
/// exactly symmetrized part (A + A^dagger) / 2.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const MatrixXc& entries, double tolerance = 1e-10);

  Eigen::Index dim() const { return entries_.rows(); }
  const MatrixXc& entries() const { return entries_; }

 private:
  MatrixXc entries_;
};

/// Sum over couplings J_jk (X_j X_k + Y_j Y_k + Z_j Z_k), J_jk >= 0.
PauliHamiltonian build_heisenberg(int n, const EdgeWeights& couplings);

/// Nearest-neighbour open chain with J_{j,j+1} drawn uniformly from (0, 1).
PauliHamiltonian build_heisenberg_chain(int n, std::uint64_t seed);

/// Bipartite graph Hamiltonian on 2 * n_per_side qubits. Vertices
/// [0, n_per_side) form one side and [n_per_side, 2 * n_per_side) the other;
/// every edge must join the two sides.
PauliHamiltonian build_bipartite(int n_per_side, const EdgeWeights& jy, const EdgeWeights& jz,
                                 const std::map<int, double>& h);

/// Complete bipartite graph with Jy, Jz, h drawn uniformly from (-1, 1).
PauliHamiltonian build_random_bipartite(int n_per_side, std::uint64_t seed);

/// Y on the first side and Z on the second; anticommutes with every term of
/// a bipartite Hamiltonian.
PauliString bipartite_symmetry_string(int n_per_side);

MatrixXc assemble_string(const PauliString& term);
HermitianMatrix assemble_dense(const PauliHamiltonian& h);

/// Random Hermitian matrix with real and imaginary parts of the off-diagonal
/// entries, and the diagonal, uniform in (-1, 1).
HermitianMatrix random_hermitian(int dim, std::uint64_t seed);

}  // namespace superkrylov::pauli
