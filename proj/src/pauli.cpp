#include "superkrylov/pauli.hpp"

#include <bit>
#include <cmath>

#include "superkrylov/error.hpp"
#include "superkrylov/random.hpp"

namespace superkrylov::pauli {

std::string to_string(HamiltonianClass c) {
  switch (c) {
    case HamiltonianClass::Class1KnownTop: return "class1";
    case HamiltonianClass::Class2Symmetric: return "class2";
    case HamiltonianClass::Generic: return "generic";
  }
  return "generic";
}

PauliHamiltonian::PauliHamiltonian(int n_qubits, std::vector<PauliString> terms,
                                   HamiltonianClass class_tag, std::optional<double> top_energy)
    : n_qubits_(n_qubits), terms_(std::move(terms)), class_tag_(class_tag), top_energy_(top_energy) {
  if (n_qubits_ < 1) throw Error(ErrorCode::InvalidArgument, "qubit count must be positive");
  for (const auto& t : terms_) {
    if (static_cast<int>(t.label.size()) != n_qubits_)
      throw Error(ErrorCode::InvalidArgument, "Pauli label '" + t.label + "' has wrong length");
    if (t.label.find_first_not_of("IXYZ") != std::string::npos)
      throw Error(ErrorCode::InvalidArgument, "Pauli label '" + t.label + "' has invalid letters");
    if (!std::isfinite(t.coefficient))
      throw Error(ErrorCode::InvalidArgument, "non-finite Pauli coefficient");
  }
  if (class_tag_ == HamiltonianClass::Class1KnownTop && !top_energy_)
    throw Error(ErrorCode::MissingTopEnergy, "class-1 Hamiltonian needs its top energy");
}

HermitianMatrix::HermitianMatrix(const MatrixXc& entries, double tolerance) {
  if (entries.rows() != entries.cols())
    throw Error(ErrorCode::DimensionMismatch, "matrix is not square");
  if (entries.size() > 0 && hermiticity_defect(entries) > tolerance)
    throw Error(ErrorCode::NotHermitian, "max |A - A^dagger| exceeds tolerance");
  entries_ = 0.5 * (entries + entries.adjoint());
}

namespace {

std::string two_site_label(int n, int a, char pa, int b, char pb) {
  std::string label(static_cast<std::size_t>(n), 'I');
  label[static_cast<std::size_t>(a)] = pa;
  label[static_cast<std::size_t>(b)] = pb;
  return label;
}

void check_edge(const Edge& e, int n_vertices) {
  const auto [a, b] = e;
  if (a < 0 || b < 0 || a >= n_vertices || b >= n_vertices || a == b)
    throw Error(ErrorCode::IndexOutOfRange,
                "edge (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
}

}  // namespace

PauliHamiltonian build_heisenberg(int n, const EdgeWeights& couplings) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "Heisenberg model needs n >= 2");
  std::vector<PauliString> terms;
  double top = 0.0;
  for (const auto& [edge, coupling] : couplings) {
    const auto [j, k] = edge;
    if (j < 0 || k >= n || j >= k)
      throw Error(ErrorCode::IndexOutOfRange,
                  "coupling key (" + std::to_string(j) + "," + std::to_string(k) +
                      ") needs 0 <= j < k < n");
    if (!(coupling >= 0.0))
      throw Error(ErrorCode::NegativeCoupling, "J_jk must be nonnegative");
    if (coupling == 0.0) continue;
    for (char p : {'X', 'Y', 'Z'}) terms.push_back({two_site_label(n, j, p, k, p), coupling});
    top += coupling;
  }
  return PauliHamiltonian(n, std::move(terms), HamiltonianClass::Class1KnownTop, top);
}

PauliHamiltonian build_heisenberg_chain(int n, std::uint64_t seed) {
  Rng rng(seed);
  EdgeWeights couplings;
  for (int j = 0; j + 1 < n; ++j) {
    double c = rng.uniform();
    while (c == 0.0) c = rng.uniform();
    couplings[{j, j + 1}] = c;
  }
  return build_heisenberg(n, couplings);
}

PauliHamiltonian build_bipartite(int n_per_side, const EdgeWeights& jy, const EdgeWeights& jz,
                                 const std::map<int, double>& h) {
  if (n_per_side < 1) throw Error(ErrorCode::InvalidArgument, "need at least one vertex per side");
  const int n = 2 * n_per_side;
  auto side = [n_per_side](int v) { return v < n_per_side ? 0 : 1; };

  std::vector<PauliString> terms;
  auto add_edges = [&](const EdgeWeights& weights, char p) {
    for (const auto& [edge, w] : weights) {
      check_edge(edge, n);
      if (side(edge.first) == side(edge.second))
        throw Error(ErrorCode::NonBipartiteEdge, "edge (" + std::to_string(edge.first) + "," +
                                                     std::to_string(edge.second) +
                                                     ") lies within one side");
      if (w != 0.0) terms.push_back({two_site_label(n, edge.first, p, edge.second, p), w});
    }
  };
  add_edges(jy, 'Y');
  add_edges(jz, 'Z');
  for (const auto& [v, w] : h) {
    if (v < 0 || v >= n) throw Error(ErrorCode::IndexOutOfRange, "vertex out of range");
    if (w == 0.0) continue;
    std::string label(static_cast<std::size_t>(n), 'I');
    label[static_cast<std::size_t>(v)] = 'X';
    terms.push_back({label, w});
  }
  return PauliHamiltonian(n, std::move(terms), HamiltonianClass::Class2Symmetric);
}

PauliHamiltonian build_random_bipartite(int n_per_side, std::uint64_t seed) {
  Rng rng(seed);
  EdgeWeights jy, jz;
  std::map<int, double> h;
  for (int a = 0; a < n_per_side; ++a) {
    for (int b = n_per_side; b < 2 * n_per_side; ++b) {
      jy[{a, b}] = rng.uniform(-1.0, 1.0);
      jz[{a, b}] = rng.uniform(-1.0, 1.0);
    }
  }
  for (int v = 0; v < 2 * n_per_side; ++v) h[v] = rng.uniform(-1.0, 1.0);
  return build_bipartite(n_per_side, jy, jz, h);
}

PauliString bipartite_symmetry_string(int n_per_side) {
  std::string label(static_cast<std::size_t>(n_per_side), 'Y');
  label.append(static_cast<std::size_t>(n_per_side), 'Z');
  return {label, 1.0};
}

namespace {

void accumulate_string(const PauliString& term, MatrixXc& out) {
  const int n = static_cast<int>(term.label.size());
  const std::uint64_t dim = std::uint64_t{1} << n;

  // A Pauli string maps |x> to phase(x) |x ^ flip>.
  std::uint64_t flip = 0, z_mask = 0, y_mask = 0;
  for (int q = 0; q < n; ++q) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
    switch (term.label[static_cast<std::size_t>(q)]) {
      case 'X': flip |= bit; break;
      case 'Y': flip |= bit; y_mask |= bit; break;
      case 'Z': z_mask |= bit; break;
      default: break;
    }
  }
  const int n_y = std::popcount(y_mask);
  // Y|b> = i (-1)^b |1-b>, Z|b> = (-1)^b |b>.
  Complex base = term.coefficient;
  for (int i = 0; i < n_y % 4; ++i) base *= kI;

  for (std::uint64_t x = 0; x < dim; ++x) {
    const int sign_bits = std::popcount(x & (z_mask | y_mask));
    const Complex phase = (sign_bits % 2 == 0) ? base : -base;
    out(static_cast<Eigen::Index>(x ^ flip), static_cast<Eigen::Index>(x)) += phase;
  }
}

void check_dense_cap(int n) {
  if (n > kMaxDenseQubits)
    throw Error(ErrorCode::DimensionCap, "dense assembly capped at " +
                                             std::to_string(kMaxDenseQubits) + " qubits");
}

}  // namespace

MatrixXc assemble_string(const PauliString& term) {
  const int n = static_cast<int>(term.label.size());
  check_dense_cap(n);
  const Eigen::Index dim = Eigen::Index{1} << n;
  MatrixXc out = MatrixXc::Zero(dim, dim);
  accumulate_string(term, out);
  return out;
}

HermitianMatrix assemble_dense(const PauliHamiltonian& h) {
  check_dense_cap(h.n_qubits());
  const Eigen::Index dim = Eigen::Index{1} << h.n_qubits();
  MatrixXc out = MatrixXc::Zero(dim, dim);
  for (const auto& term : h.terms()) accumulate_string(term, out);
  return HermitianMatrix(out, 1e-12);
}

HermitianMatrix random_hermitian(int dim, std::uint64_t seed) {
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  Rng rng(seed);
  MatrixXc a(dim, dim);
  for (int j = 0; j < dim; ++j) {
    a(j, j) = rng.uniform(-1.0, 1.0);
    for (int k = j + 1; k < dim; ++k) {
      const double re = rng.uniform(-1.0, 1.0);
      const double im = rng.uniform(-1.0, 1.0);
      a(j, k) = Complex(re, im);
      a(k, j) = Complex(re, -im);
    }
  }
  return HermitianMatrix(a);
}

}  // namespace superkrylov::pauli
